#include "garmfit/segment.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>

#include "garmfit/maxflow.hpp"
#include "garmfit/morphology.hpp"

namespace garmfit {

namespace {

int scaled_radius(int r, int width, int reference) {
  return std::max(1, static_cast<int>(std::lround(double(r) * width / reference)));
}

// Full-covariance color GMM fit by k-means init plus a few EM sweeps.
// Everything is seeded and sequential so segmentation is reproducible.
class ColorGmm {
 public:
  void fit(const std::vector<Eigen::Vector3d>& pts, int k, uint64_t seed) {
    k = std::min<int>(k, static_cast<int>(pts.size()));
    comps_.assign(k, {});
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](size_t n) { return static_cast<size_t>(rng() % n); };

    // k-means++ seeding
    std::vector<Eigen::Vector3d> centers;
    centers.push_back(pts[uniform(pts.size())]);
    std::vector<double> d2(pts.size());
    while (static_cast<int>(centers.size()) < k) {
      double total = 0;
      for (size_t i = 0; i < pts.size(); ++i) {
        double best = std::numeric_limits<double>::max();
        for (const auto& c : centers)
          best = std::min(best, (pts[i] - c).squaredNorm());
        d2[i] = best;
        total += best;
      }
      if (total <= 0) {
        centers.push_back(pts[uniform(pts.size())]);
        continue;
      }
      double r = (rng() >> 11) * 0x1.0p-53 * total;
      size_t pick = 0;
      double acc = 0;
      for (size_t i = 0; i < pts.size(); ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
      centers.push_back(pts[pick]);
    }

    // Lloyd iterations
    std::vector<int> assign(pts.size(), 0);
    for (int it = 0; it < 10; ++it) {
      bool changed = false;
      for (size_t i = 0; i < pts.size(); ++i) {
        int best = 0;
        double bd = std::numeric_limits<double>::max();
        for (int c = 0; c < k; ++c) {
          double d = (pts[i] - centers[c]).squaredNorm();
          if (d < bd) {
            bd = d;
            best = c;
          }
        }
        if (assign[i] != best) {
          assign[i] = best;
          changed = true;
        }
      }
      std::vector<Eigen::Vector3d> sum(k, Eigen::Vector3d::Zero());
      std::vector<int> cnt(k, 0);
      for (size_t i = 0; i < pts.size(); ++i) {
        sum[assign[i]] += pts[i];
        ++cnt[assign[i]];
      }
      for (int c = 0; c < k; ++c)
        if (cnt[c] > 0) centers[c] = sum[c] / cnt[c];
      if (!changed) break;
    }

    init_from_hard_assignment(pts, assign, k);
    for (int it = 0; it < 5; ++it) em_step(pts);
  }

  double log_pdf(const Eigen::Vector3d& z) const {
    double m = -std::numeric_limits<double>::infinity();
    std::array<double, 16> lp{};
    int k = static_cast<int>(comps_.size());
    for (int c = 0; c < k; ++c) {
      lp[c] = comps_[c].log_weight + comps_[c].log_gauss(z);
      m = std::max(m, lp[c]);
    }
    if (!std::isfinite(m)) return -50.0;
    double s = 0;
    for (int c = 0; c < k; ++c) s += std::exp(lp[c] - m);
    return m + std::log(s);
  }

 private:
  struct Component {
    double log_weight = -std::numeric_limits<double>::infinity();
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Matrix3d inv_cov = Eigen::Matrix3d::Identity();
    double log_norm = 0;  // -0.5*log((2pi)^3 det)

    void set(double w, const Eigen::Vector3d& mu, Eigen::Matrix3d cov) {
      cov += 1e-5 * Eigen::Matrix3d::Identity();
      log_weight = w > 0 ? std::log(w) : -std::numeric_limits<double>::infinity();
      mean = mu;
      inv_cov = cov.inverse();
      log_norm = -0.5 * (3 * std::log(2 * M_PI) + std::log(cov.determinant()));
    }
    double log_gauss(const Eigen::Vector3d& z) const {
      Eigen::Vector3d d = z - mean;
      return log_norm - 0.5 * d.dot(inv_cov * d);
    }
  };

  void init_from_hard_assignment(const std::vector<Eigen::Vector3d>& pts,
                                 const std::vector<int>& assign, int k) {
    for (int c = 0; c < k; ++c) {
      Eigen::Vector3d mu = Eigen::Vector3d::Zero();
      int n = 0;
      for (size_t i = 0; i < pts.size(); ++i)
        if (assign[i] == c) {
          mu += pts[i];
          ++n;
        }
      if (n == 0) {
        comps_[c].set(0, Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity());
        continue;
      }
      mu /= n;
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (size_t i = 0; i < pts.size(); ++i)
        if (assign[i] == c) {
          Eigen::Vector3d d = pts[i] - mu;
          cov += d * d.transpose();
        }
      cov /= n;
      comps_[c].set(double(n) / pts.size(), mu, cov);
    }
  }

  void em_step(const std::vector<Eigen::Vector3d>& pts) {
    int k = static_cast<int>(comps_.size());
    std::vector<double> w_sum(k, 0.0);
    std::vector<Eigen::Vector3d> mu_sum(k, Eigen::Vector3d::Zero());
    std::vector<Eigen::Matrix3d> cov_sum(k, Eigen::Matrix3d::Zero());

    std::array<double, 16> lp{};
    for (const auto& z : pts) {
      double m = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        lp[c] = comps_[c].log_weight + comps_[c].log_gauss(z);
        m = std::max(m, lp[c]);
      }
      if (!std::isfinite(m)) continue;
      double s = 0;
      for (int c = 0; c < k; ++c) s += std::exp(lp[c] - m);
      for (int c = 0; c < k; ++c) {
        double r = std::exp(lp[c] - m) / s;
        w_sum[c] += r;
        mu_sum[c] += r * z;
        cov_sum[c] += r * z * z.transpose();
      }
    }
    for (int c = 0; c < k; ++c) {
      if (w_sum[c] < 1e-9) {
        comps_[c].set(0, Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity());
        continue;
      }
      Eigen::Vector3d mu = mu_sum[c] / w_sum[c];
      Eigen::Matrix3d cov = cov_sum[c] / w_sum[c] - mu * mu.transpose();
      comps_[c].set(w_sum[c] / pts.size(), mu, cov);
    }
  }

  std::vector<Component> comps_;
};

Eigen::Vector3d pixel_color(const Image& img, int i, int j) {
  return {img.at(i, j, 0), img.at(i, j, 1), img.at(i, j, 2)};
}

}  // namespace

Trimap make_trimap(const BinaryMask& rough, const SegConfig& cfg) {
  int close_r = scaled_radius(cfg.close_radius, rough.width, cfg.reference_width);
  int erode_r = scaled_radius(cfg.erode_radius, rough.width, cfg.reference_width);
  int dilate_r = scaled_radius(cfg.dilate_radius, rough.width, cfg.reference_width);

  BinaryMask closed = morphology(rough, MorphOp::close, close_r);
  BinaryMask core = morphology(closed, MorphOp::erode, erode_r);
  BinaryMask outer = morphology(closed, MorphOp::dilate, dilate_r);

  Trimap tri(rough.width, rough.height);
  for (int i = 0; i < rough.height; ++i)
    for (int j = 0; j < rough.width; ++j) {
      TrimapLabel l;
      if (core.at(i, j))
        l = TrimapLabel::abs_fg;
      else if (closed.at(i, j))
        l = TrimapLabel::prob_fg;
      else if (outer.at(i, j))
        l = TrimapLabel::prob_bg;
      else
        l = TrimapLabel::abs_bg;
      tri.set(i, j, l);
    }
  if (cfg.exclusion) {
    for (int i = 0; i < rough.height; ++i)
      for (int j = 0; j < rough.width; ++j)
        if (cfg.exclusion->at(i, j)) tri.set(i, j, TrimapLabel::abs_bg);
  }
  return tri;
}

BinaryMask segment(const Image& image, const SegConfig& cfg) {
  Image gray = image.to_gray();
  BinaryMask rough(image.width, image.height);
  size_t fg_count = 0;
  for (int i = 0; i < image.height; ++i)
    for (int j = 0; j < image.width; ++j) {
      bool fg = gray.at(i, j) <= cfg.background_threshold;
      rough.set(i, j, fg);
      fg_count += fg;
    }
  if (fg_count == 0)
    throw input_error("segment: no foreground (image entirely above threshold)");

  Trimap tri = make_trimap(rough, cfg);

  BinaryMask labels(image.width, image.height);
  for (int i = 0; i < image.height; ++i)
    for (int j = 0; j < image.width; ++j) {
      TrimapLabel l = tri.at(i, j);
      labels.set(i, j, l == TrimapLabel::abs_fg || l == TrimapLabel::prob_fg);
    }
  if (!cfg.refine) return labels;
  if (image.channels != 3)
    throw input_error("segment: GMM refinement requires an RGB image");

  const int w = image.width, h = image.height;
  const size_t npix = static_cast<size_t>(w) * h;

  // contrast scale over 4-neighbor pairs
  double sum_d2 = 0;
  size_t pairs = 0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      Eigen::Vector3d z = pixel_color(image, i, j);
      if (j + 1 < w) {
        sum_d2 += (z - pixel_color(image, i, j + 1)).squaredNorm();
        ++pairs;
      }
      if (i + 1 < h) {
        sum_d2 += (z - pixel_color(image, i + 1, j)).squaredNorm();
        ++pairs;
      }
    }
  double mean_d2 = pairs ? sum_d2 / pairs : 0.0;
  double beta_c = mean_d2 > 0 ? 1.0 / (2.0 * mean_d2) : 0.0;

  const double hard = 1e9;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    std::vector<Eigen::Vector3d> fg_pts, bg_pts;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        if (labels.at(i, j))
          fg_pts.push_back(pixel_color(image, i, j));
        else
          bg_pts.push_back(pixel_color(image, i, j));
      }
    if (fg_pts.empty() || bg_pts.empty()) break;

    ColorGmm fg_gmm, bg_gmm;
    fg_gmm.fit(fg_pts, cfg.gmm_components, 0x9a7fu);
    bg_gmm.fit(bg_pts, cfg.gmm_components, 0x517bu);

    Maxflow graph(static_cast<int>(npix));
    auto id = [w](int i, int j) { return i * w + j; };
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        TrimapLabel l = tri.at(i, j);
        if (l == TrimapLabel::abs_fg) {
          graph.add_terminal(id(i, j), hard, 0);
        } else if (l == TrimapLabel::abs_bg) {
          graph.add_terminal(id(i, j), 0, hard);
        } else {
          Eigen::Vector3d z = pixel_color(image, i, j);
          // staying in the source tree means foreground
          graph.add_terminal(id(i, j), -bg_gmm.log_pdf(z), -fg_gmm.log_pdf(z));
        }
        Eigen::Vector3d z = pixel_color(image, i, j);
        if (j + 1 < w) {
          double cap = cfg.gamma *
                       std::exp(-beta_c * (z - pixel_color(image, i, j + 1)).squaredNorm());
          graph.add_edge(id(i, j), id(i, j + 1), cap, cap);
        }
        if (i + 1 < h) {
          double cap = cfg.gamma *
                       std::exp(-beta_c * (z - pixel_color(image, i + 1, j)).squaredNorm());
          graph.add_edge(id(i, j), id(i + 1, j), cap, cap);
        }
      }
    graph.solve();
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        TrimapLabel l = tri.at(i, j);
        if (l == TrimapLabel::abs_fg)
          labels.set(i, j, true);
        else if (l == TrimapLabel::abs_bg)
          labels.set(i, j, false);
        else
          labels.set(i, j, graph.in_source_side(id(i, j)));
      }
  }
  return labels;
}

}  // namespace garmfit
