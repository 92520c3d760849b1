#include "garmfit/distance.hpp"

#include <cmath>
#include <limits>

namespace garmfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared-distance transform of a sampled function f (lower envelope of
// parabolas rooted at (q, f[q])). Positions with f = inf carry no parabola.
void dt_1d(const std::vector<double>& f, std::vector<double>& d,
           std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int first = 0;
  while (first < n && f[first] == kInf) ++first;
  if (first == n) {
    for (int q = 0; q < n; ++q) d[q] = kInf;
    return;
  }
  int k = 0;
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = first + 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const BinaryMask& mask,
                                               DistanceOf of) {
  const int w = mask.width, h = mask.height;
  const bool want = of == DistanceOf::foreground;

  std::vector<double> grid(static_cast<size_t>(w) * h);
  bool any = false;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      bool in_set = mask.at(i, j) == want;
      any |= in_set;
      grid[static_cast<size_t>(i) * w + j] = in_set ? 0.0 : kInf;
    }
  if (!any)
    throw input_error(std::string("distance_transform: ") +
                      (want ? "foreground" : "background") + " set is empty");

  const int nmax = std::max(w, h);
  std::vector<double> z(nmax + 1);
  std::vector<int> v(nmax);

  // columns first, then rows
  std::vector<double> fc(h), dc(h);
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < h; ++i) fc[i] = grid[static_cast<size_t>(i) * w + j];
    dt_1d(fc, dc, v, z);
    for (int i = 0; i < h; ++i) grid[static_cast<size_t>(i) * w + j] = dc[i];
  }
  std::vector<double> fr(w), dr(w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) fr[j] = grid[static_cast<size_t>(i) * w + j];
    dt_1d(fr, dr, v, z);
    for (int j = 0; j < w; ++j) grid[static_cast<size_t>(i) * w + j] = dr[j];
  }
  return grid;
}

DistanceField distance_transform(const BinaryMask& mask, DistanceOf of) {
  DistanceField out;
  out.width = mask.width;
  out.height = mask.height;
  out.dist = squared_distance_transform(mask, of);
  for (double& v : out.dist) v = std::sqrt(v);
  return out;
}

namespace {

// (1,4,6,4,1)/16, replicate borders.
void blur_rows(const Image& src, Image& dst) {
  static const float k[5] = {1.f / 16, 4.f / 16, 6.f / 16, 4.f / 16, 1.f / 16};
  for (int i = 0; i < src.height; ++i)
    for (int j = 0; j < src.width; ++j)
      for (int c = 0; c < src.channels; ++c) {
        float acc = 0.f;
        for (int t = -2; t <= 2; ++t) {
          int jj = std::clamp(j + t, 0, src.width - 1);
          acc += k[t + 2] * src.at(i, jj, c);
        }
        dst.at(i, j, c) = acc;
      }
}

void blur_cols(const Image& src, Image& dst) {
  static const float k[5] = {1.f / 16, 4.f / 16, 6.f / 16, 4.f / 16, 1.f / 16};
  for (int i = 0; i < src.height; ++i)
    for (int j = 0; j < src.width; ++j)
      for (int c = 0; c < src.channels; ++c) {
        float acc = 0.f;
        for (int t = -2; t <= 2; ++t) {
          int ii = std::clamp(i + t, 0, src.height - 1);
          acc += k[t + 2] * src.at(ii, j, c);
        }
        dst.at(i, j, c) = acc;
      }
}

Image blur_and_decimate(const Image& src) {
  Image tmp(src.width, src.height, src.channels);
  Image blurred(src.width, src.height, src.channels);
  blur_rows(src, tmp);
  blur_cols(tmp, blurred);
  int w2 = (src.width + 1) / 2, h2 = (src.height + 1) / 2;
  Image out(w2, h2, src.channels);
  for (int i = 0; i < h2; ++i)
    for (int j = 0; j < w2; ++j)
      for (int c = 0; c < src.channels; ++c)
        out.at(i, j, c) = blurred.at(2 * i, 2 * j, c);
  return out;
}

}  // namespace

Pyramid gaussian_pyramid(const Image& img, int levels) {
  if (levels < 1) throw input_error("gaussian_pyramid: levels must be >= 1");
  if ((1 << (levels - 1)) > std::min(img.width, img.height))
    throw input_error("gaussian_pyramid: too many levels for image size");
  Pyramid p;
  p.levels.push_back(img);
  for (int l = 1; l < levels; ++l)
    p.levels.push_back(blur_and_decimate(p.levels.back()));
  return p;
}

std::vector<BinaryMask> mask_pyramid(const BinaryMask& mask, int levels) {
  Image ind(mask.width, mask.height, 1);
  for (int i = 0; i < mask.height; ++i)
    for (int j = 0; j < mask.width; ++j) ind.at(i, j) = mask.at(i, j) ? 1.f : 0.f;
  Pyramid p = gaussian_pyramid(ind, levels);

  std::vector<BinaryMask> out;
  for (const Image& lvl : p.levels) {
    BinaryMask m(lvl.width, lvl.height);
    size_t n = 0;
    for (int i = 0; i < lvl.height; ++i)
      for (int j = 0; j < lvl.width; ++j) {
        bool fg = lvl.at(i, j) >= 0.5f;
        m.set(i, j, fg);
        n += fg;
      }
    if (n == 0 && !out.empty()) break;  // drop levels whose foreground vanished
    out.push_back(std::move(m));
  }
  return out;
}

SilhouettePyramid build_silhouette_pyramid(const BinaryMask& mask, int levels) {
  SilhouettePyramid pyr;
  for (BinaryMask& m : mask_pyramid(mask, levels)) {
    SilhouettePyramid::Level lvl;
    lvl.fg = distance_transform(m, DistanceOf::foreground);
    // an all-foreground level has no background set; treat its bg field as zero
    bool has_bg = m.count() < static_cast<size_t>(m.width) * m.height;
    if (has_bg) {
      lvl.bg = distance_transform(m, DistanceOf::background);
    } else {
      lvl.bg.width = m.width;
      lvl.bg.height = m.height;
      lvl.bg.dist.assign(static_cast<size_t>(m.width) * m.height, 0.0);
    }
    lvl.mask = std::move(m);
    pyr.levels.push_back(std::move(lvl));
  }
  return pyr;
}

}  // namespace garmfit
