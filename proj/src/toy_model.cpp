#include "garmfit/toy_model.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace garmfit {

using nlohmann::json;

// Coordinate frame: x right, y down (image-like), z away from the camera.
// The body template is authored in its A-pose, so the stored a_pose is zero.

namespace {

struct BodyMesh {
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> faces;
};

// ring stack around an axis
void add_tube(BodyMesh& mesh, const std::vector<Eigen::Vector3d>& centers,
              const std::vector<double>& rad_a, const std::vector<double>& rad_b,
              const Eigen::Vector3d& axis, int segments) {
  int base = static_cast<int>(mesh.verts.size());
  Eigen::Vector3d d = axis.normalized();
  Eigen::Vector3d u = d.cross(Eigen::Vector3d::UnitZ());
  if (u.norm() < 1e-6) u = d.cross(Eigen::Vector3d::UnitX());
  u.normalize();
  Eigen::Vector3d w = d.cross(u);

  const int rings = static_cast<int>(centers.size());
  for (int r = 0; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      double ang = 2.0 * M_PI * s / segments;
      mesh.verts.push_back(centers[r] + rad_a[r] * std::cos(ang) * u +
                           rad_b[r] * std::sin(ang) * w);
    }
  for (int r = 0; r + 1 < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      int a = base + r * segments + s;
      int b = base + r * segments + (s + 1) % segments;
      int c = a + segments, d2 = b + segments;
      mesh.faces.push_back({a, b, d2});
      mesh.faces.push_back({a, d2, c});
    }
}

struct Bone {
  Eigen::Vector3d head, tail;
};

double point_segment_dist(const Eigen::Vector3d& p, const Bone& b) {
  Eigen::Vector3d d = b.tail - b.head;
  double t = d.squaredNorm() > 0 ? (p - b.head).dot(d) / d.squaredNorm() : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (b.head + t * d)).norm();
}

// ---- garment pattern sheets ----
//
// A garment is built from a flat 2-D pattern instantiated twice (front sheet
// bulging toward the camera, back sheet away), welded along stitched outline
// vertices. Openings (neck, hem, cuffs, waist) stay unwelded and become the
// boundary rings.

struct SheetSpec {
  std::vector<Eigen::Vector2d> pat;        // pattern positions (x, y)
  std::vector<double> bulge;               // z offset magnitude per vertex
  std::vector<uint8_t> stitched;
  std::vector<std::array<int, 4>> quads;   // cells in pattern order
  std::vector<std::vector<int>> openings;  // ordered chains, stitched endpoints
  int top_ring_opening = -1;
};

struct BuiltGarment {
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> faces;
  std::vector<int> islands;
  std::vector<std::array<Eigen::Vector2d, 3>> uv;
  std::vector<std::vector<int>> rings;
  std::vector<int> top_ring;
};

BuiltGarment build_sheets(const SheetSpec& spec) {
  BuiltGarment g;
  const int np = static_cast<int>(spec.pat.size());
  std::vector<int> front_id(np, -1), back_id(np, -1);

  for (int i = 0; i < np; ++i) {
    const auto& p = spec.pat[i];
    if (spec.stitched[i]) {
      front_id[i] = back_id[i] = static_cast<int>(g.verts.size());
      g.verts.emplace_back(p.x(), p.y(), 0.0);
    } else {
      front_id[i] = static_cast<int>(g.verts.size());
      g.verts.emplace_back(p.x(), p.y(), -spec.bulge[i]);
      back_id[i] = static_cast<int>(g.verts.size());
      g.verts.emplace_back(p.x(), p.y(), spec.bulge[i]);
    }
  }

  // pattern bounding box drives both island UV maps
  Eigen::Vector2d lo = spec.pat[0], hi = spec.pat[0];
  for (const auto& p : spec.pat) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Eigen::Vector2d span = hi - lo;
  auto uv_front = [&](const Eigen::Vector2d& p) -> Eigen::Vector2d {
    return {0.02 + 0.46 * (p.x() - lo.x()) / span.x(),
            0.02 + 0.96 * (p.y() - lo.y()) / span.y()};
  };
  auto uv_back = [&](const Eigen::Vector2d& p) -> Eigen::Vector2d {
    return {0.98 - 0.46 * (p.x() - lo.x()) / span.x(),
            0.02 + 0.96 * (p.y() - lo.y()) / span.y()};
  };

  auto add_face = [&](int pa, int pb, int pc, bool front) {
    std::array<int, 3> ids;
    std::array<Eigen::Vector2d, 3> uvs;
    const std::vector<int>& map = front ? front_id : back_id;
    std::array<int, 3> pidx = {pa, pb, pc};
    for (int k = 0; k < 3; ++k) {
      ids[k] = map[pidx[k]];
      uvs[k] = front ? uv_front(spec.pat[pidx[k]]) : uv_back(spec.pat[pidx[k]]);
    }
    // orient: front faces toward -z (camera side), back toward +z
    Eigen::Vector3d n = (g.verts[ids[1]] - g.verts[ids[0]])
                            .cross(g.verts[ids[2]] - g.verts[ids[0]]);
    bool flip = front ? (n.z() > 0) : (n.z() < 0);
    if (flip) {
      std::swap(ids[1], ids[2]);
      std::swap(uvs[1], uvs[2]);
    }
    g.faces.push_back(ids);
    g.islands.push_back(front ? 0 : 1);
    g.uv.push_back(uvs);
  };

  for (const auto& q : spec.quads) {
    add_face(q[0], q[1], q[2], true);
    add_face(q[0], q[2], q[3], true);
    add_face(q[0], q[2], q[1], false);
    add_face(q[0], q[3], q[2], false);
  }

  for (const auto& chain : spec.openings) {
    std::vector<int> ring;
    for (int p : chain) ring.push_back(front_id[p]);
    for (int i = static_cast<int>(chain.size()) - 2; i >= 1; --i)
      ring.push_back(back_id[chain[i]]);
    g.rings.push_back(ring);
  }
  if (spec.top_ring_opening >= 0) g.top_ring = g.rings[spec.top_ring_opening];
  return g;
}

json garment_to_json(const BuiltGarment& g, const std::string& cls,
                     const std::vector<int>& active_joints, const BodyMesh& body) {
  // tie each garment vertex to its nearest body vertex; the displacement
  // makes the bind exact
  std::vector<int> ids(g.verts.size());
  std::vector<Eigen::Vector3d> disp(g.verts.size());
  for (size_t i = 0; i < g.verts.size(); ++i) {
    int best = 0;
    double bd = std::numeric_limits<double>::max();
    for (size_t b = 0; b < body.verts.size(); ++b) {
      double d = (g.verts[i] - body.verts[b]).squaredNorm();
      if (d < bd) {
        bd = d;
        best = static_cast<int>(b);
      }
    }
    ids[i] = best;
    disp[i] = g.verts[i] - body.verts[best];
  }

  json jg;
  jg["class"] = cls;
  jg["vertex_ids"] = ids;
  json jd = json::array();
  for (const auto& d : disp) jd.push_back({d.x(), d.y(), d.z()});
  jg["displacements"] = jd;
  json jf = json::array();
  for (const auto& f : g.faces) jf.push_back({f[0], f[1], f[2]});
  jg["faces"] = jf;
  json juv = json::array();
  for (const auto& tri : g.uv)
    juv.push_back({{tri[0].x(), tri[0].y()},
                   {tri[1].x(), tri[1].y()},
                   {tri[2].x(), tri[2].y()}});
  jg["uv"] = juv;
  json jis = json::array();
  for (int l : g.islands) jis.push_back(l == 0 ? "front" : "back");
  jg["islands"] = jis;
  jg["boundary_rings"] = g.rings;
  jg["top_ring"] = g.top_ring;
  jg["active_joints"] = active_joints;
  return jg;
}

SheetSpec tshirt_spec() {
  SheetSpec s;
  const int nc = 12, nr = 12, armhole_rows = 3, sleeve_len = 4;
  const double x0 = -0.19, xs = 0.38 / nc;
  const double y0 = -0.50, ys = 0.64 / nr;

  std::map<std::pair<int, int>, int> torso;  // (row, col) -> pattern id
  for (int r = 0; r <= nr; ++r)
    for (int c = 0; c <= nc; ++c) {
      double x = x0 + c * xs, y = y0 + r * ys;
      torso[{r, c}] = static_cast<int>(s.pat.size());
      s.pat.emplace_back(x, y);
      s.bulge.push_back(0.105 *
                        std::sqrt(std::max(0.0, 1.0 - (x / 0.21) * (x / 0.21))));
      bool shoulder = (r == 0) && std::abs(x) >= 0.08;
      bool side_seam = (c == 0 || c == nc) && r >= armhole_rows;
      s.stitched.push_back(shoulder || side_seam);
    }
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nc; ++c)
      s.quads.push_back({torso[{r, c}], torso[{r, c + 1}], torso[{r + 1, c + 1}],
                         torso[{r + 1, c}]});

  // sleeves: parallelogram strips hung off the top of each side edge
  const double step = 0.055;
  for (int side = 0; side < 2; ++side) {
    double sx = side == 0 ? 1.0 : -1.0;
    Eigen::Vector2d dir(sx * std::sin(40.0 * M_PI / 180.0),
                        std::cos(40.0 * M_PI / 180.0));
    int root_col = side == 0 ? nc : 0;
    std::map<std::pair<int, int>, int> sv;  // (t, k)
    for (int t = 0; t <= armhole_rows; ++t) sv[{t, 0}] = torso[{t, root_col}];
    for (int t = 0; t <= armhole_rows; ++t)
      for (int k = 1; k <= sleeve_len; ++k) {
        Eigen::Vector2d p =
            s.pat[torso[{t, root_col}]] + double(k) * step * dir;
        sv[{t, k}] = static_cast<int>(s.pat.size());
        s.pat.emplace_back(p);
        double tf = double(t) / armhole_rows - 0.5;
        s.bulge.push_back(
            0.06 * std::sqrt(std::max(0.0, 1.0 - (tf / 0.62) * (tf / 0.62))));
        s.stitched.push_back(t == 0 || t == armhole_rows);  // upper/lower seams
      }
    for (int t = 0; t < armhole_rows; ++t)
      for (int k = 0; k < sleeve_len; ++k)
        s.quads.push_back(
            {sv[{t, k}], sv[{t, k + 1}], sv[{t + 1, k + 1}], sv[{t + 1, k}]});
    // cuff opening
    std::vector<int> cuff;
    for (int t = 0; t <= armhole_rows; ++t) cuff.push_back(sv[{t, sleeve_len}]);
    s.openings.push_back(cuff);
  }

  // neck: open run of the top row between the shoulder seams
  std::vector<int> neck;
  for (int c = 3; c <= 9; ++c) neck.push_back(torso[{0, c}]);
  s.openings.push_back(neck);

  // hem: full bottom row
  std::vector<int> hem;
  for (int c = 0; c <= nc; ++c) hem.push_back(torso[{nr, c}]);
  s.openings.push_back(hem);
  return s;
}

SheetSpec trousers_spec(int rows, double leg_bulge_top, double leg_bulge_bottom) {
  SheetSpec s;
  const int nc = 10;
  const double x0 = -0.19, xs = 0.38 / nc;
  const double y0 = 0.0, ys = 0.05;
  const int notch_row = 4;  // crotch height

  std::map<std::pair<int, int>, int> grid;
  // vertex dropped when every incident cell is removed
  auto exists = [&](int r, int c) { return !(c == 5 && r >= notch_row + 1); };
  auto cell_exists = [&](int r, int c) {
    return !((c == 4 || c == 5) && r >= notch_row);
  };

  for (int r = 0; r <= rows; ++r)
    for (int c = 0; c <= nc; ++c) {
      if (!exists(r, c)) continue;
      double x = x0 + c * xs, y = y0 + r * ys;
      grid[{r, c}] = static_cast<int>(s.pat.size());
      s.pat.emplace_back(x, y);

      double b;
      if (r < notch_row) {
        b = 0.095 * std::sqrt(std::max(0.0, 1.0 - (x / 0.21) * (x / 0.21)));
      } else {
        double center = x >= 0 ? 0.114 : -0.114;
        double t = double(r - notch_row) / std::max(1, rows - notch_row);
        double bb = leg_bulge_top + t * (leg_bulge_bottom - leg_bulge_top);
        double dx = (x - center) / 0.085;
        b = bb * std::sqrt(std::max(0.0, 1.0 - dx * dx));
      }
      s.bulge.push_back(b);

      bool side = (c == 0 || c == nc);
      bool notch_side = (c == 4 || c == 6) && r >= notch_row;
      bool notch_top = r == notch_row && (c == 4 || c == 5 || c == 6);
      s.stitched.push_back(side || notch_side || notch_top);
    }

  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < nc; ++c) {
      if (!cell_exists(r, c)) continue;
      s.quads.push_back({grid[{r, c}], grid[{r, c + 1}], grid[{r + 1, c + 1}],
                         grid[{r + 1, c}]});
    }

  // waist (top ring)
  std::vector<int> waist;
  for (int c = 0; c <= nc; ++c) waist.push_back(grid[{0, c}]);
  s.openings.push_back(waist);
  s.top_ring_opening = 0;

  // leg cuffs
  std::vector<int> right, left;
  for (int c = 0; c <= 4; ++c) right.push_back(grid[{rows, c}]);
  for (int c = 6; c <= nc; ++c) left.push_back(grid[{rows, c}]);
  s.openings.push_back(right);
  s.openings.push_back(left);
  return s;
}

}  // namespace

json build_toy_model_json() {
  BodyMesh body;

  // torso
  {
    std::vector<Eigen::Vector3d> centers;
    std::vector<double> ra, rb;
    for (int k = 0; k <= 12; ++k) {
      double y = 0.08 - 0.05 * k;
      centers.emplace_back(0, y, 0);
      double t = k / 12.0;
      double rx = 0.155 + 0.02 * std::sin(t * M_PI);  // slight chest swell
      ra.push_back(rx);
      rb.push_back(0.085);
    }
    add_tube(body, centers, ra, rb, Eigen::Vector3d(0, -1, 0), 16);
  }
  // head
  {
    std::vector<Eigen::Vector3d> centers;
    std::vector<double> ra, rb;
    for (int k = 0; k <= 3; ++k) {
      centers.emplace_back(0, -0.56 - 0.05 * k, 0);
      double r = k == 3 ? 0.055 : 0.080;
      ra.push_back(r);
      rb.push_back(r);
    }
    add_tube(body, centers, ra, rb, Eigen::Vector3d(0, -1, 0), 10);
  }
  // arms
  const Eigen::Vector3d arm_dir_l(std::sin(40.0 * M_PI / 180.0),
                                  std::cos(40.0 * M_PI / 180.0), 0);
  for (int side = 0; side < 2; ++side) {
    double sx = side == 0 ? 1.0 : -1.0;
    Eigen::Vector3d shoulder(sx * 0.195, -0.47, 0);
    Eigen::Vector3d dir(sx * arm_dir_l.x(), arm_dir_l.y(), 0);
    std::vector<Eigen::Vector3d> centers;
    std::vector<double> ra, rb;
    for (int k = 0; k <= 7; ++k) {
      double sdist = 0.02 + 0.06 * k;
      centers.push_back(shoulder + sdist * dir);
      double r = 0.048 - 0.014 * k / 7.0;
      ra.push_back(r);
      rb.push_back(r);
    }
    add_tube(body, centers, ra, rb, dir, 8);
  }
  // legs
  for (int side = 0; side < 2; ++side) {
    double sx = side == 0 ? 1.0 : -1.0;
    Eigen::Vector3d hip(sx * 0.095, 0.10, 0), ankle(sx * 0.105, 0.82, 0);
    std::vector<Eigen::Vector3d> centers;
    std::vector<double> ra, rb;
    for (int k = 0; k <= 9; ++k) {
      double t = k / 9.0;
      centers.push_back(hip + t * (ankle - hip));
      double r = 0.072 - 0.025 * t;
      ra.push_back(r);
      rb.push_back(r);
    }
    add_tube(body, centers, ra, rb, ankle - hip, 10);
  }

  const int n = static_cast<int>(body.verts.size());

  std::vector<Eigen::Vector3d> joint_pos = {
      {0, 0.03, 0},       // 0 pelvis (root)
      {0.095, 0.08, 0},   // 1 left hip
      {-0.095, 0.08, 0},  // 2 right hip
      {0.10, 0.46, 0},    // 3 left knee
      {-0.10, 0.46, 0},   // 4 right knee
      {0, -0.32, 0},      // 5 chest
      {0.195, -0.47, 0},  // 6 left shoulder
      {-0.195, -0.47, 0}  // 7 right shoulder
  };
  std::vector<int> parents = {-1, 0, 0, 1, 2, 0, 5, 5};
  std::vector<Bone> bones = {
      {{0, 0.03, 0}, {0, -0.32, 0}},
      {{0.095, 0.08, 0}, {0.10, 0.46, 0}},
      {{-0.095, 0.08, 0}, {-0.10, 0.46, 0}},
      {{0.10, 0.46, 0}, {0.105, 0.82, 0}},
      {{-0.10, 0.46, 0}, {-0.105, 0.82, 0}},
      {{0, -0.32, 0}, {0, -0.71, 0}},
      {{0.195, -0.47, 0}, Eigen::Vector3d(0.195, -0.47, 0) + 0.44 * arm_dir_l},
      {{-0.195, -0.47, 0},
       Eigen::Vector3d(-0.195, -0.47, 0) +
           0.44 * Eigen::Vector3d(-arm_dir_l.x(), arm_dir_l.y(), 0)}};
  const int joint_count = static_cast<int>(joint_pos.size());

  // regressor: uniform weights over the 6 nearest vertices per joint
  Eigen::MatrixXd regressor = Eigen::MatrixXd::Zero(joint_count, n);
  for (int j = 0; j < joint_count; ++j) {
    std::vector<std::pair<double, int>> d;
    for (int v = 0; v < n; ++v)
      d.push_back({(body.verts[v] - joint_pos[j]).squaredNorm(), v});
    std::partial_sort(d.begin(), d.begin() + 6, d.end());
    for (int k = 0; k < 6; ++k) regressor(j, d[k].second) = 1.0 / 6.0;
  }

  // skin weights: softmax over distance to bone segments
  const double sigma = 0.055;
  Eigen::MatrixXd weights(n, joint_count);
  for (int v = 0; v < n; ++v) {
    double sum = 0;
    for (int j = 0; j < joint_count; ++j) {
      double dist = point_segment_dist(body.verts[v], bones[j]);
      double a = std::exp(-dist * dist / (sigma * sigma));
      weights(v, j) = a;
      sum += a;
    }
    for (int j = 0; j < joint_count; ++j) weights(v, j) /= sum;
  }

  // shape axes: lateral girth and vertical stretch about chest height
  std::vector<Eigen::Vector3d> dir_width(n), dir_length(n);
  for (int v = 0; v < n; ++v) {
    const auto& p = body.verts[v];
    dir_width[v] = 0.12 * Eigen::Vector3d(p.x(), 0, p.z());
    dir_length[v] = 0.10 * Eigen::Vector3d(0, p.y() + 0.20, 0);
  }

  json jb;
  {
    json jv = json::array();
    for (const auto& v : body.verts) jv.push_back({v.x(), v.y(), v.z()});
    jb["vertices"] = jv;
    json jf = json::array();
    for (const auto& f : body.faces) jf.push_back({f[0], f[1], f[2]});
    jb["faces"] = jf;
    json jsd = json::array();
    for (const auto* dirs : {&dir_width, &dir_length}) {
      json jd = json::array();
      for (const auto& d : *dirs) jd.push_back({d.x(), d.y(), d.z()});
      jsd.push_back(jd);
    }
    jb["shape_dirs"] = jsd;
    json jr = json::array();
    for (int j = 0; j < joint_count; ++j) {
      json row = json::array();
      for (int v = 0; v < n; ++v) row.push_back(regressor(j, v));
      jr.push_back(row);
    }
    jb["joint_regressor"] = jr;
    jb["kinematic_tree"] = parents;
    json jw = json::array();
    for (int v = 0; v < n; ++v) {
      json row = json::array();
      for (int j = 0; j < joint_count; ++j) row.push_back(weights(v, j));
      jw.push_back(row);
    }
    jb["skin_weights"] = jw;
    jb["shape_covariance"] = {{2.0, 0.0}, {0.0, 1.5}};
    jb["a_pose"] = std::vector<double>(3 * joint_count, 0.0);
  }

  json garments = json::array();
  garments.push_back(
      garment_to_json(build_sheets(tshirt_spec()), "tshirt", {6, 7}, body));
  garments.push_back(garment_to_json(build_sheets(trousers_spec(8, 0.080, 0.080)),
                                     "shorts", {1, 2}, body));
  garments.push_back(garment_to_json(build_sheets(trousers_spec(16, 0.080, 0.060)),
                                     "pants", {1, 2, 3, 4}, body));

  json out;
  out["body"] = jb;
  out["garments"] = garments;
  return out;
}

LoadedModel build_toy_model() {
  return load_model_from_json_text(build_toy_model_json().dump());
}

}  // namespace garmfit
