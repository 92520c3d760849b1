#include "garmfit/model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "garmfit/image.hpp"

namespace garmfit {

using nlohmann::json;

GarmentClass parse_garment_class(const std::string& s) {
  if (s == "tshirt") return GarmentClass::tshirt;
  if (s == "shorts") return GarmentClass::shorts;
  if (s == "pants") return GarmentClass::pants;
  throw input_error("unknown garment class: " + s);
}

std::string to_string(GarmentClass c) {
  switch (c) {
    case GarmentClass::tshirt: return "tshirt";
    case GarmentClass::shorts: return "shorts";
    case GarmentClass::pants: return "pants";
  }
  return "?";
}

std::vector<int> default_active_joints(GarmentClass c) {
  switch (c) {
    case GarmentClass::tshirt: return {13, 14, 16, 17};  // shoulder joints
    case GarmentClass::shorts: return {1, 2};            // hips
    case GarmentClass::pants: return {1, 2, 3, 4};       // hips and knees
  }
  return {};
}

const GarmentTemplate& LoadedModel::garment(GarmentClass c) const {
  for (const auto& g : garments)
    if (g.garment_class == c) return g;
  throw input_error("model has no garment of class " + to_string(c));
}

namespace {

Eigen::MatrixXd parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw input_error("model: " + field + " must be a 2-D array");
  size_t rows = j.size(), cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols)
      throw input_error("model: " + field + " has ragged rows");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Verts parse_verts(const json& j, const std::string& field) {
  Eigen::MatrixXd m = parse_matrix(j, field);
  if (m.cols() != 3) throw input_error("model: " + field + " must be k x 3");
  return m;
}

Faces parse_faces(const json& j, const std::string& field) {
  Eigen::MatrixXd m = parse_matrix(j, field);
  if (m.cols() != 3) throw input_error("model: " + field + " must be k x 3");
  return m.cast<int>();
}

// 2-D segment/triangle helpers for the UV overlap check
double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
              const Eigen::Vector2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

bool segments_properly_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  double d1 = cross2(c, d, a), d2 = cross2(c, d, b);
  double d3 = cross2(a, b, c), d4 = cross2(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool point_strictly_inside(const Eigen::Vector2d& p,
                           const std::array<Eigen::Vector2d, 3>& t) {
  double s0 = cross2(t[0], t[1], p);
  double s1 = cross2(t[1], t[2], p);
  double s2 = cross2(t[2], t[0], p);
  const double eps = 1e-12;
  return (s0 > eps && s1 > eps && s2 > eps) || (s0 < -eps && s1 < -eps && s2 < -eps);
}

bool uv_triangles_overlap(const std::array<Eigen::Vector2d, 3>& a,
                          const std::array<Eigen::Vector2d, 3>& b) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (segments_properly_intersect(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]))
        return true;
  Eigen::Vector2d ca = (a[0] + a[1] + a[2]) / 3.0;
  Eigen::Vector2d cb = (b[0] + b[1] + b[2]) / 3.0;
  return point_strictly_inside(ca, b) || point_strictly_inside(cb, a);
}

using EdgeSet = std::map<std::pair<int, int>, int>;  // edge -> incident faces

EdgeSet face_edge_counts(const Faces& faces) {
  EdgeSet edges;
  for (int f = 0; f < faces.rows(); ++f)
    for (int e = 0; e < 3; ++e) {
      int a = faces(f, e), b = faces(f, (e + 1) % 3);
      if (a > b) std::swap(a, b);
      ++edges[{a, b}];
    }
  return edges;
}

void validate_body(const LbsModel& m) {
  const int n = m.num_vertices(), joints = m.num_joints();
  if (m.skin_weights.rows() != n || m.skin_weights.cols() != joints)
    throw input_error("model: skin_weights shape mismatch");
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < joints; ++j) {
      double w = m.skin_weights(i, j);
      if (w < 0)
        throw input_error("model: skin_weights row " + std::to_string(i) +
                          " has a negative entry");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-6)
      throw input_error("model: skin_weights row " + std::to_string(i) +
                        " sums to " + std::to_string(s) + ", expected 1");
  }

  if (static_cast<int>(m.kinematic_tree.size()) != joints)
    throw input_error("model: kinematic_tree length mismatch");
  int roots = 0;
  for (int j = 0; j < joints; ++j) {
    int p = m.kinematic_tree[j];
    if (p == -1) {
      ++roots;
      continue;
    }
    if (p < 0 || p >= joints)
      throw input_error("model: kinematic_tree parent out of range at joint " +
                        std::to_string(j));
    // walk up; a cycle would exceed the joint count
    int cur = j, steps = 0;
    while (cur != -1) {
      cur = m.kinematic_tree[cur];
      if (++steps > joints)
        throw input_error("model: kinematic_tree has a cycle through joint " +
                          std::to_string(j));
    }
  }
  if (roots != 1) throw input_error("model: kinematic_tree must have exactly one root");

  const auto& cov = m.shape_covariance;
  if (cov.rows() != m.num_shape_dims() || cov.cols() != m.num_shape_dims())
    throw input_error("model: shape_covariance shape mismatch");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw input_error("model: shape_covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw input_error("model: shape_covariance is not positive definite");

  for (int f = 0; f < m.faces.rows(); ++f)
    for (int e = 0; e < 3; ++e)
      if (m.faces(f, e) < 0 || m.faces(f, e) >= n)
        throw input_error("model: faces index out of range at face " +
                          std::to_string(f));

  if (m.a_pose.size() != 3 * joints)
    throw input_error("model: a_pose must hold 3 values per joint");
  if (m.joint_regressor.cols() != n)
    throw input_error("model: joint_regressor shape mismatch");
  for (const Verts& sd : m.shape_dirs)
    if (sd.rows() != n) throw input_error("model: shape_dirs shape mismatch");
}

void validate_garment(const GarmentTemplate& g, const LbsModel& body) {
  const int m = g.num_vertices();
  for (int id : g.body_vertex_ids)
    if (id < 0 || id >= body.num_vertices())
      throw input_error("model: garment vertex_ids out of range");
  if (g.displacements.rows() != m)
    throw input_error("model: garment displacements shape mismatch");
  for (int f = 0; f < g.faces.rows(); ++f)
    for (int e = 0; e < 3; ++e)
      if (g.faces(f, e) < 0 || g.faces(f, e) >= m)
        throw input_error("model: garment faces index out of range");
  if (static_cast<int>(g.islands.size()) != g.num_faces())
    throw input_error("model: garment islands must label every face");
  if (static_cast<int>(g.uv.size()) != g.num_faces())
    throw input_error("model: garment uv must cover every face");

  bool has_front = false, has_back = false;
  for (uint8_t l : g.islands) {
    if (l == 0) has_front = true;
    else if (l == 1) has_back = true;
    else throw input_error("model: garment islands labels must be front/back");
  }
  if (!has_front || !has_back)
    throw input_error("model: garment must have exactly two islands");

  for (const auto& tri : g.uv)
    for (const auto& p : tri)
      if (p.x() < -1e-9 || p.x() > 1 + 1e-9 || p.y() < -1e-9 || p.y() > 1 + 1e-9)
        throw input_error("model: garment uv coordinates outside [0,1]^2");

  // pairwise interior-disjointness within each island
  for (int island = 0; island < 2; ++island) {
    std::vector<int> fids;
    for (int f = 0; f < g.num_faces(); ++f)
      if (g.islands[f] == island) fids.push_back(f);
    for (size_t a = 0; a < fids.size(); ++a)
      for (size_t b = a + 1; b < fids.size(); ++b)
        if (uv_triangles_overlap(g.uv[fids[a]], g.uv[fids[b]]))
          throw input_error("model: garment uv triangles overlap within island " +
                            std::to_string(island) + " (faces " +
                            std::to_string(fids[a]) + ", " +
                            std::to_string(fids[b]) + ")");
  }

  EdgeSet edges = face_edge_counts(g.faces);
  std::set<int> ring_vertices;
  for (const auto& ring : g.boundary_rings) {
    if (ring.size() < 3)
      throw input_error("model: garment boundary ring shorter than 3");
    for (size_t i = 0; i < ring.size(); ++i) {
      int a = ring[i], b = ring[(i + 1) % ring.size()];
      if (a < 0 || a >= m) throw input_error("model: boundary ring index out of range");
      int lo = std::min(a, b), hi = std::max(a, b);
      auto it = edges.find({lo, hi});
      if (it == edges.end() || it->second != 1)
        throw input_error("model: boundary_rings edge (" + std::to_string(a) +
                          "," + std::to_string(b) + ") is not a boundary edge");
      ring_vertices.insert(a);
    }
  }
  for (int v : g.top_ring)
    if (!ring_vertices.count(v))
      throw input_error("model: top_ring vertex " + std::to_string(v) +
                        " is not on any boundary ring");
}

GarmentTemplate parse_garment(const json& jg) {
  GarmentTemplate g;
  g.garment_class = parse_garment_class(jg.at("class").get<std::string>());
  g.body_vertex_ids = jg.at("vertex_ids").get<std::vector<int>>();
  g.displacements = parse_verts(jg.at("displacements"), "garment displacements");
  g.faces = parse_faces(jg.at("faces"), "garment faces");

  const json& juv = jg.at("uv");
  for (const auto& tri : juv) {
    if (tri.size() != 3) throw input_error("model: garment uv entry must have 3 points");
    std::array<Eigen::Vector2d, 3> t;
    for (int k = 0; k < 3; ++k)
      t[k] = {tri[k][0].get<double>(), tri[k][1].get<double>()};
    g.uv.push_back(t);
  }

  for (const auto& l : jg.at("islands")) {
    std::string s = l.get<std::string>();
    if (s == "front") g.islands.push_back(0);
    else if (s == "back") g.islands.push_back(1);
    else throw input_error("model: garment islands labels must be front/back");
  }

  g.boundary_rings = jg.at("boundary_rings").get<std::vector<std::vector<int>>>();
  g.top_ring = jg.at("top_ring").get<std::vector<int>>();
  if (jg.contains("active_joints"))
    g.active_joints = jg.at("active_joints").get<std::vector<int>>();
  else
    g.active_joints = default_active_joints(g.garment_class);
  return g;
}

}  // namespace

LoadedModel load_model_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw input_error(std::string("model: JSON parse error: ") + e.what());
  }

  LoadedModel out;
  try {
    const json& jb = j.at("body");
    LbsModel& m = out.body;
    m.template_vertices = parse_verts(jb.at("vertices"), "body vertices");
    m.faces = parse_faces(jb.at("faces"), "body faces");
    for (const auto& sd : jb.at("shape_dirs"))
      m.shape_dirs.push_back(parse_verts(sd, "body shape_dirs"));
    m.joint_regressor = parse_matrix(jb.at("joint_regressor"), "joint_regressor");
    m.kinematic_tree = jb.at("kinematic_tree").get<std::vector<int>>();
    m.skin_weights = parse_matrix(jb.at("skin_weights"), "skin_weights");
    m.shape_covariance = parse_matrix(jb.at("shape_covariance"), "shape_covariance");
    std::vector<double> ap = jb.at("a_pose").get<std::vector<double>>();
    m.a_pose = Eigen::Map<Eigen::VectorXd>(ap.data(), ap.size());

    for (const auto& jg : j.at("garments")) out.garments.push_back(parse_garment(jg));
  } catch (const json::exception& e) {
    throw input_error(std::string("model: missing or ill-typed field: ") + e.what());
  }

  validate_body(out.body);
  for (const auto& g : out.garments) validate_garment(g, out.body);

  for (const auto& g : out.garments)
    for (int a : g.active_joints)
      if (a < 0 || a >= out.body.num_joints())
        throw input_error("model: active_joints index out of range for " +
                          to_string(g.garment_class));
  return out;
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  if (ss.str().empty()) throw input_error("model: file is empty: " + path);
  return load_model_from_json_text(ss.str());
}

Verts shaped_vertices(const LbsModel& model, const Eigen::VectorXd& beta) {
  if (beta.size() != model.num_shape_dims())
    throw input_error("shaped_vertices: beta dimension mismatch");
  Verts v = model.template_vertices;
  for (int s = 0; s < model.num_shape_dims(); ++s) v += beta[s] * model.shape_dirs[s];
  return v;
}

Verts compute_joints(const LbsModel& model, const Eigen::VectorXd& beta) {
  return model.joint_regressor * shaped_vertices(model, beta);
}

namespace {

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w) {
  double angle = w.norm();
  if (angle < 1e-12) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

// World transform per joint: rotate about the joint, composed down the tree,
// then shifted so the rest pose maps to itself.
std::vector<Eigen::Affine3d> skinning_transforms(const LbsModel& model,
                                                 const Verts& joints,
                                                 const Eigen::VectorXd& theta) {
  const int joint_count = model.num_joints();
  std::vector<Eigen::Affine3d> world(joint_count);
  for (int j = 0; j < joint_count; ++j) {
    Eigen::Matrix3d rot = rodrigues(theta.segment<3>(3 * j));
    Eigen::Vector3d pos = joints.row(j).transpose();
    int parent = model.kinematic_tree[j];
    Eigen::Affine3d local;
    if (parent == -1) {
      local = Eigen::Translation3d(pos) * rot;
    } else {
      Eigen::Vector3d offset = pos - joints.row(parent).transpose();
      local = Eigen::Translation3d(offset) * rot;
    }
    world[j] = parent == -1 ? local : world[parent] * local;
  }
  for (int j = 0; j < joint_count; ++j)
    world[j] = world[j] * Eigen::Translation3d(-joints.row(j).transpose());
  return world;
}

}  // namespace

Verts pose_garment(const LbsModel& model, const GarmentTemplate& tmpl,
                   const PoseParams& p) {
  if (p.theta.size() != 3 * model.num_joints())
    throw input_error("pose_garment: theta dimension mismatch");
  Verts shaped = shaped_vertices(model, p.beta);
  Verts joints = model.joint_regressor * shaped;
  std::vector<Eigen::Affine3d> xf = skinning_transforms(model, joints, p.theta);

  const int m = tmpl.num_vertices();
  Verts out(m, 3);
  for (int i = 0; i < m; ++i) {
    int bv = tmpl.body_vertex_ids[i];
    Eigen::Vector3d rest =
        shaped.row(bv).transpose() + tmpl.displacements.row(i).transpose();
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (int j = 0; j < model.num_joints(); ++j) {
      double w = model.skin_weights(bv, j);
      if (w == 0.0) continue;
      acc += w * (xf[j] * rest);
    }
    out.row(i) = (acc + p.trans).transpose();
  }
  return out;
}

LaplacianMatrix build_laplacian(const GarmentTemplate& tmpl) {
  const int m = tmpl.num_vertices();
  std::set<std::pair<int, int>> edges;
  for (int f = 0; f < tmpl.faces.rows(); ++f)
    for (int e = 0; e < 3; ++e) {
      int a = tmpl.faces(f, e), b = tmpl.faces(f, (e + 1) % 3);
      edges.insert({std::min(a, b), std::max(a, b)});
    }

  Eigen::VectorXi degree = Eigen::VectorXi::Zero(m);
  for (const auto& [a, b] : edges) {
    ++degree[a];
    ++degree[b];
  }
  for (int i = 0; i < m; ++i)
    if (degree[i] == 0)
      throw input_error("build_laplacian: isolated vertex " + std::to_string(i));

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m + 2 * edges.size());
  for (int i = 0; i < m; ++i) trips.emplace_back(i, i, 1.0);
  for (const auto& [a, b] : edges) {
    trips.emplace_back(a, b, -1.0 / degree[a]);
    trips.emplace_back(b, a, -1.0 / degree[b]);
  }
  LaplacianMatrix lap;
  lap.L.resize(m, m);
  lap.L.setFromTriplets(trips.begin(), trips.end());
  lap.degree = degree;
  return lap;
}

std::vector<Verts> boundary_second_differences(const GarmentTemplate& tmpl,
                                               const Verts& vertices) {
  if (vertices.rows() != tmpl.num_vertices())
    throw input_error("boundary_second_differences: vertex count mismatch");
  std::vector<Verts> out;
  for (const auto& ring : tmpl.boundary_rings) {
    const int r = static_cast<int>(ring.size());
    if (r < 3) throw input_error("boundary_second_differences: ring shorter than 3");
    Verts d(r, 3);
    for (int i = 0; i < r; ++i) {
      int prev = ring[(i + r - 1) % r], cur = ring[i], next = ring[(i + 1) % r];
      d.row(i) = vertices.row(prev) - 2.0 * vertices.row(cur) + vertices.row(next);
    }
    out.push_back(std::move(d));
  }
  return out;
}

void save_obj(const std::string& path, const Verts& vertices,
              const GarmentTemplate& tmpl) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot open OBJ for writing: " + path);
  out.precision(9);
  for (int i = 0; i < vertices.rows(); ++i)
    out << "v " << vertices(i, 0) << " " << vertices(i, 1) << " "
        << vertices(i, 2) << "\n";
  for (const auto& tri : tmpl.uv)
    for (const auto& p : tri)
      out << "vt " << p.x() << " " << p.y() << "\n";
  for (int f = 0; f < tmpl.faces.rows(); ++f) {
    out << "f";
    for (int e = 0; e < 3; ++e)
      out << " " << tmpl.faces(f, e) + 1 << "/" << 3 * f + e + 1;
    out << "\n";
  }
}

}  // namespace garmfit
