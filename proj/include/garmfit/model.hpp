#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <array>
#include <string>
#include <vector>

namespace garmfit {

using Verts = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3>;

enum class GarmentClass { tshirt, shorts, pants };

GarmentClass parse_garment_class(const std::string& s);
std::string to_string(GarmentClass c);

// Skinned parametric body: template vertices with shape blendshapes,
// regressed joints on a kinematic tree, and per-vertex blend weights.
struct LbsModel {
  Verts template_vertices;            // n x 3, meters
  Faces faces;
  std::vector<Verts> shape_dirs;      // S entries, each n x 3 (per-unit-beta)
  Eigen::MatrixXd joint_regressor;    // J x n
  std::vector<int> kinematic_tree;    // parent per joint, root = -1
  Eigen::MatrixXd skin_weights;       // n x J
  Eigen::MatrixXd shape_covariance;   // S x S, SPD
  Eigen::VectorXd a_pose;             // 3J axis-angle

  int num_vertices() const { return static_cast<int>(template_vertices.rows()); }
  int num_joints() const { return static_cast<int>(joint_regressor.rows()); }
  int num_shape_dims() const { return static_cast<int>(shape_dirs.size()); }
};

// A garment is a vertex selection from the body plus fixed displacements,
// with its own faces, per-face UVs over two islands, and boundary structure.
struct GarmentTemplate {
  GarmentClass garment_class = GarmentClass::tshirt;
  std::vector<int> body_vertex_ids;                // m, rows of the indicator
  Verts displacements;                             // m x 3
  Faces faces;                                     // indices into 0..m
  std::vector<std::array<Eigen::Vector2d, 3>> uv;  // per-face, in [0,1]^2
  std::vector<uint8_t> islands;                    // per-face: 0 front, 1 back
  std::vector<std::vector<int>> boundary_rings;    // ordered vertex cycles
  std::vector<int> top_ring;                       // waist vertices (pants/shorts)
  std::vector<int> active_joints;                  // optimized joint subset

  int num_vertices() const { return static_cast<int>(body_vertex_ids.size()); }
  int num_faces() const { return static_cast<int>(faces.rows()); }
};

struct PoseParams {
  Eigen::VectorXd beta;
  Eigen::VectorXd theta;  // 3J axis-angle
  Eigen::Vector3d trans = Eigen::Vector3d::Zero();
  std::vector<int> active_joints;
};

// Graph Laplacian over the garment edge graph: diagonal 1, off-diagonal
// -1/degree(i) for each edge, rows summing to zero.
struct LaplacianMatrix {
  Eigen::SparseMatrix<double> L;
  Eigen::VectorXi degree;
};

struct LoadedModel {
  LbsModel body;
  std::vector<GarmentTemplate> garments;

  const GarmentTemplate& garment(GarmentClass c) const;
};

// Parses and validates the model JSON file; any invariant violation is
// rejected with an error naming the offending field.
LoadedModel load_model(const std::string& path);
LoadedModel load_model_from_json_text(const std::string& text);

// Default active-joint subsets by garment class, used when a garment entry
// does not carry its own (indices in the canonical 24-joint ordering).
std::vector<int> default_active_joints(GarmentClass c);

Verts shaped_vertices(const LbsModel& model, const Eigen::VectorXd& beta);

// joints = regressor * shaped template
Verts compute_joints(const LbsModel& model, const Eigen::VectorXd& beta);

// Poses the garment: shape blendshapes, vertex selection, displacements,
// linear blend skinning over the joint transforms, then the translation.
Verts pose_garment(const LbsModel& model, const GarmentTemplate& tmpl,
                   const PoseParams& p);

LaplacianMatrix build_laplacian(const GarmentTemplate& tmpl);

// Cyclic second differences v[i-1] - 2 v[i] + v[i+1] along each boundary ring.
std::vector<Verts> boundary_second_differences(const GarmentTemplate& tmpl,
                                               const Verts& vertices);

// Wavefront OBJ with per-face vt records from the template's UV atlas.
void save_obj(const std::string& path, const Verts& vertices,
              const GarmentTemplate& tmpl);

}  // namespace garmfit
