#pragma once

#include <limits>

#include "garmfit/image.hpp"
#include "garmfit/model.hpp"

namespace garmfit {

// Perspective pinhole camera at the origin looking along +z, pixel units,
// image y downward. Pixel (i,j) covers [j,j+1) x [i,i+1) with its center at
// (j+0.5, i+0.5).
struct Camera {
  double f = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;
  double z_near = 1e-4;

  static Camera standard(int w, int h, double f_scale = 1.2) {
    Camera c;
    c.f = f_scale * w;
    c.cx = w / 2.0;
    c.cy = h / 2.0;
    c.width = w;
    c.height = h;
    return c;
  }

  // Camera for a coarser pyramid level of the same scene.
  Camera scaled(int level_width, int level_height) const {
    double s = double(level_width) / width;
    Camera c = *this;
    c.f = f * s;
    c.cx = cx * s;
    c.cy = cy * s;
    c.width = level_width;
    c.height = level_height;
    return c;
  }
};

struct Projected {
  double x = 0, y = 0;
  bool valid = false;
};

std::vector<Projected> project(const Camera& cam, const Verts& points);

// Silhouette coverage with nearest depth and face id per covered pixel.
struct RasterMask {
  BinaryMask mask;
  std::vector<double> depth;   // camera z, +inf where uncovered
  std::vector<int32_t> face;   // -1 where uncovered

  double depth_at(int i, int j) const {
    return depth[static_cast<size_t>(i) * mask.width + j];
  }
  int32_t face_at(int i, int j) const {
    return face[static_cast<size_t>(i) * mask.width + j];
  }
};

// Pixel-center coverage by edge functions; depth interpolated perspective-
// correctly (linear in 1/z). Faces with any vertex at or behind z_near are
// skipped; throws input_error when nothing is rasterizable.
RasterMask rasterize_silhouette(const Camera& cam, const Verts& vertices,
                                const Faces& faces);

// Per-texel face id and barycentric weights of the texel center in UV space.
struct AtlasRaster {
  int width = 0, height = 0;  // K x L texels
  std::vector<int32_t> face;  // -1 outside all islands
  std::vector<double> bary;   // 3 per texel

  bool valid_at(int k, int l) const {
    return face[static_cast<size_t>(k) * width + l] >= 0;
  }
  int32_t face_at(int k, int l) const {
    return face[static_cast<size_t>(k) * width + l];
  }
  const double* bary_at(int k, int l) const {
    return &bary[3 * (static_cast<size_t>(k) * width + l)];
  }
};

AtlasRaster rasterize_uv_atlas(const GarmentTemplate& tmpl, int atlas_width,
                               int atlas_height);

// |a n b| / |a u b|; 1 when both masks are empty.
double compute_iou(const BinaryMask& a, const BinaryMask& b);

}  // namespace garmfit
