#include "garmfit/render.hpp"

#include <algorithm>
#include <cmath>

namespace garmfit {

std::vector<Projected> project(const Camera& cam, const Verts& points) {
  std::vector<Projected> out(points.rows());
  for (int i = 0; i < points.rows(); ++i) {
    double z = points(i, 2);
    if (z <= cam.z_near) continue;  // stays invalid
    out[i].x = cam.f * points(i, 0) / z + cam.cx;
    out[i].y = cam.f * points(i, 1) / z + cam.cy;
    out[i].valid = true;
  }
  return out;
}

namespace {

inline double edge_fn(double ax, double ay, double bx, double by, double px,
                      double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

}  // namespace

RasterMask rasterize_silhouette(const Camera& cam, const Verts& vertices,
                                const Faces& faces) {
  if (faces.rows() == 0) throw input_error("rasterize_silhouette: empty face list");
  std::vector<Projected> proj = project(cam, vertices);

  RasterMask out;
  out.mask = BinaryMask(cam.width, cam.height);
  out.depth.assign(static_cast<size_t>(cam.width) * cam.height,
                   std::numeric_limits<double>::infinity());
  out.face.assign(static_cast<size_t>(cam.width) * cam.height, -1);

  bool any_face = false;
  for (int f = 0; f < faces.rows(); ++f) {
    const Projected& a = proj[faces(f, 0)];
    const Projected& b = proj[faces(f, 1)];
    const Projected& c = proj[faces(f, 2)];
    if (!a.valid || !b.valid || !c.valid) continue;
    double area = edge_fn(a.x, a.y, b.x, b.y, c.x, c.y);
    if (area == 0.0) continue;
    any_face = true;

    double inv_za = 1.0 / vertices(faces(f, 0), 2);
    double inv_zb = 1.0 / vertices(faces(f, 1), 2);
    double inv_zc = 1.0 / vertices(faces(f, 2), 2);

    double minx = std::min({a.x, b.x, c.x}), maxx = std::max({a.x, b.x, c.x});
    double miny = std::min({a.y, b.y, c.y}), maxy = std::max({a.y, b.y, c.y});
    int j0 = std::max(0, static_cast<int>(std::ceil(minx - 0.5)));
    int j1 = std::min(cam.width - 1, static_cast<int>(std::floor(maxx - 0.5)));
    int i0 = std::max(0, static_cast<int>(std::ceil(miny - 0.5)));
    int i1 = std::min(cam.height - 1, static_cast<int>(std::floor(maxy - 0.5)));

    double sign = area > 0 ? 1.0 : -1.0;
    for (int i = i0; i <= i1; ++i) {
      double py = i + 0.5;
      for (int j = j0; j <= j1; ++j) {
        double px = j + 0.5;
        double e0 = sign * edge_fn(b.x, b.y, c.x, c.y, px, py);
        double e1 = sign * edge_fn(c.x, c.y, a.x, a.y, px, py);
        double e2 = sign * edge_fn(a.x, a.y, b.x, b.y, px, py);
        if (e0 < 0 || e1 < 0 || e2 < 0) continue;
        double l0 = e0 / (sign * area), l1 = e1 / (sign * area),
               l2 = e2 / (sign * area);
        double inv_z = l0 * inv_za + l1 * inv_zb + l2 * inv_zc;
        if (inv_z <= 0) continue;
        double z = 1.0 / inv_z;
        size_t idx = static_cast<size_t>(i) * cam.width + j;
        out.mask.set(i, j, true);
        if (z < out.depth[idx]) {
          out.depth[idx] = z;
          out.face[idx] = f;
        }
      }
    }
  }
  if (!any_face)
    throw input_error("rasterize_silhouette: no renderable face (all behind camera)");
  return out;
}

AtlasRaster rasterize_uv_atlas(const GarmentTemplate& tmpl, int atlas_width,
                               int atlas_height) {
  AtlasRaster out;
  out.width = atlas_width;
  out.height = atlas_height;
  out.face.assign(static_cast<size_t>(atlas_width) * atlas_height, -1);
  out.bary.assign(3 * static_cast<size_t>(atlas_width) * atlas_height, 0.0);
  std::vector<uint8_t> interior(out.face.size(), 0);

  const double eps = 1e-7;
  for (int f = 0; f < tmpl.num_faces(); ++f) {
    // UV in texel units: u along columns, v along rows
    double ax = tmpl.uv[f][0].x() * atlas_width, ay = tmpl.uv[f][0].y() * atlas_height;
    double bx = tmpl.uv[f][1].x() * atlas_width, by = tmpl.uv[f][1].y() * atlas_height;
    double cx = tmpl.uv[f][2].x() * atlas_width, cy = tmpl.uv[f][2].y() * atlas_height;
    double area = edge_fn(ax, ay, bx, by, cx, cy);
    if (area == 0.0) continue;
    double sign = area > 0 ? 1.0 : -1.0;

    int l0i = std::max(0, static_cast<int>(std::ceil(std::min({ax, bx, cx}) - 0.5)));
    int l1i = std::min(atlas_width - 1,
                       static_cast<int>(std::floor(std::max({ax, bx, cx}) - 0.5)));
    int k0 = std::max(0, static_cast<int>(std::ceil(std::min({ay, by, cy}) - 0.5)));
    int k1 = std::min(atlas_height - 1,
                      static_cast<int>(std::floor(std::max({ay, by, cy}) - 0.5)));

    for (int k = k0; k <= k1; ++k) {
      double py = k + 0.5;
      for (int l = l0i; l <= l1i; ++l) {
        double px = l + 0.5;
        double e0 = sign * edge_fn(bx, by, cx, cy, px, py);
        double e1 = sign * edge_fn(cx, cy, ax, ay, px, py);
        double e2 = sign * edge_fn(ax, ay, bx, by, px, py);
        if (e0 < 0 || e1 < 0 || e2 < 0) continue;
        double w0 = e0 / (sign * area), w1 = e1 / (sign * area), w2 = e2 / (sign * area);
        bool inside = std::min({w0, w1, w2}) > eps;
        size_t idx = static_cast<size_t>(k) * atlas_width + l;
        int32_t prev = out.face[idx];
        if (prev >= 0) {
          if (inside && interior[idx] && tmpl.islands[prev] == tmpl.islands[f])
            throw input_error(
                "rasterize_uv_atlas: overlapping UV triangles within an island "
                "(faces " + std::to_string(prev) + ", " + std::to_string(f) + ")");
          continue;  // boundary tie: keep the lower face id
        }
        out.face[idx] = f;
        out.bary[3 * idx] = w0;
        out.bary[3 * idx + 1] = w1;
        out.bary[3 * idx + 2] = w2;
        interior[idx] = inside ? 1 : 0;
      }
    }
  }
  return out;
}

double compute_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height)
    throw input_error("compute_iou: dimension mismatch");
  size_t inter = 0, uni = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    bool pa = a.data[i] != 0, pb = b.data[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return uni == 0 ? 1.0 : double(inter) / double(uni);
}

}  // namespace garmfit
