#pragma once

#include <vector>

#include "garmfit/image.hpp"

namespace garmfit {

// Euclidean distance (in pixels) to the nearest pixel of a generating set.
// Zero exactly on the set, 1-Lipschitz under the grid metric.
struct DistanceField {
  int width = 0;
  int height = 0;
  std::vector<double> dist;

  double at(int i, int j) const {
    return dist[static_cast<size_t>(i) * width + j];
  }
};

enum class DistanceOf { foreground, background };

// Exact squared Euclidean distance transform (two-pass lower-envelope scan).
// Squared distances between pixel centers are integers and come out exactly.
// Throws input_error when the chosen set is empty.
std::vector<double> squared_distance_transform(const BinaryMask& mask,
                                               DistanceOf of);

DistanceField distance_transform(const BinaryMask& mask, DistanceOf of);

// Multi-resolution stack; level 0 is full resolution, each level half the
// previous (ceil).
struct Pyramid {
  std::vector<Image> levels;
};

// 5-tap binomial blur (1,4,6,4,1)/16, separable with replicated borders,
// then 2x decimation at even indices.
Pyramid gaussian_pyramid(const Image& img, int levels);

// Same blur/decimate applied to a mask via its float indicator, re-binarized
// at 0.5. Levels whose foreground vanishes are dropped.
std::vector<BinaryMask> mask_pyramid(const BinaryMask& mask, int levels);

// Per-level mask with both distance fields, precomputed once per fit target.
struct SilhouettePyramid {
  struct Level {
    BinaryMask mask;
    DistanceField fg;  // zero inside the garment
    DistanceField bg;  // zero outside the garment
  };
  std::vector<Level> levels;
};

SilhouettePyramid build_silhouette_pyramid(const BinaryMask& mask, int levels);

}  // namespace garmfit
