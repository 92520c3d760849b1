#pragma once

#include <optional>

#include "garmfit/image.hpp"

namespace garmfit {

struct SegConfig {
  // luminance strictly above this is treated as background
  double background_threshold = 0.94;

  // disk radii at the reference width, scaled proportionally to the input
  int close_radius = 3;
  int erode_radius = 5;
  int dilate_radius = 5;
  int reference_width = 256;

  // GrabCut-style refinement
  bool refine = true;
  int gmm_components = 5;
  int iterations = 3;
  double gamma = 50.0;

  // pixels set here are forced to absolute background
  std::optional<BinaryMask> exclusion;
};

// Trimap from the thresholded mask: closing fills holes, erosion gives the
// absolute-foreground core, dilation bounds the probable band.
Trimap make_trimap(const BinaryMask& rough, const SegConfig& cfg);

// Automatic garment segmentation for photos over a near-uniform bright
// background: threshold, morphological trimap, then iterated GMM color
// models with a contrast-sensitive min-cut.
BinaryMask segment(const Image& image, const SegConfig& cfg);

}  // namespace garmfit
