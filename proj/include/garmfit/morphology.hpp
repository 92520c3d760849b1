#pragma once

#include "garmfit/image.hpp"

namespace garmfit {

enum class MorphOp { erode, dilate, close };

// Binary morphology with a disk structuring element of the given radius
// (offsets with dx^2 + dy^2 <= r^2). close = dilate then erode, same radius.
BinaryMask morphology(const BinaryMask& mask, MorphOp op, int radius);

}  // namespace garmfit
