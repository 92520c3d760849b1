#include "garmfit/image.hpp"

#include <algorithm>

namespace garmfit {

Image Image::to_gray() const {
  if (channels == 1) return *this;
  Image g(width, height, 1);
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j)
      g.at(i, j) = 0.299f * at(i, j, 0) + 0.587f * at(i, j, 1) +
                   0.114f * at(i, j, 2);
  return g;
}

void Image::clamp01() {
  for (float& v : data) v = std::clamp(v, 0.f, 1.f);
}

size_t BinaryMask::count() const {
  size_t n = 0;
  for (uint8_t v : data) n += v != 0;
  return n;
}

}  // namespace garmfit
