#include "garmfit/morphology.hpp"

#include <utility>
#include <vector>

namespace garmfit {

namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
  std::vector<std::pair<int, int>> off;
  for (int di = -radius; di <= radius; ++di)
    for (int dj = -radius; dj <= radius; ++dj)
      if (di * di + dj * dj <= radius * radius) off.emplace_back(di, dj);
  return off;
}

BinaryMask dilate(const BinaryMask& m, const std::vector<std::pair<int, int>>& off) {
  BinaryMask out(m.width, m.height);
  for (int i = 0; i < m.height; ++i)
    for (int j = 0; j < m.width; ++j) {
      if (!m.at(i, j)) continue;
      for (auto [di, dj] : off) {
        int ii = i + di, jj = j + dj;
        if (m.in_bounds(ii, jj)) out.set(ii, jj, true);
      }
    }
  return out;
}

BinaryMask erode(const BinaryMask& m, const std::vector<std::pair<int, int>>& off) {
  // pixels outside the image count as background
  BinaryMask out(m.width, m.height);
  for (int i = 0; i < m.height; ++i)
    for (int j = 0; j < m.width; ++j) {
      bool keep = true;
      for (auto [di, dj] : off) {
        int ii = i + di, jj = j + dj;
        if (!m.in_bounds(ii, jj) || !m.at(ii, jj)) {
          keep = false;
          break;
        }
      }
      out.set(i, j, keep);
    }
  return out;
}

}  // namespace

BinaryMask morphology(const BinaryMask& mask, MorphOp op, int radius) {
  if (radius < 1) throw input_error("morphology: radius must be >= 1");
  auto off = disk_offsets(radius);
  switch (op) {
    case MorphOp::erode:
      return erode(mask, off);
    case MorphOp::dilate:
      return dilate(mask, off);
    case MorphOp::close:
      return erode(dilate(mask, off), off);
  }
  throw std::runtime_error("morphology: bad op");
}

}  // namespace garmfit
