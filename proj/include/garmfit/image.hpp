#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace garmfit {

// Thrown for bad user input (missing files, malformed data, violated
// preconditions). The CLI maps this to exit code 1; everything else is an
// internal failure (exit 2).
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major float image, samples in [0,1]. channels: 1 = gray, 3 = RGB.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.f)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {}

  float& at(int i, int j, int c = 0) {
    return data[(static_cast<size_t>(i) * width + j) * channels + c];
  }
  float at(int i, int j, int c = 0) const {
    return data[(static_cast<size_t>(i) * width + j) * channels + c];
  }
  bool in_bounds(int i, int j) const {
    return i >= 0 && i < height && j >= 0 && j < width;
  }

  // Rec. 601 luma for RGB, identity for gray.
  Image to_gray() const;

  void clamp01();
};

// Bit-per-pixel mask stored as bytes (0/1).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, uint8_t fill = 0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  bool at(int i, int j) const {
    return data[static_cast<size_t>(i) * width + j] != 0;
  }
  void set(int i, int j, bool v) {
    data[static_cast<size_t>(i) * width + j] = v ? 1 : 0;
  }
  bool in_bounds(int i, int j) const {
    return i >= 0 && i < height && j >= 0 && j < width;
  }
  size_t count() const;
  bool operator==(const BinaryMask& o) const {
    return width == o.width && height == o.height && data == o.data;
  }
};

enum class TrimapLabel : uint8_t { abs_bg = 0, prob_bg = 1, prob_fg = 2, abs_fg = 3 };

struct Trimap {
  int width = 0;
  int height = 0;
  std::vector<TrimapLabel> labels;

  Trimap() = default;
  Trimap(int w, int h, TrimapLabel fill = TrimapLabel::abs_bg)
      : width(w), height(h), labels(static_cast<size_t>(w) * h, fill) {}

  TrimapLabel at(int i, int j) const {
    return labels[static_cast<size_t>(i) * width + j];
  }
  void set(int i, int j, TrimapLabel v) {
    labels[static_cast<size_t>(i) * width + j] = v;
  }
};

// 8-bit PNG I/O. Gray and RGB are preserved; RGBA input drops alpha after
// compositing over white, 16-bit input is truncated to 8.
Image read_png(const std::string& path);
void write_png(const Image& img, const std::string& path);

// Masks as 0/255 single-channel PNG.
BinaryMask read_mask_png(const std::string& path);
void write_mask_png(const BinaryMask& mask, const std::string& path);

}  // namespace garmfit
