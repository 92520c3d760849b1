#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "garmfit/image.hpp"

namespace garmfit {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

uint8_t to_byte(float v) {
  float c = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
  return static_cast<uint8_t>(std::lround(c * 255.f));
}

}  // namespace

Image read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw input_error("cannot open PNG for reading: " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw input_error("PNG parse error: " + path);
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  int nch = png_get_channels(png, info);
  std::vector<uint8_t> row(static_cast<size_t>(w) * nch);
  int out_ch = (nch >= 3) ? 3 : 1;
  Image img(static_cast<int>(w), static_cast<int>(h), out_ch);

  for (png_uint_32 i = 0; i < h; ++i) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 j = 0; j < w; ++j) {
      const uint8_t* px = &row[static_cast<size_t>(j) * nch];
      float a = (nch == 2 || nch == 4) ? px[nch - 1] / 255.f : 1.f;
      for (int c = 0; c < out_ch; ++c) {
        float v = px[c] / 255.f;
        // composite over white when alpha present
        img.at(static_cast<int>(i), static_cast<int>(j), c) =
            v * a + (1.f - a);
      }
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const Image& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3)
    throw std::runtime_error("write_png: unsupported channel count");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw input_error("cannot open PNG for writing: " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG write error: " + path);
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  // no time chunk: outputs must be byte-stable across reruns
  png_write_info(png, info);

  std::vector<uint8_t> row(static_cast<size_t>(img.width) * img.channels);
  for (int i = 0; i < img.height; ++i) {
    for (int j = 0; j < img.width; ++j)
      for (int c = 0; c < img.channels; ++c)
        row[static_cast<size_t>(j) * img.channels + c] = to_byte(img.at(i, j, c));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

BinaryMask read_mask_png(const std::string& path) {
  Image img = read_png(path);
  Image g = img.to_gray();
  BinaryMask m(g.width, g.height);
  for (int i = 0; i < g.height; ++i)
    for (int j = 0; j < g.width; ++j) m.set(i, j, g.at(i, j) >= 0.5f);
  return m;
}

void write_mask_png(const BinaryMask& mask, const std::string& path) {
  Image img(mask.width, mask.height, 1);
  for (int i = 0; i < mask.height; ++i)
    for (int j = 0; j < mask.width; ++j) img.at(i, j) = mask.at(i, j) ? 1.f : 0.f;
  write_png(img, path);
}

}  // namespace garmfit
