#include "rgseg/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgseg/error.hpp"

namespace rgseg {

namespace {

void require_dims(int height, int width) {
  if (height < 0 || width < 0) {
    throw ParameterError("negative raster dimensions");
  }
}

std::size_t area(int height, int width) {
  return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
}

}  // namespace

Image::Image(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  require_dims(height, width);
  if (channels != 1 && channels != 3) {
    throw ParameterError("image channels must be 1 or 3");
  }
  if (!(fill >= 0.0f && fill <= 1.0f)) {
    throw ParameterError("image fill value outside [0,1]");
  }
  data_.assign(area(height, width) * channels, fill);
}

Image::Image(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  require_dims(height, width);
  if (channels != 1 && channels != 3) {
    throw ParameterError("image channels must be 1 or 3");
  }
  if (data_.size() != area(height, width) * channels) {
    throw ShapeError("image data length does not match dimensions");
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw ParameterError("image value outside [0,1]");
    }
  }
}

Mask::Mask(int height, int width, std::uint8_t fill)
    : height_(height), width_(width) {
  require_dims(height, width);
  if (fill > 1) throw ParameterError("mask fill must be 0 or 1");
  data_.assign(area(height, width), fill);
}

Mask::Mask(int height, int width, std::vector<std::uint8_t> data)
    : height_(height), width_(width), data_(std::move(data)) {
  require_dims(height, width);
  if (data_.size() != area(height, width)) {
    throw ShapeError("mask data length does not match dimensions");
  }
  if (std::any_of(data_.begin(), data_.end(), [](auto v) { return v > 1; })) {
    throw ParameterError("mask values must be 0 or 1");
  }
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1));
}

ProbMap::ProbMap(int height, int width, float fill)
    : height_(height), width_(width) {
  require_dims(height, width);
  values_.assign(area(height, width), fill);
}

ProbMap::ProbMap(int height, int width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
  require_dims(height, width);
  if (values_.size() != area(height, width)) {
    throw ShapeError("probability map length does not match dimensions");
  }
}

void require_shape(int height, int width, int other_height, int other_width,
                   const char* what) {
  if (height != other_height || width != other_width) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" +
                     std::to_string(height) + "x" + std::to_string(width) +
                     " vs " + std::to_string(other_height) + "x" +
                     std::to_string(other_width) + ")");
  }
}

Mask mask_and(const Mask& a, const Mask& b) {
  require_shape(a.height(), a.width(), b.height(), b.width(), "mask_and");
  std::vector<std::uint8_t> out(a.size());
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] & db[i];
  return Mask(a.height(), a.width(), std::move(out));
}

Image extract_tile(const Image& img, Pixel center, int tile_size) {
  if (tile_size < 2 || tile_size % 2 != 0) {
    throw ParameterError("tile size must be even and >= 2");
  }
  if (!img.contains(center)) {
    throw BoundsError("tile center (" + std::to_string(center.row) + "," +
                      std::to_string(center.col) + ") outside image");
  }
  const int half = tile_size / 2;
  const int channels = img.channels();
  Image tile(tile_size, tile_size, channels);
  const int r0 = center.row - half;
  const int c0 = center.col - half;
  // Clip the copy window to the image; everything else stays zero.
  const int cfirst = std::max(0, c0);
  const int clast = std::min(img.width(), c0 + tile_size);
  if (cfirst >= clast) return tile;
  auto src = img.data();
  auto dst = tile.data();
  for (int tr = 0; tr < tile_size; ++tr) {
    const int r = r0 + tr;
    if (r < 0 || r >= img.height()) continue;
    const std::size_t src_off =
        (static_cast<std::size_t>(r) * img.width() + cfirst) * channels;
    const std::size_t dst_off =
        (static_cast<std::size_t>(tr) * tile_size + (cfirst - c0)) * channels;
    std::copy_n(src.begin() + src_off, (clast - cfirst) * channels,
                dst.begin() + dst_off);
  }
  return tile;
}

}  // namespace rgseg
