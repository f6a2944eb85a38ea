#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rgseg {

struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Row-major H x W x C raster of floats in [0,1]. Channels are interleaved.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, float fill = 0.0f);
  /// Takes ownership of `data`; throws ShapeError on a length mismatch and
  /// ParameterError on values outside [0,1].
  Image(int height, int width, int channels, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  bool contains(Pixel p) const {
    return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_;
  }

  float at(int row, int col, int ch = 0) const {
    return data_[index(row, col, ch)];
  }
  float& at(int row, int col, int ch = 0) { return data_[index(row, col, ch)]; }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Row-major binary raster. Values are exactly 0 or 1.
class Mask {
 public:
  Mask() = default;
  Mask(int height, int width, std::uint8_t fill = 0);
  Mask(int height, int width, std::vector<std::uint8_t> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool contains(Pixel p) const {
    return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_;
  }

  std::uint8_t at(int row, int col) const { return data_[index(row, col)]; }
  std::uint8_t at(Pixel p) const { return data_[index(p.row, p.col)]; }
  void set(int row, int col, bool on) { data_[index(row, col)] = on ? 1 : 0; }
  void set(Pixel p, bool on) { set(p.row, p.col, on); }

  std::span<const std::uint8_t> data() const { return data_; }

  /// Number of foreground pixels.
  std::size_t count() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Dense per-pixel foreground probability field.
class ProbMap {
 public:
  ProbMap() = default;
  ProbMap(int height, int width, float fill = 0.0f);
  ProbMap(int height, int width, std::vector<float> values);

  int height() const { return height_; }
  int width() const { return width_; }
  float at(int row, int col) const { return values_[index(row, col)]; }
  float& at(int row, int col) { return values_[index(row, col)]; }
  std::span<const float> values() const { return values_; }

  friend bool operator==(const ProbMap&, const ProbMap&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

/// Mask-wise a AND b. Shapes must agree.
Mask mask_and(const Mask& a, const Mask& b);

/// Throws ShapeError unless both rasters are `height` x `width`.
void require_shape(int height, int width, int other_height, int other_width,
                   const char* what);

/// Square tile of side `tile_size` around `center`. Rows span
/// [row - T/2, row + T/2 - 1], columns likewise; positions off the image
/// are zero. Throws BoundsError when center is off the image and
/// ParameterError when tile_size is odd or < 2.
Image extract_tile(const Image& img, Pixel center, int tile_size);

}  // namespace rgseg
