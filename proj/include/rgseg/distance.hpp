#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "rgseg/image.hpp"

namespace rgseg {

/// Exact Euclidean distance from every pixel to the nearest foreground pixel
/// of a mask, stored as integer squared distances.
class DistanceField {
 public:
  static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();

  DistanceField(int height, int width, std::vector<std::int64_t> squared)
      : height_(height), width_(width), squared_(std::move(squared)) {}

  int height() const { return height_; }
  int width() const { return width_; }
  std::int64_t squared(int row, int col) const {
    return squared_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::int64_t squared(std::size_t index) const { return squared_[index]; }
  double distance(int row, int col) const;
  double distance(std::size_t index) const;

 private:
  int height_;
  int width_;
  std::vector<std::int64_t> squared_;
};

/// Two-pass (columns then rows) lower-envelope transform over integer
/// squared distances. Throws UndefinedDistanceError on an empty mask.
DistanceField distance_field(const Mask& mask);

}  // namespace rgseg
