#pragma once

#include <span>
#include <vector>

#include "rgseg/image.hpp"

namespace rgseg {

/// Patch descriptor of the reference classifier. The feature vector is laid
/// out as
///   [pool_grid^2 x channels mean-pooled intensities, cell-major]
///   [center_window^2 x channels raw intensities around the tile centre]
///   [channels mean gradient magnitudes over the tile interior]
struct FeatureSpec {
  int pool_grid = 8;
  int center_window = 7;
  int channels = 3;

  std::size_t dimension() const;
  /// Throws ParameterError unless the spec fits a tile of `tile_size`.
  void validate(int tile_size) const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Features of a single tile. Throws ShapeError when the tile is not
/// tile_size x tile_size x spec.channels.
std::vector<double> feature_extract(const Image& tile, const FeatureSpec& spec, int tile_size);

/// Same features as feature_extract(extract_tile(img, c, tile_size)) for
/// every centre c of one image, from padded integral images. Agreement is
/// exact for the intensity features up to summation rounding.
class FeatureIndex {
 public:
  FeatureIndex(const Image& img, const FeatureSpec& spec, int tile_size);

  void extract(Pixel center, std::span<double> out) const;
  std::size_t dimension() const { return spec_.dimension(); }

 private:
  double box(const std::vector<double>& integral, int ch, int r0, int c0, int r1,
             int c1) const;

  Image img_;
  FeatureSpec spec_;
  int tile_size_;
  int pad_;
  int padded_h_;
  int padded_w_;
  // (padded_h_+1) x (padded_w_+1) x channels, channel fastest.
  std::vector<double> intensity_sum_;
  std::vector<double> gradient_sum_;
};

}  // namespace rgseg
