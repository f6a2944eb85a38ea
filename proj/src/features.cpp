#include "rgseg/features.hpp"

#include <cmath>
#include <string>

#include "rgseg/error.hpp"

namespace rgseg {

std::size_t FeatureSpec::dimension() const {
  const auto c = static_cast<std::size_t>(channels);
  return static_cast<std::size_t>(pool_grid) * pool_grid * c +
         static_cast<std::size_t>(center_window) * center_window * c + c;
}

void FeatureSpec::validate(int tile_size) const {
  if (channels != 1 && channels != 3) throw ParameterError("feature channels must be 1 or 3");
  if (pool_grid < 1 || tile_size % pool_grid != 0) {
    throw ParameterError("pool_grid must divide tile_size (" + std::to_string(tile_size) + ")");
  }
  if (center_window < 0 || (center_window > 0 && center_window % 2 == 0) ||
      center_window >= tile_size) {
    throw ParameterError("center_window must be 0 or odd and smaller than tile_size");
  }
}

namespace {

inline double gradient_magnitude(double left, double right, double up, double down) {
  const double gx = 0.5 * (right - left);
  const double gy = 0.5 * (down - up);
  return std::sqrt(gx * gx + gy * gy);
}

}  // namespace

std::vector<double> feature_extract(const Image& tile, const FeatureSpec& spec, int tile_size) {
  spec.validate(tile_size);
  if (tile.height() != tile_size || tile.width() != tile_size ||
      tile.channels() != spec.channels) {
    throw ShapeError("feature_extract: expected " + std::to_string(tile_size) + "x" +
                     std::to_string(tile_size) + "x" + std::to_string(spec.channels) +
                     " tile");
  }
  const int channels = spec.channels;
  std::vector<double> out;
  out.reserve(spec.dimension());

  const int cell = tile_size / spec.pool_grid;
  const double cell_area = static_cast<double>(cell) * cell;
  for (int gr = 0; gr < spec.pool_grid; ++gr) {
    for (int gc = 0; gc < spec.pool_grid; ++gc) {
      for (int ch = 0; ch < channels; ++ch) {
        double sum = 0.0;
        for (int r = gr * cell; r < (gr + 1) * cell; ++r) {
          for (int c = gc * cell; c < (gc + 1) * cell; ++c) sum += tile.at(r, c, ch);
        }
        out.push_back(sum / cell_area);
      }
    }
  }

  const int half = spec.center_window / 2;
  const int mid = tile_size / 2;
  for (int i = 0; i < spec.center_window; ++i) {
    for (int j = 0; j < spec.center_window; ++j) {
      for (int ch = 0; ch < channels; ++ch) {
        out.push_back(tile.at(mid - half + i, mid - half + j, ch));
      }
    }
  }

  const int inner = tile_size - 2;
  for (int ch = 0; ch < channels; ++ch) {
    double sum = 0.0;
    for (int r = 1; r <= inner; ++r) {
      for (int c = 1; c <= inner; ++c) {
        sum += gradient_magnitude(tile.at(r, c - 1, ch), tile.at(r, c + 1, ch),
                                  tile.at(r - 1, c, ch), tile.at(r + 1, c, ch));
      }
    }
    out.push_back(inner > 0 ? sum / (static_cast<double>(inner) * inner) : 0.0);
  }
  return out;
}

FeatureIndex::FeatureIndex(const Image& img, const FeatureSpec& spec, int tile_size)
    : img_(img),
      spec_(spec),
      tile_size_(tile_size),
      pad_(tile_size / 2 + 1),
      padded_h_(img.height() + 2 * pad_),
      padded_w_(img.width() + 2 * pad_) {
  spec.validate(tile_size);
  if (img.channels() != spec.channels) {
    throw ShapeError("image has " + std::to_string(img.channels()) +
                     " channels, features expect " + std::to_string(spec.channels));
  }
  const int channels = spec.channels;
  const auto padded_value = [&](int y, int x, int ch) -> double {
    const int r = y - pad_;
    const int c = x - pad_;
    if (r < 0 || c < 0 || r >= img.height() || c >= img.width()) return 0.0;
    return img.at(r, c, ch);
  };

  const std::size_t stride = static_cast<std::size_t>(padded_w_ + 1) * channels;
  intensity_sum_.assign(static_cast<std::size_t>(padded_h_ + 1) * stride, 0.0);
  gradient_sum_.assign(intensity_sum_.size(), 0.0);
  for (int y = 0; y < padded_h_; ++y) {
    for (int x = 0; x < padded_w_; ++x) {
      for (int ch = 0; ch < channels; ++ch) {
        double grad = 0.0;
        if (y >= 1 && x >= 1 && y + 1 < padded_h_ && x + 1 < padded_w_) {
          grad = gradient_magnitude(padded_value(y, x - 1, ch), padded_value(y, x + 1, ch),
                                    padded_value(y - 1, x, ch), padded_value(y + 1, x, ch));
        }
        const std::size_t at = (y + 1) * stride + (x + 1) * channels + ch;
        const std::size_t up = y * stride + (x + 1) * channels + ch;
        const std::size_t left = (y + 1) * stride + x * channels + ch;
        const std::size_t diag = y * stride + x * channels + ch;
        intensity_sum_[at] =
            padded_value(y, x, ch) + intensity_sum_[up] + intensity_sum_[left] - intensity_sum_[diag];
        gradient_sum_[at] = grad + gradient_sum_[up] + gradient_sum_[left] - gradient_sum_[diag];
      }
    }
  }
}

double FeatureIndex::box(const std::vector<double>& integral, int ch, int r0, int c0, int r1,
                         int c1) const {
  const std::size_t stride = static_cast<std::size_t>(padded_w_ + 1) * spec_.channels;
  const auto at = [&](int r, int c) {
    return integral[r * stride + static_cast<std::size_t>(c) * spec_.channels + ch];
  };
  return at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
}

void FeatureIndex::extract(Pixel center, std::span<double> out) const {
  if (!img_.contains(center)) throw BoundsError("feature centre outside image");
  if (out.size() != spec_.dimension()) throw ShapeError("feature buffer has wrong size");
  const int channels = spec_.channels;
  const int top = center.row - tile_size_ / 2 + pad_;
  const int left = center.col - tile_size_ / 2 + pad_;
  std::size_t k = 0;

  const int cell = tile_size_ / spec_.pool_grid;
  const double cell_area = static_cast<double>(cell) * cell;
  for (int gr = 0; gr < spec_.pool_grid; ++gr) {
    const int r0 = top + gr * cell;
    for (int gc = 0; gc < spec_.pool_grid; ++gc) {
      const int c0 = left + gc * cell;
      for (int ch = 0; ch < channels; ++ch) {
        out[k++] = box(intensity_sum_, ch, r0, c0, r0 + cell, c0 + cell) / cell_area;
      }
    }
  }

  const int half = spec_.center_window / 2;
  for (int i = 0; i < spec_.center_window; ++i) {
    const int r = center.row - half + i;
    for (int j = 0; j < spec_.center_window; ++j) {
      const int c = center.col - half + j;
      const bool inside = r >= 0 && c >= 0 && r < img_.height() && c < img_.width();
      for (int ch = 0; ch < channels; ++ch) {
        out[k++] = inside ? img_.at(r, c, ch) : 0.0;
      }
    }
  }

  const int inner = tile_size_ - 2;
  for (int ch = 0; ch < channels; ++ch) {
    out[k++] = inner > 0 ? box(gradient_sum_, ch, top + 1, left + 1, top + 1 + inner,
                               left + 1 + inner) /
                               (static_cast<double>(inner) * inner)
                         : 0.0;
  }
}

}  // namespace rgseg
