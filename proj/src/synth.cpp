#include "rgseg/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rgseg/error.hpp"

namespace rgseg {

namespace {

constexpr int kMaxWalkersPerTree = 48;
constexpr int kMaxPlacementAttempts = 200;
constexpr double kBlurSigma = 1.0;
constexpr double kRoiRadius = 0.47;

// Per-channel background level and vessel contrast.
constexpr std::array<double, 3> kBackground = {0.30, 0.22, 0.12};
constexpr std::array<double, 3> kContrast = {0.35, 0.30, 0.20};

struct Walker {
  double row;
  double col;
  double heading;
  double width;
  double length;
};

// Stamps a disc of the given diameter; the rounded centre is always set so
// consecutive unit steps stay 8-connected.
void stamp(std::vector<std::uint8_t>& mask, int height, int width, double row,
           double col, double diameter) {
  const int cr = static_cast<int>(std::lround(row));
  const int cc = static_cast<int>(std::lround(col));
  const double radius = diameter / 2.0;
  const int reach = static_cast<int>(std::ceil(radius));
  for (int r = cr - reach; r <= cr + reach; ++r) {
    if (r < 0 || r >= height) continue;
    for (int c = cc - reach; c <= cc + reach; ++c) {
      if (c < 0 || c >= width) continue;
      const double dr = r - row;
      const double dc = c - col;
      if ((r == cr && c == cc) || dr * dr + dc * dc <= radius * radius) {
        mask[static_cast<std::size_t>(r) * width + c] = 1;
      }
    }
  }
}

bool inside_ellipse(double row, double col, double cy, double cx, double ry, double rx) {
  const double y = (row - cy) / ry;
  const double x = (col - cx) / rx;
  return x * x + y * y <= 1.0;
}

std::vector<std::uint8_t> draw_tree(const SynthParams& p, std::mt19937_64& rng) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(p.height) * p.width, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> turn(0.0, 0.08);
  std::normal_distribution<double> jitter(0.0, 0.15);

  const double cy = (p.height - 1) / 2.0;
  const double cx = (p.width - 1) / 2.0;
  // Walkers stop once their centre leaves the RoI ellipse shrunk by the
  // widest stroke radius, so every stroke stays inside the RoI.
  const double margin = 0.5 * p.width_max + 1.0;
  const double in_ry = std::max(0.5, kRoiRadius * p.height - margin);
  const double in_rx = std::max(0.5, kRoiRadius * p.width - margin);
  const double ry = 0.8 * in_ry;
  const double rx = 0.8 * in_rx;
  const double extent = std::min(p.height, p.width);

  // Trunk start: uniform inside the start ellipse.
  double sr = cy;
  double sc = cx;
  for (int i = 0; i < 1000; ++i) {
    const double r = cy + (unit(rng) * 2.0 - 1.0) * ry;
    const double c = cx + (unit(rng) * 2.0 - 1.0) * rx;
    if (inside_ellipse(r, c, cy, cx, ry, rx)) {
      sr = r;
      sc = c;
      break;
    }
  }

  std::vector<Walker> pending;
  pending.push_back({sr, sc, unit(rng) * 2.0 * std::numbers::pi,
                     p.width_min + unit(rng) * (p.width_max - p.width_min),
                     extent * (0.3 + 0.4 * unit(rng))});
  int spawned = 1;
  while (!pending.empty()) {
    Walker w = pending.back();
    pending.pop_back();
    for (double travelled = 0.0; travelled < w.length; travelled += 1.0) {
      if (!inside_ellipse(w.row, w.col, cy, cx, in_ry, in_rx)) break;
      stamp(mask, p.height, p.width, w.row, w.col, w.width);
      if (spawned < kMaxWalkersPerTree && unit(rng) < p.branch_prob) {
        const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
        pending.push_back({w.row, w.col, w.heading + side * (0.4 + 0.6 * unit(rng)),
                           std::max(p.width_min, 0.75 * w.width),
                           (w.length - travelled) * (0.4 + 0.4 * unit(rng))});
        ++spawned;
      }
      w.heading += turn(rng);
      w.width = std::clamp(w.width + jitter(rng), p.width_min, p.width_max);
      w.row += std::sin(w.heading);
      w.col += std::cos(w.heading);
    }
  }
  return mask;
}

bool touches(const std::vector<std::uint8_t>& tree, const std::vector<std::uint8_t>& others,
             int height, int width) {
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (!tree[static_cast<std::size_t>(r) * width + c]) continue;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= height || cc >= width) continue;
          if (others[static_cast<std::size_t>(rr) * width + cc]) return true;
        }
      }
    }
  }
  return false;
}

// Separable Gaussian blur of a binary raster, zero outside the image.
std::vector<double> blur(const std::vector<std::uint8_t>& mask, int height, int width) {
  const int radius = static_cast<int>(std::ceil(3.0 * kBlurSigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * kBlurSigma * kBlurSigma));
    total += kernel[i + radius];
  }
  for (double& k : kernel) k /= total;

  std::vector<double> tmp(mask.size(), 0.0);
  std::vector<double> out(mask.size(), 0.0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int cc = c + i;
        if (cc >= 0 && cc < width) acc += kernel[i + radius] * mask[static_cast<std::size_t>(r) * width + cc];
      }
      tmp[static_cast<std::size_t>(r) * width + c] = acc;
    }
  }
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int rr = r + i;
        if (rr >= 0 && rr < height) acc += kernel[i + radius] * tmp[static_cast<std::size_t>(rr) * width + c];
      }
      out[static_cast<std::size_t>(r) * width + c] = acc;
    }
  }
  return out;
}

}  // namespace

void validate(const SynthParams& p) {
  if (p.height <= 0 || p.width <= 0) throw ParameterError("synthetic image must have nonzero area");
  if (p.channels != 1 && p.channels != 3) throw ParameterError("channels must be 1 or 3");
  if (p.n_trees < 0) throw ParameterError("n_trees must be >= 0");
  if (!(p.branch_prob >= 0.0 && p.branch_prob <= 1.0)) {
    throw ParameterError("branch_prob must lie in [0,1]");
  }
  if (!(p.width_min >= 1.0 && p.width_max >= p.width_min)) {
    throw ParameterError("width range must satisfy 1 <= min <= max");
  }
  if (!(p.noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be >= 0");
}

SynthImage generate_synthetic(const SynthParams& p) {
  validate(p);
  std::mt19937_64 rng(p.rng_seed);
  const std::size_t n = static_cast<std::size_t>(p.height) * p.width;

  std::vector<std::uint8_t> truth(n, 0);
  for (int t = 0; t < p.n_trees; ++t) {
    std::vector<std::uint8_t> tree = draw_tree(p, rng);
    if (p.separate_trees) {
      int attempts = 1;
      while (touches(tree, truth, p.height, p.width)) {
        if (++attempts > kMaxPlacementAttempts) {
          throw ParameterError("cannot place non-touching trees; image too small");
        }
        tree = draw_tree(p, rng);
      }
    }
    for (std::size_t i = 0; i < n; ++i) truth[i] |= tree[i];
  }

  const double cy = (p.height - 1) / 2.0;
  const double cx = (p.width - 1) / 2.0;
  const double ry = std::max(0.5, kRoiRadius * p.height);
  const double rx = std::max(0.5, kRoiRadius * p.width);
  std::vector<std::uint8_t> roi(n, 0);
  for (int r = 0; r < p.height; ++r) {
    for (int c = 0; c < p.width; ++c) {
      roi[static_cast<std::size_t>(r) * p.width + c] = inside_ellipse(r, c, cy, cx, ry, rx);
    }
  }

  for (std::size_t i = 0; i < n; ++i) truth[i] &= roi[i];

  const std::vector<double> smooth = blur(truth, p.height, p.width);
  std::normal_distribution<double> noise(0.0, p.noise_sigma > 0.0 ? p.noise_sigma : 1.0);
  std::vector<float> pixels(n * p.channels);
  for (int r = 0; r < p.height; ++r) {
    for (int c = 0; c < p.width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * p.width + c;
      // Radial illumination falloff, 1 at the centre and 0.7 at the RoI rim.
      const double y = (r - cy) / ry;
      const double x = (c - cx) / rx;
      const double falloff = 1.0 - 0.3 * std::min(1.0, x * x + y * y);
      for (int ch = 0; ch < p.channels; ++ch) {
        double v = kBackground[ch] * falloff + kContrast[ch] * smooth[i];
        if (p.noise_sigma > 0.0) v += noise(rng);
        pixels[i * p.channels + ch] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }

  return {Image(p.height, p.width, p.channels, std::move(pixels)),
          Mask(p.height, p.width, std::move(truth)), Mask(p.height, p.width, std::move(roi))};
}

}  // namespace rgseg
