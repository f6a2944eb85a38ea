#pragma once

#include <cstdint>

#include "rgseg/image.hpp"

namespace rgseg {

/// Parameters of the branching-random-walk vessel phantom.
struct SynthParams {
  int height = 512;
  int width = 512;
  int channels = 3;
  int n_trees = 1;
  /// Probability that a walker spawns a branch at each unit step.
  double branch_prob = 0.02;
  double width_min = 2.0;
  double width_max = 5.0;
  double noise_sigma = 0.05;
  std::uint64_t rng_seed = 0;
  /// Redraw a tree if its 1-pixel dilation touches an earlier tree, so the
  /// truth mask has exactly n_trees 8-connected components.
  bool separate_trees = false;
};

struct SynthImage {
  Image image;
  Mask truth;
  Mask roi;
};

/// Throws ParameterError on invalid params (zero area, bad ranges).
void validate(const SynthParams& params);

/// Deterministic in `params.rng_seed`. The truth mask is a union of
/// tree-shaped strokes, each one 8-connected component lying inside the
/// RoI; the RoI is the ellipse with radii 0.47 x height and 0.47 x width.
SynthImage generate_synthetic(const SynthParams& params);

}  // namespace rgseg
