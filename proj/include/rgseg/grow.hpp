#pragma once

#include <cstdint>
#include <vector>

#include "rgseg/classifier.hpp"
#include "rgseg/image.hpp"

namespace rgseg {

struct GrowConfig {
  /// Admission requires average vote > threshold.
  double threshold = 0.5;
  int n_seeds = 10000;
  /// Frontier pixels classified per classifier call.
  int batch_size = 100;
  std::uint64_t rng_seed = 0;
  /// Iteration cap; 0 means height x width.
  long max_iterations = 0;
  /// Worker threads used inside one classifier batch.
  int n_threads = 1;

  void validate() const;
};

/// Pixels pending classification. Row-major sorted, no duplicates.
struct Frontier {
  std::vector<Pixel> pixels;

  bool empty() const { return pixels.empty(); }
  std::size_t size() const { return pixels.size(); }
};

/// Running per-pixel sum and count of foreground votes.
class VoteAccumulator {
 public:
  VoteAccumulator() = default;
  VoteAccumulator(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }

  void add(std::size_t index, double prob) {
    sum_[index] += prob;
    ++count_[index];
  }
  double sum(std::size_t index) const { return sum_[index]; }
  std::uint32_t count(std::size_t index) const { return count_[index]; }
  /// sum / count; only meaningful where count > 0.
  double average(std::size_t index) const { return sum_[index] / count_[index]; }

  /// Average vote per pixel, 0 where no vote was cast.
  ProbMap average_map() const;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> sum_;
  std::vector<std::uint32_t> count_;
};

struct GrowResult {
  Mask mask;
  long iterations = 0;
  VoteAccumulator votes;
  std::size_t pixels_evaluated = 0;
  /// Iteration (1-based) in which each pixel was admitted, 0 if never.
  std::vector<std::int32_t> admitted_at;
  Frontier seeds;

  /// Mask as it stood after `iteration` iterations.
  Mask snapshot(long iteration) const;
};

/// min(n_seeds, |roi|) distinct RoI pixels drawn uniformly without
/// replacement. Throws ParameterError when the RoI is empty.
Frontier sample_seeds(const Mask& roi, int n_seeds, std::uint64_t rng_seed);

/// Region growing driven by neighborhood votes.
///
/// Each iteration classifies every frontier pixel and adds its out_size^2
/// neighborhood probabilities to the vote accumulator. Once all votes of the
/// iteration are in, every RoI pixel not yet admitted whose cumulative
/// average exceeds the threshold is admitted; the admitted pixels form the
/// next frontier. The loop ends when the frontier is empty or the iteration
/// cap is hit. Votes accumulate in frontier order, so batch size and thread
/// count do not change the result.
GrowResult grow_region(const Image& img, const Mask& roi, const Classifier& classifier,
                       const GrowConfig& config);

/// Same, with an already bound scorer and explicit seeds.
GrowResult grow_from_seeds(const ImageScorer& scorer, const Mask& roi, Frontier seeds,
                           const GrowConfig& config);

/// mask(p) = map(p) > threshold and roi(p).
Mask dense_threshold_segment(const ProbMap& map, const Mask& roi, double threshold);

}  // namespace rgseg
