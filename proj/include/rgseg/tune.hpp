#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rgseg/dataset.hpp"
#include "rgseg/image.hpp"

namespace rgseg {

enum class Metric { dice, jaccard, mssd };

std::string to_string(Metric m);
/// Throws ParameterError on an unknown name.
Metric parse_metric(const std::string& name);

/// Segments one validation triple at a threshold.
using Segmenter = std::function<Mask(const Triple&, double threshold)>;

struct TuneResult {
  Metric metric = Metric::dice;
  double threshold = 0.0;
  double score = 0.0;
  /// Mean score at each grid threshold, grid order; +inf marks an
  /// undefined MSSD.
  std::vector<double> grid_scores;
};

/// 0.05, 0.10, ..., 0.95.
std::vector<double> default_threshold_grid();

/// Segments every validation triple once per grid threshold and scores all
/// requested metrics from the same segmentations. Dice and Jaccard are
/// maximised, MSSD minimised with undefined values counted as +inf; ties go
/// to the smallest threshold. Throws TuningError when every threshold gives
/// an undefined score.
std::vector<TuneResult> tune_thresholds(const Segmenter& segment,
                                        std::span<const Triple> validation,
                                        std::span<const Metric> metrics,
                                        std::span<const double> grid, bool keep_largest = false);

TuneResult tune_threshold(const Segmenter& segment, std::span<const Triple> validation,
                          Metric metric, std::span<const double> grid, bool keep_largest = false);

}  // namespace rgseg
