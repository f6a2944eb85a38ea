#include "rgseg/tune.hpp"

#include <cmath>
#include <limits>

#include "rgseg/error.hpp"
#include "rgseg/metrics.hpp"

namespace rgseg {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::dice:
      return "dice";
    case Metric::jaccard:
      return "jaccard";
    case Metric::mssd:
      return "mssd";
  }
  return "unknown";
}

Metric parse_metric(const std::string& name) {
  if (name == "dice") return Metric::dice;
  if (name == "jaccard") return Metric::jaccard;
  if (name == "mssd") return Metric::mssd;
  throw ParameterError("unknown metric '" + name + "' (expected dice, jaccard or mssd)");
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

std::vector<TuneResult> tune_thresholds(const Segmenter& segment,
                                        std::span<const Triple> validation,
                                        std::span<const Metric> metrics,
                                        std::span<const double> grid, bool keep_largest) {
  if (grid.empty()) throw ParameterError("threshold grid is empty");
  if (validation.empty()) throw ParameterError("validation set is empty");
  for (double t : grid) {
    if (!std::isfinite(t)) throw ParameterError("threshold grid contains a non-finite value");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(validation.size());

  std::vector<TuneResult> results;
  for (Metric m : metrics) results.push_back({m, 0.0, 0.0, {}});

  for (double threshold : grid) {
    double dice_sum = 0.0;
    double jaccard_sum = 0.0;
    double mssd_sum = 0.0;
    for (const Triple& t : validation) {
      const MetricReport r = evaluate(segment(t, threshold), t.truth, t.roi, keep_largest);
      dice_sum += r.dice;
      jaccard_sum += r.jaccard;
      mssd_sum += r.mssd ? *r.mssd : kInf;
    }
    for (auto& res : results) {
      switch (res.metric) {
        case Metric::dice:
          res.grid_scores.push_back(dice_sum / n);
          break;
        case Metric::jaccard:
          res.grid_scores.push_back(jaccard_sum / n);
          break;
        case Metric::mssd:
          res.grid_scores.push_back(mssd_sum / n);
          break;
      }
    }
  }

  for (auto& res : results) {
    const bool minimise = res.metric == Metric::mssd;
    bool found = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = res.grid_scores[i];
      if (minimise && s == kInf) continue;
      const bool better = !found || (minimise ? s < res.score : s > res.score) ||
                          (s == res.score && grid[i] < res.threshold);
      if (better) {
        res.score = s;
        res.threshold = grid[i];
        found = true;
      }
    }
    if (!found) {
      throw TuningError("every threshold yields an undefined " + to_string(res.metric));
    }
  }
  return results;
}

TuneResult tune_threshold(const Segmenter& segment, std::span<const Triple> validation,
                          Metric metric, std::span<const double> grid, bool keep_largest) {
  const Metric metrics[] = {metric};
  return tune_thresholds(segment, validation, metrics, grid, keep_largest)[0];
}

}  // namespace rgseg
