#pragma once

#include <optional>

#include "rgseg/image.hpp"

namespace rgseg {

/// 2|a∩b| / (|a|+|b|); 1.0 when both masks are empty.
double dice(const Mask& a, const Mask& b);

/// |a∩b| / |a∪b|; 1.0 when both masks are empty.
double jaccard(const Mask& a, const Mask& b);

/// Mean symmetric surface distance over all mask pixels:
///   (sum_{p in a} d(p, b) + sum_{q in b} d(q, a)) / (|a| + |b|)
/// with d the Euclidean distance to the nearest foreground pixel. 0 when
/// both masks are empty; nullopt (undefined) when exactly one is.
std::optional<double> mssd(const Mask& a, const Mask& b);

struct MetricReport {
  double dice = 0.0;
  double jaccard = 0.0;
  std::optional<double> mssd;
};

/// Restricts both masks to the RoI, optionally keeps only the largest
/// 8-connected component of the prediction, then scores it.
MetricReport evaluate(const Mask& pred, const Mask& truth, const Mask& roi, bool keep_largest,
                      int connectivity = 8);

}  // namespace rgseg
