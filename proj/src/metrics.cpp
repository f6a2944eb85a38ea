#include "rgseg/metrics.hpp"

#include "rgseg/components.hpp"
#include "rgseg/distance.hpp"

namespace rgseg {

namespace {

struct Overlap {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t both = 0;
};

Overlap overlap(const Mask& a, const Mask& b, const char* what) {
  require_shape(a.height(), a.width(), b.height(), b.width(), what);
  Overlap o;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a.data()[i];
    const bool y = b.data()[i];
    o.a += x;
    o.b += y;
    o.both += x && y;
  }
  return o;
}

double directed_sum(const Mask& from, const DistanceField& to) {
  double sum = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from.data()[i]) sum += to.distance(i);
  }
  return sum;
}

}  // namespace

double dice(const Mask& a, const Mask& b) {
  const Overlap o = overlap(a, b, "dice");
  if (o.a + o.b == 0) return 1.0;
  return 2.0 * static_cast<double>(o.both) / static_cast<double>(o.a + o.b);
}

double jaccard(const Mask& a, const Mask& b) {
  const Overlap o = overlap(a, b, "jaccard");
  const std::size_t uni = o.a + o.b - o.both;
  if (uni == 0) return 1.0;
  return static_cast<double>(o.both) / static_cast<double>(uni);
}

std::optional<double> mssd(const Mask& a, const Mask& b) {
  const Overlap o = overlap(a, b, "mssd");
  if (o.a == 0 && o.b == 0) return 0.0;
  if (o.a == 0 || o.b == 0) return std::nullopt;
  const double total = directed_sum(a, distance_field(b)) + directed_sum(b, distance_field(a));
  return total / static_cast<double>(o.a + o.b);
}

MetricReport evaluate(const Mask& pred, const Mask& truth, const Mask& roi, bool keep_largest,
                      int connectivity) {
  require_shape(pred.height(), pred.width(), truth.height(), truth.width(), "evaluate truth");
  require_shape(pred.height(), pred.width(), roi.height(), roi.width(), "evaluate roi");
  Mask p = mask_and(pred, roi);
  const Mask t = mask_and(truth, roi);
  if (keep_largest) p = largest_component(p, connectivity);
  return {dice(p, t), jaccard(p, t), mssd(p, t)};
}

}  // namespace rgseg
