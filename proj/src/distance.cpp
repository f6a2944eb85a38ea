#include "rgseg/distance.hpp"

#include <cmath>

#include "rgseg/error.hpp"

namespace rgseg {

namespace {

constexpr std::int64_t kInf = DistanceField::kInfinite;

// 1-D squared distance transform of a sampled function `f` (kInf marks
// missing samples) via the lower envelope of parabolas rooted at each
// finite sample.
class Envelope1d {
 public:
  explicit Envelope1d(int n) : roots_(n), bounds_(n + 1) {}

  void transform(const std::int64_t* f, std::int64_t* out, int n, std::size_t stride) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
      const std::int64_t fq = f[q * stride];
      if (fq == kInf) continue;
      while (true) {
        if (k < 0) {
          k = 0;
          roots_[0] = q;
          bounds_[0] = -std::numeric_limits<double>::infinity();
          bounds_[1] = std::numeric_limits<double>::infinity();
          break;
        }
        const int v = roots_[k];
        const std::int64_t fv = f[static_cast<std::size_t>(v) * stride];
        const double s = static_cast<double>((fq + std::int64_t{q} * q) - (fv + std::int64_t{v} * v)) /
                         static_cast<double>(2 * (q - v));
        if (s <= bounds_[k]) {
          --k;
          continue;
        }
        ++k;
        roots_[k] = q;
        bounds_[k] = s;
        bounds_[k + 1] = std::numeric_limits<double>::infinity();
        break;
      }
    }
    if (k < 0) {
      for (int q = 0; q < n; ++q) out[q * stride] = kInf;
      return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (bounds_[j + 1] < q) ++j;
      const std::int64_t d = q - roots_[j];
      out[q * stride] = d * d + f[static_cast<std::size_t>(roots_[j]) * stride];
    }
  }

 private:
  std::vector<int> roots_;
  std::vector<double> bounds_;
};

}  // namespace

double DistanceField::distance(int row, int col) const {
  return distance(static_cast<std::size_t>(row) * width_ + col);
}

double DistanceField::distance(std::size_t index) const {
  const std::int64_t s = squared_[index];
  return s == kInf ? std::numeric_limits<double>::infinity() : std::sqrt(static_cast<double>(s));
}

DistanceField distance_field(const Mask& mask) {
  if (mask.count() == 0) throw UndefinedDistanceError("distance field of an empty mask");
  const int h = mask.height();
  const int w = mask.width();
  std::vector<std::int64_t> f(mask.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = mask.data()[i] ? 0 : kInf;

  std::vector<std::int64_t> columns(f.size());
  Envelope1d col_env(h);
  for (int c = 0; c < w; ++c) {
    col_env.transform(f.data() + c, columns.data() + c, h, static_cast<std::size_t>(w));
  }
  std::vector<std::int64_t> out(f.size());
  Envelope1d row_env(w);
  for (int r = 0; r < h; ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * w;
    row_env.transform(columns.data() + off, out.data() + off, w, 1);
  }
  return DistanceField(h, w, std::move(out));
}

}  // namespace rgseg
