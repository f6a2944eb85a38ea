#include "rgseg/grow.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "rgseg/error.hpp"

namespace rgseg {

void GrowConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ParameterError("threshold must lie in (0,1)");
  if (n_seeds < 1) throw ParameterError("n_seeds must be >= 1");
  if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
  if (max_iterations < 0) throw ParameterError("max_iterations must be >= 0");
  if (n_threads < 1) throw ParameterError("n_threads must be >= 1");
}

VoteAccumulator::VoteAccumulator(int height, int width)
    : height_(height),
      width_(width),
      sum_(static_cast<std::size_t>(height) * width, 0.0),
      count_(sum_.size(), 0) {}

ProbMap VoteAccumulator::average_map() const {
  std::vector<float> values(sum_.size(), 0.0f);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (count_[i] > 0) values[i] = static_cast<float>(average(i));
  }
  return ProbMap(height_, width_, std::move(values));
}

Mask GrowResult::snapshot(long iteration) const {
  std::vector<std::uint8_t> bits(admitted_at.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = admitted_at[i] > 0 && admitted_at[i] <= iteration;
  }
  return Mask(mask.height(), mask.width(), std::move(bits));
}

Frontier sample_seeds(const Mask& roi, int n_seeds, std::uint64_t rng_seed) {
  if (n_seeds < 1) throw ParameterError("n_seeds must be >= 1");
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < roi.size(); ++i) {
    if (roi.data()[i]) candidates.push_back(i);
  }
  if (candidates.empty()) throw ParameterError("cannot sample seeds from an empty RoI");

  const std::size_t take = std::min<std::size_t>(n_seeds, candidates.size());
  std::mt19937_64 rng(rng_seed);
  // Partial Fisher-Yates: the first `take` slots are a uniform sample.
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  candidates.resize(take);
  std::sort(candidates.begin(), candidates.end());

  Frontier f;
  f.pixels.reserve(take);
  for (std::size_t idx : candidates) {
    f.pixels.push_back({static_cast<int>(idx / roi.width()), static_cast<int>(idx % roi.width())});
  }
  return f;
}

GrowResult grow_from_seeds(const ImageScorer& scorer, const Mask& roi, Frontier seeds,
                           const GrowConfig& config) {
  config.validate();
  require_shape(scorer.height(), scorer.width(), roi.height(), roi.width(), "grow_region roi");
  const int height = roi.height();
  const int width = roi.width();
  const std::size_t area = static_cast<std::size_t>(height) * width;
  for (const Pixel& p : seeds.pixels) {
    if (!roi.contains(p) || !roi.at(p)) throw ParameterError("seed outside the RoI");
  }
  std::sort(seeds.pixels.begin(), seeds.pixels.end());
  seeds.pixels.erase(std::unique(seeds.pixels.begin(), seeds.pixels.end()), seeds.pixels.end());

  GrowResult result;
  result.mask = Mask(height, width);
  result.votes = VoteAccumulator(height, width);
  result.admitted_at.assign(area, 0);
  result.seeds = seeds;

  const long cap = config.max_iterations > 0 ? config.max_iterations : static_cast<long>(area);
  const int k = scorer.out_size();
  const int half = k / 2;
  std::vector<long> touched_in(area, 0);
  std::vector<std::size_t> touched;
  std::vector<Pixel> frontier = std::move(seeds.pixels);

  while (!frontier.empty() && result.iterations < cap) {
    const long iter = ++result.iterations;
    touched.clear();
    for (std::size_t begin = 0; begin < frontier.size(); begin += config.batch_size) {
      const std::size_t end = std::min(frontier.size(), begin + config.batch_size);
      const auto batch = classify_batch(
          scorer, std::span<const Pixel>(frontier.data() + begin, end - begin), config.n_threads);
      for (const auto& pred : batch) {
        for (int i = 0; i < k; ++i) {
          const int r = pred.center.row + i - half;
          if (r < 0 || r >= height) continue;
          for (int j = 0; j < k; ++j) {
            const int c = pred.center.col + j - half;
            if (c < 0 || c >= width) continue;
            const std::size_t idx = static_cast<std::size_t>(r) * width + c;
            result.votes.add(idx, pred.at(i, j));
            if (touched_in[idx] != iter) {
              touched_in[idx] = iter;
              touched.push_back(idx);
            }
          }
        }
      }
    }
    result.pixels_evaluated += frontier.size();

    // Only pixels that received a vote this iteration can change state.
    std::sort(touched.begin(), touched.end());
    std::vector<Pixel> next;
    for (std::size_t idx : touched) {
      if (!roi.data()[idx] || result.admitted_at[idx] != 0) continue;
      if (result.votes.average(idx) > config.threshold) {
        result.admitted_at[idx] = static_cast<std::int32_t>(iter);
        next.push_back({static_cast<int>(idx / width), static_cast<int>(idx % width)});
      }
    }
    frontier = std::move(next);
  }

  std::vector<std::uint8_t> bits(area);
  for (std::size_t i = 0; i < area; ++i) bits[i] = result.admitted_at[i] != 0;
  result.mask = Mask(height, width, std::move(bits));
  return result;
}

GrowResult grow_region(const Image& img, const Mask& roi, const Classifier& classifier,
                       const GrowConfig& config) {
  config.validate();
  require_shape(img.height(), img.width(), roi.height(), roi.width(), "grow_region roi");
  const auto scorer = classifier.bind(img);
  return grow_from_seeds(*scorer, roi, sample_seeds(roi, config.n_seeds, config.rng_seed),
                         config);
}

Mask dense_threshold_segment(const ProbMap& map, const Mask& roi, double threshold) {
  require_shape(map.height(), map.width(), roi.height(), roi.width(), "dense threshold roi");
  std::vector<std::uint8_t> bits(roi.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = roi.data()[i] && map.values()[i] > threshold;
  }
  return Mask(map.height(), map.width(), std::move(bits));
}

}  // namespace rgseg
