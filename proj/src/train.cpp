#include "rgseg/train.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rgseg/error.hpp"
#include "rgseg/features.hpp"

namespace rgseg {

namespace {

constexpr double kProbEpsilon = 1e-7;

std::uint64_t encode(int image, std::size_t pixel) {
  return (static_cast<std::uint64_t>(image) << 32) | static_cast<std::uint64_t>(pixel);
}

TrainSample make_sample(int image_index, const Mask& truth, const WeightMap& weights,
                        Pixel center, int out_size) {
  TrainSample s;
  s.image_index = image_index;
  s.center = center;
  s.label.assign(static_cast<std::size_t>(out_size) * out_size, 0);
  s.weight.assign(s.label.size(), 1.0);
  const int half = out_size / 2;
  for (int i = 0; i < out_size; ++i) {
    for (int j = 0; j < out_size; ++j) {
      const int r = center.row + i - half;
      const int c = center.col + j - half;
      if (r < 0 || c < 0 || r >= truth.height() || c >= truth.width()) continue;
      s.label[static_cast<std::size_t>(i) * out_size + j] = truth.at(r, c);
      s.weight[static_cast<std::size_t>(i) * out_size + j] = weights.at(r, c);
    }
  }
  return s;
}

TrainSample decode_sample(std::span<const Triple> triples, const std::vector<WeightMap>& weights,
                          std::uint64_t code, int out_size) {
  const int image = static_cast<int>(code >> 32);
  const std::size_t pixel = code & 0xffffffffu;
  const Mask& truth = triples[image].truth;
  const Pixel center{static_cast<int>(pixel / truth.width()),
                     static_cast<int>(pixel % truth.width())};
  return make_sample(image, truth, weights[image], center, out_size);
}

std::vector<WeightMap> weight_maps(std::span<const Triple> triples, double boundary_weight) {
  std::vector<WeightMap> maps;
  maps.reserve(triples.size());
  for (const auto& t : triples) {
    check_triple(t);
    maps.push_back(boundary_weight_map(t.truth, boundary_weight));
  }
  return maps;
}

// Rotates a square row-major grid with `per_cell` interleaved values by 90
// degrees counter-clockwise: new(r, c) = old(c, n - 1 - r).
template <typename T>
std::vector<T> rotate_ccw(const std::vector<T>& grid, int n, int per_cell) {
  std::vector<T> out(grid.size());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t dst = (static_cast<std::size_t>(r) * n + c) * per_cell;
      const std::size_t src = (static_cast<std::size_t>(c) * n + (n - 1 - r)) * per_cell;
      std::copy_n(grid.begin() + src, per_cell, out.begin() + dst);
    }
  }
  return out;
}

// Square tile of odd side 2*half+1 centred exactly on `center`, zero padded.
Image extract_centered_tile(const Image& img, Pixel center, int half) {
  const int side = 2 * half + 1;
  const int channels = img.channels();
  std::vector<float> data(static_cast<std::size_t>(side) * side * channels, 0.0f);
  for (int i = 0; i < side; ++i) {
    const int r = center.row - half + i;
    if (r < 0 || r >= img.height()) continue;
    for (int j = 0; j < side; ++j) {
      const int c = center.col - half + j;
      if (c < 0 || c >= img.width()) continue;
      for (int ch = 0; ch < channels; ++ch) {
        data[(static_cast<std::size_t>(i) * side + j) * channels + ch] = img.at(r, c, ch);
      }
    }
  }
  return Image(side, side, channels, std::move(data));
}

Image crop_top_left(const Image& tile, int side) {
  const int channels = tile.channels();
  std::vector<float> data(static_cast<std::size_t>(side) * side * channels);
  for (int r = 0; r < side; ++r) {
    const std::size_t src = static_cast<std::size_t>(r) * tile.width() * channels;
    std::copy_n(tile.data().begin() + src, side * channels,
                data.begin() + static_cast<std::size_t>(r) * side * channels);
  }
  return Image(side, side, channels, std::move(data));
}

// Features of one sample; with augmentation the label and weight grids are
// rotated along with the tile.
std::vector<double> sample_features(const ClassifierModel& model, std::span<const Triple> triples,
                                    TrainSample& s, const TrainConfig* augment_with,
                                    std::mt19937_64* rng) {
  const Image& img = triples[s.image_index].image;
  const int tile_size = model.config.tile_size;
  if (augment_with == nullptr) {
    return feature_extract(extract_tile(img, s.center, tile_size), model.features, tile_size);
  }
  // Rotate an odd tile about its centre pixel, then drop the last row and
  // column to get the even-size tile convention back.
  Image odd = extract_centered_tile(img, s.center, tile_size / 2);
  augment(odd, s.label, s.weight, *rng, augment_with->brightness, augment_with->contrast);
  return feature_extract(crop_top_left(odd, tile_size), model.features, tile_size);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ParameterError("epochs must be >= 1");
  if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("learning_rate must be finite and >= 0");
  }
  if (!(boundary_weight >= 1.0)) throw ParameterError("boundary_weight must be >= 1");
  if (samples_per_count < 1) throw ParameterError("samples_per_count must be >= 1");
  if (val_samples_per_count < 1) throw ParameterError("val_samples_per_count must be >= 1");
  if (pretrain_samples < 0) throw ParameterError("pretrain_samples must be >= 0");
  if (!(brightness >= 0.0) || !(contrast >= 0.0 && contrast < 1.0)) {
    throw ParameterError("augmentation ranges must satisfy brightness >= 0, 0 <= contrast < 1");
  }
}

int neighborhood_count(const Mask& truth, Pixel pixel) {
  if (!truth.contains(pixel)) throw BoundsError("neighborhood_count: pixel outside mask");
  int count = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const Pixel q{pixel.row + dr, pixel.col + dc};
      if (truth.contains(q)) count += truth.at(q);
    }
  }
  return count;
}

WeightMap boundary_weight_map(const Mask& truth, double boundary_weight) {
  const int h = truth.height();
  const int w = truth.width();
  const auto foreground = [&](int r, int c) {
    return r >= 0 && c >= 0 && r < h && c < w && truth.at(r, c) == 1;
  };
  std::vector<std::uint8_t> contour(truth.size(), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!foreground(r, c)) continue;
      bool edge = false;
      for (int dr = -1; dr <= 1 && !edge; ++dr) {
        for (int dc = -1; dc <= 1 && !edge; ++dc) edge = !foreground(r + dr, c + dc);
      }
      contour[static_cast<std::size_t>(r) * w + c] = edge;
    }
  }
  WeightMap map{h, w, std::vector<double>(truth.size(), 1.0)};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!contour[static_cast<std::size_t>(r) * w + c]) continue;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
          // The contour pixel itself and its background neighbours.
          if ((dr == 0 && dc == 0) || !foreground(rr, cc)) {
            map.weights[static_cast<std::size_t>(rr) * w + cc] = boundary_weight;
          }
        }
      }
    }
  }
  return map;
}

std::vector<TrainSample> balanced_sample(std::span<const Triple> triples, int samples_per_count,
                                         std::uint64_t rng_seed, double boundary_weight,
                                         int out_size) {
  if (samples_per_count < 1) throw ParameterError("samples_per_count must be >= 1");
  if (out_size < 1 || out_size % 2 == 0) throw ParameterError("out_size must be odd");
  const auto weights = weight_maps(triples, boundary_weight);

  std::array<std::vector<std::uint64_t>, 10> buckets;
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const Mask& truth = triples[t].truth;
    const Mask& roi = triples[t].roi;
    for (int r = 0; r < truth.height(); ++r) {
      for (int c = 0; c < truth.width(); ++c) {
        if (!roi.at(r, c)) continue;
        const int n = neighborhood_count(truth, {r, c});
        buckets[n].push_back(encode(static_cast<int>(t), static_cast<std::size_t>(r) * truth.width() + c));
      }
    }
  }
  if (std::all_of(buckets.begin(), buckets.end(), [](const auto& b) { return b.empty(); })) {
    throw DataError("no RoI pixels to sample from");
  }

  std::mt19937_64 rng(rng_seed);
  std::vector<TrainSample> out;
  for (auto& bucket : buckets) {
    const std::size_t take = std::min<std::size_t>(samples_per_count, bucket.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, bucket.size() - 1);
      std::swap(bucket[i], bucket[pick(rng)]);
      out.push_back(decode_sample(triples, weights, bucket[i], out_size));
    }
  }
  return out;
}

std::vector<TrainSample> pretrain_sample(std::span<const Triple> triples, int n,
                                         std::uint64_t rng_seed, double boundary_weight,
                                         int out_size) {
  if (n < 1) throw ParameterError("pre-training sample size must be >= 1");
  const auto weights = weight_maps(triples, boundary_weight);
  std::vector<std::uint64_t> fg;
  std::vector<std::uint64_t> bg;
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const Mask& truth = triples[t].truth;
    const Mask& roi = triples[t].roi;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (!roi.data()[i]) continue;
      (truth.data()[i] ? fg : bg).push_back(encode(static_cast<int>(t), i));
    }
  }
  if (fg.empty() || bg.empty()) {
    throw DataError("pre-training needs both foreground and background RoI pixels");
  }
  std::mt19937_64 rng(rng_seed);
  std::vector<TrainSample> out;
  const int n_fg = (n + 1) / 2;
  for (int i = 0; i < n; ++i) {
    const auto& pool = i < n_fg ? fg : bg;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    out.push_back(decode_sample(triples, weights, pool[pick(rng)], out_size));
  }
  return out;
}

double weighted_cross_entropy(std::span<const double> pred, std::span<const std::uint8_t> label,
                              std::span<const double> weight) {
  if (pred.size() != label.size() || pred.size() != weight.size() || pred.empty()) {
    throw ShapeError("weighted_cross_entropy: mismatched or empty grids");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kProbEpsilon, 1.0 - kProbEpsilon);
    total += weight[i] * (label[i] ? -std::log(p) : -std::log(1.0 - p));
  }
  return total / static_cast<double>(pred.size());
}

double sample_loss(std::span<const double> params, std::span<const double> features,
                   std::span<const std::uint8_t> label, std::span<const double> weight,
                   std::span<double> grad, double scale) {
  const std::size_t positions = label.size();
  const std::size_t dim = features.size();
  const std::size_t block = dim + 1;
  if (params.size() != positions * block || weight.size() != positions) {
    throw ShapeError("sample_loss: parameter layout does not match sample");
  }
  if (!grad.empty() && grad.size() != params.size()) throw ShapeError("gradient buffer size");
  std::vector<double> probs(positions);
  for (std::size_t k = 0; k < positions; ++k) {
    const double* w = params.data() + k * block;
    double z = w[dim];
    for (std::size_t d = 0; d < dim; ++d) z += w[d] * features[d];
    probs[k] = 1.0 / (1.0 + std::exp(-z));
    if (grad.empty()) continue;
    // Clamped predictions have zero derivative.
    if (probs[k] <= kProbEpsilon || probs[k] >= 1.0 - kProbEpsilon) continue;
    const double g = scale * weight[k] * (probs[k] - label[k]) / static_cast<double>(positions);
    double* gk = grad.data() + k * block;
    for (std::size_t d = 0; d < dim; ++d) gk[d] += g * features[d];
    gk[dim] += g;
  }
  return weighted_cross_entropy(probs, label, weight);
}

void apply_augmentation(Image& tile, std::vector<std::uint8_t>& label, std::vector<double>& weight,
                        const AugmentParams& params) {
  if (tile.height() != tile.width()) throw ShapeError("augment: tile must be square");
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(label.size()))));
  if (static_cast<std::size_t>(k) * k != label.size() || weight.size() != label.size()) {
    throw ShapeError("augment: label and weight grids must be square and equal size");
  }
  const int turns = ((params.quarter_turns % 4) + 4) % 4;
  std::vector<float> data(tile.data().begin(), tile.data().end());
  for (int t = 0; t < turns; ++t) {
    data = rotate_ccw(data, tile.height(), tile.channels());
    label = rotate_ccw(label, k, 1);
    weight = rotate_ccw(weight, k, 1);
  }
  if (params.brightness != 0.0 || params.contrast != 1.0) {
    for (float& v : data) {
      v = static_cast<float>(
          std::clamp(params.contrast * (v - 0.5) + 0.5 + params.brightness, 0.0, 1.0));
    }
  }
  tile = Image(tile.height(), tile.width(), tile.channels(), std::move(data));
}

AugmentParams augment(Image& tile, std::vector<std::uint8_t>& label, std::vector<double>& weight,
                      std::mt19937_64& rng, double brightness, double contrast) {
  AugmentParams p;
  p.quarter_turns = std::uniform_int_distribution<int>(0, 3)(rng);
  p.brightness = std::uniform_real_distribution<double>(-brightness, brightness)(rng);
  p.contrast = std::uniform_real_distribution<double>(1.0 - contrast, 1.0 + contrast)(rng);
  apply_augmentation(tile, label, weight, p);
  return p;
}

double mean_loss(const ClassifierModel& model, std::span<const Triple> triples,
                 std::span<const TrainSample> samples) {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (TrainSample s : samples) {
    const auto features = sample_features(model, triples, s, nullptr, nullptr);
    total += weighted_cross_entropy(predict_from_features(model, features), s.label, s.weight);
  }
  return total / static_cast<double>(samples.size());
}

FitResult fit(const ClassifierModel& initial, const DatasetSplit& split, const TrainConfig& config) {
  config.validate();
  check_model(initial);
  if (initial.config.n_classes != 2) {
    throw ParameterError("training supports two-class models only");
  }
  if (split.train.empty()) throw DataError("training split is empty");
  for (const auto& t : split.train) {
    if (t.image.channels() != initial.features.channels) {
      throw ShapeError("image '" + t.id + "' channel count does not match the model");
    }
  }
  const int out_size = initial.config.out_size;
  std::mt19937_64 master(config.rng_seed);

  FitResult result{initial, {}, 0.0};
  std::vector<double> params(initial.weights.begin(), initial.weights.end());

  // Validation tiles: drawn once, never augmented.
  std::vector<TrainSample> val_samples;
  std::vector<std::vector<double>> val_features;
  if (!split.validation.empty()) {
    val_samples = balanced_sample(split.validation, config.val_samples_per_count, master(),
                                  config.boundary_weight, out_size);
    for (auto& s : val_samples) {
      val_features.push_back(sample_features(initial, split.validation, s, nullptr, nullptr));
    }
  }
  const auto validation_loss = [&] {
    if (val_samples.empty()) return std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    for (std::size_t i = 0; i < val_samples.size(); ++i) {
      total += sample_loss(params, val_features[i], val_samples[i].label, val_samples[i].weight);
    }
    return total / static_cast<double>(val_samples.size());
  };
  result.initial_val_loss = validation_loss();

  std::vector<double> grad(params.size());
  const auto run_epoch = [&](std::vector<TrainSample> samples, int epoch) {
    std::mt19937_64 rng(master());
    std::shuffle(samples.begin(), samples.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < samples.size(); begin += config.batch_size) {
      const std::size_t end = std::min(samples.size(), begin + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - begin);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = begin; i < end; ++i) {
        TrainSample& s = samples[i];
        const auto features = sample_features(initial, split.train, s,
                                              config.augment ? &config : nullptr, &rng);
        total += sample_loss(params, features, s.label, s.weight, grad, scale);
      }
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= config.learning_rate * grad[p];
    }
    const double train_loss = total / static_cast<double>(samples.size());
    if (!std::isfinite(train_loss)) {
      throw TrainingError("training loss diverged in epoch " + std::to_string(epoch));
    }
    for (double p : params) {
      if (!std::isfinite(p)) throw TrainingError("non-finite weights in epoch " + std::to_string(epoch));
    }
    result.history.push_back({epoch, train_loss, validation_loss()});
  };

  if (config.pretrain) {
    const int n = config.pretrain_samples > 0 ? config.pretrain_samples
                                              : 10 * config.samples_per_count;
    run_epoch(pretrain_sample(split.train, n, master(), config.boundary_weight, out_size), 0);
  }
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    run_epoch(balanced_sample(split.train, config.samples_per_count, master(),
                              config.boundary_weight, out_size),
              epoch);
  }

  std::transform(params.begin(), params.end(), result.model.weights.begin(),
                 [](double p) { return static_cast<float>(p); });
  return result;
}

}  // namespace rgseg
