#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rgseg/dataset.hpp"
#include "rgseg/model.hpp"

namespace rgseg {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 64;
  double learning_rate = 0.5;
  /// Loss multiplier on truth contours and the background ring around them.
  double boundary_weight = 5.0;
  /// Training tiles drawn per neighborhood count (0..9) each epoch.
  int samples_per_count = 500;
  /// Fixed validation tiles per neighborhood count.
  int val_samples_per_count = 100;
  bool pretrain = true;
  /// Pre-training sample size; 0 means 10 x samples_per_count.
  int pretrain_samples = 0;
  bool augment = true;
  /// Brightness shift drawn from [-brightness, brightness].
  double brightness = 0.1;
  /// Contrast scale drawn from [1 - contrast, 1 + contrast].
  double contrast = 0.1;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// One training tile: `center` of triple `image_index`, with the truth
/// labels and loss weights of its out_size x out_size neighborhood
/// (row-major; off-image positions are background with weight 1).
struct TrainSample {
  int image_index = 0;
  Pixel center;
  std::vector<std::uint8_t> label;
  std::vector<double> weight;

  friend bool operator==(const TrainSample&, const TrainSample&) = default;
};

struct WeightMap {
  int height = 0;
  int width = 0;
  std::vector<double> weights;

  double at(int row, int col) const { return weights[static_cast<std::size_t>(row) * width + col]; }
};

/// Foreground pixels in the 3x3 window around `pixel` (off-image counts as
/// background).
int neighborhood_count(const Mask& truth, Pixel pixel);

/// boundary_weight on contour pixels (foreground with a background
/// 8-neighbour, off-image counting as background) and on background pixels
/// 8-adjacent to a contour pixel; 1 elsewhere.
WeightMap boundary_weight_map(const Mask& truth, double boundary_weight);

/// Buckets every RoI pixel by neighborhood_count and draws
/// min(samples_per_count, bucket size) centres from each bucket without
/// replacement. Output is ordered by bucket. Throws DataError when every
/// bucket is empty.
std::vector<TrainSample> balanced_sample(std::span<const Triple> triples, int samples_per_count,
                                         std::uint64_t rng_seed, double boundary_weight = 5.0,
                                         int out_size = 3);

/// ceil(n/2) foreground-centre and floor(n/2) background-centre samples,
/// uniform within each class over the RoI. Throws DataError when a class is
/// absent.
std::vector<TrainSample> pretrain_sample(std::span<const Triple> triples, int n,
                                         std::uint64_t rng_seed, double boundary_weight = 5.0,
                                         int out_size = 3);

/// Mean over positions of weight * binary cross-entropy, with predictions
/// clamped to [1e-7, 1 - 1e-7]. Throws ShapeError on length mismatch.
double weighted_cross_entropy(std::span<const double> pred, std::span<const std::uint8_t> label,
                              std::span<const double> weight);

/// Weighted cross-entropy of one sample for a two-class linear model whose
/// parameters are laid out as in ClassifierModel. When `grad` is non-empty,
/// adds scale * d(loss)/d(params) to it.
double sample_loss(std::span<const double> params, std::span<const double> features,
                   std::span<const std::uint8_t> label, std::span<const double> weight,
                   std::span<double> grad = {}, double scale = 1.0);

struct AugmentParams {
  int quarter_turns = 0;
  double brightness = 0.0;
  double contrast = 1.0;
};

/// Rotates the tile and the label grid by quarter_turns x 90 degrees
/// counter-clockwise (array rotation; for odd sizes the centre is fixed),
/// then maps every value v to clip(contrast * (v - 0.5) + 0.5 + brightness).
void apply_augmentation(Image& tile, std::vector<std::uint8_t>& label, std::vector<double>& weight,
                        const AugmentParams& params);

/// Draws AugmentParams (uniform turns, brightness in [-b, b], contrast in
/// [1 - c, 1 + c]) from `rng` and applies them.
AugmentParams augment(Image& tile, std::vector<std::uint8_t>& label, std::vector<double>& weight,
                      std::mt19937_64& rng, double brightness = 0.1, double contrast = 0.1);

struct EpochLoss {
  int epoch = 0;  // 0 is the pre-training epoch
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct FitResult {
  ClassifierModel model;
  std::vector<EpochLoss> history;
  double initial_val_loss = 0.0;
};

/// Mini-batch SGD on the boundary-weighted cross-entropy. Training samples
/// are redrawn every epoch; the validation sample is drawn once. Throws
/// TrainingError if the loss becomes non-finite.
FitResult fit(const ClassifierModel& model, const DatasetSplit& split, const TrainConfig& config);

/// Mean weighted cross-entropy of `model` over `samples` of `triples`.
double mean_loss(const ClassifierModel& model, std::span<const Triple> triples,
                 std::span<const TrainSample> samples);

}  // namespace rgseg
