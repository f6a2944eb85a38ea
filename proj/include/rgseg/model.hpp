#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "rgseg/classifier.hpp"
#include "rgseg/features.hpp"

namespace rgseg {

inline constexpr std::uint32_t kModelVersion = 1;

/// Linear-softmax neighborhood classifier over patch features. For each of
/// the out_size^2 output positions and each non-reference class there is a
/// block of dimension()+1 weights: feature weights followed by the bias.
/// Class 0 (background) is the reference with logit 0, so for two classes
/// each position is a logistic regression.
struct ClassifierModel {
  ClassifierConfig config;
  FeatureSpec features;
  std::vector<float> weights;
  std::uint32_t version = kModelVersion;

  std::size_t block_size() const { return features.dimension() + 1; }
  std::size_t expected_weight_count() const {
    return static_cast<std::size_t>(config.out_area()) * (config.n_classes - 1) * block_size();
  }

  friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

/// Zero-initialised model (every output 1/n_classes).
ClassifierModel make_model(const ClassifierConfig& config, const FeatureSpec& features);

/// Throws InvariantError on an inconsistent model.
void check_model(const ClassifierModel& model);

/// Foreground (class 1) probability per output position from a feature
/// vector.
std::vector<double> predict_from_features(const ClassifierModel& model,
                                          std::span<const double> features);

/// Same, for a tile. Throws ShapeError when the tile does not match the
/// model configuration.
std::vector<double> predict_model(const ClassifierModel& model, const Image& tile);

/// Binary format: magic "RGMODELv1", u32 version, then three length-prefixed
/// sections (config as u32, feature spec as u32, weights as f32), all
/// little-endian.
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

std::unique_ptr<Classifier> model_classifier(ClassifierModel model);

}  // namespace rgseg
