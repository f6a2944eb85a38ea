#include "rgseg/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "rgseg/error.hpp"

namespace rgseg {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "RGMODELv1";

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) buf.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

class Reader {
 public:
  Reader(std::vector<unsigned char> bytes, const fs::path& path)
      : bytes_(std::move(bytes)), path_(path) {}

  std::uint32_t u32() {
    if (bytes_.size() - pos_ < 4) throw IoError("truncated model file: " + path_.string());
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += 4;
    return v;
  }

  bool starts_with(std::string_view magic) {
    if (bytes_.size() < magic.size()) return false;
    if (std::memcmp(bytes_.data(), magic.data(), magic.size()) != 0) return false;
    pos_ = magic.size();
    return true;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::vector<unsigned char> bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

int to_int(std::uint32_t v) {
  if (v > static_cast<std::uint32_t>(1) << 30) throw FormatError("model field out of range");
  return static_cast<int>(v);
}

}  // namespace

ClassifierModel make_model(const ClassifierConfig& config, const FeatureSpec& features) {
  config.validate();
  features.validate(config.tile_size);
  ClassifierModel m{config, features, {}, kModelVersion};
  m.weights.assign(m.expected_weight_count(), 0.0f);
  return m;
}

void check_model(const ClassifierModel& model) {
  try {
    model.config.validate();
    model.features.validate(model.config.tile_size);
  } catch (const ParameterError& e) {
    throw InvariantError(std::string("invalid model configuration: ") + e.what());
  }
  if (model.weights.empty() || model.weights.size() != model.expected_weight_count()) {
    throw InvariantError("model has " + std::to_string(model.weights.size()) +
                         " weights, expected " + std::to_string(model.expected_weight_count()));
  }
}

std::vector<double> predict_from_features(const ClassifierModel& model,
                                          std::span<const double> features) {
  const std::size_t dim = model.features.dimension();
  if (features.size() != dim) throw ShapeError("feature vector has wrong length");
  const int positions = model.config.out_area();
  const int others = model.config.n_classes - 1;
  const std::size_t block = model.block_size();
  std::vector<double> probs(positions);
  std::vector<double> logits(others);
  for (int k = 0; k < positions; ++k) {
    for (int j = 0; j < others; ++j) {
      const float* w = model.weights.data() + (static_cast<std::size_t>(k) * others + j) * block;
      double z = w[dim];
      for (std::size_t d = 0; d < dim; ++d) z += static_cast<double>(w[d]) * features[d];
      logits[j] = z;
    }
    if (others == 1) {
      probs[k] = 1.0 / (1.0 + std::exp(-logits[0]));
    } else {
      const double top = std::max(0.0, *std::max_element(logits.begin(), logits.end()));
      double denom = std::exp(-top);
      for (double z : logits) denom += std::exp(z - top);
      probs[k] = std::exp(logits[0] - top) / denom;
    }
  }
  return probs;
}

std::vector<double> predict_model(const ClassifierModel& model, const Image& tile) {
  if (tile.height() != model.config.tile_size || tile.width() != model.config.tile_size ||
      tile.channels() != model.features.channels) {
    throw ShapeError("tile does not match model configuration");
  }
  const auto features = feature_extract(tile, model.features, model.config.tile_size);
  return predict_from_features(model, features);
}

void save_model(const ClassifierModel& model, const fs::path& path) {
  check_model(model);
  std::vector<unsigned char> buf(kMagic.begin(), kMagic.end());
  put_u32(buf, model.version);
  put_u32(buf, 3);
  put_u32(buf, static_cast<std::uint32_t>(model.config.tile_size));
  put_u32(buf, static_cast<std::uint32_t>(model.config.out_size));
  put_u32(buf, static_cast<std::uint32_t>(model.config.n_classes));
  put_u32(buf, 3);
  put_u32(buf, static_cast<std::uint32_t>(model.features.pool_grid));
  put_u32(buf, static_cast<std::uint32_t>(model.features.center_window));
  put_u32(buf, static_cast<std::uint32_t>(model.features.channels));
  put_u32(buf, static_cast<std::uint32_t>(model.weights.size()));
  for (float w : model.weights) put_u32(buf, std::bit_cast<std::uint32_t>(w));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

ClassifierModel load_model(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  Reader reader(std::move(bytes), path);
  if (!reader.starts_with(kMagic)) throw FormatError("not a model file: " + path.string());

  ClassifierModel m;
  m.version = reader.u32();
  if (m.version != kModelVersion) {
    throw FormatError("unsupported model version " + std::to_string(m.version));
  }
  if (reader.u32() != 3) throw FormatError("bad config section length");
  m.config.tile_size = to_int(reader.u32());
  m.config.out_size = to_int(reader.u32());
  m.config.n_classes = to_int(reader.u32());
  if (reader.u32() != 3) throw FormatError("bad feature section length");
  m.features.pool_grid = to_int(reader.u32());
  m.features.center_window = to_int(reader.u32());
  m.features.channels = to_int(reader.u32());
  const std::uint32_t n = reader.u32();
  m.weights.reserve(std::min<std::uint32_t>(n, 1u << 24));
  for (std::uint32_t i = 0; i < n; ++i) m.weights.push_back(std::bit_cast<float>(reader.u32()));
  if (!reader.at_end()) throw FormatError("trailing bytes in model file: " + path.string());
  try {
    check_model(m);
  } catch (const InvariantError& e) {
    throw FormatError(std::string("corrupt model file: ") + e.what());
  }
  return m;
}

namespace {

class ModelScorer final : public ImageScorer {
 public:
  ModelScorer(std::shared_ptr<const ClassifierModel> model, const Image& img)
      : ImageScorer(img.height(), img.width(), model->config.out_size),
        model_(std::move(model)),
        index_(img, model_->features, model_->config.tile_size) {}

 protected:
  void do_predict(Pixel center, std::span<double> out) const override {
    std::vector<double> features(index_.dimension());
    index_.extract(center, features);
    const auto probs = predict_from_features(*model_, features);
    std::copy(probs.begin(), probs.end(), out.begin());
  }

 private:
  std::shared_ptr<const ClassifierModel> model_;
  FeatureIndex index_;
};

class ModelClassifier final : public Classifier {
 public:
  explicit ModelClassifier(ClassifierModel model)
      : model_(std::make_shared<const ClassifierModel>(std::move(model))) {
    check_model(*model_);
  }

  const ClassifierConfig& config() const override { return model_->config; }

  std::unique_ptr<const ImageScorer> bind(const Image& img) const override {
    return std::make_unique<ModelScorer>(model_, img);
  }

 private:
  std::shared_ptr<const ClassifierModel> model_;
};

}  // namespace

std::unique_ptr<Classifier> model_classifier(ClassifierModel model) {
  return std::make_unique<ModelClassifier>(std::move(model));
}

}  // namespace rgseg
