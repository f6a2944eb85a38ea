#include "rgseg/classifier.hpp"

#include <algorithm>
#include <string>
#include <thread>

#include "rgseg/error.hpp"

namespace rgseg {

void ClassifierConfig::validate() const {
  if (out_size < 1 || out_size % 2 == 0) throw ParameterError("out_size must be odd and >= 1");
  if (tile_size < out_size) throw ParameterError("tile_size must be >= out_size");
  if (n_classes < 2) throw ParameterError("n_classes must be >= 2");
}

void ImageScorer::predict(Pixel center, std::span<double> out) const {
  if (center.row < 0 || center.col < 0 || center.row >= height_ || center.col >= width_) {
    throw BoundsError("classifier centre (" + std::to_string(center.row) + "," +
                      std::to_string(center.col) + ") outside image");
  }
  if (out.size() != static_cast<std::size_t>(out_size_) * out_size_) {
    throw ShapeError("prediction buffer has wrong size");
  }
  do_predict(center, out);
}

std::vector<NeighborhoodPrediction> classify_batch(const ImageScorer& scorer,
                                                   std::span<const Pixel> centers,
                                                   int n_threads) {
  const int k = scorer.out_size();
  std::vector<NeighborhoodPrediction> out(centers.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i].center = centers[i];
      out[i].out_size = k;
      out[i].probs.assign(static_cast<std::size_t>(k) * k, 0.0);
      scorer.predict(centers[i], out[i].probs);
    }
  };

  const std::size_t n = centers.size();
  const std::size_t threads =
      std::min<std::size_t>(std::max(1, n_threads), std::max<std::size_t>(1, n / 16));
  if (threads <= 1) {
    run(0, n);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          run(std::min(n, t * chunk), std::min(n, (t + 1) * chunk));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<NeighborhoodPrediction> classify_batch(const Classifier& classifier,
                                                   const Image& img,
                                                   std::span<const Pixel> centers,
                                                   int n_threads) {
  const auto scorer = classifier.bind(img);
  return classify_batch(*scorer, centers, n_threads);
}

namespace {

// Looks the neighborhood up in a dense per-pixel field.
class FieldScorer final : public ImageScorer {
 public:
  FieldScorer(std::shared_ptr<const std::vector<double>> field, int height, int width,
              int out_size)
      : ImageScorer(height, width, out_size), field_(std::move(field)) {}

 protected:
  void do_predict(Pixel center, std::span<double> out) const override {
    const int k = out_size();
    const int half = k / 2;
    for (int i = 0; i < k; ++i) {
      const int r = center.row + i - half;
      for (int j = 0; j < k; ++j) {
        const int c = center.col + j - half;
        const bool inside = r >= 0 && c >= 0 && r < height() && c < width();
        out[static_cast<std::size_t>(i) * k + j] =
            inside ? (*field_)[static_cast<std::size_t>(r) * width() + c] : 0.0;
      }
    }
  }

 private:
  std::shared_ptr<const std::vector<double>> field_;
};

class FieldClassifier final : public Classifier {
 public:
  FieldClassifier(std::vector<double> field, int height, int width, ClassifierConfig config)
      : field_(std::make_shared<const std::vector<double>>(std::move(field))),
        height_(height),
        width_(width),
        config_(config) {
    config_.validate();
  }

  const ClassifierConfig& config() const override { return config_; }

  std::unique_ptr<const ImageScorer> bind(const Image& img) const override {
    require_shape(img.height(), img.width(), height_, width_, "classifier input");
    return std::make_unique<FieldScorer>(field_, height_, width_, config_.out_size);
  }

 private:
  std::shared_ptr<const std::vector<double>> field_;
  int height_;
  int width_;
  ClassifierConfig config_;
};

}  // namespace

std::unique_ptr<Classifier> oracle_classifier(Mask truth, ClassifierConfig config) {
  std::vector<double> field(truth.data().begin(), truth.data().end());
  return std::make_unique<FieldClassifier>(std::move(field), truth.height(), truth.width(),
                                           config);
}

std::unique_ptr<Classifier> probmap_classifier(ProbMap map, ClassifierConfig config) {
  for (float v : map.values()) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw ParameterError("probability map value outside [0,1]");
    }
  }
  std::vector<double> field(map.values().begin(), map.values().end());
  return std::make_unique<FieldClassifier>(std::move(field), map.height(), map.width(),
                                           config);
}

}  // namespace rgseg
