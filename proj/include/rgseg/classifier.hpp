#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rgseg/image.hpp"

namespace rgseg {

/// Shape contract of a neighborhood classifier: a tile_size x tile_size
/// input tile maps to an out_size x out_size grid of class probabilities
/// centred on the tile centre.
struct ClassifierConfig {
  int tile_size = 80;
  int out_size = 3;
  int n_classes = 2;

  /// Throws ParameterError unless tile_size >= out_size, out_size is odd and
  /// n_classes >= 2.
  void validate() const;
  int out_area() const { return out_size * out_size; }

  friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

/// Foreground probabilities for the out_size x out_size neighborhood around
/// `center`, row-major. Entry (i, j) refers to absolute pixel
/// (center.row + i - out_size/2, center.col + j - out_size/2).
struct NeighborhoodPrediction {
  Pixel center;
  int out_size = 0;
  std::vector<double> probs;

  double at(int i, int j) const { return probs[static_cast<std::size_t>(i) * out_size + j]; }
  friend bool operator==(const NeighborhoodPrediction&,
                         const NeighborhoodPrediction&) = default;
};

/// A classifier bound to one image. Implementations precompute whatever
/// per-image state they need; predict() must be pure and thread-safe.
class ImageScorer {
 public:
  ImageScorer(int height, int width, int out_size)
      : height_(height), width_(width), out_size_(out_size) {}
  virtual ~ImageScorer() = default;

  int height() const { return height_; }
  int width() const { return width_; }
  int out_size() const { return out_size_; }

  /// Writes out_size^2 probabilities for `center`. Throws BoundsError when
  /// the centre is off the image.
  void predict(Pixel center, std::span<double> out) const;

 protected:
  virtual void do_predict(Pixel center, std::span<double> out) const = 0;

 private:
  int height_;
  int width_;
  int out_size_;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual const ClassifierConfig& config() const = 0;
  /// Throws ShapeError when the classifier cannot score an image of this
  /// shape.
  virtual std::unique_ptr<const ImageScorer> bind(const Image& img) const = 0;
};

/// Scores `centers` in order. With n_threads > 1 the work is split into
/// contiguous chunks; output is identical to serial evaluation.
std::vector<NeighborhoodPrediction> classify_batch(const ImageScorer& scorer,
                                                   std::span<const Pixel> centers,
                                                   int n_threads = 1);

std::vector<NeighborhoodPrediction> classify_batch(const Classifier& classifier,
                                                   const Image& img,
                                                   std::span<const Pixel> centers,
                                                   int n_threads = 1);

/// Reports 1.0 where `truth` is set, 0.0 elsewhere and off the image.
std::unique_ptr<Classifier> oracle_classifier(Mask truth, ClassifierConfig config = {});

/// Reports the map value at each in-bounds position, 0.0 off the image.
/// Throws ParameterError when a value lies outside [0,1].
std::unique_ptr<Classifier> probmap_classifier(ProbMap map, ClassifierConfig config = {});

}  // namespace rgseg
