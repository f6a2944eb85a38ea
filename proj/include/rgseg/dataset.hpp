#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rgseg/image.hpp"

namespace rgseg {

/// One annotated image: pixels, ground truth, region of interest.
struct Triple {
  std::string id;
  Image image;
  Mask truth;
  Mask roi;
};

struct DatasetSplit {
  std::vector<Triple> train;
  std::vector<Triple> validation;
  std::vector<std::string> excluded_ids;
};

/// Throws ShapeError unless image, truth and roi share dimensions.
void check_triple(const Triple& t);

/// Drops `exclude` ids, then draws `n_val` validation triples uniformly at
/// random; the rest become training triples. Both lists keep input order.
DatasetSplit split_dataset(std::vector<Triple> triples, int n_val,
                           const std::vector<std::string>& exclude,
                           std::uint64_t rng_seed);

/// Reads `images/`, `masks/` and `roi/` under `dir`, pairing files by stem.
/// Results are sorted by id. Throws DataError naming any unpaired stem.
std::vector<Triple> load_dataset(const std::filesystem::path& dir);

/// Writes the layout read by load_dataset (PPM/PGM images, PGM masks).
void save_dataset(const std::filesystem::path& dir, const std::vector<Triple>& triples);

/// Map of stem -> path for the regular files directly inside `dir`.
std::vector<std::pair<std::string, std::filesystem::path>> list_by_stem(
    const std::filesystem::path& dir);

}  // namespace rgseg
