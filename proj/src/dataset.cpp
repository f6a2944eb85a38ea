#include "rgseg/dataset.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "rgseg/error.hpp"
#include "rgseg/image_io.hpp"

namespace rgseg {

namespace fs = std::filesystem;

void check_triple(const Triple& t) {
  require_shape(t.image.height(), t.image.width(), t.truth.height(), t.truth.width(),
                ("triple " + t.id + " truth").c_str());
  require_shape(t.image.height(), t.image.width(), t.roi.height(), t.roi.width(),
                ("triple " + t.id + " roi").c_str());
}

DatasetSplit split_dataset(std::vector<Triple> triples, int n_val,
                           const std::vector<std::string>& exclude,
                           std::uint64_t rng_seed) {
  if (n_val < 0) throw ParameterError("n_val must be >= 0");
  DatasetSplit split;
  const std::set<std::string> excluded(exclude.begin(), exclude.end());
  for (const auto& id : excluded) {
    const bool known = std::any_of(triples.begin(), triples.end(),
                                   [&](const Triple& t) { return t.id == id; });
    if (!known) throw ParameterError("excluded id not in dataset: " + id);
  }

  std::vector<Triple> kept;
  for (auto& t : triples) {
    if (excluded.count(t.id)) {
      split.excluded_ids.push_back(t.id);
    } else {
      check_triple(t);
      kept.push_back(std::move(t));
    }
  }
  if (n_val > 0 && static_cast<std::size_t>(n_val) >= kept.size()) {
    throw ParameterError("n_val (" + std::to_string(n_val) +
                         ") must be smaller than the number of kept triples (" +
                         std::to_string(kept.size()) + ")");
  }

  std::vector<std::size_t> order(kept.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(rng_seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> is_val(kept.size(), false);
  for (int i = 0; i < n_val; ++i) is_val[order[i]] = true;

  for (std::size_t i = 0; i < kept.size(); ++i) {
    (is_val[i] ? split.validation : split.train).push_back(std::move(kept[i]));
  }
  return split;
}

std::vector<std::pair<std::string, fs::path>> list_by_stem(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::map<std::string, fs::path> by_stem;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    if (!by_stem.emplace(stem, entry.path()).second) {
      throw DataError("duplicate stem '" + stem + "' in " + dir.string());
    }
  }
  return {by_stem.begin(), by_stem.end()};
}

std::vector<Triple> load_dataset(const fs::path& dir) {
  const auto images = list_by_stem(dir / "images");
  const auto masks = list_by_stem(dir / "masks");
  const auto rois = list_by_stem(dir / "roi");
  const std::map<std::string, fs::path> mask_map(masks.begin(), masks.end());
  const std::map<std::string, fs::path> roi_map(rois.begin(), rois.end());

  std::set<std::string> all;
  for (const auto* list : {&images, &masks, &rois}) {
    for (const auto& [stem, path] : *list) all.insert(stem);
  }
  std::vector<Triple> out;
  for (const auto& [stem, image_path] : images) {
    if (!mask_map.count(stem) || !roi_map.count(stem)) {
      throw DataError("unpaired stem '" + stem + "' in " + dir.string());
    }
    Triple t{stem, load_image(image_path), load_mask(mask_map.at(stem)),
             load_mask(roi_map.at(stem))};
    check_triple(t);
    out.push_back(std::move(t));
  }
  if (out.size() != all.size()) {
    for (const auto& stem : all) {
      const bool have = std::any_of(out.begin(), out.end(),
                                    [&](const Triple& t) { return t.id == stem; });
      if (!have) throw DataError("unpaired stem '" + stem + "' in " + dir.string());
    }
  }
  return out;
}

void save_dataset(const fs::path& dir, const std::vector<Triple>& triples) {
  for (const char* sub : {"images", "masks", "roi"}) {
    std::error_code ec;
    fs::create_directories(dir / sub, ec);
    if (ec) throw IoError("cannot create " + (dir / sub).string() + ": " + ec.message());
  }
  for (const auto& t : triples) {
    const char* ext = t.image.channels() == 3 ? ".ppm" : ".pgm";
    save_image(dir / "images" / (t.id + ext), t.image);
    save_mask(dir / "masks" / (t.id + ".pgm"), t.truth);
    save_mask(dir / "roi" / (t.id + ".pgm"), t.roi);
  }
}

}  // namespace rgseg
