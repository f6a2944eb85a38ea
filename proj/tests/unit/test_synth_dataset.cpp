#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "rgseg/components.hpp"
#include "rgseg/dataset.hpp"
#include "rgseg/error.hpp"
#include "rgseg/image_io.hpp"
#include "rgseg/synth.hpp"

using namespace rgseg;

namespace {

SynthParams small(std::uint64_t seed) {
  SynthParams p;
  p.height = 96;
  p.width = 80;
  p.rng_seed = seed;
  return p;
}

std::vector<Triple> make_triples(int n) {
  std::vector<Triple> out;
  for (int i = 0; i < n; ++i) {
    SynthParams p = small(i);
    p.height = 24;
    p.width = 24;
    SynthImage s = generate_synthetic(p);
    out.push_back({"t" + std::to_string(100 + i), s.image, s.truth, s.roi});
  }
  return out;
}

}  // namespace

TEST_CASE("synthetic generation is deterministic in the seed") {
  const SynthImage a = generate_synthetic(small(11));
  const SynthImage b = generate_synthetic(small(11));
  const SynthImage c = generate_synthetic(small(12));
  CHECK(a.image == b.image);
  CHECK(a.truth == b.truth);
  CHECK(a.roi == b.roi);
  CHECK_FALSE(a.truth == c.truth);
}

TEST_CASE("synthetic rasters satisfy the domain invariants") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthParams p = small(seed);
    p.channels = seed % 2 ? 1 : 3;
    const SynthImage s = generate_synthetic(p);
    REQUIRE(s.image.height() == p.height);
    REQUIRE(s.image.width() == p.width);
    REQUIRE(s.image.channels() == p.channels);
    REQUIRE(s.truth.count() > 0);
    REQUIRE(s.roi.count() > 0);
    REQUIRE(oracle::subset(s.truth, s.roi));
    REQUIRE(oracle::count_components(s.truth, 8) == 1);
  }
}

TEST_CASE("one tree without branching is a single 8-connected stroke") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SynthParams p = small(seed);
    p.branch_prob = 0.0;
    const SynthImage s = generate_synthetic(p);
    REQUIRE(oracle::count_components(s.truth, 8) == 1);
    REQUIRE(label_components(s.truth, 8).count() == 1);
  }
}

TEST_CASE("separated trees give one component per tree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthParams p = small(seed);
    p.height = 160;
    p.width = 160;
    p.n_trees = 3;
    p.separate_trees = true;
    const SynthImage s = generate_synthetic(p);
    REQUIRE(oracle::count_components(s.truth, 8) == 3);
  }
}

TEST_CASE("noise-free vessels are brighter than the background mean") {
  SynthParams p = small(5);
  p.noise_sigma = 0.0;
  p.width_min = 3.0;
  p.width_max = 3.0;
  const SynthImage s = generate_synthetic(p);
  for (int ch = 0; ch < p.channels; ++ch) {
    double bg = 0.0;
    std::size_t n_bg = 0;
    for (int r = 0; r < p.height; ++r) {
      for (int c = 0; c < p.width; ++c) {
        if (!s.truth.at(r, c)) {
          bg += s.image.at(r, c, ch);
          ++n_bg;
        }
      }
    }
    bg /= static_cast<double>(n_bg);
    for (int r = 0; r < p.height; ++r) {
      for (int c = 0; c < p.width; ++c) {
        if (s.truth.at(r, c)) REQUIRE(s.image.at(r, c, ch) > bg);
      }
    }
  }
}

TEST_CASE("synth parameter validation") {
  SynthParams p;
  p.branch_prob = 1.5;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = SynthParams{};
  p.width_min = 0.5;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = SynthParams{};
  p.noise_sigma = -1.0;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = SynthParams{};
  p.height = 0;
  CHECK_THROWS_AS(generate_synthetic(p), ParameterError);
}

TEST_CASE("split: 20 triples, exclude 2, three for validation") {
  auto triples = make_triples(20);
  const DatasetSplit split = split_dataset(triples, 3, {"t103", "t117"}, 9);
  CHECK(split.train.size() == 15);
  CHECK(split.validation.size() == 3);
  CHECK(split.excluded_ids == std::vector<std::string>{"t103", "t117"});
  std::set<std::string> seen;
  for (const auto& t : split.train) seen.insert(t.id);
  for (const auto& t : split.validation) {
    CHECK(seen.count(t.id) == 0);
    seen.insert(t.id);
  }
  CHECK(seen.size() == 18);
  CHECK(seen.count("t103") == 0);

  const DatasetSplit again = split_dataset(triples, 3, {"t103", "t117"}, 9);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again.validation[i].id == split.validation[i].id);
}

TEST_CASE("split with no validation keeps everything for training") {
  const DatasetSplit split = split_dataset(make_triples(4), 0, {}, 0);
  CHECK(split.train.size() == 4);
  CHECK(split.validation.empty());
}

TEST_CASE("split errors") {
  CHECK_THROWS_AS(split_dataset(make_triples(3), 3, {}, 0), ParameterError);
  CHECK_THROWS_AS(split_dataset(make_triples(3), 1, {"nope"}, 0), ParameterError);
  auto bad = make_triples(1);
  bad[0].roi = Mask(3, 3);
  CHECK_THROWS_AS(check_triple(bad[0]), ShapeError);
}

TEST_CASE("dataset save and load round trip") {
  oracle::TempDir dir("ds");
  const auto triples = make_triples(3);
  save_dataset(dir.path(), triples);
  const auto back = load_dataset(dir.path());
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].id == triples[i].id);
    CHECK(back[i].truth == triples[i].truth);
    CHECK(back[i].roi == triples[i].roi);
    // 8-bit quantization of the pixels.
    for (std::size_t k = 0; k < back[i].image.data().size(); ++k) {
      REQUIRE(std::abs(back[i].image.data()[k] - triples[i].image.data()[k]) <= 0.5f / 255.0f + 1e-6f);
    }
  }
}

TEST_CASE("dataset with an unpaired file names it") {
  oracle::TempDir dir("ds");
  save_dataset(dir.path(), make_triples(2));
  std::filesystem::remove(dir / "roi/t101.pgm");
  try {
    load_dataset(dir.path());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("t101") != std::string::npos);
  }
}
