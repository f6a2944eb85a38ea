#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "rgseg/error.hpp"
#include "rgseg/grow.hpp"
#include "rgseg/synth.hpp"

using namespace rgseg;

namespace {

const ClassifierConfig kSmall{8, 3, 2};

GrowConfig config(double threshold, int n_seeds, std::uint64_t seed = 0, int batch = 100) {
  GrowConfig g;
  g.threshold = threshold;
  g.n_seeds = n_seeds;
  g.rng_seed = seed;
  g.batch_size = batch;
  return g;
}

ProbMap random_map(std::mt19937_64& rng, int h, int w) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(static_cast<std::size_t>(h) * w);
  for (auto& x : v) x = u(rng);
  return ProbMap(h, w, v);
}

// Checks the GrowResult invariants against the accumulated votes.
void check_invariants(const GrowResult& g, const Mask& roi, double threshold) {
  REQUIRE(oracle::subset(g.mask, roi));
  for (std::size_t i = 0; i < g.mask.size(); ++i) {
    REQUIRE(g.votes.count(i) >= 0u);
    REQUIRE(g.votes.sum(i) <= g.votes.count(i) + 1e-9);
    if (g.mask.data()[i]) {
      REQUIRE(g.votes.count(i) > 0u);
      REQUIRE(g.votes.average(i) > threshold);
      REQUIRE(g.admitted_at[i] >= 1);
    } else {
      REQUIRE(g.admitted_at[i] == 0);
    }
  }
}

}  // namespace

TEST_CASE("grow config validation") {
  CHECK_NOTHROW(GrowConfig{}.validate());
  CHECK_THROWS_AS(config(0.0, 1).validate(), ParameterError);
  CHECK_THROWS_AS(config(1.0, 1).validate(), ParameterError);
  CHECK_THROWS_AS(config(0.5, 0).validate(), ParameterError);
  CHECK_THROWS_AS(config(0.5, 1, 0, 0).validate(), ParameterError);
}

TEST_CASE("seed sampling") {
  std::mt19937_64 rng(1);
  const Mask roi = oracle::random_mask(rng, 20, 20, 0.3);
  SUBCASE("more seeds than RoI pixels gives the whole RoI") {
    const Frontier f = sample_seeds(roi, 100000, 3);
    CHECK(f.size() == roi.count());
    for (const Pixel& p : f.pixels) CHECK(roi.at(p));
  }
  SUBCASE("one seed lies inside the RoI") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Frontier f = sample_seeds(roi, 1, s);
      REQUIRE(f.size() == 1);
      REQUIRE(roi.at(f.pixels[0]));
    }
  }
  SUBCASE("deterministic, sorted, distinct") {
    const Frontier a = sample_seeds(roi, 40, 9);
    const Frontier b = sample_seeds(roi, 40, 9);
    CHECK(a.pixels == b.pixels);
    CHECK(std::is_sorted(a.pixels.begin(), a.pixels.end()));
    CHECK(std::set<Pixel>(a.pixels.begin(), a.pixels.end()).size() == 40);
  }
  CHECK_THROWS_AS(sample_seeds(Mask(4, 4), 3, 0), ParameterError);
}

TEST_CASE("oracle growth equals flood fill from the seeds") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int h = std::uniform_int_distribution<int>(5, 40)(rng);
    const int w = std::uniform_int_distribution<int>(5, 40)(rng);
    const Mask truth = oracle::random_mask(rng, h, w, 0.45);
    const Mask roi = oracle::random_mask(rng, h, w, 0.85);
    const auto c = oracle_classifier(truth, kSmall);
    const GrowConfig g = config(0.5, 1 + trial, trial);
    const GrowResult out = grow_region(Image(h, w, 3), roi, *c, g);
    REQUIRE(out.mask == oracle::flood_fill(mask_and(truth, roi), out.seeds.pixels));
    check_invariants(out, roi, 0.5);
  }
}

TEST_CASE("seeds covering every component recover truth within the RoI") {
  SynthParams p;
  p.height = 64;
  p.width = 64;
  p.rng_seed = 4;
  const SynthImage s = generate_synthetic(p);
  const auto c = oracle_classifier(s.truth, kSmall);
  const GrowResult out = grow_region(s.image, s.roi, *c, config(0.5, 64 * 64));
  CHECK(out.mask == oracle::flood_fill(mask_and(s.truth, s.roi), out.seeds.pixels));
  CHECK(out.seeds.size() == s.roi.count());
}

TEST_CASE("background seeds admit nothing") {
  Mask truth(10, 10);
  truth.set(0, 0, true);
  Mask roi(10, 10);
  for (int r = 5; r < 10; ++r) {
    for (int c = 5; c < 10; ++c) roi.set(r, c, true);
  }
  const auto c = oracle_classifier(truth, kSmall);
  const GrowResult out = grow_region(Image(10, 10, 3), roi, *c, config(0.5, 25));
  CHECK(out.mask.count() == 0);
  CHECK(out.iterations == 1);
}

TEST_CASE("constant 0.9 map from one seed fills the image") {
  const auto c = probmap_classifier(ProbMap(17, 23, 0.9f), kSmall);
  const Mask roi(17, 23, 1);
  const GrowResult out = grow_region(Image(17, 23, 1), roi, *c, config(0.5, 1, 5));
  CHECK(out.mask == roi);
  check_invariants(out, roi, 0.5);
}

TEST_CASE("batch size and thread count do not change the result") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const ProbMap map = random_map(rng, 30, 30);
    const Mask roi = oracle::random_mask(rng, 30, 30, 0.9);
    const auto c = probmap_classifier(map, kSmall);
    const GrowResult ref = grow_region(Image(30, 30, 3), roi, *c, config(0.45, 20, trial, 100));
    for (int batch : {1, 7, 33}) {
      for (int threads : {1, 3}) {
        GrowConfig g = config(0.45, 20, trial, batch);
        g.n_threads = threads;
        const GrowResult other = grow_region(Image(30, 30, 3), roi, *c, g);
        REQUIRE(other.mask == ref.mask);
        REQUIRE(other.iterations == ref.iterations);
        REQUIRE(other.votes.average_map() == ref.votes.average_map());
      }
    }
  }
}

TEST_CASE("growth is monotone and bounded") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const ProbMap map = random_map(rng, 24, 24);
    const Mask roi = oracle::random_mask(rng, 24, 24, 0.8);
    const auto c = probmap_classifier(map, kSmall);
    const GrowResult out = grow_region(Image(24, 24, 1), roi, *c, config(0.4, 5, trial));
    REQUIRE(out.iterations <= 24 * 24);
    REQUIRE(out.snapshot(0).count() == 0);
    for (long k = 0; k < out.iterations; ++k) {
      REQUIRE(oracle::subset(out.snapshot(k), out.snapshot(k + 1)));
    }
    REQUIRE(out.snapshot(out.iterations) == out.mask);
    check_invariants(out, roi, 0.4);
  }
}

TEST_CASE("iteration cap stops growth early") {
  const auto c = probmap_classifier(ProbMap(1, 50, 0.9f), kSmall);
  GrowConfig g = config(0.5, 1, 0);
  g.max_iterations = 3;
  const GrowResult out = grow_region(Image(1, 50, 1), Mask(1, 50, 1), *c, g);
  CHECK(out.iterations == 3);
  CHECK(out.mask.count() < 50);
}

TEST_CASE("votes are averages of the classifier output") {
  // Every pixel of a 1x3 strip is a seed, so the middle one gets three votes.
  std::vector<float> v{0.2f, 0.6f, 0.8f};
  const auto c = probmap_classifier(ProbMap(1, 3, v), kSmall);
  GrowConfig g = config(0.99, 3);
  const GrowResult out = grow_region(Image(1, 3, 1), Mask(1, 3, 1), *c, g);
  CHECK(out.votes.count(1) == 3);
  CHECK(out.votes.average(1) == doctest::Approx(0.6f));
  CHECK(out.mask.count() == 0);
  CHECK(out.pixels_evaluated == 3);
}

TEST_CASE("seeds outside the RoI are rejected") {
  const auto c = oracle_classifier(Mask(4, 4), kSmall);
  const auto scorer = c->bind(Image(4, 4, 3));
  Mask roi(4, 4);
  roi.set(0, 0, true);
  CHECK_THROWS_AS(grow_from_seeds(*scorer, roi, Frontier{{{1, 1}}}, config(0.5, 1)), ParameterError);
}

TEST_CASE("dense thresholding") {
  ProbMap map(2, 2, std::vector<float>{0.4f, 0.6f, 0.6f, 0.4f});
  const Mask all(2, 2, 1);
  CHECK(dense_threshold_segment(map, all, 0.5) == Mask(2, 2, std::vector<std::uint8_t>{0, 1, 1, 0}));
  CHECK(dense_threshold_segment(ProbMap(2, 2, 0.99f), all, 0.999).count() == 0);
  CHECK(dense_threshold_segment(ProbMap(2, 2, 1.0f), Mask(2, 2), 0.5).count() == 0);
  std::mt19937_64 rng(5);
  const ProbMap r = random_map(rng, 20, 20);
  for (double t = 0.1; t < 0.9; t += 0.1) {
    CHECK(oracle::subset(dense_threshold_segment(r, Mask(20, 20, 1), t + 0.1),
                         dense_threshold_segment(r, Mask(20, 20, 1), t)));
  }
}
