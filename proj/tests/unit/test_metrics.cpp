#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rgseg/components.hpp"
#include "rgseg/distance.hpp"
#include "rgseg/error.hpp"
#include "rgseg/metrics.hpp"

using namespace rgseg;

namespace {

Mask from_rows(const std::vector<std::string>& rows) {
  Mask m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) m.set(r, c, rows[r][c] == '#');
  }
  return m;
}

}  // namespace

TEST_CASE("dice and jaccard by hand") {
  const Mask a = from_rows({"###.."});
  const Mask b = from_rows({"##..."});
  CHECK(dice(a, a) == 1.0);
  CHECK(dice(from_rows({"##.."}), from_rows({"..##"})) == 0.0);
  const Mask x = from_rows({"###.....", "........"});
  const Mask y = from_rows({".#######", "........"});
  // |a| = 3, |b| = 5, |a and b| = 2.
  CHECK(dice(x, from_rows({".####...", "#......."})) == 0.5);
  // |a and b| = 2, |a or b| = 6.
  CHECK(jaccard(from_rows({"####..", "......"}), from_rows({"..####", "......"})) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(jaccard(a, a) == 1.0);
  CHECK(dice(Mask(3, 3), Mask(3, 3)) == 1.0);
  CHECK(jaccard(Mask(3, 3), Mask(3, 3)) == 1.0);
  CHECK(dice(a, b) == doctest::Approx(0.8));
  CHECK(jaccard(x, y) == doctest::Approx(2.0 / 8.0));
  CHECK_THROWS_AS(dice(a, Mask(2, 2)), ShapeError);
}

TEST_CASE("distance field examples") {
  const DistanceField full = distance_field(Mask(4, 6, 1));
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 6; ++c) CHECK(full.squared(r, c) == 0);
  }
  Mask m(5, 5);
  m.set(2, 2, true);
  const DistanceField f = distance_field(m);
  CHECK(f.distance(0, 0) == std::sqrt(8.0));
  CHECK(f.squared(0, 0) == 8);
  CHECK(f.squared(2, 4) == 4);
  CHECK_THROWS_AS(distance_field(Mask(3, 3)), UndefinedDistanceError);
}

TEST_CASE("distance field equals brute force on random masks") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const int h = std::uniform_int_distribution<int>(1, 24)(rng);
    const int w = std::uniform_int_distribution<int>(1, 24)(rng);
    const double density = std::uniform_real_distribution<double>(0.005, 0.6)(rng);
    Mask m = oracle::random_mask(rng, h, w, density);
    if (m.count() == 0) m.set(h / 2, w / 2, true);
    const DistanceField f = distance_field(m);
    const auto brute = oracle::brute_squared_distance(m);
    for (std::size_t i = 0; i < brute.size(); ++i) REQUIRE(f.squared(i) == brute[i]);
  }
}

TEST_CASE("mssd examples and policy") {
  Mask a(3, 3);
  a.set(0, 0, true);
  Mask b = a;
  b.set(0, 1, true);
  REQUIRE(mssd(a, b).has_value());
  CHECK(*mssd(a, b) == 1.0 / 3.0);
  CHECK(*mssd(b, b) == 0.0);
  CHECK(*mssd(Mask(3, 3), Mask(3, 3)) == 0.0);
  CHECK_FALSE(mssd(a, Mask(3, 3)).has_value());
  CHECK_FALSE(mssd(Mask(3, 3), a).has_value());
}

TEST_CASE("mssd equals the brute-force double loop") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = std::uniform_int_distribution<int>(1, 20)(rng);
    const int w = std::uniform_int_distribution<int>(1, 20)(rng);
    const Mask a = oracle::random_mask(rng, h, w, 0.2);
    const Mask b = oracle::random_mask(rng, h, w, 0.2);
    const auto fast = mssd(a, b);
    const auto slow = oracle::brute_mssd(a, b);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) REQUIRE(std::abs(*fast - *slow) <= 1e-9);
  }
}

TEST_CASE("metric identities and symmetry") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Mask a = oracle::random_mask(rng, 12, 9, 0.3);
    const Mask b = oracle::random_mask(rng, 12, 9, 0.3);
    const double d = dice(a, b);
    const double j = jaccard(a, b);
    REQUIRE(std::abs(d - 2 * j / (1 + j)) <= 1e-12);
    REQUIRE(j <= d);
    REQUIRE(d == dice(b, a));
    REQUIRE(j == jaccard(b, a));
    REQUIRE(mssd(a, b) == mssd(b, a));
  }
}

TEST_CASE("mssd is translation invariant") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Mask a = oracle::random_mask(rng, 10, 10, 0.2);
    const Mask b = oracle::random_mask(rng, 10, 10, 0.2);
    Mask sa(16, 16);
    Mask sb(16, 16);
    for (int r = 0; r < 10; ++r) {
      for (int c = 0; c < 10; ++c) {
        sa.set(r + 3, c + 5, a.at(r, c));
        sb.set(r + 3, c + 5, b.at(r, c));
      }
    }
    const auto m1 = mssd(a, b);
    const auto m2 = mssd(sa, sb);
    REQUIRE(m1.has_value() == m2.has_value());
    if (m1) REQUIRE(*m1 == doctest::Approx(*m2).epsilon(1e-12));
  }
}

TEST_CASE("component labeling examples") {
  CHECK(label_components(Mask(4, 4)).count() == 0);

  const Mask two = from_rows({"##..", "##..", "....", ".###"});
  CHECK(label_components(two, 4).count() == 2);
  CHECK(label_components(two, 8).count() == 2);

  const Mask diag = from_rows({".#", "#."});
  CHECK(label_components(diag, 8).count() == 1);
  CHECK(label_components(diag, 4).count() == 2);
  CHECK_THROWS_AS(label_components(diag, 6), ParameterError);
}

TEST_CASE("labels are in scan order and sized correctly") {
  const Mask m = from_rows({"..#", "#..", "#.#"});
  const ComponentLabeling l = label_components(m, 4);
  REQUIRE(l.count() == 3);
  CHECK(l.labels[2] == 1);
  CHECK(l.labels[3] == 2);
  CHECK(l.labels[6] == 2);
  CHECK(l.labels[8] == 3);
  CHECK(l.sizes[2] == 2);
}

TEST_CASE("labeling agrees with a BFS count and its invariants") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int conn = trial % 2 ? 4 : 8;
    const Mask m = oracle::random_mask(rng, 1 + trial % 17, 1 + trial % 19, 0.45);
    const ComponentLabeling l = label_components(m, conn);
    REQUIRE(static_cast<int>(l.count()) == oracle::count_components(m, conn));
    std::size_t total = 0;
    for (std::size_t id = 1; id <= l.count(); ++id) total += l.sizes[id];
    REQUIRE(total == m.count());
    for (int r = 0; r < m.height(); ++r) {
      for (int c = 0; c < m.width(); ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * m.width() + c;
        REQUIRE((l.labels[i] != 0) == (m.at(r, c) == 1));
        if (!l.labels[i] || c + 1 >= m.width()) continue;
        // Adjacent foreground pixels share a label.
        if (m.at(r, c + 1)) REQUIRE(l.labels[i + 1] == l.labels[i]);
      }
    }
  }
}

TEST_CASE("largest component") {
  const Mask single = from_rows({"##.", ".#.", "..."});
  CHECK(largest_component(single) == single);

  const Mask five_three = from_rows({"###..", "##...", ".....", "...##", "....#"});
  CHECK(largest_component(five_three) == from_rows({"###..", "##...", ".....", ".....", "....."}));

  const Mask tie = from_rows({".....", "...##", "...##", "##...", "##..."});
  CHECK(largest_component(tie) == from_rows({".....", "...##", "...##", ".....", "....."}));

  CHECK(largest_component(Mask(3, 3)) == Mask(3, 3));
}

TEST_CASE("evaluate with RoI gating and largest-object cleanup") {
  Mask gt(20, 20);
  for (int r = 2; r < 8; ++r) {
    for (int c = 2; c < 8; ++c) gt.set(r, c, true);
  }
  const Mask roi(20, 20, 1);
  const MetricReport same = evaluate(gt, gt, roi, false);
  CHECK(same.dice == 1.0);
  CHECK(same.jaccard == 1.0);
  CHECK(*same.mssd == 0.0);

  Mask artifact = gt;
  artifact.set(17, 17, true);
  const MetricReport cleaned = evaluate(artifact, gt, roi, true);
  CHECK(cleaned.dice == 1.0);
  CHECK(*cleaned.mssd == 0.0);
  const MetricReport raw = evaluate(artifact, gt, roi, false);
  CHECK(*raw.mssd > 0.0);
  CHECK(raw.dice < 1.0);

  Mask small_roi(20, 20);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 20; ++c) small_roi.set(r, c, true);
  }
  // Outside the RoI the artifact is ignored.
  CHECK(evaluate(artifact, gt, small_roi, false).dice == 1.0);
  CHECK_FALSE(evaluate(Mask(20, 20), gt, roi, false).mssd.has_value());
}
