#include <doctest.h>

#include "oracles.hpp"
#include "rgseg/error.hpp"
#include "rgseg/image.hpp"

using namespace rgseg;

TEST_CASE("image rejects values outside [0,1] and bad lengths") {
  CHECK_THROWS_AS(Image(1, 2, 1, std::vector<float>{0.0f, 1.5f}), ParameterError);
  CHECK_THROWS_AS(Image(1, 2, 1, std::vector<float>{-0.1f, 0.5f}), ParameterError);
  CHECK_THROWS_AS(Image(2, 2, 1, std::vector<float>{0.0f}), ShapeError);
  CHECK_THROWS_AS(Image(2, 2, 2), ParameterError);
  CHECK_NOTHROW(Image(1, 2, 1, std::vector<float>{0.0f, 1.0f}));
}

TEST_CASE("image layout is row-major with interleaved channels") {
  std::vector<float> data(2 * 3 * 3);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(i) / 20.0f;
  const Image img(2, 3, 3, data);
  CHECK(img.at(1, 2, 0) == data[(1 * 3 + 2) * 3]);
  CHECK(img.at(0, 1, 2) == data[(0 * 3 + 1) * 3 + 2]);
}

TEST_CASE("mask values must be binary") {
  CHECK_THROWS_AS(Mask(1, 2, std::vector<std::uint8_t>{0, 2}), ParameterError);
  CHECK_THROWS_AS(Mask(1, 2, std::vector<std::uint8_t>{0}), ShapeError);
  const Mask m(2, 2, std::vector<std::uint8_t>{1, 0, 1, 1});
  CHECK(m.count() == 3);
  CHECK(m.at(Pixel{1, 0}) == 1);
}

TEST_CASE("mask_and and require_shape") {
  const Mask a(1, 3, std::vector<std::uint8_t>{1, 1, 0});
  const Mask b(1, 3, std::vector<std::uint8_t>{0, 1, 1});
  CHECK(mask_and(a, b) == Mask(1, 3, std::vector<std::uint8_t>{0, 1, 0}));
  CHECK_THROWS_AS(mask_and(a, Mask(3, 1)), ShapeError);
  CHECK_THROWS_AS(require_shape(2, 3, 3, 2, "x"), ShapeError);
}

TEST_CASE("extract_tile corner of a 100x100 image") {
  const Image img(100, 100, 3, 1.0f);
  const Image tile = extract_tile(img, {0, 0}, 80);
  REQUIRE(tile.height() == 80);
  REQUIRE(tile.width() == 80);
  for (int r = 0; r < 80; ++r) {
    for (int c = 0; c < 80; ++c) {
      const float expected = (r < 40 || c < 40) ? 0.0f : 1.0f;
      for (int ch = 0; ch < 3; ++ch) REQUIRE(tile.at(r, c, ch) == expected);
    }
  }
}

TEST_CASE("extract_tile interior is an exact crop") {
  std::mt19937_64 rng(1);
  const Image img = oracle::random_image(rng, 100, 100, 3);
  const Image tile = extract_tile(img, {50, 50}, 80);
  for (int r = 0; r < 80; ++r) {
    for (int c = 0; c < 80; ++c) {
      for (int ch = 0; ch < 3; ++ch) REQUIRE(tile.at(r, c, ch) == img.at(10 + r, 10 + c, ch));
    }
  }
}

TEST_CASE("extract_tile T=2 at the origin") {
  const Image img(2, 2, 1, std::vector<float>{0.25f, 0.5f, 0.75f, 1.0f});
  const Image tile = extract_tile(img, {0, 0}, 2);
  CHECK(tile.at(0, 0) == 0.0f);
  CHECK(tile.at(0, 1) == 0.0f);
  CHECK(tile.at(1, 0) == 0.0f);
  CHECK(tile.at(1, 1) == 0.25f);
}

TEST_CASE("extract_tile matches a naive crop at random centers") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = std::uniform_int_distribution<int>(1, 30)(rng);
    const int w = std::uniform_int_distribution<int>(1, 30)(rng);
    const int ch = trial % 2 ? 3 : 1;
    const int t = 2 * std::uniform_int_distribution<int>(1, 20)(rng);
    const Image img = oracle::random_image(rng, h, w, ch);
    const Pixel c{std::uniform_int_distribution<int>(0, h - 1)(rng),
                  std::uniform_int_distribution<int>(0, w - 1)(rng)};
    REQUIRE(extract_tile(img, c, t) == oracle::naive_crop(img, c, t));
  }
}

TEST_CASE("extract_tile argument checks") {
  const Image img(4, 4, 1);
  CHECK_THROWS_AS(extract_tile(img, {4, 0}, 2), BoundsError);
  CHECK_THROWS_AS(extract_tile(img, {-1, 0}, 2), BoundsError);
  CHECK_THROWS_AS(extract_tile(img, {0, 0}, 3), ParameterError);
  CHECK_THROWS_AS(extract_tile(img, {0, 0}, 0), ParameterError);
}
