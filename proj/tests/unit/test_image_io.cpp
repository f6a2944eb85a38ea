#include <doctest.h>

#include <fstream>

#include "oracles.hpp"
#include "rgseg/error.hpp"
#include "rgseg/image_io.hpp"

using namespace rgseg;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

// Every byte value 0..255 in a 16x16 grey raster.
RawImage8 all_bytes() {
  RawImage8 raw{16, 16, 1, {}};
  for (int v = 0; v < 256; ++v) raw.data.push_back(static_cast<std::uint8_t>(v));
  return raw;
}

}  // namespace

TEST_CASE("load_image scales every byte by 1/255") {
  oracle::TempDir dir("io");
  for (const char* name : {"bytes.pgm", "bytes.png"}) {
    write_raw8(dir / name, all_bytes());
    const Image img = load_image(dir / name);
    REQUIRE(img.channels() == 1);
    for (int v = 0; v < 256; ++v) {
      REQUIRE(img.data()[v] == static_cast<float>(v / 255.0));
    }
    CHECK(img.at(15, 15) == 1.0f);
    CHECK(img.at(0, 0) == 0.0f);
    CHECK(img.data()[51] == doctest::Approx(0.2).epsilon(1e-7));
  }
}

TEST_CASE("load_mask binarizes at raw > 127") {
  oracle::TempDir dir("io");
  write_raw8(dir / "m.pgm", all_bytes());
  const Mask m = load_mask(dir / "m.pgm");
  for (int v = 0; v < 256; ++v) REQUIRE(m.data()[v] == (v > 127 ? 1 : 0));
  CHECK(m.data()[128] == 1);
  CHECK(m.data()[127] == 0);
  CHECK(m.data()[255] == 1);
  CHECK(m.data()[0] == 0);
}

TEST_CASE("load_mask rejects colour files") {
  oracle::TempDir dir("io");
  write_raw8(dir / "c.ppm", RawImage8{1, 1, 3, {1, 2, 3}});
  CHECK_THROWS_AS(load_mask(dir / "c.ppm"), FormatError);
}

TEST_CASE("colour PPM and PNG round trip") {
  oracle::TempDir dir("io");
  std::mt19937_64 rng(3);
  RawImage8 raw{7, 5, 3, {}};
  for (int i = 0; i < 7 * 5 * 3; ++i) raw.data.push_back(static_cast<std::uint8_t>(rng()));
  for (const char* name : {"a.ppm", "a.png"}) {
    write_raw8(dir / name, raw);
    const RawImage8 back = read_raw8(dir / name);
    CHECK(back.height == 7);
    CHECK(back.width == 5);
    CHECK(back.channels == 3);
    CHECK(back.data == raw.data);
  }
}

TEST_CASE("save_image quantizes and reloads exactly") {
  oracle::TempDir dir("io");
  std::mt19937_64 rng(4);
  std::vector<float> data;
  for (int i = 0; i < 6 * 4 * 3; ++i) data.push_back(static_cast<float>(rng() % 256) / 255.0f);
  const Image img(6, 4, 3, data);
  save_image(dir / "x.ppm", img);
  CHECK(load_image(dir / "x.ppm") == img);
}

TEST_CASE("mask round trip through PGM and PNG") {
  oracle::TempDir dir("io");
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Mask m = oracle::random_mask(rng, 1 + trial, 13, 0.4);
    save_mask(dir / "m.pgm", m);
    save_mask(dir / "m.png", m);
    REQUIRE(load_mask(dir / "m.pgm") == m);
    REQUIRE(load_mask(dir / "m.png") == m);
    const RawImage8 raw = read_raw8(dir / "m.pgm");
    for (auto v : raw.data) REQUIRE((v == 0 || v == 255));
  }
}

TEST_CASE("PNM header parsing") {
  oracle::TempDir dir("io");
  write_bytes(dir / "c.pgm", std::string("P5\n# comment\n2 1\n255\n") + std::string("\x00\xff", 2));
  const Image img = load_image(dir / "c.pgm");
  CHECK(img.width() == 2);
  CHECK(img.at(0, 1) == 1.0f);

  write_bytes(dir / "m.pgm", std::string("P5 2 1 65535\n") + std::string(4, '\0'));
  CHECK_THROWS_AS(load_image(dir / "m.pgm"), FormatError);
  write_bytes(dir / "t.pgm", std::string("P5 2 2 255\n") + "\x01");
  CHECK_THROWS_AS(load_image(dir / "t.pgm"), IoError);
  write_bytes(dir / "j.pgm", "hello");
  CHECK_THROWS_AS(load_image(dir / "j.pgm"), FormatError);
  CHECK_THROWS_AS(load_image(dir / "missing.pgm"), IoError);
}

TEST_CASE("PMAPv1 round trip and header") {
  oracle::TempDir dir("io");
  ProbMap map(3, 2);
  map.at(0, 0) = 0.25f;
  map.at(2, 1) = 1.0f;
  map.at(1, 0) = 0.1f;
  save_pmap(dir / "p.pmap", map);
  CHECK(load_pmap(dir / "p.pmap") == map);

  std::ifstream in(dir / "p.pmap", std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "PMAPv1 2 3");
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  // 0.25f = 0x3E800000, little-endian.
  CHECK(bytes[0] == 0x00);
  CHECK(bytes[3] == 0x3E);
  CHECK(bytes[2] == 0x80);
}

TEST_CASE("PMAP errors") {
  oracle::TempDir dir("io");
  write_bytes(dir / "bad.pmap", "PMAPv2 1 1\n0000");
  CHECK_THROWS_AS(load_pmap(dir / "bad.pmap"), FormatError);
  write_bytes(dir / "short.pmap", "PMAPv1 2 2\n0000");
  CHECK_THROWS_AS(load_pmap(dir / "short.pmap"), IoError);
  CHECK_THROWS_AS(load_pmap(dir / "none.pmap"), IoError);
}
