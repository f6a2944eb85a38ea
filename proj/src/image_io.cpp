#include "rgseg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "rgseg/error.hpp"

namespace rgseg {

namespace fs = std::filesystem;

namespace {

std::vector<char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

std::string lower_ext(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Parses the whitespace/comment separated header fields of a binary PNM.
class PnmHeaderReader {
 public:
  PnmHeaderReader(const std::vector<char>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("malformed PNM header: " + path_.string());
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 30)) throw FormatError("PNM dimension too large");
      ++pos_;
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("malformed PNM header: " + path_.string());
    }
    return pos_ + 1;
  }

  void seek(std::size_t pos) { pos_ = pos; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<char>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

RawImage8 decode_pnm(const std::vector<char>& bytes, const fs::path& path) {
  const char kind = bytes[1];
  if (kind != '5' && kind != '6') {
    throw FormatError("only binary P5/P6 PNM is supported: " + path.string());
  }
  PnmHeaderReader header(bytes, path);
  header.seek(2);
  RawImage8 raw;
  raw.width = header.next_int();
  raw.height = header.next_int();
  const int maxval = header.next_int();
  if (maxval != 255) {
    throw FormatError("unsupported PNM bit depth (maxval " +
                      std::to_string(maxval) + "): " + path.string());
  }
  raw.channels = kind == '5' ? 1 : 3;
  const std::size_t offset = header.raster_offset();
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
  if (bytes.size() < offset + n) {
    throw IoError("truncated PNM raster: " + path.string());
  }
  raw.data.assign(reinterpret_cast<const std::uint8_t*>(bytes.data()) + offset,
                  reinterpret_cast<const std::uint8_t*>(bytes.data()) + offset + n);
  return raw;
}

RawImage8 decode_png(const std::vector<char>& bytes, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw FormatError("unsupported PNG bit depth (16-bit): " + path.string());
  }
  RawImage8 raw;
  raw.width = static_cast<int>(image.width);
  raw.height = static_cast<int>(image.height);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  raw.channels = color ? 3 : 1;
  raw.data.resize(PNG_IMAGE_SIZE(image));
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&image, &background, raw.data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return raw;
}

void write_bytes(const fs::path& path, const std::string& header,
                 const void* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw IoError("write failed: " + path.string());
}

std::uint8_t quantize(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

}  // namespace

RawImage8 read_raw8(const fs::path& path) {
  const auto bytes = read_file(path);
  static constexpr std::array<unsigned char, 8> kPngSig = {0x89, 'P', 'N', 'G',
                                                          '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= kPngSig.size() &&
      std::equal(kPngSig.begin(), kPngSig.end(), bytes.begin(),
                 [](unsigned char a, char b) { return a == static_cast<unsigned char>(b); })) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pnm(bytes, path);
  throw FormatError("unrecognized image format: " + path.string());
}

void write_raw8(const fs::path& path, const RawImage8& raw) {
  if (raw.channels != 1 && raw.channels != 3) {
    throw ParameterError("only 1 or 3 channel images can be written");
  }
  if (lower_ext(path) == ".png") {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(raw.width);
    image.height = static_cast<png_uint_32>(raw.height);
    image.format = raw.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, raw.data.data(), 0,
                                 nullptr)) {
      throw IoError("cannot write PNG " + path.string() + ": " + image.message);
    }
    return;
  }
  const std::string header = std::string(raw.channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(raw.width) + " " +
                             std::to_string(raw.height) + "\n255\n";
  write_bytes(path, header, raw.data.data(), raw.data.size());
}

Image load_image(const fs::path& path) {
  const RawImage8 raw = read_raw8(path);
  std::vector<float> values(raw.data.size());
  std::transform(raw.data.begin(), raw.data.end(), values.begin(),
                 [](std::uint8_t v) { return static_cast<float>(v) / 255.0f; });
  return Image(raw.height, raw.width, raw.channels, std::move(values));
}

void save_image(const fs::path& path, const Image& img) {
  RawImage8 raw{img.height(), img.width(), img.channels(), {}};
  raw.data.resize(img.data().size());
  std::transform(img.data().begin(), img.data().end(), raw.data.begin(), quantize);
  write_raw8(path, raw);
}

Mask load_mask(const fs::path& path) {
  const RawImage8 raw = read_raw8(path);
  if (raw.channels != 1) {
    throw FormatError("mask must be single-channel: " + path.string());
  }
  std::vector<std::uint8_t> bits(raw.data.size());
  std::transform(raw.data.begin(), raw.data.end(), bits.begin(),
                 [](std::uint8_t v) { return static_cast<std::uint8_t>(v > 127); });
  return Mask(raw.height, raw.width, std::move(bits));
}

void save_mask(const fs::path& path, const Mask& mask) {
  RawImage8 raw{mask.height(), mask.width(), 1, {}};
  raw.data.resize(mask.size());
  std::transform(mask.data().begin(), mask.data().end(), raw.data.begin(),
                 [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
  write_raw8(path, raw);
}

ProbMap load_pmap(const fs::path& path) {
  const auto bytes = read_file(path);
  const auto newline = std::find(bytes.begin(), bytes.end(), '\n');
  if (newline == bytes.end()) throw FormatError("missing PMAP header: " + path.string());
  std::istringstream header(std::string(bytes.begin(), newline));
  std::string magic;
  long width = -1;
  long height = -1;
  header >> magic >> width >> height;
  if (magic != "PMAPv1" || !header || width < 0 || height < 0) {
    throw FormatError("bad PMAP header: " + path.string());
  }
  std::string rest;
  if (header >> rest) throw FormatError("bad PMAP header: " + path.string());
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t offset = static_cast<std::size_t>(newline - bytes.begin()) + 1;
  if (bytes.size() - offset < n * 4) throw IoError("truncated PMAP: " + path.string());
  std::vector<float> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i * 4 + b]))
              << (8 * b);
    }
    values[i] = std::bit_cast<float>(bits);
  }
  return ProbMap(static_cast<int>(height), static_cast<int>(width), std::move(values));
}

void save_pmap(const fs::path& path, const ProbMap& map) {
  const std::string header = "PMAPv1 " + std::to_string(map.width()) + " " +
                             std::to_string(map.height()) + "\n";
  std::vector<unsigned char> body(map.values().size() * 4);
  for (std::size_t i = 0; i < map.values().size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(map.values()[i]);
    for (int b = 0; b < 4; ++b) body[i * 4 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  write_bytes(path, header, body.data(), body.size());
}

}  // namespace rgseg
