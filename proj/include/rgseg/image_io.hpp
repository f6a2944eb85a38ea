#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rgseg/image.hpp"

namespace rgseg {

/// Undecoded 8-bit raster as stored on disk.
struct RawImage8 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

/// Reads an 8-bit PNG, binary PGM (P5) or binary PPM (P6). The format is
/// sniffed from the file contents, not the extension.
RawImage8 read_raw8(const std::filesystem::path& path);

/// Writes PGM/PPM or PNG depending on the extension (.pgm, .ppm, .png).
void write_raw8(const std::filesystem::path& path, const RawImage8& raw);

/// Loads an image with every value scaled to raw/255.
Image load_image(const std::filesystem::path& path);

/// Saves an image quantized to 8 bits (round(v*255)).
void save_image(const std::filesystem::path& path, const Image& img);

/// Loads a single-channel mask; a pixel is foreground iff raw > 127.
Mask load_mask(const std::filesystem::path& path);

/// Saves a mask as 8-bit single-channel {0,255}. PGM unless the extension is
/// .png.
void save_mask(const std::filesystem::path& path, const Mask& mask);

/// PMAPv1: ASCII line "PMAPv1 <width> <height>\n" then width*height
/// little-endian float32 values, row-major.
ProbMap load_pmap(const std::filesystem::path& path);
void save_pmap(const std::filesystem::path& path, const ProbMap& map);

}  // namespace rgseg
