#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include "footprint/raster.hpp"

namespace footprint {

/// 8-bit RGB raster, one byte per channel, row-major interleaved.
struct RgbImage {
  Raster<std::array<std::uint8_t, 3>> pixels;
};

// Binary masks travel as PGM "P5" with maxval 255 (1 <-> 255). The loader
// accepts any 8-bit PGM and maps values above 127 to 1.
std::string encode_pgm(const BinaryMask& mask);
BinaryMask decode_pgm(std::string_view bytes);

// "IMAP1\n", u32 height, u32 width, u32 max_label, then u32 labels (LE).
std::string encode_imap(const InstanceMap& map);
InstanceMap decode_imap(std::string_view bytes);

// "PMAP1\n", u32 channels, u32 height, u32 width, then f32 values (LE),
// channel-major then row-major.
std::string encode_pmap(const Planes& planes);
Planes decode_pmap(std::string_view bytes);

// Binary PPM "P6", maxval 255.
std::string encode_ppm(const RgbImage& image);
RgbImage decode_ppm(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place, so a
/// reader never observes a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace footprint
