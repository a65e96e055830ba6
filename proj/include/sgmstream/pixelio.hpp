#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sgmstream/image.hpp"

namespace sgmstream {

// Netpbm graymap as read from disk, before interpretation.
struct PgmData {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;
};

// Parses P2 or P5 with maxval in [1, 65535]. 16-bit P5 payloads are big-endian.
PgmData parse_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const PgmData& pgm);

// Loads an 8-bit graymap (P2 or P5, maxval 255).
GrayImage load_pgm(const std::filesystem::path& path);
GrayImage decode_gray(std::span<const std::uint8_t> bytes);
// Writes canonical binary P5: "P5\n<w> <h>\n255\n" followed by the pixels.
void save_pgm(const GrayImage& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_gray(const GrayImage& image);

// 16-bit P5, value = disparity * scale, invalid pixels stored as 0.
void save_disparity(const DisparityMap& map, const std::filesystem::path& path, int scale = 256);
std::vector<std::uint8_t> encode_disparity(const DisparityMap& map, int scale = 256);

// Inverse of save_disparity. A stored 0 reads back as invalid, so a valid
// disparity 0 does not survive a round trip. d_max <= 0 derives it from the data.
DisparityMap load_disparity(const std::filesystem::path& path, int scale = 256, int d_max = 0);
DisparityMap decode_disparity(std::span<const std::uint8_t> bytes, int scale = 256, int d_max = 0);

// Non-zero samples become 1.
Raster<std::uint8_t> load_mask(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sgmstream
