#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sgmstream/config.hpp"
#include "sgmstream/image.hpp"

namespace sgmstream {

// Census bit string of up to 128 bits. Neighbour k (raster order, centre
// skipped) is bit k.
struct CensusCode {
  std::array<std::uint64_t, 2> words{};

  bool bit(int k) const { return (words[k >> 6] >> (k & 63)) & 1u; }
  void set(int k) { words[k >> 6] |= std::uint64_t{1} << (k & 63); }
  friend int hamming(const CensusCode& a, const CensusCode& b) {
    return std::popcount(a.words[0] ^ b.words[0]) + std::popcount(a.words[1] ^ b.words[1]);
  }
  bool operator==(const CensusCode&) const = default;
};

struct CensusRaster {
  int window = 0;
  Raster<CensusCode> codes;

  int bits() const { return window * window - 1; }
  bool operator==(const CensusRaster&) const = default;
};

using RankRaster = Raster<std::uint16_t>;

// H x W x d_max matching costs, disparity fastest.
class CostVolume {
 public:
  CostVolume() = default;
  CostVolume(int width, int height, int d_max, int cost_width);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int d_max() const noexcept { return d_max_; }
  int cost_width() const noexcept { return cost_width_; }
  std::uint32_t max_value() const noexcept;

  std::uint32_t at(int x, int y, int d) const { return costs_[index(x, y) + d]; }
  std::uint32_t& at(int x, int y, int d) { return costs_[index(x, y) + d]; }
  std::span<const std::uint32_t> pixel(int x, int y) const {
    return {costs_.data() + index(x, y), std::size_t(d_max_)};
  }
  std::span<std::uint32_t> pixel(int x, int y) {
    return {costs_.data() + index(x, y), std::size_t(d_max_)};
  }
  std::span<const std::uint32_t> values() const noexcept { return costs_; }
  std::span<std::uint32_t> values() noexcept { return costs_; }

  bool operator==(const CostVolume&) const = default;

 private:
  std::size_t index(int x, int y) const { return (std::size_t(y) * width_ + x) * d_max_; }

  int width_ = 0;
  int height_ = 0;
  int d_max_ = 0;
  int cost_width_ = 0;
  std::vector<std::uint32_t> costs_;
};

// Receives one cost vector per pixel in raster order.
using CostSink = std::function<void(int x, int y, std::span<const std::uint32_t> costs)>;

// Streaming (line buffer + window buffer) executors.
CensusRaster census_transform(const GrayImage& image, int window);
RankRaster rank_transform(const GrayImage& image, int window);

// Base-image volume: C(p, d) compares base pixel p with match pixel p - d.
// Throws ValidationError when d_max >= width or the cost function is invalid.
CostVolume compute_cost_volume(const StereoPair& pair, const CostFunction& fn, int d_max);
// Base and match volumes computed in one pass. The match volume compares match
// pixel p' with base pixel p' + d; it lags the base volume by d_max - 1 columns.
std::pair<CostVolume, CostVolume> compute_cost_volume_pair(const StereoPair& pair,
                                                           const CostFunction& fn, int d_max);

// Raw stream interface used by the pipeline. `match_sink` may be empty.
void stream_costs(const StereoPair& pair, const CostFunction& fn, int d_max,
                  const CostSink& base_sink, const CostSink& match_sink);

// Direct per-pixel evaluation of the same definitions.
namespace reference {
CensusRaster census_transform(const GrayImage& image, int window);
RankRaster rank_transform(const GrayImage& image, int window);
CostVolume compute_cost_volume(const StereoPair& pair, const CostFunction& fn, int d_max);
std::pair<CostVolume, CostVolume> compute_cost_volume_pair(const StereoPair& pair,
                                                           const CostFunction& fn, int d_max);
}  // namespace reference

// Debug dump: width, height, d_max, bit width as little-endian u32, then
// row-major little-endian u32 values.
void save_volume_dump(const std::filesystem::path& path, int width, int height, int d_max,
                      int bit_width, std::span<const std::uint32_t> values);
std::vector<std::uint8_t> encode_volume_dump(int width, int height, int d_max, int bit_width,
                                             std::span<const std::uint32_t> values);

}  // namespace sgmstream
