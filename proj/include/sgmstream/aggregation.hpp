#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sgmstream/config.hpp"
#include "sgmstream/cost_volume.hpp"

namespace sgmstream {

// Sum of the four path costs, H x W x d_max, disparity fastest.
class AggregatedVolume {
 public:
  AggregatedVolume() = default;
  AggregatedVolume(int width, int height, int d_max, int sum_width);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int d_max() const noexcept { return d_max_; }
  int sum_width() const noexcept { return sum_width_; }

  std::uint32_t at(int x, int y, int d) const { return sums_[index(x, y) + d]; }
  std::uint32_t& at(int x, int y, int d) { return sums_[index(x, y) + d]; }
  std::span<const std::uint32_t> pixel(int x, int y) const {
    return {sums_.data() + index(x, y), std::size_t(d_max_)};
  }
  std::span<std::uint32_t> pixel(int x, int y) {
    return {sums_.data() + index(x, y), std::size_t(d_max_)};
  }
  std::span<const std::uint32_t> values() const noexcept { return sums_; }

  bool operator==(const AggregatedVolume&) const = default;

 private:
  std::size_t index(int x, int y) const { return (std::size_t(y) * width_ + x) * d_max_; }

  int width_ = 0;
  int height_ = 0;
  int d_max_ = 0;
  int sum_width_ = 0;
  std::vector<std::uint32_t> sums_;
};

// Previous pixel of each path, as an offset from the current pixel:
// 0° (-1, 0), 45° (-1, -1), 90° (0, -1), 135° (+1, -1).
enum class Direction { Deg0 = 0, Deg45 = 1, Deg90 = 2, Deg135 = 3 };
inline constexpr std::array<Direction, 4> kDirections{Direction::Deg0, Direction::Deg45,
                                                      Direction::Deg90, Direction::Deg135};
struct Offset {
  int dx;
  int dy;
};
Offset previous_offset(Direction dir);

// One step of the path recursion:
//   L(d) = C(d) + min{prev(d), prev(d-1)+P1, prev(d+1)+P1, min prev + P2} - min prev
// Out-of-range d±1 candidates are skipped. All spans have length d_max.
void path_recurrence(std::span<const std::uint32_t> prev, std::span<const std::uint32_t> costs,
                     const AggregationParams& params, std::span<std::uint32_t> out);
std::vector<std::uint32_t> path_recurrence(std::span<const std::uint32_t> prev,
                                           std::span<const std::uint32_t> costs,
                                           const AggregationParams& params);

// Skip lets tests run degenerate penalties such as P1 = P2 = 0.
enum class PenaltyCheck { Enforce, Skip };

// Largest values observed while aggregating.
struct AggregationStats {
  std::uint32_t max_path_cost = 0;
  std::uint32_t max_sum = 0;
};

// Receives one sum vector per pixel in raster order.
using SumSink = std::function<void(int x, int y, std::span<const std::uint32_t> sums)>;

// Raster-order aggregation stage: 0° path state in a register, 45°/90°/135° in
// row buffers holding the previous row.
class RasterAggregator {
 public:
  RasterAggregator(int width, int height, int d_max, const AggregationParams& params,
                   PenaltyCheck check = PenaltyCheck::Enforce);

  // Costs must arrive in raster order.
  void push(int x, int y, std::span<const std::uint32_t> costs, const SumSink& sink);
  const AggregationStats& stats() const noexcept { return stats_; }

 private:
  int width_;
  int height_;
  int d_max_;
  AggregationParams params_;
  std::vector<std::uint32_t> reg0_;
  // Row-y-1 value of column x-1 for the 45° path, saved before column x-1 is overwritten.
  std::vector<std::uint32_t> upper_left45_;
  std::vector<std::uint32_t> row45_, row90_, row135_;
  std::vector<std::uint32_t> scratch_, l0_, l45_, l90_, l135_, sums_;
  AggregationStats stats_;
};

// Sequential raster-order executor.
AggregatedVolume aggregate(const CostVolume& volume, const AggregationParams& params,
                           PenaltyCheck check = PenaltyCheck::Enforce,
                           AggregationStats* stats = nullptr);

// Interleave-and-reorder executor. Each row is split in half; the right half
// runs one row behind and its pixels alternate with the left half, so 0°
// neighbours are two slots apart. Output is reordered to raster order and is
// identical to aggregate().
AggregatedVolume aggregate_interleaved(const CostVolume& volume, const AggregationParams& params,
                                       PenaltyCheck check = PenaltyCheck::Enforce,
                                       AggregationStats* stats = nullptr);

// Column processing order within one row.
std::vector<int> raster_schedule(int width);
// 0, h, 1, h+1, ... with h = ceil(width / 2).
std::vector<int> interleaved_schedule(int width);

// Smallest slot gap between a column and its left neighbour, over pairs where
// the neighbour is scheduled earlier in the same row. Pairs scheduled in the
// opposite order belong to the shifted half and are satisfied a row earlier.
// Returns 0 when no such pair exists. Throws ValidationError unless `schedule`
// is a permutation of [0, width).
int dependency_distance(std::span<const int> schedule, int width);

}  // namespace sgmstream
