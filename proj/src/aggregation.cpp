#include "sgmstream/aggregation.hpp"

#include <algorithm>
#include <limits>

#include "sgmstream/errors.hpp"
#include "sgmstream/hw_model.hpp"

namespace sgmstream {

AggregatedVolume::AggregatedVolume(int width, int height, int d_max, int sum_width)
    : width_(width), height_(height), d_max_(d_max), sum_width_(sum_width),
      sums_(std::size_t(width) * height * d_max) {}

Offset previous_offset(Direction dir) {
  switch (dir) {
    case Direction::Deg0: return {-1, 0};
    case Direction::Deg45: return {-1, -1};
    case Direction::Deg90: return {0, -1};
    case Direction::Deg135: return {1, -1};
  }
  return {0, 0};
}

void path_recurrence(std::span<const std::uint32_t> prev, std::span<const std::uint32_t> costs,
                     const AggregationParams& params, std::span<std::uint32_t> out) {
  const std::size_t n = costs.size();
  const std::uint32_t lowest = *std::min_element(prev.begin(), prev.end());
  const std::uint32_t jump = lowest + params.p2;
  for (std::size_t d = 0; d < n; ++d) {
    std::uint32_t best = std::min(prev[d], jump);
    if (d > 0) best = std::min(best, prev[d - 1] + params.p1);
    if (d + 1 < n) best = std::min(best, prev[d + 1] + params.p1);
    out[d] = costs[d] + best - lowest;
  }
}

std::vector<std::uint32_t> path_recurrence(std::span<const std::uint32_t> prev, std::span<const std::uint32_t> costs,
                                           const AggregationParams& params) {
  std::vector<std::uint32_t> out(costs.size());
  path_recurrence(prev, costs, params, out);
  return out;
}

namespace {

void check_params(const AggregationParams& params, PenaltyCheck check) {
  if (check == PenaltyCheck::Enforce) params.validate();
}

int sum_width_for(const CostVolume& volume, const AggregationParams& params) {
  return bits_for(4 * (std::uint64_t(volume.max_value()) + params.p2));
}

// The four path updates for one pixel. A null `prev` restarts the path (L = C).
struct PathKernel {
  const AggregationParams& params;
  std::span<std::uint32_t> l[4];
  std::span<std::uint32_t> sums;
  AggregationStats& stats;

  void run(std::span<const std::uint32_t> costs, const std::uint32_t* const prev[4]) {
    const std::size_t n = costs.size();
    for (int r = 0; r < 4; ++r) {
      if (prev[r] == nullptr) {
        std::copy(costs.begin(), costs.end(), l[r].begin());
      } else {
        path_recurrence(std::span(prev[r], n), costs, params, l[r]);
      }
    }
    for (std::size_t d = 0; d < n; ++d) {
      sums[d] = l[0][d] + l[1][d] + l[2][d] + l[3][d];
      stats.max_sum = std::max(stats.max_sum, sums[d]);
      for (int r = 0; r < 4; ++r) stats.max_path_cost = std::max(stats.max_path_cost, l[r][d]);
    }
  }
};

}  // namespace

// ---------------------------------------------------------------------------

RasterAggregator::RasterAggregator(int width, int height, int d_max, const AggregationParams& params,
                                   PenaltyCheck check)
    : width_(width), height_(height), d_max_(d_max), params_(params), reg0_(std::size_t(d_max)),
      upper_left45_(std::size_t(d_max)), row45_(std::size_t(width) * d_max), row90_(row45_.size()),
      row135_(row45_.size()), scratch_(std::size_t(d_max)), l0_(std::size_t(d_max)), l45_(std::size_t(d_max)),
      l90_(std::size_t(d_max)), l135_(std::size_t(d_max)), sums_(std::size_t(d_max)) {
  check_params(params, check);
}

void RasterAggregator::push(int x, int y, std::span<const std::uint32_t> costs, const SumSink& sink) {
  const std::size_t d = std::size_t(d_max_);
  auto row = [d](std::vector<std::uint32_t>& buf, int col) { return buf.data() + std::size_t(col) * d; };

  const std::uint32_t* prev[4] = {
      x > 0 ? reg0_.data() : nullptr,
      (x > 0 && y > 0) ? upper_left45_.data() : nullptr,
      y > 0 ? row(row90_, x) : nullptr,
      (y > 0 && x + 1 < width_) ? row(row135_, x + 1) : nullptr,
  };
  PathKernel kernel{params_, {l0_, l45_, l90_, l135_}, sums_, stats_};
  kernel.run(costs, prev);

  std::copy(l0_.begin(), l0_.end(), reg0_.begin());
  std::copy(row(row45_, x), row(row45_, x) + d, upper_left45_.begin());
  std::copy(l45_.begin(), l45_.end(), row(row45_, x));
  std::copy(l90_.begin(), l90_.end(), row(row90_, x));
  std::copy(l135_.begin(), l135_.end(), row(row135_, x));
  (void)height_;
  sink(x, y, sums_);
}

AggregatedVolume aggregate(const CostVolume& volume, const AggregationParams& params, PenaltyCheck check,
                           AggregationStats* stats) {
  check_params(params, check);
  AggregatedVolume out(volume.width(), volume.height(), volume.d_max(), sum_width_for(volume, params));
  RasterAggregator stage(volume.width(), volume.height(), volume.d_max(), params, check);
  const SumSink sink = [&out](int x, int y, std::span<const std::uint32_t> sums) {
    std::copy(sums.begin(), sums.end(), out.pixel(x, y).begin());
  };
  for (int y = 0; y < volume.height(); ++y)
    for (int x = 0; x < volume.width(); ++x) stage.push(x, y, volume.pixel(x, y), sink);
  if (stats) *stats = stage.stats();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class InterleavedAggregator {
 public:
  InterleavedAggregator(const CostVolume& volume, const AggregationParams& params)
      : volume_(volume), params_(params), width_(volume.width()), height_(volume.height()),
        d_(std::size_t(volume.d_max())), half_((volume.width() + 1) / 2), row45_(std::size_t(width_) * d_),
        row90_(row45_.size()), row135_(row45_.size()), reg0_{std::vector<std::uint32_t>(d_), std::vector<std::uint32_t>(d_)},
        upper_left45_{std::vector<std::uint32_t>(d_), std::vector<std::uint32_t>(d_)}, edge0_(d_), edge45_(d_),
        l_{std::vector<std::uint32_t>(d_), std::vector<std::uint32_t>(d_), std::vector<std::uint32_t>(d_),
           std::vector<std::uint32_t>(d_)},
        sums_(d_), reorder_(std::size_t(width_) * d_ * 2) {}

  AggregatedVolume run(AggregationStats& stats) {
    AggregatedVolume out(width_, height_, volume_.d_max(), sum_width_for(volume_, params_));
    // Slot row t carries left-half pixels of row t and right-half pixels of row t-1.
    for (int t = 0; t <= height_; ++t) {
      for (int k = 0; k < half_; ++k) {
        if (t < height_) process(0, k, t, stats);
        if (t >= 1 && half_ + k < width_) process(1, half_ + k, t - 1, stats);
      }
      if (t >= 1) release(t - 1, out);
    }
    return out;
  }

 private:
  std::uint32_t* row(std::vector<std::uint32_t>& buf, int col) { return buf.data() + std::size_t(col) * d_; }
  std::uint32_t* pending(int x, int y) { return reorder_.data() + (std::size_t(y % 2) * width_ + x) * d_; }

  void process(int lane, int x, int y, AggregationStats& stats) {
    const bool lane_start = lane == 0 ? x == 0 : x == half_;
    const std::uint32_t* left0 = nullptr;
    const std::uint32_t* left45 = nullptr;
    if (x > 0) {
      left0 = lane_start ? edge0_.data() : reg0_[lane].data();
      if (y > 0) left45 = lane_start ? edge45_.data() : upper_left45_[lane].data();
    }
    const std::uint32_t* prev[4] = {
        left0,
        left45,
        y > 0 ? row(row90_, x) : nullptr,
        (y > 0 && x + 1 < width_) ? row(row135_, x + 1) : nullptr,
    };
    PathKernel kernel{params_, {l_[0], l_[1], l_[2], l_[3]}, sums_, stats};
    kernel.run(volume_.pixel(x, y), prev);

    std::copy(l_[0].begin(), l_[0].end(), reg0_[lane].begin());
    std::copy(row(row45_, x), row(row45_, x) + d_, upper_left45_[lane].begin());
    if (lane == 0 && x == half_ - 1) {
      // Cutting edge: the right lane reaches column half_ one slot row later.
      std::copy(l_[0].begin(), l_[0].end(), edge0_.begin());
      std::copy(row(row45_, x), row(row45_, x) + d_, edge45_.begin());
    }
    std::copy(l_[1].begin(), l_[1].end(), row(row45_, x));
    std::copy(l_[2].begin(), l_[2].end(), row(row90_, x));
    std::copy(l_[3].begin(), l_[3].end(), row(row135_, x));
    std::copy(sums_.begin(), sums_.end(), pending(x, y));
  }

  // Reorder: row y is complete once its right half has run.
  void release(int y, AggregatedVolume& out) {
    for (int x = 0; x < width_; ++x) std::copy(pending(x, y), pending(x, y) + d_, out.pixel(x, y).begin());
  }

  const CostVolume& volume_;
  const AggregationParams& params_;
  int width_, height_;
  std::size_t d_;
  int half_;
  std::vector<std::uint32_t> row45_, row90_, row135_;
  std::vector<std::uint32_t> reg0_[2], upper_left45_[2];
  std::vector<std::uint32_t> edge0_, edge45_;
  std::vector<std::uint32_t> l_[4];
  std::vector<std::uint32_t> sums_;
  std::vector<std::uint32_t> reorder_;
};

}  // namespace

AggregatedVolume aggregate_interleaved(const CostVolume& volume, const AggregationParams& params, PenaltyCheck check,
                                       AggregationStats* stats) {
  check_params(params, check);
  // With one column per half the left lane would need a right-lane result
  // from later in the same slot row; such narrow rows run in raster order.
  if (volume.width() < 3) return aggregate(volume, params, check, stats);
  AggregationStats local;
  InterleavedAggregator engine(volume, params);
  auto out = engine.run(local);
  if (stats) *stats = local;
  return out;
}

std::vector<int> raster_schedule(int width) {
  std::vector<int> s(std::size_t(std::max(width, 0)));
  for (int x = 0; x < width; ++x) s[std::size_t(x)] = x;
  return s;
}

std::vector<int> interleaved_schedule(int width) {
  std::vector<int> s;
  const int half = (width + 1) / 2;
  for (int k = 0; k < half; ++k) {
    s.push_back(k);
    if (half + k < width) s.push_back(half + k);
  }
  return s;
}

int dependency_distance(std::span<const int> schedule, int width) {
  if (width < 1 || schedule.size() != std::size_t(width)) {
    throw ValidationError("schedule length " + std::to_string(schedule.size()) + " does not match width " +
                          std::to_string(width));
  }
  std::vector<int> slot(std::size_t(width), -1);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const int col = schedule[i];
    if (col < 0 || col >= width || slot[std::size_t(col)] != -1) {
      throw ValidationError("schedule is not a permutation of [0, " + std::to_string(width) + ")");
    }
    slot[std::size_t(col)] = int(i);
  }
  int best = 0;
  for (int x = 1; x < width; ++x) {
    const int gap = slot[std::size_t(x)] - slot[std::size_t(x - 1)];
    if (gap > 0 && (best == 0 || gap < best)) best = gap;
  }
  return best;
}

}  // namespace sgmstream
