#include "sgmstream/refine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "sgmstream/cost_volume.hpp"
#include "sgmstream/errors.hpp"
#include "sgmstream/hw_model.hpp"
#include "sgmstream/streaming.hpp"

namespace sgmstream {

namespace {

std::int32_t argmin(std::span<const std::uint32_t> values) {
  std::size_t best = 0;
  for (std::size_t d = 1; d < values.size(); ++d)
    if (values[d] < values[best]) best = d;
  return std::int32_t(best);
}

void require_same_size(const DisparityMap& a, const DisparityMap& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ValidationError(std::string(what) + ": disparity maps differ in size (" + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + ")");
  }
}

}  // namespace

DisparityMap wta(const AggregatedVolume& agg) {
  DisparityMap out(agg.width(), agg.height(), agg.d_max());
  for (int y = 0; y < agg.height(); ++y)
    for (int x = 0; x < agg.width(); ++x) out.set(x, y, argmin(agg.pixel(x, y)));
  return out;
}

namespace {

// Register k tracks the running minimum for match pixel x - k while base
// pixel x streams in. After the update the last register has seen every
// candidate and is retired.
class MatchDisparityCascade {
 public:
  explicit MatchDisparityCascade(int d_max) : cost_(std::size_t(d_max)), disp_(std::size_t(d_max)) {}

  template <class Emit>
  void run_row(const AggregatedVolume& agg, int y, Emit&& emit) {
    const int d_max = agg.d_max();
    const int width = agg.width();
    clear();
    for (int x = 0; x < width; ++x) {
      shift();
      const auto sums = agg.pixel(x, y);
      for (int k = 0; k < d_max && k <= x; ++k) {
        if (sums[std::size_t(k)] < cost_[std::size_t(k)]) {
          cost_[std::size_t(k)] = sums[std::size_t(k)];
          disp_[std::size_t(k)] = k;
        }
      }
      if (x - (d_max - 1) >= 0) emit(x - (d_max - 1), disp_.back());
    }
    for (int t = 1; t < d_max; ++t) {
      shift();
      const int xm = width - d_max + t;
      if (xm >= 0) emit(xm, disp_.back());
    }
  }

 private:
  void clear() {
    std::fill(cost_.begin(), cost_.end(), kEmpty);
    std::fill(disp_.begin(), disp_.end(), 0);
  }
  void shift() {
    std::move_backward(cost_.begin(), cost_.end() - 1, cost_.end());
    std::move_backward(disp_.begin(), disp_.end() - 1, disp_.end());
    cost_.front() = kEmpty;
    disp_.front() = 0;
  }

  static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> cost_;
  std::vector<std::int32_t> disp_;
};

}  // namespace

DisparityMap match_disparity_reuse(const AggregatedVolume& agg) {
  DisparityMap out(agg.width(), agg.height(), agg.d_max());
  MatchDisparityCascade cascade(agg.d_max());
  for (int y = 0; y < agg.height(); ++y) {
    cascade.run_row(agg, y, [&](int x, std::int32_t d) { out.set(x, y, d); });
  }
  return out;
}

namespace reference {

DisparityMap match_disparity_reuse(const AggregatedVolume& agg) {
  DisparityMap out(agg.width(), agg.height(), agg.d_max());
  for (int y = 0; y < agg.height(); ++y)
    for (int x = 0; x < agg.width(); ++x) {
      std::int32_t best = 0;
      for (int d = 1; d < agg.d_max() && x + d < agg.width(); ++d)
        if (agg.at(x + d, y, d) < agg.at(x + best, y, best)) best = d;
      out.set(x, y, best);
    }
  return out;
}

}  // namespace reference

DisparityMap lr_check(const DisparityMap& base, const DisparityMap& match, int threshold) {
  require_same_size(base, match, "lr_check");
  if (threshold < 0) throw ValidationError("lr threshold must be non-negative");
  DisparityMap out(base.width(), base.height(), base.d_max());
  for (int y = 0; y < base.height(); ++y)
    for (int x = 0; x < base.width(); ++x) {
      const std::int32_t d = base.at(x, y);
      if (d == DisparityMap::kInvalid || x - d < 0) continue;
      const std::int32_t dm = match.at(x - d, y);
      if (dm != DisparityMap::kInvalid && std::abs(d - dm) <= threshold) out.set(x, y, d);
    }
  return out;
}

DisparityMap median_filter(const DisparityMap& map, int window) {
  if (window < 1 || window % 2 == 0) throw ValidationError("median window must be odd");
  const std::size_t quorum = (std::size_t(window) * window + 1) / 2;
  DisparityMap out(map.width(), map.height(), map.d_max());
  std::vector<std::int32_t> valid;
  valid.reserve(std::size_t(window) * window);
  stream::for_each_window<std::int32_t>(map.values(), map.width(), map.height(), window,
                                        [&](int x, int y, const stream::WindowView<std::int32_t>& win) {
                                          valid.clear();
                                          for (int j = 0; j < window; ++j)
                                            for (int i = 0; i < window; ++i)
                                              if (win.at(i, j) != DisparityMap::kInvalid) valid.push_back(win.at(i, j));
                                          if (valid.size() < quorum) return;
                                          const auto mid = valid.begin() + std::ptrdiff_t((valid.size() - 1) / 2);
                                          std::nth_element(valid.begin(), mid, valid.end());
                                          out.set(x, y, *mid);
                                        });
  return out;
}

D1Report& D1Report::operator+=(const D1Report& other) {
  evaluated_pixels += other.evaluated_pixels;
  erroneous_pixels += other.erroneous_pixels;
  d1_all = evaluated_pixels ? double(erroneous_pixels) / double(evaluated_pixels) : 0.0;
  return *this;
}

bool d1_erroneous(std::int32_t estimate, std::int32_t truth) {
  if (estimate == DisparityMap::kInvalid) return true;
  const double err = std::abs(double(estimate) - double(truth));
  return err > kD1AbsThreshold && err > kD1RelThreshold * double(truth);
}

D1Report d1_error(const DisparityMap& estimate, const DisparityMap& truth,
                  const std::optional<Raster<std::uint8_t>>& mask) {
  require_same_size(estimate, truth, "d1_error");
  if (mask && (mask->width != truth.width() || mask->height != truth.height())) {
    throw ValidationError("d1_error: mask size differs from the disparity maps");
  }
  D1Report r;
  for (int y = 0; y < truth.height(); ++y)
    for (int x = 0; x < truth.width(); ++x) {
      if (truth.at(x, y) == DisparityMap::kInvalid) continue;
      if (mask && mask->at(x, y) == 0) continue;
      ++r.evaluated_pixels;
      if (d1_erroneous(estimate.at(x, y), truth.at(x, y))) ++r.erroneous_pixels;
    }
  r.d1_all = r.evaluated_pixels ? double(r.erroneous_pixels) / double(r.evaluated_pixels) : 0.0;
  return r;
}

DisparityMap run_pipeline(const StereoPair& pair, const PipelineConfig& config) {
  config.validate();
  pair.validate();
  const int width = pair.width(), height = pair.height(), d_max = config.d_max;
  const int sum_width = data_widths(config.cost_fn, config.params).sum;

  AggregatedVolume base_agg(width, height, d_max, sum_width);
  RasterAggregator base_stage(width, height, d_max, config.params);
  const SumSink base_out = [&](int x, int y, std::span<const std::uint32_t> s) {
    std::copy(s.begin(), s.end(), base_agg.pixel(x, y).begin());
  };
  const CostSink base_costs = [&](int x, int y, std::span<const std::uint32_t> c) { base_stage.push(x, y, c, base_out); };

  DisparityMap result;
  if (config.refine.lr_mode == LrMode::Recompute) {
    AggregatedVolume match_agg(width, height, d_max, sum_width);
    RasterAggregator match_stage(width, height, d_max, config.params);
    const SumSink match_out = [&](int x, int y, std::span<const std::uint32_t> s) {
      std::copy(s.begin(), s.end(), match_agg.pixel(x, y).begin());
    };
    const CostSink match_costs = [&](int x, int y, std::span<const std::uint32_t> c) {
      match_stage.push(x, y, c, match_out);
    };
    stream_costs(pair, config.cost_fn, d_max, base_costs, match_costs);
    result = lr_check(wta(base_agg), wta(match_agg), config.refine.lr_threshold);
  } else {
    stream_costs(pair, config.cost_fn, d_max, base_costs, CostSink{});
    result = wta(base_agg);
    if (config.refine.lr_mode == LrMode::Reuse) {
      result = lr_check(result, match_disparity_reuse(base_agg), config.refine.lr_threshold);
    }
  }
  if (config.refine.median) result = median_filter(result, config.refine.median_window);
  return result;
}

}  // namespace sgmstream
