#pragma once

#include <cstdint>
#include <optional>

#include "sgmstream/aggregation.hpp"
#include "sgmstream/config.hpp"
#include "sgmstream/image.hpp"

namespace sgmstream {

// argmin_d S(p, d), ties to the smallest d.
DisparityMap wta(const AggregatedVolume& agg);

// Match-image disparities from the base volume: argmin_d S(p' + d, d) over
// p' + d < width. Register-cascade streaming implementation.
DisparityMap match_disparity_reuse(const AggregatedVolume& agg);

namespace reference {
DisparityMap match_disparity_reuse(const AggregatedVolume& agg);
}

// Keeps d_base(p) when |d_base(p) - d_match(p - d_base(p))| <= threshold.
DisparityMap lr_check(const DisparityMap& base, const DisparityMap& match, int threshold);

// Median of the valid values in the edge-clamped window; invalid unless at
// least ceil(w*w/2) samples are valid. Even counts take the lower middle.
DisparityMap median_filter(const DisparityMap& map, int window);

struct D1Report {
  double d1_all = 0.0;
  std::uint64_t evaluated_pixels = 0;
  std::uint64_t erroneous_pixels = 0;

  D1Report& operator+=(const D1Report& other);
};

inline constexpr double kD1AbsThreshold = 3.0;
inline constexpr double kD1RelThreshold = 0.05;

bool d1_erroneous(std::int32_t estimate, std::int32_t truth);
// Pixels with invalid truth or outside the mask are skipped; invalid
// estimates at evaluated pixels are erroneous.
D1Report d1_error(const DisparityMap& estimate, const DisparityMap& truth,
                  const std::optional<Raster<std::uint8_t>>& mask = std::nullopt);

// Cost -> aggregation -> WTA -> optional L-R check -> optional median.
DisparityMap run_pipeline(const StereoPair& pair, const PipelineConfig& config);

}  // namespace sgmstream
