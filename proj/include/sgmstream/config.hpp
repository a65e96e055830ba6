#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgmstream {

enum class CostKind { Sad, Zsad, Census, Rank };

std::string_view to_string(CostKind kind);
// Accepts "sad", "zsad", "census", "rank" (case-insensitive).
std::optional<CostKind> parse_cost_kind(std::string_view text);

inline constexpr int kMaxWindow = 11;

struct CostFunction {
  CostKind kind = CostKind::Census;
  int window = 5;  // odd side length, 3..kMaxWindow

  std::vector<std::string> violations() const;
  void validate() const;
  bool operator==(const CostFunction&) const = default;
};

struct AggregationParams {
  std::uint32_t p1 = 7;
  std::uint32_t p2 = 86;

  // 0 < p1 < p2
  std::vector<std::string> violations() const;
  void validate() const;
  bool operator==(const AggregationParams&) const = default;

  // P1 = max(1, round(7 * cost_max / 24)), P2 = max(P1 + 1, round(86 * cost_max / 24)).
  static AggregationParams defaults_for(const CostFunction& fn);
};

enum class LrMode { None, Reuse, Recompute };  // NLR, LR1, LR2

std::string_view to_string(LrMode mode);
// Accepts "nlr", "lr1", "lr2" (case-insensitive).
std::optional<LrMode> parse_lr_mode(std::string_view text);

struct RefinementConfig {
  LrMode lr_mode = LrMode::None;
  int lr_threshold = 1;
  bool median = true;
  int median_window = 3;

  std::vector<std::string> violations() const;
  bool operator==(const RefinementConfig&) const = default;
};

struct PipelineConfig {
  CostFunction cost_fn;
  int d_max = 64;
  int uf = 16;
  int width = 1242;
  int height = 374;
  AggregationParams params;
  RefinementConfig refine;
  double freq_mhz = 300.0;
  std::uint64_t il = 100;
  std::uint64_t ii = 1;
  // Replaces the default LR latency overhead when set.
  std::optional<std::uint64_t> lr_overhead_cycles;

  std::vector<std::string> violations() const;
  // Throws ValidationError listing every violation.
  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

// Flat key=value text, '#' starts a comment. Keys: cost, win, dmax, uf, p1, p2,
// lr_mode, lr_threshold, median, median_win, freq_mhz, il. Missing keys take
// defaults; p1/p2 default from the cost function. Unknown keys are rejected.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string format_config(const PipelineConfig& config);
void save_config(const PipelineConfig& config, const std::filesystem::path& path);

}  // namespace sgmstream
