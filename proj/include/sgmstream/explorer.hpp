#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sgmstream/config.hpp"
#include "sgmstream/hw_model.hpp"
#include "sgmstream/image.hpp"

namespace sgmstream {

// Downscale target. {0, 0} keeps the native resolution.
struct Resolution {
  int width = 0;
  int height = 0;
  auto operator<=>(const Resolution&) const = default;
};

struct SweepSpec {
  std::vector<CostKind> cost_fns{CostKind::Census};
  std::vector<int> windows{5};
  std::vector<int> d_maxes{64};
  std::vector<int> ufs{16};
  std::vector<LrMode> lr_modes{LrMode::None};
  std::vector<bool> median{true};
  std::vector<Resolution> resolutions{Resolution{}};
  // Shared settings (clock, IL, thresholds, median window). The penalties are
  // `penalties` when set, otherwise derived per cost function.
  PipelineConfig base;
  std::optional<AggregationParams> penalties;
};

struct SweepRecord {
  PipelineConfig config;
  std::optional<double> d1_all;  // empty when no pair has ground truth
  std::uint64_t evaluated_pixels = 0;
  std::uint64_t erroneous_pixels = 0;
  HwEstimate hw;
  double wall_time_seconds = 0.0;
};

struct SweepOptions {
  unsigned jobs = 0;  // 0 = hardware concurrency
  // Wall time makes the CSV non-reproducible, so it is written only on request.
  bool record_wall_time = false;
  std::ostream* log = nullptr;
};

// Integer-factor box downscale towards `target`. Ground truth is sampled at
// the top-left pixel of each block and divided by the horizontal factor.
StereoPair downscale(const StereoPair& pair, Resolution target);

// Every valid configuration of the grid, in CSV row order. Pairs whose uf does
// not divide d_max are skipped and reported through `log`.
std::vector<PipelineConfig> enumerate_configs(const SweepSpec& spec, Resolution native,
                                              std::ostream* log = nullptr);

// Evaluates every configuration on every pair and writes the CSV when `out`
// is non-empty. Throws ValidationError if the dataset or grid is empty.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const std::vector<StereoPair>& dataset,
                                   const std::filesystem::path& out, const SweepOptions& options = {});

inline constexpr std::string_view kCsvHeader =
    "cost,win,dmax,uf,lr,median,width,height,d1_all,cycles,runtime_s,fps,mem_bits_packed,"
    "cost_width,path_width,sum_width,wall_time_s";

std::string csv_row(const SweepRecord& record, bool with_wall_time);
void write_csv(std::ostream& out, const std::vector<SweepRecord>& records, bool with_wall_time);

enum class Objective { D1All, Runtime, MemBits };
// "d1_all", "runtime", "mem_bits". Throws ValidationError otherwise.
Objective parse_objective(std::string_view name);
double objective_value(const SweepRecord& record, Objective objective);

// Records not strictly dominated under minimisation of every objective,
// sorted by the first objective. Needs >= 1 record and >= 2 objectives.
std::vector<SweepRecord> pareto_front(const std::vector<SweepRecord>& records,
                                      const std::vector<Objective>& objectives);

}  // namespace sgmstream
