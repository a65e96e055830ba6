#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgmstream/config.hpp"

namespace sgmstream {

// Bits needed for values in [0, max_value]; at least 1.
int bits_for(std::uint64_t max_value);

std::uint32_t cost_max(const CostFunction& fn);
int cost_bit_width(const CostFunction& fn);

struct DataWidths {
  std::uint64_t cost_max = 0;
  std::uint64_t path_max = 0;  // cost_max + P2
  std::uint64_t sum_max = 0;   // 4 * path_max
  int cost = 0;
  int path = 0;
  int sum = 0;
  // Census bit-string length or rank value width; intensity width for SAD/ZSAD.
  int transform = 0;
};
DataWidths data_widths(const CostFunction& fn, const AggregationParams& params);

// IL + II * (height * width * d_max / uf - 1)
std::uint64_t pipeline_cycles(std::uint64_t il, std::uint64_t ii, std::uint64_t height,
                              std::uint64_t width, std::uint64_t d_max, std::uint64_t uf);

struct CycleEstimate {
  std::uint64_t pipeline = 0;     // the pure pipeline formula
  std::uint64_t lr_overhead = 0;  // zero without an L-R check
  std::uint64_t total = 0;
};
// LR overhead defaults to II * (width + d_max) * d_max / uf.
CycleEstimate estimate_cycles(const PipelineConfig& config);

// One on-chip buffer. `lanes` parallel accessors (the unroll factor for
// per-disparity storage, 1 otherwise).
struct MemoryItem {
  std::string name;
  std::uint64_t elements = 0;
  int element_width = 0;
  int lanes = 1;

  // Every lane keeps its own copy at full depth.
  std::uint64_t bits_partitioned() const { return std::uint64_t(lanes) * elements * element_width; }
  // elements / lanes words of lanes * element_width bits.
  std::uint64_t bits_packed() const { return elements * element_width; }
};

// 18 Kb block RAM: 1024 words of 18 bits, two ports.
struct BramShape {
  int width_bits = 18;
  int depth = 1024;
};

// Block counts for per-disparity row buffers at block granularity. Every lane
// element occupies ceil(width/18) port columns. A partitioned lane is also read
// by its d-1 and d+1 neighbours, so it needs four ports and is duplicated. A
// packed word serves all lanes with one read and one write. With one lane there
// is nothing to partition.
std::uint64_t bram_blocks_partitioned(const MemoryItem& item, BramShape shape = {});
std::uint64_t bram_blocks_packed(const MemoryItem& item, BramShape shape = {});

struct MemoryEstimate {
  std::vector<MemoryItem> items;
  std::uint64_t bits_partitioned = 0;
  std::uint64_t bits_packed = 0;
  // One path-cost row buffer.
  MemoryItem path_row_buffer;
  std::uint64_t path_blocks_partitioned = 0;
  std::uint64_t path_blocks_packed = 0;
  double path_packing_ratio = 1.0;
};
MemoryEstimate estimate_memory(const PipelineConfig& config);

struct HwEstimate {
  CycleEstimate cycles;
  double seconds = 0.0;
  double fps = 0.0;
  std::uint64_t mem_bits_partitioned = 0;
  std::uint64_t mem_bits_packed = 0;
  DataWidths widths;
  MemoryEstimate memory;
};
// Throws ValidationError for an invalid config.
HwEstimate estimate(const PipelineConfig& config);

}  // namespace sgmstream
