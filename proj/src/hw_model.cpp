#include "sgmstream/hw_model.hpp"

#include <algorithm>
#include <bit>

#include "sgmstream/errors.hpp"

namespace sgmstream {

int bits_for(std::uint64_t max_value) { return std::max(1, int(std::bit_width(max_value))); }

std::uint32_t cost_max(const CostFunction& fn) {
  const auto area = std::uint32_t(fn.window) * std::uint32_t(fn.window);
  switch (fn.kind) {
    case CostKind::Sad: return 255 * area;
    case CostKind::Zsad: return 510 * area;
    case CostKind::Census:
    case CostKind::Rank: return area - 1;
  }
  return 0;
}

int cost_bit_width(const CostFunction& fn) { return bits_for(cost_max(fn)); }

DataWidths data_widths(const CostFunction& fn, const AggregationParams& params) {
  DataWidths w;
  w.cost_max = cost_max(fn);
  w.path_max = w.cost_max + params.p2;
  w.sum_max = 4 * w.path_max;
  w.cost = bits_for(w.cost_max);
  w.path = bits_for(w.path_max);
  w.sum = bits_for(w.sum_max);
  switch (fn.kind) {
    case CostKind::Census: w.transform = std::max(1, fn.window * fn.window - 1); break;
    case CostKind::Rank: w.transform = bits_for(std::uint64_t(fn.window) * fn.window - 1); break;
    default: w.transform = 8; break;
  }
  return w;
}

std::uint64_t pipeline_cycles(std::uint64_t il, std::uint64_t ii, std::uint64_t height, std::uint64_t width,
                              std::uint64_t d_max, std::uint64_t uf) {
  return il + ii * (height * width * (d_max / uf) - 1);
}

CycleEstimate estimate_cycles(const PipelineConfig& config) {
  config.validate();
  CycleEstimate c;
  const std::uint64_t iterations = std::uint64_t(config.d_max / config.uf);
  c.pipeline = pipeline_cycles(config.il, config.ii, std::uint64_t(config.height), std::uint64_t(config.width),
                               std::uint64_t(config.d_max), std::uint64_t(config.uf));
  if (config.refine.lr_mode != LrMode::None) {
    // One extra row plus d_max pixels of match-side lag.
    c.lr_overhead = config.lr_overhead_cycles.value_or(
        config.ii * (std::uint64_t(config.width) + std::uint64_t(config.d_max)) * iterations);
  }
  c.total = c.pipeline + c.lr_overhead;
  return c;
}

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// Blocks for one instance of `words` rows, `slots` element slots wide.
std::uint64_t instance_blocks(std::uint64_t words, std::uint64_t slots, int element_width, BramShape shape) {
  return ceil_div(words, std::uint64_t(shape.depth)) * slots * ceil_div(std::uint64_t(element_width), std::uint64_t(shape.width_bits));
}

}  // namespace

std::uint64_t bram_blocks_partitioned(const MemoryItem& item, BramShape shape) {
  const std::uint64_t lanes = std::uint64_t(std::max(item.lanes, 1));
  const std::uint64_t per_lane = ceil_div(item.elements, lanes);
  if (lanes == 1) return instance_blocks(per_lane, 1, item.element_width, shape);
  return 2 * lanes * instance_blocks(per_lane, 1, item.element_width, shape);
}

std::uint64_t bram_blocks_packed(const MemoryItem& item, BramShape shape) {
  const std::uint64_t lanes = std::uint64_t(std::max(item.lanes, 1));
  return instance_blocks(ceil_div(item.elements, lanes), lanes, item.element_width, shape);
}

MemoryEstimate estimate_memory(const PipelineConfig& config) {
  config.validate();
  const auto widths = data_widths(config.cost_fn, config.params);
  const std::uint64_t width = std::uint64_t(config.width);
  const std::uint64_t d_max = std::uint64_t(config.d_max);
  const std::uint64_t w = std::uint64_t(config.cost_fn.window);
  const int uf = config.uf;
  const bool transform = config.cost_fn.kind == CostKind::Census || config.cost_fn.kind == CostKind::Rank;
  const bool lr2 = config.refine.lr_mode == LrMode::Recompute;

  MemoryEstimate m;
  auto add = [&m](std::string name, std::uint64_t elements, int element_width, int lanes) {
    m.items.push_back(MemoryItem{std::move(name), elements, element_width, lanes});
  };

  add("cost line buffer (base)", (w - 1) * width, 8, 1);
  add("cost line buffer (match)", (w - 1) * width, 8, 1);
  if (transform) {
    add("match transform fifo", d_max, widths.transform, 1);
    if (lr2) add("base transform fifo", d_max, widths.transform, 1);
  } else {
    add("match window buffer", w * (d_max + w - 1), 8, 1);
    if (lr2) add("base window buffer", w * (d_max + w - 1), 8, 1);
  }

  const int copies = lr2 ? 2 : 1;
  for (int c = 0; c < copies; ++c) {
    const std::string suffix = c == 0 ? "" : " (match)";
    for (const char* dir : {"45", "90", "135"}) {
      add(std::string("path row buffer ") + dir + suffix, width * d_max, widths.path, uf);
    }
    add("interleave/reorder fifos" + suffix, 4 * ((width + 1) / 2) * d_max, widths.sum, uf);
  }
  if (config.refine.lr_mode == LrMode::Reuse) add("match disparity registers", d_max, widths.sum, 1);

  for (const auto& item : m.items) {
    m.bits_partitioned += item.bits_partitioned();
    m.bits_packed += item.bits_packed();
  }
  m.path_row_buffer = MemoryItem{"path row buffer", width * d_max, widths.path, uf};
  m.path_blocks_partitioned = bram_blocks_partitioned(m.path_row_buffer);
  m.path_blocks_packed = bram_blocks_packed(m.path_row_buffer);
  m.path_packing_ratio = double(m.path_blocks_packed) / double(m.path_blocks_partitioned);
  return m;
}

HwEstimate estimate(const PipelineConfig& config) {
  config.validate();
  HwEstimate e;
  e.cycles = estimate_cycles(config);
  e.seconds = double(e.cycles.total) / (config.freq_mhz * 1e6);
  e.fps = 1.0 / e.seconds;
  e.widths = data_widths(config.cost_fn, config.params);
  e.memory = estimate_memory(config);
  e.mem_bits_partitioned = e.memory.bits_partitioned;
  e.mem_bits_packed = e.memory.bits_packed;
  return e;
}

}  // namespace sgmstream
