#include <doctest.h>

#include <cmath>
#include <random>

#include "sgmstream/errors.hpp"
#include "sgmstream/hw_model.hpp"

using namespace sgmstream;

namespace {

PipelineConfig wide(int d_max, int uf, int win = 5) {
  PipelineConfig c;
  c.cost_fn = {CostKind::Census, win};
  c.d_max = d_max;
  c.uf = uf;
  c.params = AggregationParams::defaults_for(c.cost_fn);
  return c;
}

}  // namespace

TEST_CASE("bit widths") {
  CHECK(bits_for(0) == 1);
  CHECK(bits_for(1) == 1);
  CHECK(bits_for(24) == 5);
  CHECK(bits_for(6375) == 13);
  CHECK(cost_bit_width({CostKind::Census, 5}) == 5);
  CHECK(cost_bit_width({CostKind::Sad, 5}) == 13);
  CHECK(cost_max({CostKind::Rank, 7}) == 48);
  CHECK(cost_max({CostKind::Zsad, 3}) == 4590);
  const auto w = data_widths({CostKind::Census, 5}, {7, 86});
  CHECK(w.path_max == 110);
  CHECK(w.sum_max == 440);
  CHECK(w.path == 7);
  CHECK(w.sum == 9);
  CHECK(w.transform == 24);
}

TEST_CASE("latency of the reference configuration") {
  const auto c = wide(64, 16);
  CHECK(pipeline_cycles(100, 1, 374, 1242, 64, 16) == 1858131);
  const auto e = estimate(c);
  CHECK(e.cycles.total == 1858131);
  CHECK(e.seconds == doctest::Approx(0.0061938).epsilon(1e-4));
  CHECK(std::floor(e.fps) == 161);
  CHECK(estimate(wide(128, 32)).cycles.total == 1858131);
}

TEST_CASE("single iteration costs IL") {
  auto c = wide(8, 8);
  c.width = 9;  // width only enters through the product
  CHECK(pipeline_cycles(100, 1, 1, 1, 8, 8) == 100);
}

TEST_CASE("cycle formula over random configs") {
  std::mt19937 rng(10);
  for (int t = 0; t < 1000; ++t) {
    PipelineConfig c;
    c.uf = 1 << (rng() % 6);
    c.d_max = c.uf * int(1 + rng() % 8);
    c.width = c.d_max + 1 + int(rng() % 2000);
    c.height = 1 + int(rng() % 1000);
    c.il = rng() % 5000;
    c.ii = 1 + rng() % 3;
    const std::uint64_t expect =
        c.il + c.ii * (std::uint64_t(c.height) * std::uint64_t(c.width) * std::uint64_t(c.d_max) / std::uint64_t(c.uf) - 1);
    const auto e = estimate(c);
    CHECK(e.cycles.pipeline == expect);
    CHECK(e.fps * e.seconds == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.mem_bits_packed <= e.mem_bits_partitioned);
  }
}

TEST_CASE("larger unroll factor never adds cycles") {
  auto a = wide(64, 4), b = wide(64, 8), c = wide(64, 16);
  CHECK(estimate(a).cycles.total >= estimate(b).cycles.total);
  CHECK(estimate(b).cycles.total >= estimate(c).cycles.total);
}

TEST_CASE("left-right modes add a separate overhead") {
  auto c = wide(128, 32, 7);
  const auto nlr = estimate(c);
  c.refine.lr_mode = LrMode::Reuse;
  const auto lr1 = estimate(c);
  CHECK(lr1.cycles.pipeline == nlr.cycles.pipeline);
  CHECK(lr1.cycles.lr_overhead == (1242 + 128) * 4);
  CHECK(lr1.seconds > nlr.seconds);
  c.lr_overhead_cycles = 180000;
  CHECK(estimate(c).cycles.total == nlr.cycles.pipeline + 180000);
}

TEST_CASE("memory terms") {
  const auto c = wide(64, 16);
  const auto m = estimate_memory(c);
  CHECK(m.path_row_buffer.elements == 1242u * 64u);
  CHECK(m.path_row_buffer.element_width == 7);
  CHECK(m.path_row_buffer.lanes == 16);
  CHECK(m.path_blocks_packed * 2 == m.path_blocks_partitioned);
  CHECK(m.path_packing_ratio == 0.5);

  auto half = c;
  half.width = 621;
  const auto mh = estimate_memory(half);
  for (std::size_t i = 0; i < m.items.size(); ++i)
    if (m.items[i].name.find("buffer") != std::string::npos && m.items[i].name.find("window") == std::string::npos)
      CHECK(mh.items[i].bits_packed() * 2 == m.items[i].bits_packed());

  auto lr2 = c;
  lr2.refine.lr_mode = LrMode::Recompute;
  CHECK(estimate_memory(lr2).bits_packed > m.bits_packed);
}

TEST_CASE("invalid configs are rejected") {
  auto c = wide(64, 48);
  CHECK_THROWS_AS(estimate(c), ValidationError);
  c = wide(64, 16);
  c.width = 0;
  CHECK_THROWS_AS(estimate(c), ValidationError);
}
