#include <doctest.h>

#include <random>

#include "sgmstream/config.hpp"
#include "sgmstream/errors.hpp"

using namespace sgmstream;

TEST_CASE("census 5x5 config from text") {
  const auto c = parse_config("cost=census\nwin=5\ndmax=64\nuf=16");
  CHECK(c.cost_fn.kind == CostKind::Census);
  CHECK(c.cost_fn.window == 5);
  CHECK(c.d_max == 64);
  CHECK(c.uf == 16);
}

TEST_CASE("empty config is the documented default") {
  const auto c = parse_config("");
  CHECK(c == PipelineConfig{});
  CHECK(format_config(c) ==
        "cost=census\nwin=5\ndmax=64\nuf=16\np1=7\np2=86\nlr_mode=nlr\nlr_threshold=1\n"
        "median=on\nmedian_win=3\nfreq_mhz=300\nil=100\n");
}

TEST_CASE("every violation is listed") {
  CHECK_THROWS_AS(parse_config("win=4"), ValidationError);
  try {
    parse_config("win=4\ndmax=64\nuf=48\nbogus=1\ncost=fancy\nwin=5");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() >= 4);
  }
}

TEST_CASE("penalties follow the cost function unless given") {
  const auto sad = parse_config("cost=sad\nwin=5");
  CHECK(sad.params == AggregationParams::defaults_for(sad.cost_fn));
  CHECK(sad.params.p1 == 1859);  // round(7 * 6375 / 24)
  const auto fixed = parse_config("cost=sad\np1=3\np2=10");
  CHECK(fixed.params.p1 == 3);
  CHECK(fixed.params.p2 == 10);
  CHECK_THROWS_AS(parse_config("p1=5\np2=5"), ValidationError);
}

TEST_CASE("comments and whitespace") {
  const auto c = parse_config("# header\n  cost = rank # trailing\n\nmedian=off\n");
  CHECK(c.cost_fn.kind == CostKind::Rank);
  CHECK_FALSE(c.refine.median);
}

TEST_CASE("config round trip over random valid configs") {
  std::mt19937 rng(11);
  const CostKind kinds[] = {CostKind::Sad, CostKind::Zsad, CostKind::Census, CostKind::Rank};
  const LrMode modes[] = {LrMode::None, LrMode::Reuse, LrMode::Recompute};
  for (int t = 0; t < 200; ++t) {
    PipelineConfig c;
    c.cost_fn = {kinds[rng() % 4], int(3 + 2 * (rng() % 5))};
    c.uf = 1 << (rng() % 5);
    c.d_max = c.uf * int(1 + rng() % 8);
    c.params.p1 = 1 + rng() % 50;
    c.params.p2 = c.params.p1 + 1 + rng() % 100;
    c.refine.lr_mode = modes[rng() % 3];
    c.refine.lr_threshold = int(rng() % 4);
    c.refine.median = rng() % 2;
    c.refine.median_window = int(3 + 2 * (rng() % 3));
    c.freq_mhz = 50.0 + double(rng() % 100000) / 7.0;
    c.il = rng() % 1000;
    REQUIRE(c.violations().empty());
    CHECK(parse_config(format_config(c)) == c);
  }
}
