#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "sgmstream/errors.hpp"
#include "sgmstream/explorer.hpp"

using namespace sgmstream;

TEST_CASE("pareto front basics") {
  const std::vector<Objective> obj{Objective::D1All, Objective::Runtime};
  const std::vector<SweepRecord> rs{oracle::record(1, 2, 0), oracle::record(2, 1, 0), oracle::record(2, 2, 0)};
  const auto front = pareto_front(rs, obj);
  REQUIRE(front.size() == 2);
  CHECK(*front[0].d1_all == 1);
  CHECK(*front[1].d1_all == 2);
  CHECK(pareto_front({rs[2]}, obj).size() == 1);
  CHECK_THROWS_AS(pareto_front({}, obj), ValidationError);
  CHECK_THROWS_AS(pareto_front(rs, {Objective::D1All}), ValidationError);
  CHECK_THROWS_AS(parse_objective("latency"), ValidationError);
}

TEST_CASE("pareto front against brute force") {
  std::mt19937 rng(17);
  for (int t = 0; t < 100; ++t) {
    std::vector<SweepRecord> rs;
    std::vector<std::vector<double>> pts;
    const int n = 1 + int(rng() % 25);
    for (int i = 0; i < n; ++i) {
      rs.push_back(oracle::record(rng() % 5, rng() % 5, rng() % 5));
      pts.push_back({*rs.back().d1_all, rs.back().hw.seconds, double(rs.back().hw.mem_bits_packed)});
    }
    const auto front = pareto_front(rs, {Objective::D1All, Objective::Runtime, Objective::MemBits});
    const auto keep = oracle::pareto(pts);
    std::multiset<std::vector<double>> a, b;
    for (const auto& r : front) a.insert({*r.d1_all, r.hw.seconds, double(r.hw.mem_bits_packed)});
    for (auto i : keep) b.insert(pts[i]);
    CHECK(a == b);
  }
}

TEST_CASE("grid enumeration") {
  SweepSpec spec;
  spec.cost_fns = {CostKind::Sad, CostKind::Zsad, CostKind::Census, CostKind::Rank};
  spec.windows = {5, 7};
  spec.d_maxes = {64, 128};
  spec.ufs = {4, 8, 16, 32};
  spec.lr_modes = {LrMode::None, LrMode::Reuse, LrMode::Recompute};
  spec.median = {true, false};
  spec.resolutions = {Resolution{}, Resolution{900, 260}};
  CHECK(enumerate_configs(spec, {1242, 374}).size() == 768);

  spec.ufs = {16, 48};
  std::ostringstream log;
  const auto configs = enumerate_configs(spec, {1242, 374}, &log);
  CHECK(configs.size() == 192);
  CHECK(log.str().find("uf=48") != std::string::npos);
}

TEST_CASE("downscale") {
  GrayImage img(4, 2, {0, 2, 4, 6, 10, 12, 14, 17});
  DisparityMap gt(4, 2, 16, std::vector<std::int32_t>{8, 3, 5, DisparityMap::kInvalid, 0, 0, 0, 0});
  StereoPair pair{img, img, gt, std::nullopt};
  const auto small = downscale(pair, {2, 1});
  CHECK(small.width() == 2);
  CHECK(small.height() == 1);
  CHECK(small.base.at(0, 0) == 6);   // (0+2+10+12)/4
  CHECK(small.base.at(1, 0) == 10);  // (4+6+14+17)/4 = 10.25
  CHECK(small.ground_truth->at(0, 0) == 4);
  CHECK(small.ground_truth->at(1, 0) == 3);  // round(5/2) = 3
}

TEST_CASE("sweep records and CSV determinism") {
  std::mt19937 rng(18);
  const auto t = oracle::texture(rng, 80, 20);
  const auto [base, match] = oracle::shifted_pair(t, 72, 4);
  DisparityMap gt(72, 20, 16);
  for (int y = 2; y < 18; ++y)
    for (int x = 16; x < 70; ++x) gt.set(x, y, 4);
  const std::vector<StereoPair> data{{base, match, gt, std::nullopt}};

  SweepSpec spec;
  spec.d_maxes = {16};
  spec.ufs = {4, 8};
  spec.lr_modes = {LrMode::None, LrMode::Reuse};
  const auto dir = std::filesystem::temp_directory_path() / "sgmstream_sweep_test";
  std::filesystem::create_directories(dir);
  SweepOptions opt;
  opt.jobs = 3;
  const auto recs = run_sweep(spec, data, dir / "a.csv", opt);
  REQUIRE(recs.size() == 4);
  for (const auto& r : recs) {
    REQUIRE(r.d1_all.has_value());
    CHECK(*r.d1_all == 0.0);
    CHECK(r.hw.cycles.pipeline == 100 + 72ull * 20 * 16 / r.config.uf - 1);
  }
  opt.jobs = 1;
  run_sweep(spec, data, dir / "b.csv", opt);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  const auto a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(a.find("census,5,16,4,nlr,on,72,20,0.000000,") != std::string::npos);
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(run_sweep(spec, {}, ""), ValidationError);
  spec.ufs = {48};
  CHECK_THROWS_AS(run_sweep(spec, data, ""), ValidationError);
}
