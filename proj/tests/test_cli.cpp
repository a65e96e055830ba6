#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sgmstream/cli.hpp"
#include "sgmstream/pixelio.hpp"

using namespace sgmstream;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("sgmstream_cli_" + std::to_string(std::random_device{}()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("estimate prints the reference latency") {
  const auto r = run({"estimate", "--cost", "census", "--win", "5", "--dmax", "64", "--uf", "16", "--width", "1242",
                      "--height", "374"});
  CHECK(r.code == 0);
  CHECK(r.out.find("cycles: 1858131") != std::string::npos);
  CHECK(r.out.find("runtime_s: 0.006194") != std::string::npos);
  CHECK(r.out.find("fps: 161") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  const auto r = run({"estimate", "--frobnicate"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({"estimate", "--uf", "48"}).code == 1);
  CHECK(run({"estimate", "--cost", "magic"}).code == 1);
}

TEST_CASE("match and eval") {
  TempDir dir;
  std::mt19937 rng(19);
  const auto t = oracle::texture(rng, 60, 16);
  const auto [base, match] = oracle::shifted_pair(t, 56, 3);
  save_pgm(base, dir / "b.pgm");
  save_pgm(match, dir / "m.pgm");
  save_pgm(GrayImage(40, 16), dir / "small.pgm");

  auto r = run({"match", "--base", dir / "b.pgm", "--match", dir / "m.pgm", "--out", dir / "d.pgm", "--dmax", "16",
                "--uf", "4"});
  CHECK(r.code == 0);
  const auto d = load_disparity(dir / "d.pgm");
  CHECK(d.at(30, 8) == 3);

  r = run({"match", "--base", dir / "b.pgm", "--match", dir / "small.pgm", "--out", dir / "x.pgm", "--dmax", "16",
           "--uf", "4"});
  CHECK(r.code == 1);
  CHECK(r.err.find("dimension") != std::string::npos);

  r = run({"match", "--base", dir / "missing.pgm", "--match", dir / "m.pgm", "--out", dir / "x.pgm"});
  CHECK(r.code == 2);

  r = run({"eval", dir / "d.pgm", dir / "d.pgm"});
  CHECK(r.code == 0);
  CHECK(r.out.find("d1_all: 0.000000") != std::string::npos);
}

TEST_CASE("config file feeds the flags") {
  TempDir dir;
  PipelineConfig c;
  c.d_max = 128;
  c.uf = 32;
  c.cost_fn.window = 7;
  c.params = AggregationParams::defaults_for(c.cost_fn);
  save_config(c, dir / "c.cfg");
  auto r = run({"estimate", "--config", dir / "c.cfg"});
  CHECK(r.code == 0);
  CHECK(r.out.find("census 7x7 dmax=128 uf=32") != std::string::npos);
  r = run({"estimate", "--config", dir / "missing.cfg"});
  CHECK(r.code == 2);
}

TEST_CASE("sweep writes CSV and a pareto report") {
  TempDir dir;
  std::mt19937 rng(20);
  const auto t = oracle::texture(rng, 48, 12);
  const auto [base, match] = oracle::shifted_pair(t, 40, 2);
  save_pgm(base, dir / "b.pgm");
  save_pgm(match, dir / "m.pgm");
  DisparityMap gt(40, 12, 8, std::vector<std::int32_t>(480, 2));
  save_disparity(gt, dir / "gt.pgm");
  const auto r = run({"sweep", "--pair", dir / "b.pgm" + "," + dir / "m.pgm" + "," + dir / "gt.pgm", "--dmax", "8",
                      "--uf", "2,4,3", "--cost", "census,sad", "--out", dir / "s.csv", "--pareto",
                      "d1_all,runtime,mem_bits"});
  CHECK(r.code == 0);
  CHECK(r.out.find("wrote 4 configurations") != std::string::npos);
  CHECK(r.out.find("pareto front") != std::string::npos);
  CHECK(r.err.find("uf=3") != std::string::npos);
  CHECK(fs::exists(dir / "s.csv"));
}
