#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sgmstream/cost_volume.hpp"
#include "sgmstream/errors.hpp"
#include "sgmstream/hw_model.hpp"
#include "sgmstream/streaming.hpp"

using namespace sgmstream;

namespace {

GrayImage ramp3x3() { return GrayImage(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9}); }

StereoPair pair_of(GrayImage b, GrayImage m) { return {std::move(b), std::move(m), std::nullopt, std::nullopt}; }

constexpr CostKind kAll[] = {CostKind::Sad, CostKind::Zsad, CostKind::Census, CostKind::Rank};

}  // namespace

TEST_CASE("census bits for a 3x3 ramp") {
  const auto ct = census_transform(ramp3x3(), 3);
  const auto code = ct.codes.at(1, 1);
  const int expected[] = {1, 1, 1, 1, 0, 0, 0, 0};
  for (int k = 0; k < 8; ++k) CHECK(code.bit(k) == bool(expected[k]));
  CHECK(ct.bits() == 8);
}

TEST_CASE("rank of a 3x3 ramp centre") { CHECK(rank_transform(ramp3x3(), 3).at(1, 1) == 4); }

TEST_CASE("constant image transforms to zero") {
  GrayImage flat(6, 4, std::uint8_t(77));
  for (int w : {3, 5, 7}) {
    const auto ct = census_transform(flat, w);
    const auto rt = rank_transform(flat, w);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 6; ++x) {
        CHECK(ct.codes.at(x, y) == CensusCode{});
        CHECK(rt.at(x, y) == 0);
      }
  }
}

TEST_CASE("SAD and ZSAD on a constant offset") {
  const auto vs = compute_cost_volume(pair_of(GrayImage(5, 5, std::uint8_t(10)), GrayImage(5, 5, std::uint8_t(7))),
                                      {CostKind::Sad, 3}, 2);
  const auto vz = compute_cost_volume(pair_of(GrayImage(5, 5, std::uint8_t(10)), GrayImage(5, 5, std::uint8_t(7))),
                                      {CostKind::Zsad, 3}, 2);
  CHECK(vs.at(2, 2, 0) == 27);
  CHECK(vs.at(2, 2, 1) == 27);
  CHECK(vz.at(2, 2, 0) == 0);
}

TEST_CASE("census Hamming cost of 11110000 against zero") {
  const auto v = compute_cost_volume(pair_of(ramp3x3(), GrayImage(3, 3, std::uint8_t(50))), {CostKind::Census, 3}, 1);
  CHECK(v.at(1, 1, 0) == 4);
}

TEST_CASE("identical images cost zero at d=0") {
  std::mt19937 rng(5);
  const auto img = oracle::random_image(rng, 12, 9);
  for (auto kind : kAll) {
    const auto [b, m] = compute_cost_volume_pair(pair_of(img, img), {kind, 5}, 4);
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 12; ++x) {
        CHECK(b.at(x, y, 0) == 0);
        CHECK(m.at(x, y, 0) == 0);
      }
  }
}

TEST_CASE("match volume is zero at the true shift") {
  std::mt19937 rng(8);
  const int s = 3, w = 5, r = w / 2;
  const auto t = oracle::texture(rng, 40, 12);
  const auto [base, match] = oracle::shifted_pair(t, 32, s);
  for (auto kind : kAll) {
    const auto [bv, mv] = compute_cost_volume_pair(pair_of(base, match), {kind, w}, 8);
    for (int y = 0; y < 12; ++y)
      for (int x = r + s; x + r < 32; ++x) CHECK(bv.at(x, y, s) == 0);
    for (int y = 0; y < 12; ++y)
      for (int x = r; x + s + r < 32; ++x) CHECK(mv.at(x, y, s) == 0);
  }
}

TEST_CASE("streaming volumes equal the reference") {
  std::mt19937 rng(21);
  for (int t = 0; t < 120; ++t) {
    const int w = 3 + 2 * int(rng() % 3);
    const int d_max = 1 + int(rng() % 8);
    const int width = d_max + 1 + int(rng() % 10), height = 1 + int(rng() % 10);
    const auto pair = pair_of(oracle::random_image(rng, width, height, t % 3 ? 256 : 3),
                              oracle::random_image(rng, width, height, t % 3 ? 256 : 3));
    const CostFunction fn{kAll[t % 4], w};
    CHECK(compute_cost_volume(pair, fn, d_max) == reference::compute_cost_volume(pair, fn, d_max));
    CHECK(compute_cost_volume_pair(pair, fn, d_max) == reference::compute_cost_volume_pair(pair, fn, d_max));
    CHECK(census_transform(pair.base, w) == reference::census_transform(pair.base, w));
    CHECK(rank_transform(pair.base, w) == reference::rank_transform(pair.base, w));
  }
}

TEST_CASE("costs stay within the derived bound") {
  std::mt19937 rng(4);
  for (int t = 0; t < 80; ++t) {
    const CostFunction fn{kAll[t % 4], 3 + 2 * int(rng() % 3)};
    const auto pair = pair_of(oracle::random_image(rng, 14, 6), oracle::random_image(rng, 14, 6));
    const auto v = compute_cost_volume(pair, fn, 8);
    CHECK(*std::max_element(v.values().begin(), v.values().end()) <= cost_max(fn));
  }
}

TEST_CASE("census and rank ignore strictly monotone remaps") {
  std::mt19937 rng(9);
  for (int t = 0; t < 40; ++t) {
    // Strictly increasing table: sorted distinct samples of [0, 255].
    std::vector<int> all(256);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> table(all.begin(), all.begin() + 64);
    std::sort(table.begin(), table.end());
    auto a = oracle::random_image(rng, 16, 8, 64), b = oracle::random_image(rng, 16, 8, 64);
    auto ra = a, rb = b;
    for (auto& p : ra.pixels()) p = std::uint8_t(table[p]);
    for (auto& p : rb.pixels()) p = std::uint8_t(table[p]);
    for (auto kind : {CostKind::Census, CostKind::Rank}) {
      const CostFunction fn{kind, 5};
      CHECK(compute_cost_volume(pair_of(a, b), fn, 6) == compute_cost_volume(pair_of(ra, rb), fn, 6));
    }
  }
}

TEST_CASE("line buffer holds the last w-1 rows of processed columns") {
  std::mt19937 rng(2);
  const int width = 7, height = 6, w = 5;
  const auto img = oracle::random_image(rng, width, height);
  stream::ColumnStream<std::uint8_t> cs(width, height, w);
  auto none = [](auto&&...) {};
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      cs.push(img.at(x, y), none, none);
      const auto& lb = cs.line_buffer();
      for (int col = 0; col < width; ++col) {
        const int newest = col <= x ? y : y - 1;
        for (int slot = 0; slot < w - 1; ++slot) {
          const int row = newest - (w - 2 - slot);
          if (row >= 0) CHECK(lb.at(slot, col) == img.at(col, row));
        }
      }
    }
}

TEST_CASE("invalid requests") {
  GrayImage img(4, 4);
  CHECK_THROWS_AS(compute_cost_volume(pair_of(img, img), {CostKind::Sad, 3}, 4), ValidationError);
  CHECK_THROWS_AS(compute_cost_volume(pair_of(img, img), {CostKind::Sad, 4}, 2), ValidationError);
  CHECK_THROWS_AS(compute_cost_volume(pair_of(img, GrayImage(5, 4)), {CostKind::Sad, 3}, 2), ValidationError);
}

TEST_CASE("volume dump layout") {
  const std::uint32_t vals[] = {1, 258};
  const auto dump = encode_volume_dump(2, 1, 1, 9, vals);
  REQUIRE(dump.size() == 16 + 8);
  CHECK(dump[0] == 2);
  CHECK(dump[12] == 9);
  CHECK(dump[16] == 1);
  CHECK(dump[20] == 2);
  CHECK(dump[21] == 1);
}
