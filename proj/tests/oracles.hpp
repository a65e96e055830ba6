#pragma once

// Independent brute-force references used by the unit and acceptance tests.
// They share no code with the library beyond the plain data types.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "sgmstream/aggregation.hpp"
#include "sgmstream/cost_volume.hpp"
#include "sgmstream/explorer.hpp"
#include "sgmstream/image.hpp"

namespace oracle {

using sgmstream::AggregatedVolume;
using sgmstream::CostVolume;
using sgmstream::DisparityMap;
using sgmstream::GrayImage;

inline GrayImage random_image(std::mt19937& rng, int w, int h, int levels = 256) {
  std::uniform_int_distribution<int> v(0, levels - 1);
  GrayImage img(w, h);
  for (auto& p : img.pixels()) p = std::uint8_t(v(rng));
  return img;
}

inline CostVolume random_volume(std::mt19937& rng, int w, int h, int d_max, std::uint32_t max_cost) {
  CostVolume vol(w, h, d_max, 16);
  std::uniform_int_distribution<std::uint32_t> v(0, max_cost);
  for (auto& c : vol.values()) c = v(rng);
  return vol;
}

// Textured image whose intensities vary strongly from pixel to pixel.
inline GrayImage texture(std::mt19937& rng, int w, int h) { return random_image(rng, w, h); }

// base(x) = T(x), match(x) = T(x + s): the true disparity is s everywhere the
// source column exists.
inline std::pair<GrayImage, GrayImage> shifted_pair(const GrayImage& t, int width, int s) {
  GrayImage base(width, t.height()), match(width, t.height());
  for (int y = 0; y < t.height(); ++y)
    for (int x = 0; x < width; ++x) {
      base.at(x, y) = t.at(x, y);
      match.at(x, y) = t.at(x + s, y);
    }
  return {base, match};
}

inline int clampi(int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); }

// Four independent passes, each walking its own path order with a full
// candidate enumeration.
inline AggregatedVolume four_pass(const CostVolume& c, std::uint32_t p1, std::uint32_t p2) {
  const int W = c.width(), H = c.height(), D = c.d_max();
  AggregatedVolume s(W, H, D, 32);
  const std::array<std::array<int, 2>, 4> dirs{{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  for (auto [dx, dy] : dirs) {
    std::vector<std::int64_t> L(std::size_t(W) * H * D, 0);
    auto at = [&](int x, int y, int d) -> std::int64_t& { return L[(std::size_t(y) * W + x) * D + d]; };
    // Row-major order visits every predecessor first for all four directions.
    for (int y = 0; y < H; ++y) {
      // 135° predecessors lie on the previous row, so column order is free.
      for (int x = 0; x < W; ++x) {
        const int px = x + dx, py = y + dy;
        const bool inside = px >= 0 && px < W && py >= 0 && py < H;
        for (int d = 0; d < D; ++d) {
          if (!inside) {
            at(x, y, d) = c.at(x, y, d);
            continue;
          }
          std::int64_t mn = std::numeric_limits<std::int64_t>::max();
          for (int i = 0; i < D; ++i) mn = std::min(mn, at(px, py, i));
          std::int64_t best = at(px, py, d);
          if (d > 0) best = std::min(best, at(px, py, d - 1) + p1);
          if (d + 1 < D) best = std::min(best, at(px, py, d + 1) + p1);
          best = std::min(best, mn + p2);
          at(x, y, d) = c.at(x, y, d) + best - mn;
        }
      }
    }
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        for (int d = 0; d < D; ++d) s.at(x, y, d) += std::uint32_t(at(x, y, d));
  }
  return s;
}

// Sort-based median with the validity-majority rule.
inline DisparityMap median(const DisparityMap& m, int w) {
  const int r = w / 2;
  DisparityMap out(m.width(), m.height(), m.d_max());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      std::vector<int> v;
      for (int j = -r; j <= r; ++j)
        for (int i = -r; i <= r; ++i) {
          const int d = m.at(clampi(x + i, 0, m.width() - 1), clampi(y + j, 0, m.height() - 1));
          if (d != DisparityMap::kInvalid) v.push_back(d);
        }
      if (int(v.size()) * 2 < w * w + 1) continue;
      std::sort(v.begin(), v.end());
      out.set(x, y, v[(v.size() - 1) / 2]);
    }
  return out;
}

// O(n^2) dominance filter, original order.
inline std::vector<std::size_t> pareto(const std::vector<std::vector<double>>& pts) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      bool all_le = true, some_lt = false;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        all_le = all_le && pts[j][k] <= pts[i][k];
        some_lt = some_lt || pts[j][k] < pts[i][k];
      }
      dominated = all_le && some_lt;
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

inline sgmstream::SweepRecord record(double d1, double seconds, std::uint64_t mem) {
  sgmstream::SweepRecord r;
  r.d1_all = d1;
  r.hw.seconds = seconds;
  r.hw.mem_bits_packed = mem;
  return r;
}

}  // namespace oracle
