#include "sgmstream/cost_volume.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>

#include "sgmstream/errors.hpp"
#include "sgmstream/hw_model.hpp"
#include "sgmstream/pixelio.hpp"
#include "sgmstream/streaming.hpp"

namespace sgmstream {

CostVolume::CostVolume(int width, int height, int d_max, int cost_width)
    : width_(width), height_(height), d_max_(d_max), cost_width_(cost_width),
      costs_(std::size_t(width) * height * d_max) {}

std::uint32_t CostVolume::max_value() const noexcept {
  return cost_width_ >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << cost_width_) - 1;
}

namespace {

void check_inputs(const StereoPair& pair, const CostFunction& fn, int d_max) {
  pair.validate();
  std::vector<std::string> v = fn.violations();
  if (d_max < 1) v.push_back("dmax must be >= 1");
  if (d_max >= pair.width()) {
    v.push_back("dmax (" + std::to_string(d_max) + ") must be smaller than the image width (" +
                std::to_string(pair.width()) + ")");
  }
  if (!v.empty()) throw ValidationError(std::move(v));
}

std::uint32_t saturate(std::uint32_t v, std::uint32_t cap) { return std::min(v, cap); }

template <class T>
std::uint32_t abs_diff(T a, T b) {
  return a > b ? std::uint32_t(a - b) : std::uint32_t(b - a);
}

// Window cost between two square windows given as accessor functors.
template <class BaseAt, class MatchAt>
std::uint32_t window_cost(CostKind kind, int w, BaseAt&& base, MatchAt&& match) {
  std::uint32_t total = 0;
  if (kind == CostKind::Sad) {
    for (int j = 0; j < w; ++j)
      for (int i = 0; i < w; ++i) total += abs_diff<int>(base(i, j), match(i, j));
    return total;
  }
  // ZSAD: floor means, signed per-term differences.
  int sum_b = 0, sum_m = 0;
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i) {
      sum_b += base(i, j);
      sum_m += match(i, j);
    }
  const int mean_b = sum_b / (w * w);
  const int mean_m = sum_m / (w * w);
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i) total += std::uint32_t(std::abs((base(i, j) - mean_b) - (match(i, j) - mean_m)));
  return total;
}

bool is_transform(CostKind kind) { return kind == CostKind::Census || kind == CostKind::Rank; }

CensusCode census_of(int w, auto&& at) {
  CensusCode code;
  const int r = w / 2;
  const int centre = at(r, r);
  int k = 0;
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i) {
      if (i == r && j == r) continue;
      if (centre > at(i, j)) code.set(k);
      ++k;
    }
  return code;
}

std::uint16_t rank_of(int w, auto&& at) {
  const int r = w / 2;
  const int centre = at(r, r);
  std::uint16_t count = 0;
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i)
      if (at(i, j) < centre) ++count;
  return count;
}

// ---------------------------------------------------------------------------
// Streaming executors

// Intensity windows for SAD/ZSAD. Both images stream through line buffers; the
// match side keeps a w x (d_max + w - 1) window buffer holding every candidate
// window. With match output enabled the base side keeps the same wide buffer
// and match costs are emitted d_max - 1 columns behind.
class IntensityCostEngine {
 public:
  IntensityCostEngine(const StereoPair& pair, const CostFunction& fn, int d_max, bool with_match)
      : pair_(pair), kind_(fn.kind), w_(fn.window), r_(fn.window / 2), d_max_(d_max),
        with_match_(with_match), cap_(CostVolume(1, 1, 1, cost_bit_width(fn)).max_value()),
        base_cols_(pair.width(), pair.height(), w_), match_cols_(pair.width(), pair.height(), w_),
        base_reg_(with_match ? d_max + w_ - 1 : w_, w_), match_reg_(d_max + w_ - 1, w_),
        base_col_(std::size_t(w_)), costs_(std::size_t(d_max)) {}

  void run(const CostSink& base_sink, const CostSink& match_sink) {
    base_sink_ = &base_sink;
    match_sink_ = with_match_ ? &match_sink : nullptr;
    const auto b = pair_.base.pixels();
    const auto m = pair_.match.pixels();
    auto keep_base = [this](int, int, std::span<const std::uint8_t> col) {
      std::copy(col.begin(), col.end(), base_col_.begin());
    };
    auto on_column = [this](int x, int yc, std::span<const std::uint8_t> col) { column(x, yc, col); };
    auto on_row_end = [this](int yc) { row_end(yc); };
    auto nothing = [](int) {};
    for (std::size_t i = 0; i < b.size(); ++i) {
      base_cols_.push(b[i], keep_base, nothing);
      match_cols_.push(m[i], on_column, on_row_end);
    }
    // Both streams flush the same rows in the same order; interleave them column by column.
    std::vector<std::vector<std::uint8_t>> pending;
    base_cols_.finish([&](int, int, std::span<const std::uint8_t> col) { pending.emplace_back(col.begin(), col.end()); },
                      nothing);
    std::size_t next = 0;
    match_cols_.finish(
        [&](int x, int yc, std::span<const std::uint8_t> col) {
          base_col_ = pending[next++];
          column(x, yc, col);
        },
        on_row_end);
  }

 private:
  void column(int x, int yc, std::span<const std::uint8_t> match_col) {
    if (x == 0) {
      base_reg_.fill(base_col_);
      match_reg_.fill(match_col);
    } else {
      base_reg_.shift_in(base_col_);
      match_reg_.shift_in(match_col);
    }
    emit(x, yc);
  }

  void row_end(int yc) {
    const int width = pair_.width();
    const std::vector<std::uint8_t> last_b(base_reg_.column(base_reg_.length() - 1).begin(),
                                           base_reg_.column(base_reg_.length() - 1).end());
    const std::vector<std::uint8_t> last_m(match_reg_.column(match_reg_.length() - 1).begin(),
                                           match_reg_.column(match_reg_.length() - 1).end());
    const int extra = with_match_ ? r_ + d_max_ - 1 : r_;
    for (int t = 1; t <= extra; ++t) {
      base_reg_.shift_in(last_b);
      match_reg_.shift_in(last_m);
      emit(width - 1 + t, yc);
    }
  }

  // `x` is the column most recently shifted in (may lie past the right border).
  void emit(int x, int yc) {
    const int width = pair_.width();
    const int xc = x - r_;
    if (xc >= 0 && xc < width) {
      const int bfirst = base_reg_.length() - w_;
      for (int d = 0; d < d_max_; ++d) {
        const int mfirst = match_reg_.length() - w_ - d;
        costs_[d] = saturate(window_cost(kind_, w_,
                                         [&](int i, int j) { return int(base_reg_.at(bfirst + i, j)); },
                                         [&](int i, int j) { return int(match_reg_.at(mfirst + i, j)); }),
                             cap_);
      }
      (*base_sink_)(xc, yc, costs_);
    }
    const int xm = x - r_ - (d_max_ - 1);
    if (match_sink_ && xm >= 0 && xm < width) {
      for (int d = 0; d < d_max_; ++d) {
        costs_[d] = saturate(window_cost(kind_, w_,
                                         [&](int i, int j) { return int(match_reg_.at(i, j)); },
                                         [&](int i, int j) { return int(base_reg_.at(d + i, j)); }),
                             cap_);
      }
      (*match_sink_)(xm, yc, costs_);
    }
  }

  const StereoPair& pair_;
  CostKind kind_;
  int w_, r_, d_max_;
  bool with_match_;
  std::uint32_t cap_;
  stream::ColumnStream<std::uint8_t> base_cols_, match_cols_;
  stream::ColumnRegister<std::uint8_t> base_reg_, match_reg_;
  std::vector<std::uint8_t> base_col_;
  std::vector<std::uint32_t> costs_;
  const CostSink* base_sink_ = nullptr;
  const CostSink* match_sink_ = nullptr;
};

// Census / rank: each image is transformed through its own window stream, then
// a d_max-long FIFO of match transforms (and of base transforms for the match
// volume) provides every candidate.
template <class Code, class Transform, class Distance>
class TransformCostEngine {
 public:
  TransformCostEngine(const StereoPair& pair, int window, int d_max, bool with_match, std::uint32_t cap,
                      Transform transform, Distance distance)
      : pair_(pair), w_(window), d_max_(d_max), with_match_(with_match), cap_(cap), transform_(transform),
        distance_(distance), fifo_b_(d_max, 1), fifo_m_(d_max, 1), costs_(std::size_t(d_max)) {}

  void run(const CostSink& base_sink, const CostSink& match_sink) {
    base_sink_ = &base_sink;
    match_sink_ = with_match_ ? &match_sink : nullptr;
    stream::WindowStream<std::uint8_t> base_ws(pair_.width(), pair_.height(), w_);
    stream::WindowStream<std::uint8_t> match_ws(pair_.width(), pair_.height(), w_);
    std::deque<Code> pending_b, pending_m;
    auto sink_b = [&](int, int, const stream::WindowView<std::uint8_t>& win) {
      pending_b.push_back(transform_(w_, [&](int i, int j) { return int(win.at(i, j)); }));
    };
    int xc = 0, yc = 0;
    auto sink_m = [&](int x, int y, const stream::WindowView<std::uint8_t>& win) {
      pending_m.push_back(transform_(w_, [&](int i, int j) { return int(win.at(i, j)); }));
      (void)x;
      (void)y;
    };
    auto drain = [&] {
      while (!pending_b.empty() && !pending_m.empty()) {
        pixel(xc, yc, pending_b.front(), pending_m.front());
        pending_b.pop_front();
        pending_m.pop_front();
        if (++xc == pair_.width()) {
          xc = 0;
          ++yc;
        }
      }
    };
    const auto b = pair_.base.pixels();
    const auto m = pair_.match.pixels();
    for (std::size_t i = 0; i < b.size(); ++i) {
      base_ws.push(b[i], sink_b);
      match_ws.push(m[i], sink_m);
      drain();
    }
    base_ws.finish(sink_b);
    match_ws.finish(sink_m);
    drain();
  }

 private:
  void pixel(int x, int y, const Code& tb, const Code& tm) {
    const Code* b = &tb;
    const Code* m = &tm;
    if (x == 0) {
      fifo_b_.fill(std::span(b, 1));
      fifo_m_.fill(std::span(m, 1));
    } else {
      fifo_b_.shift_in(std::span(b, 1));
      fifo_m_.shift_in(std::span(m, 1));
    }
    for (int d = 0; d < d_max_; ++d) costs_[d] = saturate(distance_(tb, fifo_m_.at(d_max_ - 1 - d, 0)), cap_);
    (*base_sink_)(x, y, costs_);
    if (!match_sink_) return;
    const int width = pair_.width();
    emit_match(x - (d_max_ - 1), y);
    if (x == width - 1) {
      for (int t = 1; t < d_max_; ++t) {
        fifo_b_.shift_in(std::span(b, 1));
        fifo_m_.shift_in(std::span(m, 1));
        emit_match(width - d_max_ + t, y);
      }
    }
  }

  void emit_match(int xm, int y) {
    if (xm < 0) return;
    const Code& tm = fifo_m_.at(0, 0);
    for (int d = 0; d < d_max_; ++d) costs_[d] = saturate(distance_(tm, fifo_b_.at(d, 0)), cap_);
    (*match_sink_)(xm, y, costs_);
  }

  const StereoPair& pair_;
  int w_, d_max_;
  bool with_match_;
  std::uint32_t cap_;
  Transform transform_;
  Distance distance_;
  stream::ColumnRegister<Code> fifo_b_, fifo_m_;
  std::vector<std::uint32_t> costs_;
  const CostSink* base_sink_ = nullptr;
  const CostSink* match_sink_ = nullptr;
};

void run_engine(const StereoPair& pair, const CostFunction& fn, int d_max, const CostSink& base_sink,
                const CostSink& match_sink) {
  const bool with_match = static_cast<bool>(match_sink);
  const std::uint32_t cap = CostVolume(1, 1, 1, cost_bit_width(fn)).max_value();
  switch (fn.kind) {
    case CostKind::Sad:
    case CostKind::Zsad: {
      IntensityCostEngine engine(pair, fn, d_max, with_match);
      engine.run(base_sink, match_sink);
      return;
    }
    case CostKind::Census: {
      auto transform = [](int w, auto&& at) { return census_of(w, at); };
      auto distance = [](const CensusCode& a, const CensusCode& b) { return std::uint32_t(hamming(a, b)); };
      TransformCostEngine<CensusCode, decltype(transform), decltype(distance)> engine(
          pair, fn.window, d_max, with_match, cap, transform, distance);
      engine.run(base_sink, match_sink);
      return;
    }
    case CostKind::Rank: {
      auto transform = [](int w, auto&& at) { return rank_of(w, at); };
      auto distance = [](std::uint16_t a, std::uint16_t b) { return abs_diff(a, b); };
      TransformCostEngine<std::uint16_t, decltype(transform), decltype(distance)> engine(
          pair, fn.window, d_max, with_match, cap, transform, distance);
      engine.run(base_sink, match_sink);
      return;
    }
  }
}

void check_window(int window) {
  if (window < 1 || window % 2 == 0 || window > kMaxWindow) {
    throw ValidationError("window must be odd and at most " + std::to_string(kMaxWindow));
  }
}

CostSink collect_into(CostVolume& volume) {
  return [&volume](int x, int y, std::span<const std::uint32_t> costs) {
    std::copy(costs.begin(), costs.end(), volume.pixel(x, y).begin());
  };
}

}  // namespace

CensusRaster census_transform(const GrayImage& image, int window) {
  check_window(window);
  CensusRaster out{window, Raster<CensusCode>(image.width(), image.height())};
  stream::for_each_window<std::uint8_t>(image.pixels(), image.width(), image.height(), window,
                                        [&](int x, int y, const stream::WindowView<std::uint8_t>& win) {
                                          out.codes.at(x, y) = census_of(window, [&](int i, int j) { return int(win.at(i, j)); });
                                        });
  return out;
}

RankRaster rank_transform(const GrayImage& image, int window) {
  check_window(window);
  RankRaster out(image.width(), image.height());
  stream::for_each_window<std::uint8_t>(image.pixels(), image.width(), image.height(), window,
                                        [&](int x, int y, const stream::WindowView<std::uint8_t>& win) {
                                          out.at(x, y) = rank_of(window, [&](int i, int j) { return int(win.at(i, j)); });
                                        });
  return out;
}

void stream_costs(const StereoPair& pair, const CostFunction& fn, int d_max, const CostSink& base_sink,
                  const CostSink& match_sink) {
  check_inputs(pair, fn, d_max);
  run_engine(pair, fn, d_max, base_sink, match_sink);
}

CostVolume compute_cost_volume(const StereoPair& pair, const CostFunction& fn, int d_max) {
  check_inputs(pair, fn, d_max);
  CostVolume volume(pair.width(), pair.height(), d_max, cost_bit_width(fn));
  run_engine(pair, fn, d_max, collect_into(volume), CostSink{});
  return volume;
}

std::pair<CostVolume, CostVolume> compute_cost_volume_pair(const StereoPair& pair, const CostFunction& fn,
                                                           int d_max) {
  check_inputs(pair, fn, d_max);
  CostVolume base(pair.width(), pair.height(), d_max, cost_bit_width(fn));
  CostVolume match(pair.width(), pair.height(), d_max, cost_bit_width(fn));
  run_engine(pair, fn, d_max, collect_into(base), collect_into(match));
  return {std::move(base), std::move(match)};
}

// ---------------------------------------------------------------------------
// Reference executors

namespace reference {

CensusRaster census_transform(const GrayImage& image, int window) {
  check_window(window);
  const int r = window / 2;
  CensusRaster out{window, Raster<CensusCode>(image.width(), image.height())};
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      out.codes.at(x, y) = census_of(window, [&](int i, int j) { return int(image.clamped(x - r + i, y - r + j)); });
  return out;
}

RankRaster rank_transform(const GrayImage& image, int window) {
  check_window(window);
  const int r = window / 2;
  RankRaster out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      out.at(x, y) = rank_of(window, [&](int i, int j) { return int(image.clamped(x - r + i, y - r + j)); });
  return out;
}

namespace {

// Costs of `self` against `other` where the candidate column is x + sign*d.
CostVolume directional_volume(const GrayImage& self, const GrayImage& other, const CostFunction& fn, int d_max,
                              int sign) {
  const int width = self.width(), height = self.height();
  const int w = fn.window, r = w / 2;
  CostVolume volume(width, height, d_max, cost_bit_width(fn));
  const std::uint32_t cap = volume.max_value();
  auto candidate = [&](int x, int d) { return std::clamp(x + sign * d, 0, width - 1); };

  if (is_transform(fn.kind)) {
    if (fn.kind == CostKind::Census) {
      const auto cs = reference::census_transform(self, w), co = reference::census_transform(other, w);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          for (int d = 0; d < d_max; ++d)
            volume.at(x, y, d) = saturate(hamming(cs.codes.at(x, y), co.codes.at(candidate(x, d), y)), cap);
    } else {
      const auto rs = reference::rank_transform(self, w), ro = reference::rank_transform(other, w);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          for (int d = 0; d < d_max; ++d)
            volume.at(x, y, d) = saturate(abs_diff(rs.at(x, y), ro.at(candidate(x, d), y)), cap);
    }
    return volume;
  }

  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int d = 0; d < d_max; ++d) {
        auto self_at = [&](int i, int j) { return int(self.clamped(x - r + i, y - r + j)); };
        // Each window coordinate is shifted and clamped on its own.
        auto other_at = [&](int i, int j) { return int(other.clamped(x - r + i + sign * d, y - r + j)); };
        volume.at(x, y, d) = saturate(window_cost(fn.kind, w, self_at, other_at), cap);
      }
  return volume;
}

}  // namespace

CostVolume compute_cost_volume(const StereoPair& pair, const CostFunction& fn, int d_max) {
  check_inputs(pair, fn, d_max);
  return directional_volume(pair.base, pair.match, fn, d_max, -1);
}

std::pair<CostVolume, CostVolume> compute_cost_volume_pair(const StereoPair& pair, const CostFunction& fn,
                                                           int d_max) {
  check_inputs(pair, fn, d_max);
  return {directional_volume(pair.base, pair.match, fn, d_max, -1),
          directional_volume(pair.match, pair.base, fn, d_max, +1)};
}

}  // namespace reference

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> encode_volume_dump(int width, int height, int d_max, int bit_width,
                                             std::span<const std::uint32_t> values) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + values.size() * 4);
  auto put = [&out](std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(std::uint8_t(v >> (8 * b)));
  };
  put(std::uint32_t(width));
  put(std::uint32_t(height));
  put(std::uint32_t(d_max));
  put(std::uint32_t(bit_width));
  for (auto v : values) put(v);
  return out;
}

void save_volume_dump(const std::filesystem::path& path, int width, int height, int d_max, int bit_width,
                      std::span<const std::uint32_t> values) {
  write_file(path, encode_volume_dump(width, height, d_max, bit_width, values));
}

}  // namespace sgmstream
