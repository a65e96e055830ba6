#include "sgmstream/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "sgmstream/errors.hpp"
#include "sgmstream/refine.hpp"

namespace sgmstream {

namespace {

struct Factors {
  int fx = 1;
  int fy = 1;
};

Factors factors_for(int width, int height, Resolution target) {
  if (target.width <= 0 || target.height <= 0) return {};
  return {std::max(1, int(std::lround(double(width) / target.width))),
          std::max(1, int(std::lround(double(height) / target.height)))};
}

struct SweepPoint {
  PipelineConfig config;
  Resolution target;
};

auto sort_key(const PipelineConfig& c) {
  return std::make_tuple(std::string(to_string(c.cost_fn.kind)), c.cost_fn.window, c.d_max, c.uf,
                         std::string(to_string(c.refine.lr_mode)), c.refine.median, c.width, c.height);
}

std::vector<SweepPoint> enumerate_points(const SweepSpec& spec, Resolution native, std::ostream* log) {
  const std::set<CostKind> costs(spec.cost_fns.begin(), spec.cost_fns.end());
  const std::set<int> windows(spec.windows.begin(), spec.windows.end());
  const std::set<int> d_maxes(spec.d_maxes.begin(), spec.d_maxes.end());
  const std::set<int> ufs(spec.ufs.begin(), spec.ufs.end());
  const std::set<LrMode> lrs(spec.lr_modes.begin(), spec.lr_modes.end());
  const std::set<bool> medians(spec.median.begin(), spec.median.end());
  const std::set<Resolution> resolutions(spec.resolutions.begin(), spec.resolutions.end());

  std::vector<SweepPoint> points;
  for (auto res : resolutions) {
    const Factors f = factors_for(native.width, native.height, res);
    const int width = native.width / f.fx, height = native.height / f.fy;
    for (auto kind : costs)
      for (int win : windows)
        for (int d_max : d_maxes)
          for (int uf : ufs) {
            if (uf < 1 || d_max % uf != 0) {
              if (log) *log << "skipping dmax=" << d_max << " uf=" << uf << ": uf does not divide dmax\n";
              continue;
            }
            for (auto lr : lrs)
              for (bool median : medians) {
                PipelineConfig c = spec.base;
                c.cost_fn = CostFunction{kind, win};
                c.d_max = d_max;
                c.uf = uf;
                c.width = width;
                c.height = height;
                c.refine.lr_mode = lr;
                c.refine.median = median;
                if (spec.penalties) {
                  c.params = *spec.penalties;
                } else if (c.cost_fn.violations().empty()) {
                  c.params = AggregationParams::defaults_for(c.cost_fn);
                }
                auto problems = c.violations();
                if (d_max >= width) problems.push_back("dmax must be smaller than the image width " + std::to_string(width));
                if (!problems.empty()) {
                  if (log) {
                    *log << "skipping " << to_string(kind) << " win=" << win << " dmax=" << d_max << " uf=" << uf
                         << " at " << width << "x" << height << ":";
                    for (const auto& p : problems) *log << " " << p << ";";
                    *log << "\n";
                  }
                  continue;
                }
                points.push_back({c, res});
              }
          }
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) { return sort_key(a.config) < sort_key(b.config); });
  return points;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

StereoPair downscale(const StereoPair& pair, Resolution target) {
  pair.validate();
  const Factors f = factors_for(pair.width(), pair.height(), target);
  if (f.fx == 1 && f.fy == 1) return pair;
  const int width = pair.width() / f.fx, height = pair.height() / f.fy;
  if (width < 1 || height < 1) throw ValidationError("downscale target leaves an empty image");

  auto shrink = [&](const GrayImage& src) {
    GrayImage out(width, height);
    const int n = f.fx * f.fy;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        int sum = 0;
        for (int j = 0; j < f.fy; ++j)
          for (int i = 0; i < f.fx; ++i) sum += src.at(x * f.fx + i, y * f.fy + j);
        out.at(x, y) = std::uint8_t((sum + n / 2) / n);
      }
    return out;
  };

  StereoPair out{shrink(pair.base), shrink(pair.match), std::nullopt, std::nullopt};
  if (pair.ground_truth) {
    const auto& gt = *pair.ground_truth;
    DisparityMap scaled(width, height, std::max(1, int(std::lround(double(gt.d_max() - 1) / f.fx)) + 1));
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const auto d = gt.at(x * f.fx, y * f.fy);
        if (d != DisparityMap::kInvalid) scaled.set(x, y, std::int32_t(std::lround(double(d) / f.fx)));
      }
    out.ground_truth = std::move(scaled);
  }
  if (pair.mask) {
    Raster<std::uint8_t> m(width, height);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) m.at(x, y) = pair.mask->at(x * f.fx, y * f.fy);
    out.mask = std::move(m);
  }
  return out;
}

std::vector<PipelineConfig> enumerate_configs(const SweepSpec& spec, Resolution native, std::ostream* log) {
  std::vector<PipelineConfig> out;
  for (auto& p : enumerate_points(spec, native, log)) out.push_back(std::move(p.config));
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const std::vector<StereoPair>& dataset,
                                   const std::filesystem::path& out, const SweepOptions& options) {
  if (dataset.empty()) throw ValidationError("sweep dataset is empty");
  for (const auto& pair : dataset) pair.validate();
  const Resolution native{dataset.front().width(), dataset.front().height()};
  const auto points = enumerate_points(spec, native, options.log);
  if (points.empty()) throw ValidationError("sweep grid has no valid configuration");

  std::map<Resolution, std::vector<StereoPair>> scaled;
  for (const auto& p : points) {
    if (scaled.contains(p.target)) continue;
    auto& pairs = scaled[p.target];
    for (const auto& pair : dataset) pairs.push_back(downscale(pair, p.target));
  }

  std::vector<SweepRecord> records(points.size());
  std::vector<std::exception_ptr> failures(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const auto& point = points[i];
        SweepRecord rec;
        rec.config = point.config;
        rec.hw = estimate(point.config);
        D1Report total;
        bool any_truth = false;
        const auto start = std::chrono::steady_clock::now();
        for (const auto& pair : scaled.at(point.target)) {
          const auto disparity = run_pipeline(pair, point.config);
          if (pair.ground_truth) {
            any_truth = true;
            total += d1_error(disparity, *pair.ground_truth, pair.mask);
          }
        }
        rec.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (any_truth) rec.d1_all = total.d1_all;
        rec.evaluated_pixels = total.evaluated_pixels;
        rec.erroneous_pixels = total.erroneous_pixels;
        records[i] = std::move(rec);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = unsigned(std::min<std::size_t>(jobs, points.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + out.string());
    write_csv(f, records, options.record_wall_time);
    if (!f) throw IoError("failed writing " + out.string());
  }
  return records;
}

std::string csv_row(const SweepRecord& r, bool with_wall_time) {
  const auto& c = r.config;
  std::ostringstream row;
  row << to_string(c.cost_fn.kind) << ',' << c.cost_fn.window << ',' << c.d_max << ',' << c.uf << ','
      << to_string(c.refine.lr_mode) << ',' << (c.refine.median ? "on" : "off") << ',' << c.width << ','
      << c.height << ',' << (r.d1_all ? fixed(*r.d1_all, 6) : "") << ',' << r.hw.cycles.total << ','
      << fixed(r.hw.seconds, 9) << ',' << fixed(r.hw.fps, 3) << ',' << r.hw.mem_bits_packed << ','
      << r.hw.widths.cost << ',' << r.hw.widths.path << ',' << r.hw.widths.sum << ','
      << (with_wall_time ? fixed(r.wall_time_seconds, 6) : "");
  return row.str();
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records, bool with_wall_time) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) out << csv_row(r, with_wall_time) << '\n';
}

Objective parse_objective(std::string_view name) {
  if (name == "d1_all" || name == "d1") return Objective::D1All;
  if (name == "runtime" || name == "runtime_s") return Objective::Runtime;
  if (name == "mem_bits" || name == "mem_bits_packed") return Objective::MemBits;
  throw ValidationError("unknown objective '" + std::string(name) + "' (expected d1_all, runtime or mem_bits)");
}

double objective_value(const SweepRecord& r, Objective objective) {
  switch (objective) {
    case Objective::D1All: return r.d1_all.value_or(std::numeric_limits<double>::infinity());
    case Objective::Runtime: return r.hw.seconds;
    case Objective::MemBits: return double(r.hw.mem_bits_packed);
  }
  return 0.0;
}

std::vector<SweepRecord> pareto_front(const std::vector<SweepRecord>& records, const std::vector<Objective>& objectives) {
  if (records.empty()) throw ValidationError("pareto_front needs at least one record");
  if (objectives.size() < 2) throw ValidationError("pareto_front needs at least two objectives");

  std::vector<std::vector<double>> values;
  values.reserve(records.size());
  for (const auto& r : records) {
    std::vector<double> v;
    for (auto o : objectives) v.push_back(objective_value(r, o));
    values.push_back(std::move(v));
  }
  auto dominates = [&](std::size_t a, std::size_t b) {
    bool strictly = false;
    for (std::size_t k = 0; k < objectives.size(); ++k) {
      if (values[a][k] > values[b][k]) return false;
      if (values[a][k] < values[b][k]) strictly = true;
    }
    return strictly;
  };

  // Sort by the objectives lexicographically; a record can only be dominated
  // by one that sorts before it.
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<std::size_t> front;
  for (auto i : order) {
    const bool dominated = std::any_of(front.begin(), front.end(), [&](std::size_t f) { return dominates(f, i); });
    if (!dominated) front.push_back(i);
  }
  std::vector<SweepRecord> out;
  out.reserve(front.size());
  for (auto i : front) out.push_back(records[i]);
  return out;
}

}  // namespace sgmstream
