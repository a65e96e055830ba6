#include "sgmstream/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sgmstream/errors.hpp"
#include "sgmstream/explorer.hpp"
#include "sgmstream/hw_model.hpp"
#include "sgmstream/pixelio.hpp"
#include "sgmstream/refine.hpp"

namespace sgmstream {

namespace {

// Flags shared by `match` and `estimate`. Unset flags keep the config file value.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> cost;
  std::optional<int> win, dmax, uf, lr_threshold, median_win;
  std::optional<std::uint32_t> p1, p2;
  std::optional<std::string> lr, median;
  std::optional<double> freq;
  std::optional<std::uint64_t> il, ii, lr_overhead;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--cost", cost, "sad, zsad, census or rank");
    app.add_option("--win", win, "odd window size");
    app.add_option("--dmax", dmax, "disparity range");
    app.add_option("--uf", uf, "unroll factor (divides dmax)");
    app.add_option("--p1", p1, "small penalty");
    app.add_option("--p2", p2, "large penalty");
    app.add_option("--lr", lr, "nlr, lr1 or lr2");
    app.add_option("--lr-threshold", lr_threshold, "L-R tolerance in pixels");
    app.add_option("--median", median, "on or off");
    app.add_option("--median-win", median_win, "median window size");
    app.add_option("--freq", freq, "clock in MHz");
    app.add_option("--il", il, "iteration latency in cycles");
    app.add_option("--ii", ii, "initiation interval");
    app.add_option("--lr-overhead", lr_overhead, "L-R latency overhead in cycles");
  }

  PipelineConfig resolve() const {
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    std::vector<std::string> errors;
    if (cost) {
      if (auto k = parse_cost_kind(*cost)) c.cost_fn.kind = *k;
      else errors.push_back("unknown cost function '" + *cost + "'");
    }
    if (win) c.cost_fn.window = *win;
    if (dmax) c.d_max = *dmax;
    if (uf) c.uf = *uf;
    if (lr) {
      if (auto m = parse_lr_mode(*lr)) c.refine.lr_mode = *m;
      else errors.push_back("unknown L-R mode '" + *lr + "'");
    }
    if (lr_threshold) c.refine.lr_threshold = *lr_threshold;
    if (median) {
      if (*median == "on") c.refine.median = true;
      else if (*median == "off") c.refine.median = false;
      else errors.push_back("--median expects on or off");
    }
    if (median_win) c.refine.median_window = *median_win;
    if (freq) c.freq_mhz = *freq;
    if (il) c.il = *il;
    if (ii) c.ii = *ii;
    if (lr_overhead) c.lr_overhead_cycles = *lr_overhead;
    // A changed cost function changes the cost range, so unset penalties follow it.
    if ((cost || win) && c.cost_fn.violations().empty()) {
      const auto d = AggregationParams::defaults_for(c.cost_fn);
      if (!p1) c.params.p1 = d.p1;
      if (!p2) c.params.p2 = d.p2;
    }
    if (p1) c.params.p1 = *p1;
    if (p2) c.params.p2 = *p2;
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return c;
  }
};

template <class T>
std::vector<T> parse_list(const std::vector<std::string>& items, auto parse, const char* what) {
  std::vector<T> out;
  for (const auto& item : items) {
    if (auto v = parse(item)) out.push_back(*v);
    else throw ValidationError(std::string("invalid ") + what + " '" + item + "'");
  }
  return out;
}

std::optional<int> parse_int(const std::string& s) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) out.push_back(item);
  return out;
}

std::string format_seconds(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", s);
  return buf;
}

void print_estimate(std::ostream& out, const PipelineConfig& c, const HwEstimate& e) {
  out << "config: " << to_string(c.cost_fn.kind) << " " << c.cost_fn.window << "x" << c.cost_fn.window
      << " dmax=" << c.d_max << " uf=" << c.uf << " lr=" << to_string(c.refine.lr_mode) << " " << c.width << "x"
      << c.height << "\n";
  out << "cycles: " << e.cycles.total << " (pipeline " << e.cycles.pipeline << ", lr overhead "
      << e.cycles.lr_overhead << ")\n";
  out << "runtime_s: " << format_seconds(e.seconds) << "\n";
  out << "fps: " << static_cast<long long>(std::floor(e.fps)) << "\n";
  out << "widths: cost=" << e.widths.cost << " path=" << e.widths.path << " sum=" << e.widths.sum << "\n";
  out << "mem_bits_partitioned: " << e.mem_bits_partitioned << "\n";
  out << "mem_bits_packed: " << e.mem_bits_packed << "\n";
  for (const auto& item : e.memory.items)
    out << "  " << item.name << ": " << item.elements << " x " << item.element_width << " bits, lanes "
        << item.lanes << "\n";
  out << "path_buffer_brams: partitioned=" << e.memory.path_blocks_partitioned
      << " packed=" << e.memory.path_blocks_packed << " ratio=" << e.memory.path_packing_ratio << "\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming semi-global stereo matcher and hardware cost explorer", "sgmstream"};
  app.require_subcommand(1);

  ConfigFlags match_flags;
  std::string base_path, match_path, out_path;
  int scale = 256;
  auto* match_cmd = app.add_subcommand("match", "compute a disparity map for one stereo pair");
  match_cmd->add_option("--base", base_path, "base (left) image, 8-bit PGM")->required();
  match_cmd->add_option("--match", match_path, "match (right) image, 8-bit PGM")->required();
  match_cmd->add_option("--out", out_path, "output 16-bit disparity PGM")->required();
  match_cmd->add_option("--scale", scale, "disparity scale of the output");
  match_flags.add_to(*match_cmd);

  ConfigFlags est_flags;
  int est_width = 1242, est_height = 374;
  auto* est_cmd = app.add_subcommand("estimate", "print latency and memory estimates for a configuration");
  est_cmd->add_option("--width", est_width, "image width");
  est_cmd->add_option("--height", est_height, "image height");
  est_flags.add_to(*est_cmd);

  std::string est_map, gt_map, mask_path;
  int eval_scale = 256;
  auto* eval_cmd = app.add_subcommand("eval", "D1 error of an estimate against ground truth");
  eval_cmd->add_option("estimate", est_map, "estimated disparity PGM")->required();
  eval_cmd->add_option("truth", gt_map, "ground-truth disparity PGM")->required();
  eval_cmd->add_option("--mask", mask_path, "evaluation mask PGM (non-zero = evaluate)");
  eval_cmd->add_option("--scale", eval_scale, "disparity scale of both files");

  std::vector<std::string> costs{"census"}, wins{"5"}, dmaxes{"64"}, ufs{"16"}, lrs{"nlr"}, medians{"on"}, res{};
  std::vector<std::string> pairs;
  std::string sweep_out, sweep_config, pareto;
  std::optional<std::uint32_t> sweep_p1, sweep_p2;
  unsigned jobs = 0;
  bool wall_time = false;
  int sweep_scale = 256;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a configuration grid and write CSV");
  sweep_cmd->add_option("--cost", costs, "cost functions")->delimiter(',');
  sweep_cmd->add_option("--win", wins, "window sizes")->delimiter(',');
  sweep_cmd->add_option("--dmax", dmaxes, "disparity ranges")->delimiter(',');
  sweep_cmd->add_option("--uf", ufs, "unroll factors")->delimiter(',');
  sweep_cmd->add_option("--lr", lrs, "L-R modes")->delimiter(',');
  sweep_cmd->add_option("--median", medians, "on/off")->delimiter(',');
  sweep_cmd->add_option("--res", res, "resolutions WxH or 'native'")->delimiter(',');
  sweep_cmd->add_option("--pair", pairs, "base.pgm,match.pgm[,gt.pgm[,mask.pgm]] (repeatable)")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV output path")->required();
  sweep_cmd->add_option("--config", sweep_config, "shared settings (clock, IL, thresholds)");
  sweep_cmd->add_option("--p1", sweep_p1, "fixed small penalty for every config");
  sweep_cmd->add_option("--p2", sweep_p2, "fixed large penalty for every config");
  sweep_cmd->add_option("--pareto", pareto, "objectives, e.g. d1_all,runtime,mem_bits");
  sweep_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  sweep_cmd->add_option("--scale", sweep_scale, "ground-truth disparity scale");
  sweep_cmd->add_flag("--wall-time", wall_time, "record wall-clock time per config");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 1;
  }

  try {
    if (*match_cmd) {
      PipelineConfig c = match_flags.resolve();
      StereoPair pair{load_pgm(base_path), load_pgm(match_path), std::nullopt, std::nullopt};
      if (pair.base.width() != pair.match.width() || pair.base.height() != pair.match.height()) {
        err << "error: image dimensions differ: base " << pair.base.width() << "x" << pair.base.height()
            << ", match " << pair.match.width() << "x" << pair.match.height() << "\n";
        return 1;
      }
      c.width = pair.width();
      c.height = pair.height();
      c.validate();
      const auto disparity = run_pipeline(pair, c);
      save_disparity(disparity, out_path, scale);
      out << "wrote " << out_path << " (" << disparity.valid_count() << " valid of "
          << std::size_t(c.width) * c.height << " pixels)\n";
    } else if (*est_cmd) {
      PipelineConfig c = est_flags.resolve();
      c.width = est_width;
      c.height = est_height;
      print_estimate(out, c, estimate(c));
    } else if (*eval_cmd) {
      const auto estimate_map = load_disparity(est_map, eval_scale);
      const auto truth = load_disparity(gt_map, eval_scale);
      std::optional<Raster<std::uint8_t>> mask;
      if (!mask_path.empty()) mask = load_mask(mask_path);
      if (estimate_map.width() != truth.width() || estimate_map.height() != truth.height())
        throw ValidationError("estimate and truth dimensions differ");
      const auto r = d1_error(estimate_map, truth, mask);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", r.d1_all);
      out << "d1_all: " << buf << "\n";
      out << "evaluated: " << r.evaluated_pixels << "\n";
      out << "erroneous: " << r.erroneous_pixels << "\n";
    } else if (*sweep_cmd) {
      SweepSpec spec;
      if (!sweep_config.empty()) spec.base = load_config(sweep_config);
      spec.cost_fns = parse_list<CostKind>(costs, [](const std::string& s) { return parse_cost_kind(s); }, "cost");
      spec.windows = parse_list<int>(wins, parse_int, "window");
      spec.d_maxes = parse_list<int>(dmaxes, parse_int, "dmax");
      spec.ufs = parse_list<int>(ufs, parse_int, "uf");
      spec.lr_modes = parse_list<LrMode>(lrs, [](const std::string& s) { return parse_lr_mode(s); }, "lr mode");
      spec.median = parse_list<bool>(
          medians,
          [](const std::string& s) -> std::optional<bool> {
            if (s == "on") return true;
            if (s == "off") return false;
            return std::nullopt;
          },
          "median");
      if (!res.empty()) {
        spec.resolutions = parse_list<Resolution>(
            res,
            [](const std::string& s) -> std::optional<Resolution> {
              if (s == "native") return Resolution{};
              const auto x = s.find('x');
              if (x == std::string::npos) return std::nullopt;
              auto w = parse_int(s.substr(0, x)), h = parse_int(s.substr(x + 1));
              if (!w || !h || *w < 1 || *h < 1) return std::nullopt;
              return Resolution{*w, *h};
            },
            "resolution");
      }
      if (sweep_p1 || sweep_p2) {
        if (!sweep_p1 || !sweep_p2) throw ValidationError("--p1 and --p2 must be given together");
        spec.penalties = AggregationParams{*sweep_p1, *sweep_p2};
        spec.penalties->validate();
      }
      std::vector<Objective> objectives;
      if (!pareto.empty())
        for (const auto& name : split(pareto, ',')) objectives.push_back(parse_objective(name));

      std::vector<StereoPair> dataset;
      for (const auto& p : pairs) {
        const auto parts = split(p, ',');
        if (parts.size() < 2 || parts.size() > 4)
          throw ValidationError("--pair expects base,match[,gt[,mask]], got '" + p + "'");
        StereoPair pair{load_pgm(parts[0]), load_pgm(parts[1]), std::nullopt, std::nullopt};
        if (parts.size() >= 3) pair.ground_truth = load_disparity(parts[2], sweep_scale);
        if (parts.size() == 4) pair.mask = load_mask(parts[3]);
        pair.validate();
        dataset.push_back(std::move(pair));
      }

      SweepOptions options;
      options.jobs = jobs;
      options.record_wall_time = wall_time;
      options.log = &err;
      const auto records = run_sweep(spec, dataset, sweep_out, options);
      out << "wrote " << records.size() << " configurations to " << sweep_out << "\n";
      if (!objectives.empty()) {
        const auto front = pareto_front(records, objectives);
        out << "pareto front (" << front.size() << "):\n" << kCsvHeader << "\n";
        for (const auto& r : front) out << csv_row(r, wall_time) << "\n";
      }
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace sgmstream
