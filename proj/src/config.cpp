#include "sgmstream/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sgmstream/errors.hpp"
#include "sgmstream/hw_model.hpp"
#include "sgmstream/pixelio.hpp"

namespace sgmstream {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::optional<bool> parse_bool(std::string_view s) {
  const auto v = lower(s);
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::Sad: return "sad";
    case CostKind::Zsad: return "zsad";
    case CostKind::Census: return "census";
    case CostKind::Rank: return "rank";
  }
  return "?";
}

std::optional<CostKind> parse_cost_kind(std::string_view text) {
  const auto v = lower(trim(text));
  if (v == "sad") return CostKind::Sad;
  if (v == "zsad") return CostKind::Zsad;
  if (v == "census") return CostKind::Census;
  if (v == "rank") return CostKind::Rank;
  return std::nullopt;
}

std::string_view to_string(LrMode mode) {
  switch (mode) {
    case LrMode::None: return "nlr";
    case LrMode::Reuse: return "lr1";
    case LrMode::Recompute: return "lr2";
  }
  return "?";
}

std::optional<LrMode> parse_lr_mode(std::string_view text) {
  const auto v = lower(trim(text));
  if (v == "nlr" || v == "none") return LrMode::None;
  if (v == "lr1") return LrMode::Reuse;
  if (v == "lr2") return LrMode::Recompute;
  return std::nullopt;
}

std::vector<std::string> CostFunction::violations() const {
  std::vector<std::string> v;
  if (window < 3 || window % 2 == 0 || window > kMaxWindow) {
    v.push_back("window must be odd and in [3, " + std::to_string(kMaxWindow) + "], got " + std::to_string(window));
  }
  return v;
}

void CostFunction::validate() const {
  if (auto v = violations(); !v.empty()) throw ValidationError(std::move(v));
}

std::vector<std::string> AggregationParams::violations() const {
  std::vector<std::string> v;
  if (p1 == 0) v.push_back("p1 must be positive");
  if (p2 <= p1) v.push_back("p2 (" + std::to_string(p2) + ") must exceed p1 (" + std::to_string(p1) + ")");
  return v;
}

void AggregationParams::validate() const {
  if (auto v = violations(); !v.empty()) throw ValidationError(std::move(v));
}

AggregationParams AggregationParams::defaults_for(const CostFunction& fn) {
  const double scale = double(cost_max(fn)) / 24.0;
  AggregationParams p;
  p.p1 = std::uint32_t(std::max<long>(1, std::lround(7.0 * scale)));
  p.p2 = std::uint32_t(std::max<long>(long(p.p1) + 1, std::lround(86.0 * scale)));
  return p;
}

std::vector<std::string> RefinementConfig::violations() const {
  std::vector<std::string> v;
  if (lr_threshold < 0) v.push_back("lr_threshold must be non-negative");
  if (median_window < 3 || median_window % 2 == 0) {
    v.push_back("median window must be odd and >= 3, got " + std::to_string(median_window));
  }
  return v;
}

std::vector<std::string> PipelineConfig::violations() const {
  auto v = cost_fn.violations();
  auto add = [&v](std::vector<std::string> more) { v.insert(v.end(), more.begin(), more.end()); };
  if (d_max < 1) v.push_back("dmax must be >= 1, got " + std::to_string(d_max));
  if (uf < 1) {
    v.push_back("uf must be >= 1, got " + std::to_string(uf));
  } else if (d_max >= 1 && d_max % uf != 0) {
    v.push_back("uf (" + std::to_string(uf) + ") must divide dmax (" + std::to_string(d_max) + ")");
  }
  if (width <= 0 || height <= 0) {
    v.push_back("image size must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
  }
  add(params.violations());
  add(refine.violations());
  if (!(freq_mhz > 0.0) || !std::isfinite(freq_mhz)) v.push_back("freq_mhz must be positive");
  if (ii < 1) v.push_back("ii must be >= 1");
  return v;
}

void PipelineConfig::validate() const {
  if (auto v = violations(); !v.empty()) throw ValidationError(std::move(v));
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig c;
  std::vector<std::string> errors;
  std::map<std::string, std::string> seen;
  bool have_p1 = false, have_p2 = false;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(where + "expected key=value");
      continue;
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (seen.contains(key)) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    seen[key] = std::string(value);

    auto bad = [&](const char* expected) {
      errors.push_back(where + "invalid value '" + std::string(value) + "' for " + key + " (expected " + expected + ")");
    };
    auto integer = [&](auto& field, const char* expected) {
      using T = std::remove_reference_t<decltype(field)>;
      if (auto n = parse_number<T>(value)) field = *n; else bad(expected);
    };

    if (key == "cost") {
      if (auto k = parse_cost_kind(value)) c.cost_fn.kind = *k; else bad("sad, zsad, census or rank");
    } else if (key == "win") {
      integer(c.cost_fn.window, "an odd integer");
    } else if (key == "dmax") {
      integer(c.d_max, "an integer");
    } else if (key == "uf") {
      integer(c.uf, "an integer");
    } else if (key == "p1") {
      integer(c.params.p1, "a non-negative integer");
      have_p1 = true;
    } else if (key == "p2") {
      integer(c.params.p2, "a non-negative integer");
      have_p2 = true;
    } else if (key == "lr_mode") {
      if (auto m = parse_lr_mode(value)) c.refine.lr_mode = *m; else bad("nlr, lr1 or lr2");
    } else if (key == "lr_threshold") {
      integer(c.refine.lr_threshold, "an integer");
    } else if (key == "median") {
      if (auto b = parse_bool(value)) c.refine.median = *b; else bad("on or off");
    } else if (key == "median_win") {
      integer(c.refine.median_window, "an odd integer");
    } else if (key == "freq_mhz") {
      if (auto f = parse_number<double>(value)) c.freq_mhz = *f; else bad("a number");
    } else if (key == "il") {
      integer(c.il, "a non-negative integer");
    } else {
      errors.push_back(where + "unknown key '" + key + "'");
    }
  }

  if (!have_p1 || !have_p2) {
    if (c.cost_fn.violations().empty()) {
      const auto d = AggregationParams::defaults_for(c.cost_fn);
      if (!have_p1) c.params.p1 = d.p1;
      if (!have_p2) c.params.p2 = d.p2;
    }
  }

  for (auto& v : c.violations()) errors.push_back(std::move(v));
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string format_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "cost=" << to_string(c.cost_fn.kind) << "\n"
      << "win=" << c.cost_fn.window << "\n"
      << "dmax=" << c.d_max << "\n"
      << "uf=" << c.uf << "\n"
      << "p1=" << c.params.p1 << "\n"
      << "p2=" << c.params.p2 << "\n"
      << "lr_mode=" << to_string(c.refine.lr_mode) << "\n"
      << "lr_threshold=" << c.refine.lr_threshold << "\n"
      << "median=" << (c.refine.median ? "on" : "off") << "\n"
      << "median_win=" << c.refine.median_window << "\n"
      << "freq_mhz=" << format_double(c.freq_mhz) << "\n"
      << "il=" << c.il << "\n";
  return out.str();
}

void save_config(const PipelineConfig& config, const std::filesystem::path& path) {
  const auto text = format_config(config);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace sgmstream
