#include "sgmstream/pixelio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "sgmstream/errors.hpp"

namespace sgmstream {

// ---------------------------------------------------------------------------
// Image types

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  if (data_.size() != std::size_t(width) * height) {
    throw ValidationError("image data holds " + std::to_string(data_.size()) + " pixels, expected " +
                          std::to_string(std::size_t(width) * height));
  }
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(std::size_t(std::max(width, 0)) * std::max(height, 0), fill)) {}

std::uint8_t GrayImage::clamped(int x, int y) const {
  return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
}

DisparityMap::DisparityMap(int width, int height, int d_max, std::int32_t fill)
    : DisparityMap(width, height, d_max,
                   std::vector<std::int32_t>(std::size_t(std::max(width, 0)) * std::max(height, 0), fill)) {}

DisparityMap::DisparityMap(int width, int height, int d_max, std::vector<std::int32_t> data)
    : width_(width), height_(height), d_max_(d_max), data_(std::move(data)) {
  if (width <= 0 || height <= 0) throw ValidationError("disparity map dimensions must be positive");
  if (d_max < 1) throw ValidationError("disparity range must be at least 1");
  if (data_.size() != std::size_t(width) * height) {
    throw ValidationError("disparity data size does not match dimensions");
  }
  for (auto v : data_) {
    if (v != kInvalid && (v < 0 || v >= d_max)) {
      throw ValidationError("disparity " + std::to_string(v) + " outside [0, " + std::to_string(d_max) + ")");
    }
  }
}

void DisparityMap::set(int x, int y, std::int32_t d) {
  if (d != kInvalid && (d < 0 || d >= d_max_)) {
    throw ValidationError("disparity " + std::to_string(d) + " outside [0, " + std::to_string(d_max_) + ")");
  }
  data_[std::size_t(y) * width_ + x] = d;
}

std::size_t DisparityMap::valid_count() const {
  return std::size_t(std::count_if(data_.begin(), data_.end(), [](auto v) { return v != kInvalid; }));
}

void StereoPair::validate() const {
  std::vector<std::string> v;
  if (base.width() != match.width() || base.height() != match.height()) {
    v.push_back("base image is " + std::to_string(base.width()) + "x" + std::to_string(base.height()) +
                " but match image is " + std::to_string(match.width()) + "x" +
                std::to_string(match.height()));
  }
  if (ground_truth && (ground_truth->width() != base.width() || ground_truth->height() != base.height())) {
    v.push_back("ground truth dimensions differ from the images");
  }
  if (mask && (mask->width != base.width() || mask->height != base.height())) {
    v.push_back("mask dimensions differ from the images");
  }
  if (!v.empty()) throw ValidationError(std::move(v));
}

// ---------------------------------------------------------------------------
// Netpbm

namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const std::uint8_t> bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_int(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw ParseError(std::string(what) + " is too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("expected ") + what, start);
    return value;
  }

  // Exactly one whitespace byte separates maxval from a binary payload.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError("expected whitespace after maxval", pos_);
    }
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

}  // namespace

PgmData parse_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw ParseError("not a PGM file (expected magic P5 or P2)", 0);
  }
  const bool binary = bytes[1] == '5';
  HeaderReader in(bytes, 2);
  PgmData pgm;
  pgm.width = int(in.read_int("width"));
  pgm.height = int(in.read_int("height"));
  in.skip_space_and_comments();
  const std::size_t maxval_offset = in.pos();
  pgm.maxval = int(in.read_int("maxval"));
  if (pgm.width <= 0 || pgm.height <= 0) throw ParseError("image dimensions must be positive", 2);
  if (pgm.maxval < 1 || pgm.maxval > 65535) throw ParseError("maxval must be in [1, 65535]", maxval_offset);

  const std::size_t count = std::size_t(pgm.width) * pgm.height;
  pgm.samples.resize(count);
  if (binary) {
    in.single_whitespace();
    const std::size_t offset = in.pos();
    const std::size_t sample_bytes = pgm.maxval > 255 ? 2 : 1;
    const std::size_t need = count * sample_bytes;
    if (bytes.size() - offset < need) {
      throw ParseError("truncated payload: expected " + std::to_string(need) + " bytes, found " +
                           std::to_string(bytes.size() - offset),
                       bytes.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      std::uint16_t v = sample_bytes == 2
                            ? std::uint16_t((bytes[offset + 2 * i] << 8) | bytes[offset + 2 * i + 1])
                            : bytes[offset + i];
      if (v > pgm.maxval) throw ParseError("sample exceeds maxval", offset + i * sample_bytes);
      pgm.samples[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      in.skip_space_and_comments();
      const std::size_t at = in.pos();
      if (at >= bytes.size()) {
        throw ParseError("truncated payload: expected " + std::to_string(count) + " samples, found " +
                             std::to_string(i),
                         at);
      }
      const long v = in.read_int("sample");
      if (v > pgm.maxval) throw ParseError("sample exceeds maxval", at);
      pgm.samples[i] = std::uint16_t(v);
    }
  }
  return pgm;
}

std::vector<std::uint8_t> encode_pgm(const PgmData& pgm) {
  const std::string header =
      "P5\n" + std::to_string(pgm.width) + " " + std::to_string(pgm.height) + "\n" + std::to_string(pgm.maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = pgm.maxval > 255;
  out.reserve(out.size() + pgm.samples.size() * (wide ? 2 : 1));
  for (auto v : pgm.samples) {
    if (wide) out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v & 0xff));
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("failed reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

GrayImage decode_gray(std::span<const std::uint8_t> bytes) {
  PgmData pgm = parse_pgm(bytes);
  if (pgm.maxval != 255) throw ParseError("8-bit image must have maxval 255, got " + std::to_string(pgm.maxval), 0);
  std::vector<std::uint8_t> px(pgm.samples.begin(), pgm.samples.end());
  return GrayImage(pgm.width, pgm.height, std::move(px));
}

GrayImage load_pgm(const std::filesystem::path& path) { return decode_gray(read_file(path)); }

std::vector<std::uint8_t> encode_gray(const GrayImage& image) {
  PgmData pgm{image.width(), image.height(), 255, {image.pixels().begin(), image.pixels().end()}};
  return encode_pgm(pgm);
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) { write_file(path, encode_gray(image)); }

std::vector<std::uint8_t> encode_disparity(const DisparityMap& map, int scale) {
  if (scale <= 0) throw RangeError("disparity scale must be positive");
  if (std::int64_t(scale) * (map.d_max() - 1) > 65535) {
    throw RangeError("scale " + std::to_string(scale) + " x (d_max - 1) = " +
                     std::to_string(std::int64_t(scale) * (map.d_max() - 1)) + " exceeds 65535");
  }
  PgmData pgm{map.width(), map.height(), 65535, {}};
  pgm.samples.reserve(map.values().size());
  for (auto d : map.values()) pgm.samples.push_back(d == DisparityMap::kInvalid ? 0 : std::uint16_t(d * scale));
  return encode_pgm(pgm);
}

void save_disparity(const DisparityMap& map, const std::filesystem::path& path, int scale) {
  write_file(path, encode_disparity(map, scale));
}

DisparityMap decode_disparity(std::span<const std::uint8_t> bytes, int scale, int d_max) {
  if (scale <= 0) throw RangeError("disparity scale must be positive");
  PgmData pgm = parse_pgm(bytes);
  std::vector<std::int32_t> values;
  values.reserve(pgm.samples.size());
  std::int32_t largest = 0;
  for (auto s : pgm.samples) {
    if (s == 0) {
      values.push_back(DisparityMap::kInvalid);
    } else {
      const auto d = std::int32_t(std::lround(double(s) / scale));
      largest = std::max(largest, d);
      values.push_back(d);
    }
  }
  if (d_max <= 0) d_max = largest + 1;
  return DisparityMap(pgm.width, pgm.height, d_max, std::move(values));
}

DisparityMap load_disparity(const std::filesystem::path& path, int scale, int d_max) {
  return decode_disparity(read_file(path), scale, d_max);
}

Raster<std::uint8_t> load_mask(const std::filesystem::path& path) {
  PgmData pgm = parse_pgm(read_file(path));
  Raster<std::uint8_t> mask(pgm.width, pgm.height);
  for (std::size_t i = 0; i < pgm.samples.size(); ++i) mask.data[i] = pgm.samples[i] != 0;
  return mask;
}

}  // namespace sgmstream
