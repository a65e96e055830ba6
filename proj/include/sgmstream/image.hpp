#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sgmstream {

// Row-major 2D grid used for intermediate rasters (transforms, masks).
template <class T>
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, T fill = T{}) : width(w), height(h), data(std::size_t(w) * h, fill) {}

  T& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  const T& at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  bool operator==(const Raster&) const = default;
};

// 8-bit grayscale image, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  // Throws ValidationError unless width, height > 0 and data.size() == width*height.
  GrayImage(int width, int height, std::vector<std::uint8_t> data);
  GrayImage(int width, int height, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return data_; }
  std::span<std::uint8_t> pixels() noexcept { return data_; }

  std::uint8_t at(int x, int y) const { return data_[std::size_t(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return data_[std::size_t(y) * width_ + x]; }
  // Edge-replicated read.
  std::uint8_t clamped(int x, int y) const;

  bool operator==(const GrayImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Integer disparities in [0, d_max) or kInvalid.
class DisparityMap {
 public:
  static constexpr std::int32_t kInvalid = -1;

  DisparityMap() = default;
  DisparityMap(int width, int height, int d_max, std::int32_t fill = kInvalid);
  // Throws ValidationError if any value is neither kInvalid nor in [0, d_max).
  DisparityMap(int width, int height, int d_max, std::vector<std::int32_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int d_max() const noexcept { return d_max_; }
  std::span<const std::int32_t> values() const noexcept { return data_; }

  std::int32_t at(int x, int y) const { return data_[std::size_t(y) * width_ + x]; }
  // Throws ValidationError for out-of-range values.
  void set(int x, int y, std::int32_t d);
  bool valid(int x, int y) const { return at(x, y) != kInvalid; }
  std::size_t valid_count() const;

  bool operator==(const DisparityMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int d_max_ = 1;
  std::vector<std::int32_t> data_;
};

struct StereoPair {
  GrayImage base;
  GrayImage match;
  std::optional<DisparityMap> ground_truth;
  // Optional evaluation mask (non-zero = evaluate), same size as the images.
  std::optional<Raster<std::uint8_t>> mask;

  // Throws ValidationError on any dimension mismatch.
  void validate() const;
  int width() const noexcept { return base.width(); }
  int height() const noexcept { return base.height(); }
};

}  // namespace sgmstream
