#pragma once

// Raster-order buffering primitives shared by the streaming executors.

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace sgmstream::stream {

// (window-1) rows of `width` samples. Each column is its own shift register:
// the oldest row leaves when a new sample is shifted in at that column.
template <class T>
class LineBuffer {
 public:
  LineBuffer(int rows, int width)
      : rows_(rows), width_(width), data_(std::size_t(std::max(rows, 0)) * width) {}

  int rows() const noexcept { return rows_; }
  int width() const noexcept { return width_; }
  // Slot 0 is the oldest row.
  const T& at(int slot, int x) const { return data_[std::size_t(slot) * width_ + x]; }

  void shift_in(int x, const T& value) {
    if (rows_ == 0) return;
    for (int s = 0; s + 1 < rows_; ++s) data_[std::size_t(s) * width_ + x] = at(s + 1, x);
    data_[std::size_t(rows_ - 1) * width_ + x] = value;
  }

 private:
  int rows_;
  int width_;
  std::vector<T> data_;
};

// Shift register of `length` columns, each `depth` samples tall. Index 0 is the oldest column.
template <class T>
class ColumnRegister {
 public:
  ColumnRegister(int length, int depth)
      : length_(length), depth_(depth), data_(std::size_t(length) * depth) {}

  int length() const noexcept { return length_; }
  int depth() const noexcept { return depth_; }
  const T& at(int column, int k) const { return data_[std::size_t(column) * depth_ + k]; }
  std::span<const T> column(int c) const {
    return {data_.data() + std::size_t(c) * depth_, std::size_t(depth_)};
  }

  // Replicates `col` into every slot (left-border clamping at row start).
  void fill(std::span<const T> col) {
    for (int c = 0; c < length_; ++c) std::copy(col.begin(), col.end(), data_.begin() + std::size_t(c) * depth_);
  }
  void shift_in(std::span<const T> col) {
    std::move(data_.begin() + depth_, data_.end(), data_.begin());
    std::copy(col.begin(), col.end(), data_.end() - depth_);
  }

 private:
  int length_;
  int depth_;
  std::vector<T> data_;
};

// Consumes a raster-order sample stream and emits vertical window columns:
// for every image column x and centre row yc, the `window` samples of rows
// clamp(yc-r .. yc+r). Rows of centre yc are emitted while input row yc+r
// arrives; the last r centre rows are emitted by finish().
template <class T>
class ColumnStream {
 public:
  ColumnStream(int width, int height, int window)
      : width_(width), height_(height), window_(window), radius_(window / 2),
        lines_(window - 1, width), column_(std::size_t(window)) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int window() const noexcept { return window_; }
  const LineBuffer<T>& line_buffer() const noexcept { return lines_; }
  // Next input position.
  int next_x() const noexcept { return x_; }
  int next_y() const noexcept { return y_; }

  // sink(x, yc, std::span<const T> column) for each completed column;
  // row_end(yc) after the last column of centre row yc.
  template <class Sink, class RowEnd>
  void push(const T& value, Sink&& sink, RowEnd&& row_end) {
    assert(y_ < height_);
    const int yc = y_ - radius_;
    if (yc >= 0) {
      assemble(x_, yc, &value);
      sink(x_, yc, std::span<const T>(column_));
    }
    lines_.shift_in(x_, value);
    if (++x_ == width_) {
      if (yc >= 0) row_end(yc);
      x_ = 0;
      ++y_;
    }
  }

  template <class Sink, class RowEnd>
  void finish(Sink&& sink, RowEnd&& row_end) {
    assert(y_ == height_ && x_ == 0);
    for (int yc = std::max(0, height_ - radius_); yc < height_; ++yc) {
      for (int x = 0; x < width_; ++x) {
        assemble(x, yc, nullptr);
        sink(x, yc, std::span<const T>(column_));
      }
      row_end(yc);
    }
  }

 private:
  // Gathers column x for centre row yc. `incoming` is the sample of row y_ when
  // the stream is still live; otherwise all rows come from the line buffer.
  void assemble(int x, int yc, const T* incoming) {
    const int newest = incoming ? y_ : height_ - 1;
    // Row held in line-buffer slot 0 for column x at this moment.
    const int slot0 = incoming ? y_ - (window_ - 1) : height_ - (window_ - 1);
    for (int k = 0; k < window_; ++k) {
      const int row = std::clamp(yc - radius_ + k, 0, height_ - 1);
      if (incoming && row == newest) {
        column_[k] = *incoming;
      } else {
        const int slot = row - slot0;
        assert(slot >= 0 && slot < window_ - 1);
        column_[k] = lines_.at(slot, x);
      }
    }
  }

  int width_;
  int height_;
  int window_;
  int radius_;
  int x_ = 0;
  int y_ = 0;
  LineBuffer<T> lines_;
  std::vector<T> column_;
};

// Square window view over a ColumnRegister whose oldest column is `first`.
template <class T>
class WindowView {
 public:
  WindowView(const ColumnRegister<T>& reg, int first, int window)
      : reg_(&reg), first_(first), window_(window) {}
  int window() const noexcept { return window_; }
  // dx, dy in [0, window).
  const T& at(int dx, int dy) const { return reg_->at(first_ + dx, dy); }

 private:
  const ColumnRegister<T>* reg_;
  int first_;
  int window_;
};

// Full 2D clamped window generator: ColumnStream plus a w-column window buffer.
// sink(xc, yc, WindowView<T>) is called once per pixel in raster order.
template <class T>
class WindowStream {
 public:
  WindowStream(int width, int height, int window)
      : columns_(width, height, window), buffer_(window, window), radius_(window / 2) {}

  const ColumnStream<T>& columns() const noexcept { return columns_; }

  template <class Sink>
  void push(const T& value, Sink&& sink) {
    columns_.push(value, column_sink(sink), row_end_sink(sink));
  }
  template <class Sink>
  void finish(Sink&& sink) {
    columns_.finish(column_sink(sink), row_end_sink(sink));
  }

 private:
  template <class Sink>
  auto column_sink(Sink& sink) {
    return [this, &sink](int x, int yc, std::span<const T> col) {
      if (x == 0) {
        buffer_.fill(col);
      } else {
        buffer_.shift_in(col);
      }
      if (x >= radius_) sink(x - radius_, yc, WindowView<T>(buffer_, 0, buffer_.length()));
    };
  }
  template <class Sink>
  auto row_end_sink(Sink& sink) {
    return [this, &sink](int yc) {
      const int width = columns_.width();
      std::vector<T> last(buffer_.column(buffer_.length() - 1).begin(),
                          buffer_.column(buffer_.length() - 1).end());
      for (int t = 1; t <= radius_; ++t) {
        buffer_.shift_in(last);
        const int xc = width - 1 - radius_ + t;
        if (xc >= 0) sink(xc, yc, WindowView<T>(buffer_, 0, buffer_.length()));
      }
    };
  }

  ColumnStream<T> columns_;
  ColumnRegister<T> buffer_;
  int radius_;
};

// Feeds a whole raster through a WindowStream.
template <class T, class Sink>
void for_each_window(std::span<const T> raster, int width, int height, int window, Sink&& sink) {
  WindowStream<T> ws(width, height, window);
  for (const T& v : raster) ws.push(v, sink);
  ws.finish(sink);
}

}  // namespace sgmstream::stream
