#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace blursynth {

enum class Channel : std::uint8_t { Red = 0, Green = 1, Blue = 2 };

// 2x2 Bayer tile, named in row-major order starting at (0,0).
enum class CfaPattern : std::uint8_t { RGGB, BGGR, GRBG, GBRG };

Channel cfa_channel(CfaPattern cfa, int x, int y);
std::string_view to_string(CfaPattern cfa);
CfaPattern parse_cfa(std::string_view name);

// Single-plane Bayer mosaic. Values are normalized sensor signal in [0,1].
class RawFrame {
 public:
  RawFrame() = default;
  RawFrame(int width, int height, CfaPattern cfa, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  CfaPattern cfa() const { return cfa_; }
  std::size_t size() const { return data_.size(); }

  float at(int x, int y) const { return data_[index(x, y)]; }
  float& at(int x, int y) { return data_[index(x, y)]; }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  bool operator==(const RawFrame&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  CfaPattern cfa_ = CfaPattern::RGGB;
  std::vector<float> data_;
};

struct LinearSpace {};
struct DisplaySpace {};

// Interleaved three-channel image. The tag keeps scene-linear and
// display-referred data from being mixed up at compile time.
template <class Space>
class RgbFrame {
 public:
  RgbFrame() = default;
  RgbFrame(int width, int height, float fill = 0.0f)
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw std::invalid_argument("RgbFrame: dimensions must be positive, got " +
                                  std::to_string(width) + "x" +
                                  std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * height * 3, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  float at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  float& at(int x, int y, int c) { return data_[index(x, y, c)]; }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  bool same_shape(const RgbFrame& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  // Relabels the samples without touching them.
  template <class Other>
  RgbFrame<Other> as() const {
    RgbFrame<Other> out(width_, height_);
    std::copy(data_.begin(), data_.end(), out.data().begin());
    return out;
  }

  bool operator==(const RgbFrame&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               3 +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

using LinearRgbFrame = RgbFrame<LinearSpace>;
using SrgbFrame = RgbFrame<DisplaySpace>;

inline float clip_unit(double v) {
  // NaN compares false on both sides and falls through to 0.
  if (v > 1.0) return 1.0f;
  if (v > 0.0) return static_cast<float>(v);
  return 0.0f;
}

}  // namespace blursynth
