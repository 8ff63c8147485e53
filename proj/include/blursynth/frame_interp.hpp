#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blursynth/image.hpp"

namespace blursynth::interp {

struct Displacement {
  float dx = 0.0f;
  float dy = 0.0f;
};

// Dense displacement field. flow(x) maps pixel x of frame A to x + flow(x)
// in frame B.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  Displacement at(int x, int y) const { return data_[index(x, y)]; }
  Displacement& at(int x, int y) { return data_[index(x, y)]; }

  std::span<const Displacement> data() const { return data_; }

  // Uniform field, mostly for tests and tools.
  static FlowField constant(int width, int height, Displacement d);

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Displacement> data_;
};

struct PyramidConfig {
  int levels = 4;
  int window_radius = 7;
  int iterations_per_level = 3;
  // Displacements are clamped to this magnitude (pixels).
  double max_flow = 64.0;

  void validate() const;
};

// Coarse-to-fine Lucas-Kanade on luma. Pixels whose structure tensor has a
// smallest eigenvalue below 1e-6 receive no update.
FlowField estimate_flow(const SrgbFrame& a, const SrgbFrame& b,
                        const PyramidConfig& cfg = {});

// Backward warp: out(x) = frame(x + t * flow(x)), bilinear, edge-clamped.
SrgbFrame warp(const SrgbFrame& frame, const FlowField& flow, double t);

// Frame halfway between a and b.
SrgbFrame interpolate_midpoint(const SrgbFrame& a, const SrgbFrame& b,
                               const PyramidConfig& cfg = {});

// Inserts midpoints recursively log2(factor) times. Input frames reappear
// unmodified at stride `factor`.
std::vector<SrgbFrame> upsample_frame_rate(std::span<const SrgbFrame> frames,
                                           int factor,
                                           const PyramidConfig& cfg = {});

}  // namespace blursynth::interp
