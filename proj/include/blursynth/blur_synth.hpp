#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "blursynth/image.hpp"
#include "blursynth/isp.hpp"

namespace blursynth::synth {

// M consecutive frames starting at `start`; M is odd so the sharp ground
// truth is the unique median frame.
class ExposureWindow {
 public:
  ExposureWindow(std::size_t start, std::size_t length);

  std::size_t start() const { return start_; }
  std::size_t length() const { return length_; }
  std::size_t center() const { return start_ + (length_ - 1) / 2; }
  std::size_t end() const { return start_ + length_; }

  bool operator==(const ExposureWindow&) const = default;

 private:
  std::size_t start_;
  std::size_t length_;
};

struct WindowPolicy {
  int m_min = 17;
  int m_max = 65;
  // Hop between consecutive window starts.
  int stride = 65;

  void validate() const;
};

struct FramePair {
  SrgbFrame blurry;
  SrgbFrame sharp;
};

// Per-site mean of the RAW frames.
RawFrame average_raw(std::span<const RawFrame> frames);

// Walks the sequence with the policy's stride, drawing each window length
// uniformly from the odd values in [m_min, m_max]; stops at the first window
// that would run past the end.
std::vector<ExposureWindow> sample_window(const WindowPolicy& policy,
                                          std::size_t sequence_length,
                                          std::uint64_t seed);

// Blur accumulated in the RAW domain, then rendered through the ISP. The
// sharp frame is the window center passed through the same round trip.
FramePair synthesize_pair_raw(std::span<const SrgbFrame> frames,
                              const ExposureWindow& window,
                              const isp::CameraProfile& profile);

// Baseline: the windowed display-referred frames averaged directly.
FramePair synthesize_pair_rgb(std::span<const SrgbFrame> frames,
                              const ExposureWindow& window);

}  // namespace blursynth::synth
