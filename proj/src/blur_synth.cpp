#include "blursynth/blur_synth.hpp"

#include <stdexcept>
#include <string>

#include "blursynth/rng.hpp"

namespace blursynth::synth {

namespace {

void require_fits(std::span<const SrgbFrame> frames,
                  const ExposureWindow& window, const char* what) {
  if (window.end() > frames.size()) {
    throw std::invalid_argument(
        std::string(what) + ": window [" + std::to_string(window.start()) +
        ", " + std::to_string(window.end()) + ") exceeds sequence of " +
        std::to_string(frames.size()) + " frames");
  }
  const auto& first = frames[window.start()];
  for (std::size_t i = window.start(); i < window.end(); ++i) {
    if (!frames[i].same_shape(first)) {
      throw std::invalid_argument(std::string(what) + ": frame " +
                                  std::to_string(i) +
                                  " differs in size from the window start");
    }
  }
}

}  // namespace

ExposureWindow::ExposureWindow(std::size_t start, std::size_t length)
    : start_(start), length_(length) {
  if (length < 3 || length % 2 == 0) {
    throw std::invalid_argument(
        "ExposureWindow: length must be odd and >= 3, got " +
        std::to_string(length));
  }
}

void WindowPolicy::validate() const {
  if (m_min < 3 || m_min % 2 == 0 || m_max % 2 == 0 || m_max < m_min) {
    throw std::invalid_argument(
        "WindowPolicy: need odd bounds with 3 <= m_min <= m_max, got m_min=" +
        std::to_string(m_min) + " m_max=" + std::to_string(m_max));
  }
  if (stride < 1) {
    throw std::invalid_argument("WindowPolicy: stride must be >= 1");
  }
}

RawFrame average_raw(std::span<const RawFrame> frames) {
  if (frames.empty()) {
    throw std::invalid_argument("average_raw: empty frame sequence");
  }
  const RawFrame& first = frames.front();
  for (const auto& f : frames) {
    if (f.width() != first.width() || f.height() != first.height() ||
        f.cfa() != first.cfa()) {
      throw std::invalid_argument(
          "average_raw: frames differ in dimensions or CFA pattern");
    }
  }

  std::vector<double> acc(first.size(), 0.0);
  for (const auto& f : frames) {
    auto d = f.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i];
  }
  const double m = static_cast<double>(frames.size());
  RawFrame out(first.width(), first.height(), first.cfa());
  auto dst = out.data();
  for (std::size_t i = 0; i < acc.size(); ++i) {
    dst[i] = static_cast<float>(acc[i] / m);
  }
  return out;
}

std::vector<ExposureWindow> sample_window(const WindowPolicy& policy,
                                          std::size_t sequence_length,
                                          std::uint64_t seed) {
  policy.validate();
  if (sequence_length < static_cast<std::size_t>(policy.m_min)) {
    throw std::invalid_argument(
        "sample_window: sequence of " + std::to_string(sequence_length) +
        " frames is shorter than m_min=" + std::to_string(policy.m_min));
  }
  Rng rng(seed);
  const auto choices =
      static_cast<std::uint64_t>((policy.m_max - policy.m_min) / 2 + 1);
  std::vector<ExposureWindow> windows;
  for (std::size_t start = 0;; start += static_cast<std::size_t>(policy.stride)) {
    const std::size_t m =
        static_cast<std::size_t>(policy.m_min) + 2 * rng.uniform_index(choices);
    if (start + m > sequence_length) break;
    windows.emplace_back(start, m);
  }
  return windows;
}

FramePair synthesize_pair_raw(std::span<const SrgbFrame> frames,
                              const ExposureWindow& window,
                              const isp::CameraProfile& profile) {
  require_fits(frames, window, "synthesize_pair_raw");
  std::vector<RawFrame> raw;
  raw.reserve(window.length());
  for (std::size_t i = window.start(); i < window.end(); ++i) {
    raw.push_back(isp::unprocess(frames[i], profile));
  }
  const RawFrame& center = raw[window.center() - window.start()];
  return {isp::process(average_raw(raw), profile),
          isp::process(center, profile)};
}

FramePair synthesize_pair_rgb(std::span<const SrgbFrame> frames,
                              const ExposureWindow& window) {
  require_fits(frames, window, "synthesize_pair_rgb");
  const SrgbFrame& first = frames[window.start()];
  std::vector<double> acc(first.data().size(), 0.0);
  for (std::size_t i = window.start(); i < window.end(); ++i) {
    auto d = frames[i].data();
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += d[k];
  }
  const double m = static_cast<double>(window.length());
  SrgbFrame blurry(first.width(), first.height());
  auto dst = blurry.data();
  for (std::size_t k = 0; k < acc.size(); ++k) {
    dst[k] = static_cast<float>(acc[k] / m);
  }
  return {std::move(blurry), frames[window.center()]};
}

}  // namespace blursynth::synth
