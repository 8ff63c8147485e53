#pragma once

#include <cstddef>
#include <limits>

#include "blursynth/image.hpp"

namespace blursynth::metrics {

// Returned by psnr() for identical images.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct MetricReport {
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::size_t pixel_count = 0;
};

// 10*log10(1/MSE) with peak 1.0, MSE over all pixels and channels.
double psnr(const SrgbFrame& reference, const SrgbFrame& test);

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 1. Per-channel maps over the fully supported region,
// averaged, then averaged across channels.
double ssim(const SrgbFrame& reference, const SrgbFrame& test);

MetricReport compare(const SrgbFrame& reference, const SrgbFrame& test);

}  // namespace blursynth::metrics
