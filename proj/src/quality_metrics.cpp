#include "blursynth/quality_metrics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace blursynth::metrics {

namespace {

constexpr int kWindow = 11;
constexpr int kHalf = kWindow / 2;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> g{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kHalf;
    g[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    sum += g[i];
  }
  for (auto& v : g) v /= sum;
  return g;
}

void require_same_shape(const SrgbFrame& a, const SrgbFrame& b,
                        const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(
        std::string(what) + ": image dimensions differ (" +
        std::to_string(a.width()) + "x" + std::to_string(a.height()) +
        " vs " + std::to_string(b.width()) + "x" +
        std::to_string(b.height()) + ")");
  }
}

// Gaussian-weighted local means over the valid region, separable.
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h,
                                 const std::array<double, kWindow>& g) {
  const int ow = w - 2 * kHalf;
  const int oh = h - 2 * kHalf;
  std::vector<double> horiz(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        s += g[k] * plane[static_cast<std::size_t>(y) * w + x + k];
      }
      horiz[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        s += g[k] * horiz[static_cast<std::size_t>(y + k) * ow + x];
      }
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(const SrgbFrame& reference, const SrgbFrame& test) {
  require_same_shape(reference, test, "psnr");
  auto r = reference.data();
  auto t = test.data();
  double sse = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = static_cast<double>(r[i]) - t[i];
    sse += d * d;
  }
  if (sse == 0.0) return kInfinitePsnr;
  const double mse = sse / static_cast<double>(r.size());
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const SrgbFrame& reference, const SrgbFrame& test) {
  require_same_shape(reference, test, "ssim");
  const int w = reference.width();
  const int h = reference.height();
  if (w < kWindow || h < kWindow) {
    throw std::invalid_argument("ssim: images of " + std::to_string(w) + "x" +
                                std::to_string(h) +
                                " are smaller than the 11x11 window");
  }
  static const auto g = gaussian_taps();
  const std::size_t n = static_cast<std::size_t>(w) * h;

  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = reference.data()[3 * i + c];
      y[i] = test.data()[3 * i + c];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, w, h, g);
    const auto my = filter_valid(y, w, h, g);
    const auto sxx = filter_valid(xx, w, h, g);
    const auto syy = filter_valid(yy, w, h, g);
    const auto sxy = filter_valid(xy, w, h, g);

    double channel = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      channel += ((2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2));
    }
    total += channel / static_cast<double>(mx.size());
  }
  return total / 3.0;
}

MetricReport compare(const SrgbFrame& reference, const SrgbFrame& test) {
  return {psnr(reference, test), ssim(reference, test),
          reference.pixel_count()};
}

}  // namespace blursynth::metrics
