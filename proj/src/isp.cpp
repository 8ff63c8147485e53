#include "blursynth/isp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "blursynth/rng.hpp"

namespace blursynth::isp {

namespace {

constexpr double kSrgbLinearThreshold = 0.0031308;
constexpr double kSrgbSlope = 12.92;
constexpr double kSrgbScale = 1.055;
constexpr double kSrgbOffset = 0.055;
constexpr double kSrgbExponent = 2.4;
// Encoded-domain threshold, taken from the encode side so that decode is its
// exact inverse instead of using the rounded 0.04045.
constexpr double kSrgbEncodedThreshold = kSrgbSlope * kSrgbLinearThreshold;

constexpr double kMinDeterminant = 1e-8;
constexpr double kMaxCondition = 100.0;
constexpr double kRowSumTolerance = 1e-6;
constexpr int kMaxProfileRetries = 100;

double clamp01(double v) {
  if (v > 1.0) return 1.0;
  if (v > 0.0) return v;
  return 0.0;
}

void require_even(int width, int height, const char* what) {
  if (width % 2 != 0 || height % 2 != 0) {
    throw std::invalid_argument(std::string(what) +
                                ": dimensions must be even, got " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  }
}

template <class Out, class In, class Fn>
Out map_samples(const In& in, Fn&& fn) {
  Out out(in.width(), in.height());
  auto src = in.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = clip_unit(fn(clamp01(src[i])));
  }
  return out;
}

}  // namespace

Crf Crf::gamma(double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("Crf::gamma: exponent must be positive, got " +
                                std::to_string(exponent));
  }
  return Crf(Kind::Gamma, exponent);
}

Crf Crf::srgb() { return Crf(Kind::SrgbPiecewise, kSrgbExponent); }

double Crf::encode(double linear) const {
  const double v = clamp01(linear);
  if (kind_ == Kind::Gamma) {
    return exponent_ == 1.0 ? v : std::pow(v, 1.0 / exponent_);
  }
  if (v <= kSrgbLinearThreshold) return kSrgbSlope * v;
  return kSrgbScale * std::pow(v, 1.0 / kSrgbExponent) - kSrgbOffset;
}

double Crf::decode(double encoded) const {
  const double v = clamp01(encoded);
  if (kind_ == Kind::Gamma) {
    return exponent_ == 1.0 ? v : std::pow(v, exponent_);
  }
  if (v <= kSrgbEncodedThreshold) return v / kSrgbSlope;
  return std::pow((v + kSrgbOffset) / kSrgbScale, kSrgbExponent);
}

CameraProfile CameraProfile::identity(CfaPattern cfa) {
  CameraProfile p;
  p.cfa = cfa;
  return p;
}

double condition_number(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
  const auto& s = svd.singularValues();
  if (s(2) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(2);
}

void CameraProfile::validate() const {
  for (int c = 0; c < 3; ++c) {
    if (!(wb_gains[c] >= 0.25 && wb_gains[c] <= 4.0)) {
      throw std::invalid_argument("CameraProfile: white-balance gain " +
                                  std::to_string(c) + " = " +
                                  std::to_string(wb_gains[c]) +
                                  " outside [0.25, 4]");
    }
  }
  if (std::abs(wb_gains[1] - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "CameraProfile: green gain must be normalized to 1.0");
  }
  if (!ccm.allFinite()) {
    throw std::invalid_argument("CameraProfile: color matrix is not finite");
  }
  for (int r = 0; r < 3; ++r) {
    const double sum = ccm.row(r).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("CameraProfile: color matrix row " +
                                  std::to_string(r) + " sums to " +
                                  std::to_string(sum) + ", expected 1");
    }
  }
  const double cond = condition_number(ccm);
  if (!(cond < kMaxCondition)) {
    throw std::invalid_argument("CameraProfile: color matrix condition number " +
                                std::to_string(cond) + " >= 100");
  }
}

SrgbFrame encode_crf(const LinearRgbFrame& frame, const Crf& crf) {
  return map_samples<SrgbFrame>(frame,
                                [&](double v) { return crf.encode(v); });
}

LinearRgbFrame decode_crf(const SrgbFrame& frame, const Crf& crf) {
  return map_samples<LinearRgbFrame>(frame,
                                     [&](double v) { return crf.decode(v); });
}

LinearRgbFrame apply_white_balance(const LinearRgbFrame& frame,
                                   const WhiteBalanceGains& gains,
                                   bool invert) {
  for (double g : gains) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument(
          "apply_white_balance: gains must be positive, got " +
          std::to_string(g));
    }
  }
  std::array<double, 3> scale{};
  for (int c = 0; c < 3; ++c) scale[c] = invert ? 1.0 / gains[c] : gains[c];

  LinearRgbFrame out(frame.width(), frame.height());
  auto src = frame.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    for (int c = 0; c < 3; ++c) {
      dst[i + c] = clip_unit(static_cast<double>(src[i + c]) * scale[c]);
    }
  }
  return out;
}

LinearRgbFrame apply_color_matrix(const LinearRgbFrame& frame,
                                  const Eigen::Matrix3d& ccm, bool invert) {
  const double det = ccm.determinant();
  if (!(std::abs(det) >= kMinDeterminant)) {
    throw std::invalid_argument(
        "apply_color_matrix: matrix is singular (|det| = " +
        std::to_string(std::abs(det)) + ")");
  }
  const Eigen::Matrix3d m = invert ? Eigen::Matrix3d(ccm.inverse()) : ccm;

  LinearRgbFrame out(frame.width(), frame.height());
  auto src = frame.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const Eigen::Vector3d px(src[i], src[i + 1], src[i + 2]);
    const Eigen::Vector3d mapped = m * px;
    for (int c = 0; c < 3; ++c) dst[i + c] = clip_unit(mapped(c));
  }
  return out;
}

RawFrame mosaic(const LinearRgbFrame& frame, CfaPattern cfa) {
  require_even(frame.width(), frame.height(), "mosaic");
  RawFrame raw(frame.width(), frame.height(), cfa);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const int c = static_cast<int>(cfa_channel(cfa, x, y));
      raw.at(x, y) = clip_unit(frame.at(x, y, c));
    }
  }
  return raw;
}

LinearRgbFrame demosaic(const RawFrame& raw) {
  const int w = raw.width();
  const int h = raw.height();
  // Red/blue use the full 3x3 tent, green the cross. In the interior these
  // reduce to the textbook bilinear stencils; at the border the weights are
  // renormalized over the in-frame sites.
  static constexpr double kTent[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};
  static constexpr double kCross[3][3] = {{0, 1, 0}, {1, 4, 1}, {0, 1, 0}};

  LinearRgbFrame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Channel here = cfa_channel(raw.cfa(), x, y);
      for (int c = 0; c < 3; ++c) {
        const auto channel = static_cast<Channel>(c);
        if (channel == here) {
          out.at(x, y, c) = raw.at(x, y);
          continue;
        }
        const auto& kernel = channel == Channel::Green ? kCross : kTent;
        double sum = 0.0;
        double weight = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          const int yy = y + dy;
          if (yy < 0 || yy >= h) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx;
            if (xx < 0 || xx >= w) continue;
            if (cfa_channel(raw.cfa(), xx, yy) != channel) continue;
            const double k = kernel[dy + 1][dx + 1];
            sum += k * raw.at(xx, yy);
            weight += k;
          }
        }
        out.at(x, y, c) = clip_unit(sum / weight);
      }
    }
  }
  return out;
}

SrgbFrame process(const RawFrame& raw, const CameraProfile& profile) {
  if (raw.cfa() != profile.cfa) {
    throw std::invalid_argument(
        "process: RAW frame CFA " + std::string(to_string(raw.cfa())) +
        " does not match profile CFA " + std::string(to_string(profile.cfa)));
  }
  auto rgb = demosaic(raw);
  rgb = apply_white_balance(rgb, profile.wb_gains);
  rgb = apply_color_matrix(rgb, profile.ccm);
  return encode_crf(rgb, profile.crf);
}

RawFrame unprocess(const SrgbFrame& srgb, const CameraProfile& profile) {
  require_even(srgb.width(), srgb.height(), "unprocess");
  auto rgb = decode_crf(srgb, profile.crf);
  rgb = apply_color_matrix(rgb, profile.ccm, /*invert=*/true);
  rgb = apply_white_balance(rgb, profile.wb_gains, /*invert=*/true);
  return mosaic(rgb, profile.cfa);
}

CameraProfile sample_profile(std::uint64_t seed, CfaPattern cfa) {
  Rng rng(seed);
  CameraProfile profile;
  profile.cfa = cfa;
  profile.wb_gains = {rng.uniform(0.7, 2.2), 1.0, rng.uniform(0.7, 2.2)};

  bool accepted = false;
  for (int attempt = 0; attempt < kMaxProfileRetries && !accepted; ++attempt) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m(r, c) += rng.uniform(-0.15, 0.15);
    }
    for (int r = 0; r < 3; ++r) m.row(r) /= m.row(r).sum();
    if (condition_number(m) < kMaxCondition) {
      profile.ccm = m;
      accepted = true;
    }
  }
  if (!accepted) {
    throw std::runtime_error("sample_profile: no well-conditioned color matrix after " +
                             std::to_string(kMaxProfileRetries) + " draws");
  }

  if (rng.coin()) {
    profile.crf = Crf::gamma(rng.uniform(1.8, 2.6));
  } else {
    profile.crf = Crf::srgb();
  }
  profile.validate();
  return profile;
}

}  // namespace blursynth::isp
