#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

#include "blursynth/image.hpp"

namespace blursynth::isp {

// Camera response function. Gamma(g) encodes v -> v^(1/g); SrgbPiecewise is
// the IEC 61966-2-1 curve with its linear toe.
class Crf {
 public:
  enum class Kind : std::uint8_t { Gamma, SrgbPiecewise };

  static Crf gamma(double exponent);
  static Crf srgb();

  Kind kind() const { return kind_; }
  // Only meaningful for Kind::Gamma.
  double exponent() const { return exponent_; }

  // Both clip their argument to [0,1] first.
  double encode(double linear) const;
  double decode(double encoded) const;

  bool is_linear() const { return kind_ == Kind::Gamma && exponent_ == 1.0; }

  bool operator==(const Crf&) const = default;

 private:
  Crf(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}

  Kind kind_;
  double exponent_;
};

using WhiteBalanceGains = std::array<double, 3>;

// Parametric ISP: demosaic -> white balance -> color matrix -> CRF.
struct CameraProfile {
  WhiteBalanceGains wb_gains{1.0, 1.0, 1.0};
  Eigen::Matrix3d ccm = Eigen::Matrix3d::Identity();
  Crf crf = Crf::gamma(1.0);
  CfaPattern cfa = CfaPattern::RGGB;

  // Unit gains, identity matrix, linear CRF.
  static CameraProfile identity(CfaPattern cfa = CfaPattern::RGGB);

  // Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  bool operator==(const CameraProfile&) const = default;
};

// 2-norm condition number.
double condition_number(const Eigen::Matrix3d& m);

SrgbFrame encode_crf(const LinearRgbFrame& frame, const Crf& crf);
LinearRgbFrame decode_crf(const SrgbFrame& frame, const Crf& crf);

LinearRgbFrame apply_white_balance(const LinearRgbFrame& frame,
                                   const WhiteBalanceGains& gains,
                                   bool invert = false);

LinearRgbFrame apply_color_matrix(const LinearRgbFrame& frame,
                                  const Eigen::Matrix3d& ccm,
                                  bool invert = false);

RawFrame mosaic(const LinearRgbFrame& frame, CfaPattern cfa);

// Bilinear demosaic. Each missing sample is the weighted mean of the
// same-color sites in its 3x3 neighbourhood that lie inside the frame, which
// amounts to edge replication within each color plane.
LinearRgbFrame demosaic(const RawFrame& raw);

// Forward ISP: RAW mosaic to display-referred RGB.
SrgbFrame process(const RawFrame& raw, const CameraProfile& profile);

// Inverse ISP: display-referred RGB to a RAW mosaic in the profile's CFA.
RawFrame unprocess(const SrgbFrame& srgb, const CameraProfile& profile);

// Randomized device profile. Deterministic in the seed.
CameraProfile sample_profile(std::uint64_t seed,
                             CfaPattern cfa = CfaPattern::RGGB);

}  // namespace blursynth::isp
