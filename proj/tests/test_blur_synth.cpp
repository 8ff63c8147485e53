#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "blursynth/blur_synth.hpp"
#include "blursynth/quality_metrics.hpp"
#include "blursynth/rng.hpp"
#include "test_support.hpp"

using namespace blursynth;
using namespace blursynth::synth;
using blursynth::testing::constant_frame;

namespace {

RawFrame constant_raw(int w, int h, float v, CfaPattern cfa = CfaPattern::RGGB) {
  return RawFrame(w, h, cfa, v);
}

RawFrame random_raw(int w, int h, Rng& rng) {
  RawFrame f(w, h, CfaPattern::RGGB);
  for (auto& v : f.data()) v = static_cast<float>(rng.uniform01());
  return f;
}

double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, static_cast<double>(std::abs(a[i] - b[i])));
  }
  return worst;
}

isp::CameraProfile gamma_profile(double g) {
  auto p = isp::CameraProfile::identity();
  p.crf = isp::Crf::gamma(g);
  return p;
}

}  // namespace

TEST_CASE("ExposureWindow") {
  const ExposureWindow w(10, 63);
  CHECK(w.center() == 41);
  CHECK(w.end() == 73);
  CHECK(ExposureWindow(0, 3).center() == 1);
  CHECK_THROWS_AS(ExposureWindow(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ExposureWindow(0, 1), std::invalid_argument);
}

TEST_CASE("WindowPolicy validation") {
  CHECK_NOTHROW(WindowPolicy{}.validate());
  CHECK_THROWS_AS((WindowPolicy{16, 65, 65}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((WindowPolicy{17, 64, 65}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((WindowPolicy{1, 65, 65}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((WindowPolicy{21, 17, 65}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((WindowPolicy{17, 65, 0}.validate()), std::invalid_argument);
}

TEST_CASE("average_raw") {
  SUBCASE("mean of constants") {
    const std::vector frames{constant_raw(8, 6, 0.2f), constant_raw(8, 6, 0.4f),
                             constant_raw(8, 6, 0.6f)};
    const auto mean = average_raw(frames);
    for (float v : mean.data()) CHECK(v == doctest::Approx(0.4).epsilon(1e-7));
  }

  SUBCASE("single frame is returned unchanged") {
    Rng rng(1);
    const std::vector frames{random_raw(16, 16, rng)};
    CHECK(average_raw(frames) == frames.front());
  }

  SUBCASE("matches a naive accumulate-then-divide oracle") {
    Rng rng(2);
    std::vector<RawFrame> frames;
    for (int i = 0; i < 5; ++i) frames.push_back(random_raw(32, 24, rng));
    const auto got = average_raw(frames);
    for (int y = 0; y < 24; ++y) {
      for (int x = 0; x < 32; ++x) {
        double sum = 0.0;
        for (const auto& f : frames) sum += f.at(x, y);
        CHECK(std::abs(got.at(x, y) - sum / 5.0) <= 1e-6);
      }
    }
  }

  SUBCASE("linear in a scalar factor") {
    Rng rng(3);
    std::vector<RawFrame> frames;
    for (int i = 0; i < 7; ++i) frames.push_back(random_raw(16, 16, rng));
    for (double c : {0.0, 0.25, 0.7, 1.0}) {
      auto scaled = frames;
      for (auto& f : scaled)
        for (auto& v : f.data()) v = static_cast<float>(c * v);
      auto expected = average_raw(frames);
      for (auto& v : expected.data()) v = static_cast<float>(c * v);
      CHECK(max_abs_diff(average_raw(scaled).data(), expected.data()) <= 1e-6);
    }
  }

  SUBCASE("invariant to frame order") {
    Rng rng(4);
    std::vector<RawFrame> frames;
    for (int i = 0; i < 9; ++i) frames.push_back(random_raw(16, 16, rng));
    const auto reference = average_raw(frames);
    auto shuffled = frames;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 4, shuffled.end());
    CHECK(max_abs_diff(average_raw(shuffled).data(), reference.data()) <= 1e-6);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(average_raw({}), std::invalid_argument);
    const std::vector sizes{constant_raw(8, 8, 0.1f), constant_raw(8, 6, 0.1f)};
    CHECK_THROWS_AS(average_raw(sizes), std::invalid_argument);
    const std::vector cfas{constant_raw(8, 8, 0.1f),
                           constant_raw(8, 8, 0.1f, CfaPattern::BGGR)};
    CHECK_THROWS_AS(average_raw(cfas), std::invalid_argument);
  }
}

TEST_CASE("sample_window") {
  SUBCASE("a 63-frame window takes its ground truth from index 31") {
    const auto windows = sample_window({63, 63, 63}, 63, 99);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].start() == 0);
    CHECK(windows[0].length() == 63);
    CHECK(windows[0].center() == 31);
  }

  SUBCASE("deterministic in the seed") {
    const WindowPolicy policy{17, 65, 20};
    CHECK(sample_window(policy, 500, 42) == sample_window(policy, 500, 42));
    CHECK(sample_window(policy, 500, 42) != sample_window(policy, 500, 43));
  }

  SUBCASE("walk respects stride and sequence end") {
    const WindowPolicy policy{17, 65, 30};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto windows = sample_window(policy, 400, seed);
      for (std::size_t i = 0; i < windows.size(); ++i) {
        CHECK(windows[i].start() == 30 * i);
        CHECK(windows[i].end() <= 400);
      }
    }
  }

  SUBCASE("window lengths are uniform over the odd values") {
    // Stride 1 over a long sequence gives many draws from a single seed.
    const WindowPolicy policy{17, 65, 1};
    const auto windows = sample_window(policy, 10000 + 65, 7);
    REQUIRE(windows.size() >= 10000);
    std::map<std::size_t, int> counts;
    for (std::size_t i = 0; i < 10000; ++i) {
      const auto m = windows[i].length();
      CHECK(m % 2 == 1);
      CHECK(m >= 17);
      CHECK(m <= 65);
      ++counts[m];
    }
    CHECK(counts.size() == 25);
    const double p = 1.0 / 25.0;
    const double expected = 10000 * p;
    const double sigma = std::sqrt(10000 * p * (1.0 - p));
    for (const auto& [m, n] : counts) {
      CAPTURE(m);
      CHECK(std::abs(n - expected) <= 3.0 * sigma);
    }
  }

  CHECK_THROWS_AS(sample_window({}, 16, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_window({17, 16, 17}, 100, 1), std::invalid_argument);
}

TEST_CASE("synthesize_pair_raw") {
  SUBCASE("0/1/0 scene under gamma 2.2") {
    const std::vector frames{constant_frame(16, 16, 0.0f), constant_frame(16, 16, 1.0f),
                             constant_frame(16, 16, 0.0f)};
    const auto pair = synthesize_pair_raw(frames, ExposureWindow(0, 3), gamma_profile(2.2));
    for (float v : pair.blurry.data()) CHECK(v == doctest::Approx(0.6069133665239949).epsilon(1e-5));
    for (float v : pair.sharp.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("identical frames give blurry equal to sharp") {
    const auto frame = blursynth::testing::smooth_frames(32, 32)[7];
    const std::vector frames(5, frame);
    const auto pair = synthesize_pair_raw(frames, ExposureWindow(0, 5),
                                          isp::sample_profile(12));
    CHECK(max_abs_diff(pair.blurry.data(), pair.sharp.data()) <= 1e-5);
  }

  SUBCASE("static gray scene through the identity profile") {
    const std::vector frames(3, constant_frame(16, 16, 0.42f));
    const auto pair = synthesize_pair_raw(frames, ExposureWindow(0, 3),
                                          isp::CameraProfile::identity());
    for (float v : pair.blurry.data()) CHECK(v == doctest::Approx(0.42).epsilon(1e-5));
    for (float v : pair.sharp.data()) CHECK(v == doctest::Approx(0.42).epsilon(1e-5));
  }

  SUBCASE("sharp frame is the round-tripped window center") {
    const auto frames = blursynth::testing::drifting_blob(32, 32, 9, 1.0);
    const auto profile = isp::sample_profile(77, CfaPattern::GBRG);
    const ExposureWindow window(2, 7);
    const auto pair = synthesize_pair_raw(frames, window, profile);
    CHECK(pair.sharp == isp::process(isp::unprocess(frames[5], profile), profile));
  }

  SUBCASE("errors") {
    const std::vector frames(3, constant_frame(16, 16, 0.5f));
    CHECK_THROWS_AS(synthesize_pair_raw(frames, ExposureWindow(1, 3), isp::CameraProfile::identity()),
                    std::invalid_argument);
    auto mixed = frames;
    mixed[2] = constant_frame(16, 18, 0.5f);
    CHECK_THROWS_AS(synthesize_pair_raw(mixed, ExposureWindow(0, 3), isp::CameraProfile::identity()),
                    std::invalid_argument);
  }
}

TEST_CASE("synthesize_pair_rgb") {
  const std::vector frames{constant_frame(16, 16, 0.0f), constant_frame(16, 16, 1.0f),
                           constant_frame(16, 16, 0.0f)};
  const auto pair = synthesize_pair_rgb(frames, ExposureWindow(0, 3));
  for (float v : pair.blurry.data()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(pair.sharp == frames[1]);

  const std::vector same(5, blursynth::testing::smooth_frames(32, 32)[3]);
  const auto flat = synthesize_pair_rgb(same, ExposureWindow(0, 5));
  CHECK(flat.blurry == flat.sharp);

  CHECK_THROWS_AS(synthesize_pair_rgb(frames, ExposureWindow(2, 3)), std::invalid_argument);
}

TEST_CASE("RAW and RGB blur diverge exactly when the ISP is nonlinear") {
  const auto frames = blursynth::testing::drifting_blob(64, 64, 9, 2.0);
  const ExposureWindow window(0, 9);
  const auto rgb = synthesize_pair_rgb(frames, window);

  SUBCASE("0/1/0 gap") {
    const std::vector steps{constant_frame(16, 16, 0.0f), constant_frame(16, 16, 1.0f),
                            constant_frame(16, 16, 0.0f)};
    const auto raw_pair = synthesize_pair_raw(steps, ExposureWindow(0, 3), gamma_profile(2.2));
    const auto rgb_pair = synthesize_pair_rgb(steps, ExposureWindow(0, 3));
    CHECK(max_abs_diff(raw_pair.blurry.data(), rgb_pair.blurry.data()) >= 0.2);
  }

  SUBCASE("nonlinear profiles differ") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto raw = synthesize_pair_raw(frames, window, isp::sample_profile(seed));
      CHECK(raw.blurry != rgb.blurry);
      CHECK(max_abs_diff(raw.blurry.data(), rgb.blurry.data()) > 1e-3);
    }
  }

  SUBCASE("linear profile commutes up to demosaic error") {
    const auto raw = synthesize_pair_raw(frames, window, isp::CameraProfile::identity());
    CHECK(metrics::psnr(rgb.blurry, raw.blurry) >= 45.0);
  }
}
