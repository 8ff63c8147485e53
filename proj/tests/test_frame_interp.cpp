#include <doctest.h>

#include <cmath>

#include "blursynth/frame_interp.hpp"
#include "blursynth/quality_metrics.hpp"
#include "test_support.hpp"

using namespace blursynth;
using namespace blursynth::interp;
using blursynth::testing::Texture;
using blursynth::testing::constant_frame;

namespace {

struct FlowError {
  double mean_abs_x = 0.0;
  double mean_abs_y = 0.0;
};

FlowError interior_error(const FlowField& flow, double dx, double dy, int margin) {
  FlowError e;
  std::size_t n = 0;
  for (int y = margin; y < flow.height() - margin; ++y) {
    for (int x = margin; x < flow.width() - margin; ++x) {
      e.mean_abs_x += std::abs(flow.at(x, y).dx - dx);
      e.mean_abs_y += std::abs(flow.at(x, y).dy - dy);
      ++n;
    }
  }
  e.mean_abs_x /= static_cast<double>(n);
  e.mean_abs_y /= static_cast<double>(n);
  return e;
}

SrgbFrame crop(const SrgbFrame& f, int margin) {
  SrgbFrame out(f.width() - 2 * margin, f.height() - 2 * margin);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = f.at(x + margin, y + margin, c);
  return out;
}

bool in_unit_range(const SrgbFrame& f) {
  for (float v : f.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("PyramidConfig validation") {
  PyramidConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.levels = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.window_radius = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.iterations_per_level = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("estimate_flow") {
  const Texture tex(7);

  SUBCASE("identical frames give zero flow") {
    const auto a = tex.render(64, 64);
    const auto flow = estimate_flow(a, a);
    for (const auto& d : flow.data()) {
      CHECK(d.dx == 0.0f);
      CHECK(d.dy == 0.0f);
    }
  }

  SUBCASE("textureless frames give zero flow") {
    const auto flow = estimate_flow(constant_frame(32, 32, 0.2f), constant_frame(32, 32, 0.7f));
    for (const auto& d : flow.data()) {
      CHECK(d.dx == 0.0f);
      CHECK(d.dy == 0.0f);
    }
  }

  SUBCASE("horizontal shift of 3 px") {
    const auto a = tex.render(96, 96);
    const auto b = tex.render(96, 96, 3.0, 0.0);
    const auto e = interior_error(estimate_flow(a, b), 3.0, 0.0, 12);
    CHECK(e.mean_abs_x <= 0.25);
    CHECK(e.mean_abs_y <= 0.25);
  }

  SUBCASE("integer translations up to 8 px in both axes") {
    for (int s = 1; s <= 8; ++s) {
      const auto a = tex.render(128, 128);
      const double dx = s;
      const double dy = -(s % 3);
      const auto b = tex.render(128, 128, dx, dy);
      const auto e = interior_error(estimate_flow(a, b), dx, dy, 16);
      CAPTURE(s);
      CHECK(e.mean_abs_x <= 0.25);
      CHECK(e.mean_abs_y <= 0.25);
    }
  }

  SUBCASE("sub-pixel translation") {
    const auto a = tex.render(96, 96);
    const auto b = tex.render(96, 96, 2.5, -1.25);
    const auto e = interior_error(estimate_flow(a, b), 2.5, -1.25, 12);
    CHECK(e.mean_abs_x <= 0.25);
    CHECK(e.mean_abs_y <= 0.25);
  }

  SUBCASE("extra iterations do not diverge") {
    PyramidConfig cfg;
    cfg.iterations_per_level = 12;
    const auto a = tex.render(96, 96);
    const auto b = tex.render(96, 96, -5.0, 2.0);
    const auto e = interior_error(estimate_flow(a, b, cfg), -5.0, 2.0, 12);
    CHECK(e.mean_abs_x <= 0.05);
    CHECK(e.mean_abs_y <= 0.05);
  }

  SUBCASE("flow magnitude is clamped") {
    PyramidConfig cfg;
    cfg.max_flow = 1.0;
    const auto flow = estimate_flow(tex.render(64, 64), tex.render(64, 64, 6.0, 0.0), cfg);
    for (const auto& d : flow.data()) CHECK(std::hypot(d.dx, d.dy) <= 1.0 + 1e-5);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(estimate_flow(SrgbFrame(32, 32), SrgbFrame(32, 30)), std::invalid_argument);
    // Four levels need at least 16 px per side.
    CHECK_THROWS_AS(estimate_flow(SrgbFrame(12, 32), SrgbFrame(12, 32)), std::invalid_argument);
    CHECK_NOTHROW(estimate_flow(SrgbFrame(16, 16), SrgbFrame(16, 16)));
  }
}

TEST_CASE("warp") {
  const Texture tex(3);
  const auto frame = tex.render(40, 30);

  CHECK(warp(frame, FlowField::constant(40, 30, {1.7f, -2.3f}), 0.0) == frame);

  SUBCASE("integer flow shifts exactly") {
    const auto out = warp(frame, FlowField::constant(40, 30, {2.0f, 0.0f}), 1.0);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 38; ++x)
        for (int c = 0; c < 3; ++c) CHECK(out.at(x, y, c) == frame.at(x + 2, y, c));
  }

  SUBCASE("half-pixel shift of a linear ramp is exact") {
    const auto ramp = blursynth::testing::horizontal_ramp(32, 8, {0.1, 0.2, 0.3}, {0.02, 0.01, 0.015});
    const auto out = warp(ramp, FlowField::constant(32, 8, {1.0f, 0.0f}), 0.5);
    double worst = 0.0;
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 31; ++x) {
        for (int c = 0; c < 3; ++c) {
          const double expected = ramp.at(x, y, c) + 0.5 * (ramp.at(x + 1, y, c) - ramp.at(x, y, c));
          worst = std::max(worst, std::abs(out.at(x, y, c) - expected));
        }
      }
    }
    CHECK(worst <= 1e-4);
  }

  SUBCASE("samples beyond the frame clamp to the edge") {
    const auto out = warp(frame, FlowField::constant(40, 30, {100.0f, 0.0f}), 1.0);
    CHECK(out.at(0, 5, 1) == frame.at(39, 5, 1));
  }

  CHECK_THROWS_AS(warp(frame, FlowField(40, 30), 1.5), std::invalid_argument);
  CHECK_THROWS_AS(warp(frame, FlowField(40, 30), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(warp(frame, FlowField(20, 30), 0.5), std::invalid_argument);
}

TEST_CASE("interpolate_midpoint") {
  const Texture tex(11);

  SUBCASE("zero motion is a fixed point") {
    const auto a = tex.render(48, 48);
    const auto mid = interpolate_midpoint(a, a);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
      worst = std::max(worst, static_cast<double>(std::abs(mid.data()[i] - a.data()[i])));
    }
    CHECK(worst <= 1e-6);
  }

  SUBCASE("constant frames blend to the mean") {
    const auto mid = interpolate_midpoint(constant_frame(32, 32, 0.2f), constant_frame(32, 32, 0.6f));
    for (float v : mid.data()) CHECK(v == doctest::Approx(0.4).epsilon(1e-6));
  }

  SUBCASE("4 px shift lands on the 2 px ground truth") {
    const auto a = tex.render(128, 128);
    const auto b = tex.render(128, 128, 4.0, 0.0);
    const auto truth = tex.render(128, 128, 2.0, 0.0);
    const auto mid = interpolate_midpoint(a, b);
    CHECK(in_unit_range(mid));
    CHECK(metrics::psnr(crop(truth, 16), crop(mid, 16)) >= 35.0);
  }

  CHECK_THROWS_AS(interpolate_midpoint(SrgbFrame(32, 32), SrgbFrame(32, 16)), std::invalid_argument);
}

TEST_CASE("upsample_frame_rate") {
  const Texture tex(5);

  SUBCASE("length formula and endpoint preservation") {
    std::vector<SrgbFrame> frames;
    for (int i = 0; i < 5; ++i) frames.push_back(tex.render(32, 32, 0.5 * i, 0.0));
    const auto up4 = upsample_frame_rate(frames, 4);
    REQUIRE(up4.size() == 17);
    for (std::size_t i = 0; i < frames.size(); ++i) CHECK(up4[4 * i] == frames[i]);
    for (const auto& f : up4) CHECK(in_unit_range(f));

    const auto up2 = upsample_frame_rate(std::span(frames).first(2), 2);
    REQUIRE(up2.size() == 3);
    CHECK(up2.front() == frames[0]);
    CHECK(up2.back() == frames[1]);
  }

  SUBCASE("constant sequence stays constant") {
    std::vector<SrgbFrame> frames(3, constant_frame(16, 16, 0.3f));
    for (const auto& f : upsample_frame_rate(frames, 8)) {
      for (float v : f.data()) CHECK(v == doctest::Approx(0.3).epsilon(1e-6));
    }
  }

  SUBCASE("errors") {
    std::vector<SrgbFrame> one(1, SrgbFrame(16, 16));
    CHECK_THROWS_AS(upsample_frame_rate(one, 2), std::invalid_argument);
    std::vector<SrgbFrame> two(2, SrgbFrame(16, 16));
    CHECK_THROWS_AS(upsample_frame_rate(two, 3), std::invalid_argument);
    CHECK_THROWS_AS(upsample_frame_rate(two, 1), std::invalid_argument);
    two[1] = SrgbFrame(16, 18);
    CHECK_THROWS_AS(upsample_frame_rate(two, 2), std::invalid_argument);
  }
}
