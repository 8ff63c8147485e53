#include "blursynth/frame_interp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blursynth::interp {

namespace {

constexpr double kMinEigenvalue = 1e-6;

struct Plane {
  int width = 0;
  int height = 0;
  std::vector<float> v;

  Plane() = default;
  Plane(int w, int h, float fill = 0.0f)
      : width(w), height(h), v(static_cast<std::size_t>(w) * h, fill) {}

  float at(int x, int y) const {
    return v[static_cast<std::size_t>(y) * width + x];
  }
  float& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }

  float clamped(int x, int y) const {
    return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
  }

  double bilinear(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    const double bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    return top * (1.0 - fy) + bottom * fy;
  }
};

Plane luma(const SrgbFrame& f) {
  Plane p(f.width(), f.height());
  auto d = f.data();
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    p.v[i] = static_cast<float>(0.299 * d[3 * i] + 0.587 * d[3 * i + 1] +
                                0.114 * d[3 * i + 2]);
  }
  return p;
}

// 5-tap binomial blur followed by keeping even pixels.
Plane downsample(const Plane& in) {
  static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16,
                                  1.0 / 16};
  Plane horiz(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double s = 0.0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * in.clamped(x + i, y);
      horiz.at(x, y) = static_cast<float>(s);
    }
  }
  Plane out((in.width + 1) / 2, (in.height + 1) / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double s = 0.0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * horiz.clamped(2 * x, 2 * y + i);
      out.at(x, y) = static_cast<float>(s);
    }
  }
  return out;
}

std::vector<Plane> build_pyramid(Plane base, int levels) {
  std::vector<Plane> pyr;
  pyr.reserve(static_cast<std::size_t>(levels));
  pyr.push_back(std::move(base));
  for (int l = 1; l < levels; ++l) pyr.push_back(downsample(pyr.back()));
  return pyr;
}

// Window sums over a (2r+1)^2 box, restricted to in-frame pixels.
class BoxSum {
 public:
  BoxSum(int width, int height, int radius)
      : w_(width), h_(height), r_(radius),
        table_(static_cast<std::size_t>(width + 1) * (height + 1), 0.0) {}

  std::vector<double> operator()(const std::vector<double>& values) {
    for (int y = 0; y < h_; ++y) {
      double row = 0.0;
      for (int x = 0; x < w_; ++x) {
        row += values[static_cast<std::size_t>(y) * w_ + x];
        cell(x + 1, y + 1) = cell(x + 1, y) + row;
      }
    }
    std::vector<double> out(values.size());
    for (int y = 0; y < h_; ++y) {
      const int y0 = std::max(y - r_, 0);
      const int y1 = std::min(y + r_ + 1, h_);
      for (int x = 0; x < w_; ++x) {
        const int x0 = std::max(x - r_, 0);
        const int x1 = std::min(x + r_ + 1, w_);
        out[static_cast<std::size_t>(y) * w_ + x] =
            cell(x1, y1) - cell(x0, y1) - cell(x1, y0) + cell(x0, y0);
      }
    }
    return out;
  }

 private:
  double& cell(int x, int y) {
    return table_[static_cast<std::size_t>(y) * (w_ + 1) + x];
  }

  int w_;
  int h_;
  int r_;
  std::vector<double> table_;
};

void clamp_magnitude(Displacement& d, double max_flow) {
  const double mag = std::hypot(d.dx, d.dy);
  if (mag > max_flow) {
    const double s = max_flow / mag;
    d.dx = static_cast<float>(d.dx * s);
    d.dy = static_cast<float>(d.dy * s);
  }
}

// Coarse flow field resampled to a finer level, displacements doubled.
FlowField upscale(const FlowField& coarse, int width, int height) {
  Plane dx(coarse.width(), coarse.height());
  Plane dy(coarse.width(), coarse.height());
  for (int y = 0; y < coarse.height(); ++y) {
    for (int x = 0; x < coarse.width(); ++x) {
      dx.at(x, y) = coarse.at(x, y).dx;
      dy.at(x, y) = coarse.at(x, y).dy;
    }
  }
  FlowField fine(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      // Coarse pixel i sits on fine pixel 2i.
      fine.at(x, y) = {static_cast<float>(2.0 * dx.bilinear(x * 0.5, y * 0.5)),
                       static_cast<float>(2.0 * dy.bilinear(x * 0.5, y * 0.5))};
    }
  }
  return fine;
}

Plane gradient_x(const Plane& p) {
  Plane g(p.width, p.height);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      g.at(x, y) = 0.5f * (p.clamped(x + 1, y) - p.clamped(x - 1, y));
    }
  }
  return g;
}

Plane gradient_y(const Plane& p) {
  Plane g(p.width, p.height);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      g.at(x, y) = 0.5f * (p.clamped(x, y + 1) - p.clamped(x, y - 1));
    }
  }
  return g;
}

// Each iteration fits one displacement per window by least squares, with
// every sample linearized around its own current flow:
//   G u = sum(g g^T d_q) - sum(g r_q),   r_q = b(q + d_q) - a(q).
// The gradient g is the mean of the gradients of a and of b at the displaced
// position. Samples whose displaced position leaves the frame, or whose
// gradient needs an out-of-frame neighbour, are dropped.
void refine_level(const Plane& a, const Plane& b, FlowField& flow,
                  const PyramidConfig& cfg) {
  const int w = a.width;
  const int h = a.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  const Plane ax = gradient_x(a);
  const Plane ay = gradient_y(a);
  const Plane bx = gradient_x(b);
  const Plane by = gradient_y(b);

  BoxSum box(w, h, cfg.window_radius);
  std::vector<double> gxx(n), gxy(n), gyy(n), ex(n), ey(n);
  for (int iter = 0; iter < cfg.iterations_per_level; ++iter) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const Displacement d = flow.at(x, y);
        const double sx = x + d.dx;
        const double sy = y + d.dy;
        const bool inside = x > 0 && x < w - 1 && y > 0 && y < h - 1 &&
                            sx >= 1.0 && sx <= w - 2.0 && sy >= 1.0 && sy <= h - 2.0;
        if (!inside) {
          gxx[i] = gxy[i] = gyy[i] = ex[i] = ey[i] = 0.0;
          continue;
        }
        const double gx = 0.5 * (ax.at(x, y) + bx.bilinear(sx, sy));
        const double gy = 0.5 * (ay.at(x, y) + by.bilinear(sx, sy));
        const double diff = b.bilinear(sx, sy) - a.at(x, y);
        gxx[i] = gx * gx;
        gxy[i] = gx * gy;
        gyy[i] = gy * gy;
        ex[i] = gxx[i] * d.dx + gxy[i] * d.dy - gx * diff;
        ey[i] = gxy[i] * d.dx + gyy[i] * d.dy - gy * diff;
      }
    }
    const auto sxx = box(gxx);
    const auto sxy = box(gxy);
    const auto syy = box(gyy);
    const auto sex = box(ex);
    const auto sey = box(ey);

    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const double p = sxx[i];
        const double q = sxy[i];
        const double r = syy[i];
        const double half_trace = 0.5 * (p + r);
        const double disc = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
        if (half_trace - disc < kMinEigenvalue) continue;
        const double det = p * r - q * q;
        Displacement& d = flow.at(x, y);
        d.dx = static_cast<float>((r * sex[i] - q * sey[i]) / det);
        d.dy = static_cast<float>((p * sey[i] - q * sex[i]) / det);
        clamp_magnitude(d, cfg.max_flow);
      }
    }
  }
}

void require_same_shape(const SrgbFrame& a, const SrgbFrame& b,
                        const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(
        std::string(what) + ": frame dimensions differ (" +
        std::to_string(a.width()) + "x" + std::to_string(a.height()) +
        " vs " + std::to_string(b.width()) + "x" +
        std::to_string(b.height()) + ")");
  }
}

}  // namespace

FlowField::FlowField(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("FlowField: dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * height, Displacement{});
}

FlowField FlowField::constant(int width, int height, Displacement d) {
  FlowField f(width, height);
  std::fill(f.data_.begin(), f.data_.end(), d);
  return f;
}

void PyramidConfig::validate() const {
  if (levels < 1) throw std::invalid_argument("PyramidConfig: levels must be >= 1");
  if (window_radius < 1) {
    throw std::invalid_argument("PyramidConfig: window_radius must be >= 1");
  }
  if (iterations_per_level < 1) {
    throw std::invalid_argument(
        "PyramidConfig: iterations_per_level must be >= 1");
  }
  if (!(max_flow > 0.0)) {
    throw std::invalid_argument("PyramidConfig: max_flow must be positive");
  }
}

FlowField estimate_flow(const SrgbFrame& a, const SrgbFrame& b,
                        const PyramidConfig& cfg) {
  cfg.validate();
  require_same_shape(a, b, "estimate_flow");
  const long min_side = 1L << cfg.levels;
  if (a.width() < min_side || a.height() < min_side) {
    throw std::invalid_argument(
        "estimate_flow: frames of " + std::to_string(a.width()) + "x" +
        std::to_string(a.height()) + " are too small for a " +
        std::to_string(cfg.levels) + "-level pyramid (need >= " +
        std::to_string(min_side) + " per side)");
  }

  const auto pa = build_pyramid(luma(a), cfg.levels);
  const auto pb = build_pyramid(luma(b), cfg.levels);

  FlowField flow(pa.back().width, pa.back().height);
  for (int level = cfg.levels - 1; level >= 0; --level) {
    const Plane& la = pa[static_cast<std::size_t>(level)];
    const Plane& lb = pb[static_cast<std::size_t>(level)];
    if (flow.width() != la.width || flow.height() != la.height) {
      flow = upscale(flow, la.width, la.height);
    }
    refine_level(la, lb, flow, cfg);
  }
  return flow;
}

SrgbFrame warp(const SrgbFrame& frame, const FlowField& flow, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("warp: t must lie in [0,1], got " +
                                std::to_string(t));
  }
  if (frame.width() != flow.width() || frame.height() != flow.height()) {
    throw std::invalid_argument("warp: flow and frame dimensions differ");
  }
  const int w = frame.width();
  const int h = frame.height();
  SrgbFrame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Displacement d = flow.at(x, y);
      const double sx = std::clamp(x + t * d.dx, 0.0, static_cast<double>(w - 1));
      const double sy = std::clamp(y + t * d.dy, 0.0, static_cast<double>(h - 1));
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int c = 0; c < 3; ++c) {
        const double top =
            frame.at(x0, y0, c) * (1.0 - fx) + frame.at(x1, y0, c) * fx;
        const double bottom =
            frame.at(x0, y1, c) * (1.0 - fx) + frame.at(x1, y1, c) * fx;
        out.at(x, y, c) = clip_unit(top * (1.0 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

SrgbFrame interpolate_midpoint(const SrgbFrame& a, const SrgbFrame& b,
                               const PyramidConfig& cfg) {
  require_same_shape(a, b, "interpolate_midpoint");
  const FlowField ab = estimate_flow(a, b, cfg);
  const FlowField ba = estimate_flow(b, a, cfg);
  // The midpoint pixel x sees a at x - ab/2 and b at x + ab/2; the opposite
  // flow evaluated at x stands in for the flow anchored at the midpoint.
  const SrgbFrame from_a = warp(a, ba, 0.5);
  const SrgbFrame from_b = warp(b, ab, 0.5);

  SrgbFrame out(a.width(), a.height());
  auto pa = from_a.data();
  auto pb = from_b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = clip_unit(0.5 * pa[i] + 0.5 * pb[i]);
  }
  return out;
}

std::vector<SrgbFrame> upsample_frame_rate(std::span<const SrgbFrame> frames,
                                           int factor,
                                           const PyramidConfig& cfg) {
  if (frames.size() < 2) {
    throw std::invalid_argument("upsample_frame_rate: need at least 2 frames");
  }
  if (factor < 2 || !std::has_single_bit(static_cast<unsigned>(factor))) {
    throw std::invalid_argument(
        "upsample_frame_rate: factor must be a power of two >= 2, got " +
        std::to_string(factor));
  }
  for (const auto& f : frames) require_same_shape(frames.front(), f, "upsample_frame_rate");

  std::vector<SrgbFrame> seq(frames.begin(), frames.end());
  for (int pass = factor; pass > 1; pass /= 2) {
    std::vector<SrgbFrame> next;
    next.reserve(seq.size() * 2 - 1);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      next.push_back(seq[i]);
      next.push_back(interpolate_midpoint(seq[i], seq[i + 1], cfg));
    }
    next.push_back(seq.back());
    seq = std::move(next);
  }
  return seq;
}

}  // namespace blursynth::interp
