#include "electrogp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "electrogp/error.hpp"
#include "electrogp/random.hpp"

namespace electrogp {
namespace {

constexpr double kPi = std::numbers::pi;
// Parabola, sine and the Gaussian blob are rotated by 30 degrees.
const double kCos30 = std::cos(kPi / 6.0);
const double kSin30 = std::sin(kPi / 6.0);

Eigen::Vector2d rotate30(double a, double b) {
  return {kCos30 * a - kSin30 * b, kSin30 * a + kCos30 * b};
}

// Inverse arc-length table for the spiral, so its points are spread evenly
// along the curve instead of crowding the inner turn.
double spiral_t_from_arc_fraction(double u) {
  constexpr int kNodes = 4096;
  static const std::vector<double> cumulative = [] {
    std::vector<double> c(kNodes + 1, 0.0);
    for (int k = 1; k <= kNodes; ++k) {
      const double a = static_cast<double>(k - 1) / kNodes, b = static_cast<double>(k) / kNodes;
      c[k] = c[k - 1] + (shape_point(Shape::kSpiral, b) - shape_point(Shape::kSpiral, a)).norm();
    }
    for (double& v : c) v /= c.back();
    return c;
  }();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto k = std::clamp<std::ptrdiff_t>(it - cumulative.begin(), 1, kNodes);
  const double c0 = cumulative[k - 1], c1 = cumulative[k];
  const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
  return (static_cast<double>(k - 1) + frac) / kNodes;
}

}  // namespace

std::optional<Shape> parse_shape(std::string_view name) {
  if (name == "gaussian") return Shape::kGaussian;
  if (name == "parabola") return Shape::kParabola;
  if (name == "spiral") return Shape::kSpiral;
  if (name == "sine") return Shape::kSine;
  if (name == "arc") return Shape::kArc;
  return std::nullopt;
}

std::string_view shape_name(Shape shape) {
  switch (shape) {
    case Shape::kGaussian: return "gaussian";
    case Shape::kParabola: return "parabola";
    case Shape::kSpiral: return "spiral";
    case Shape::kSine: return "sine";
    case Shape::kArc: return "arc";
  }
  return "unknown";
}

std::pair<double, double> shape_range(Shape shape) {
  switch (shape) {
    case Shape::kGaussian: return {-5.0, 5.0};
    case Shape::kParabola:
    case Shape::kSine: return {-1.0, 1.0};
    case Shape::kSpiral:
    case Shape::kArc: return {0.0, 1.0};
  }
  return {0.0, 1.0};
}

Eigen::Vector2d shape_point(Shape shape, double t) {
  switch (shape) {
    case Shape::kGaussian: return rotate30(t, 0.0);
    case Shape::kParabola: return rotate30(t, t * t);
    case Shape::kSine: return rotate30(t, 0.5 * std::sin(kPi * t));
    case Shape::kSpiral: {
      const double angle = 3.0 * kPi * t;  // 1.5 turns
      const double radius = 0.3 + 1.7 * t;
      return {radius * std::cos(angle), radius * std::sin(angle)};
    }
    case Shape::kArc: return {std::cos(kPi * t), std::sin(kPi * t)};
  }
  return {0.0, 0.0};
}

SyntheticData simulate(Shape shape, std::size_t n, double noise_sd, std::uint64_t seed) {
  if (n < 3) throw ValidationError("simulate: n must be at least 3");
  if (!(noise_sd >= 0.0)) throw ValidationError("simulate: noise_sd must be nonnegative");
  Rng rng = make_rng(seed);
  const auto [lo, hi] = shape_range(shape);

  SyntheticData out;
  out.points.resize(static_cast<Eigen::Index>(n), 2);
  out.clean.resize(static_cast<Eigen::Index>(n), 2);
  out.t.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = 0.0;
    if (shape == Shape::kGaussian) t = standard_normal(rng);
    else if (shape == Shape::kSpiral)
      t = spiral_t_from_arc_fraction((static_cast<double>(i) + uniform_open(rng)) / static_cast<double>(n));
    else t = lo + (hi - lo) * uniform_open(rng);
    const Eigen::Vector2d c = shape_point(shape, t);
    const double e1 = standard_normal(rng);
    const double e2 = standard_normal(rng);
    const auto r = static_cast<Eigen::Index>(i);
    out.t[i] = t;
    out.clean.row(r) = c.transpose();
    out.points(r, 0) = c[0] + noise_sd * e1;
    out.points(r, 1) = c[1] + noise_sd * e2;
  }
  return out;
}

double distance_to_shape(Shape shape, const Eigen::Vector2d& p) {
  const auto [lo, hi] = shape_range(shape);
  constexpr int kSamples = 20000;
  const double step = (hi - lo) / kSamples;
  auto dist = [&](double t) { return (shape_point(shape, t) - p).norm(); };
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kSamples; ++k) {
    const double dk = dist(lo + step * k);
    if (dk < best_d) {
      best_d = dk;
      best = k;
    }
  }
  double a = lo + step * std::max(best - 1, 0);
  double b = lo + step * std::min(best + 1, kSamples);
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = dist(c), fd = dist(d);
  while (b - a > 1e-12) {
    if (fc <= fd) {
      b = d; d = c; fd = fc;
      c = b - kInvPhi * (b - a); fc = dist(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + kInvPhi * (b - a); fd = dist(d);
    }
  }
  return std::min(best_d, dist(0.5 * (a + b)));
}

ImageSequence simulate_image_sequence(std::size_t n, int width, int height, double bump_sd,
                                      double noise_sd, std::uint64_t seed) {
  if (n < 3 || width < 2 || height < 2) throw ValidationError("image sequence: invalid size");
  Rng rng = make_rng(seed);
  ImageSequence seq;
  seq.width = width;
  seq.height = height;
  const Eigen::Index pixels = static_cast<Eigen::Index>(width) * height;
  seq.frames.resize(static_cast<Eigen::Index>(n), pixels);
  seq.clean.resize(static_cast<Eigen::Index>(n), pixels);
  seq.t.resize(n);

  // Quarter circle from the top-left towards the bottom-right of the frame.
  const double cx = 0.1 * width, cy = 0.85 * height;
  const double radius = 0.7 * std::min(width, height);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    const double angle = -0.5 * kPi + 0.5 * kPi * t;
    const double bx = cx + radius * std::cos(angle);
    const double by = cy + radius * std::sin(angle);
    seq.t[i] = t;
    const auto r = static_cast<Eigen::Index>(i);
    for (int py = 0; py < height; ++py) {
      for (int px = 0; px < width; ++px) {
        const double dx = px - bx, dy = py - by;
        const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * bump_sd * bump_sd));
        const Eigen::Index c = static_cast<Eigen::Index>(py) * width + px;
        seq.clean(r, c) = v;
        seq.frames(r, c) = v + noise_sd * standard_normal(rng);
      }
    }
  }
  return seq;
}

}  // namespace electrogp
