#pragma once

// Coulomb repulsive process (Corp) on the unit interval.
//
// Points repel each other through the sine metric d(x, y) = sin(pi |x - y|),
// which wraps around at the ends of (0,1). The conditional density of a new
// point given existing ones is proportional to prod_j d(x, x_j)^(2r).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "electrogp/random.hpp"

namespace electrogp {

inline constexpr double kCoordClamp = 1e-12;

struct CorpConfig {
  double r = 1.0;              // repulsive strength
  int quad_points = 2048;      // trapezoid nodes per unit length
  double envelope_headroom = 1.05;
  double mode_tolerance = 1e-10;
  long max_rejections = 1'000'000;

  void validate() const;
};

// Strictly increasing coordinates inside (0,1).
class PointSet1D {
 public:
  PointSet1D() = default;
  // Validates (and clamps) the values, then sorts them. Ties are rejected.
  static PointSet1D from_unsorted(std::vector<double> xs);

  std::span<const double> values() const noexcept { return xs_; }
  std::size_t size() const noexcept { return xs_.size(); }
  double operator[](std::size_t i) const { return xs_[i]; }
  bool empty() const noexcept { return xs_.empty(); }

 private:
  explicit PointSet1D(std::vector<double> xs) : xs_(std::move(xs)) {}
  std::vector<double> xs_;
};

// Rejects NaN and values outside (0,1); values within kCoordClamp of an
// endpoint are pulled onto [kCoordClamp, 1 - kCoordClamp].
double validate_coordinate(double x);

// sin(pi |x - y|) evaluated through the shorter wraparound distance.
double sine_distance(double x, double y);

// 2r * sum_{i>j} log sin(pi |x_i - x_j|); -inf when two points coincide.
// Order of xs is irrelevant.
double joint_log_density(std::span<const double> xs, const CorpConfig& cfg);

// 2r * sum_j log sin(pi |x_new - x_j|), unnormalized.
double conditional_log_density(double x_new, std::span<const double> existing,
                               const CorpConfig& cfg);

// d/dx_i of joint_log_density: 2 r pi sum_{j != i} cot(pi (x_i - x_j)).
std::vector<double> joint_log_density_gradient(std::span<const double> xs,
                                               const CorpConfig& cfg);

// Exact sampler for the conditional of one new point given a fixed set.
//
// (0,1) is cut into the gaps between sorted existing points plus the
// wraparound gap. Gap masses come from trapezoid quadrature, a gap is picked
// multinomially, and the point is drawn inside it by rejection from a uniform
// envelope at envelope_headroom times the gap's mode height.
class ConditionalSampler {
 public:
  ConditionalSampler(std::span<const double> existing, const CorpConfig& cfg);

  double draw(Rng& rng) const;

  struct Gap {
    double lo = 0.0;  // unwrapped; the wraparound gap has hi > 1
    double hi = 0.0;
    double mode = 0.0;
    double log_mode_height = 0.0;
    double mass = 0.0;  // relative, normalized over gaps
  };
  const std::vector<Gap>& gaps() const noexcept { return gaps_; }

  // log density at an unwrapped position (period 1).
  double log_density(double u) const;

 private:
  std::vector<double> existing_;
  CorpConfig cfg_;
  std::vector<Gap> gaps_;
  std::vector<double> cumulative_;
};

// Sequential draw of n points: the first uniform, every later one exactly from
// its conditional given all previous draws. Returned sorted.
PointSet1D sample(std::size_t n, const CorpConfig& cfg, std::uint64_t seed);

// Same, but returning draws in the order they were generated.
std::vector<double> sample_sequence(std::size_t n, const CorpConfig& cfg, Rng& rng);

// Multivariate Corp: spherical coordinates in (0,1)^p map onto the unit
// sphere in R^(p+1).
std::vector<double> spherical_to_cartesian(std::span<const double> x);

// r * sum_j log ||Y(x_new) - Y(x_j)||^2; -inf when images coincide.
double multivariate_conditional_log_density(std::span<const double> x_new,
                                            const std::vector<std::vector<double>>& existing,
                                            const CorpConfig& cfg);

}  // namespace electrogp
