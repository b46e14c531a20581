#pragma once

// Seeded generators for the planar test shapes and a moving-bump image
// sequence, each keeping its true generating parameters for oracle checks.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace electrogp {

enum class Shape { kGaussian, kParabola, kSpiral, kSine, kArc };

std::optional<Shape> parse_shape(std::string_view name);
std::string_view shape_name(Shape shape);

struct SyntheticData {
  Eigen::MatrixXd points;  // n x 2, noisy
  Eigen::MatrixXd clean;   // n x 2, on the curve
  std::vector<double> t;   // generating parameter per row
};

// Parameter range [t_lo, t_hi] of a shape.
std::pair<double, double> shape_range(Shape shape);
// Noise-free point on the shape at parameter t.
Eigen::Vector2d shape_point(Shape shape, double t);

SyntheticData simulate(Shape shape, std::size_t n, double noise_sd, std::uint64_t seed);

// Distance from p to the true curve over its full parameter range, by dense
// sampling followed by golden-section refinement around the closest sample.
double distance_to_shape(Shape shape, const Eigen::Vector2d& p);

struct ImageSequence {
  int width = 0;
  int height = 0;
  Eigen::MatrixXd frames;  // n x (width*height), noisy
  Eigen::MatrixXd clean;   // noise-free frames
  std::vector<double> t;   // time in [0,1], increasing with row index
};

// Gaussian bump of width `bump_sd` pixels sliding along a quarter-circle arc,
// n frames in time order with additive pixel noise.
ImageSequence simulate_image_sequence(std::size_t n, int width, int height, double bump_sd,
                                      double noise_sd, std::uint64_t seed);

}  // namespace electrogp
