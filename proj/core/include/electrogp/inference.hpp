#pragma once

// Posterior summaries of a fitted model: mean curve, uncertainty band, and
// reconstruction of partially observed records.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "electrogp/model.hpp"

namespace electrogp {

struct CurveEstimate {
  std::vector<double> grid;  // (i-1)/(n_mu-1), i = 1..n_mu
  Eigen::MatrixXd vertices;  // n_mu x d posterior means, centering added back

  std::size_t size() const noexcept { return grid.size(); }
};

CurveEstimate mean_curve(const FittedModel& model, std::size_t n_mu);

// Exact Euclidean distance from p to the piecewise-linear curve through the
// vertices (rows).
double point_to_polyline_distance(std::span<const double> p, const Eigen::MatrixXd& vertices);
inline double point_to_polyline_distance(std::span<const double> p, const CurveEstimate& curve) {
  return point_to_polyline_distance(p, curve.vertices);
}

struct BandSettings {
  double eta = 0.95;
  std::size_t n1 = 100;
  std::size_t n2 = 50;
  std::uint64_t seed = 0;
};

struct UncertaintyBand {
  double eta = 0.0;
  double rho = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::uint64_t seed = 0;
  std::vector<double> sample_distances;  // n1 * n2, in draw order
};

// Smallest sample value v with empirical CDF(v) >= q.
double empirical_quantile(std::vector<double> values, double q);

UncertaintyBand uncertainty_band(const FittedModel& model, const CurveEstimate& curve,
                                 const BandSettings& settings);

// A partially observed record in data space (uncentered). Missing entries are NaN.
struct PartialObservation {
  std::vector<std::size_t> observed_dims;
  std::vector<double> observed_values;
  std::vector<std::size_t> missing_dims;

  // Splits a full-length record on NaN entries.
  static PartialObservation from_record(std::span<const double> record);
  void validate(std::size_t d) const;
};

struct LatentPosterior {
  double mode = 0.0;             // MAP estimate, or chain mean for MH
  std::vector<double> samples;   // empty for MAP
  double acceptance_rate = 1.0;
  bool multimodal = false;       // MAP scan found a competing mode or a flat posterior
  bool low_acceptance = false;   // MH acceptance below 0.1%
};

// Unnormalized log p(x | z^O, fitted model) under the Unif(0,1) prior on x:
// sum over observed j of log N(z_j; m_j(x), v_j(x) + sigma2_j).
double latent_log_posterior(const FittedModel& model, const PartialObservation& obs, double x);
Eigen::VectorXd latent_log_posterior(const FittedModel& model, const PartialObservation& obs,
                                     std::span<const double> xs);

struct MapSettings {
  std::size_t grid_points = 1024;
  double refine_tol = 1e-8;
  double competing_mode_log_ratio = 0.6931471805599453;  // log 2
};

LatentPosterior predict_latent_map(const FittedModel& model, const PartialObservation& obs,
                                   const MapSettings& settings = {});

struct MhSettings {
  std::size_t n_samples = 5000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
};

// Independence Metropolis-Hastings with a Unif(0,1) proposal.
LatentPosterior predict_latent_mh(const FittedModel& model, const PartialObservation& obs,
                                  const MhSettings& settings);

struct Reconstruction {
  std::vector<std::size_t> dims;  // the missing dims, in obs order
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Gaussian for z^M given the latent estimate; a sampled latent yields the
// moment-matched mixture (mean, total covariance).
Reconstruction reconstruct_missing(const FittedModel& model, const PartialObservation& obs,
                                   const LatentPosterior& latent);

}  // namespace electrogp
