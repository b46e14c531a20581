#include "electrogp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "electrogp/error.hpp"
#include "electrogp/parallel.hpp"
#include "electrogp/random.hpp"

namespace electrogp {

CurveEstimate mean_curve(const FittedModel& model, std::size_t n_mu) {
  if (n_mu < 2) throw ValidationError("mean_curve: n_mu must be at least 2");
  CurveEstimate curve;
  curve.grid.resize(n_mu);
  for (std::size_t i = 0; i < n_mu; ++i)
    curve.grid[i] = static_cast<double>(i) / static_cast<double>(n_mu - 1);
  curve.grid.back() = 1.0;

  const std::size_t d = model.d();
  curve.vertices.resize(static_cast<Eigen::Index>(n_mu), static_cast<Eigen::Index>(d));
  Eigen::VectorXd mean, var;
  for (std::size_t j = 0; j < d; ++j) {
    model.per_dim()[j].posterior_mean_var(curve.grid, mean, var);
    curve.vertices.col(static_cast<Eigen::Index>(j)) = mean.array() + model.centering()[j];
  }
  return curve;
}

double point_to_polyline_distance(std::span<const double> p, const Eigen::MatrixXd& vertices) {
  if (vertices.rows() < 1) throw ValidationError("polyline distance: curve has no vertices");
  if (static_cast<Eigen::Index>(p.size()) != vertices.cols())
    throw ValidationError("polyline distance: dimension mismatch");
  const Eigen::Map<const Eigen::RowVectorXd> point(p.data(), static_cast<Eigen::Index>(p.size()));

  double best = (point - vertices.row(0)).squaredNorm();
  for (Eigen::Index s = 0; s + 1 < vertices.rows(); ++s) {
    const auto a = vertices.row(s);
    const Eigen::RowVectorXd ab = vertices.row(s + 1) - a;
    const Eigen::RowVectorXd ap = point - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? ap.dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, (ap - t * ab).squaredNorm());
  }
  return std::sqrt(best);
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::ceil(q * static_cast<double>(values.size()));
  const auto idx = static_cast<std::size_t>(
      std::clamp(pos - 1.0, 0.0, static_cast<double>(values.size() - 1)));
  return values[idx];
}

UncertaintyBand uncertainty_band(const FittedModel& model, const CurveEstimate& curve,
                                 const BandSettings& settings) {
  if (!(settings.eta > 0.0 && settings.eta < 1.0))
    throw ValidationError("uncertainty_band: eta must lie in (0,1)");
  if (settings.n1 * settings.n2 < 20)
    throw ValidationError("uncertainty_band: n1 * n2 must be at least 20");

  const std::size_t n1 = settings.n1;
  const std::size_t d = model.d();
  UncertaintyBand band;
  band.eta = settings.eta;
  band.n1 = n1;
  band.n2 = settings.n2;
  band.seed = settings.seed;
  band.sample_distances.assign(n1 * settings.n2, 0.0);

  parallel_for(settings.n2, [&](std::size_t rep) {
    Rng rng = make_rng(settings.seed, rep);
    std::vector<double> xs(n1);
    for (double& x : xs) x = uniform_open(rng);

    Eigen::MatrixXd ys(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
      const GPDim& dim = model.per_dim()[j];
      PosteriorMoments mom = dim.posterior_moments(xs);
      // Predictive for observations: add the noise variance.
      mom.cov.diagonal().array() += dim.params().sigma2() + dim.jitter();
      Eigen::LLT<Eigen::MatrixXd> llt(mom.cov);
      double extra = 1e-12 * dim.params().phi();
      while (llt.info() != Eigen::Success && extra < dim.params().phi()) {
        mom.cov.diagonal().array() += extra;
        llt.compute(mom.cov);
        extra *= 10.0;
      }
      if (llt.info() != Eigen::Success)
        throw NumericalError("uncertainty_band: predictive covariance is not positive definite");
      Eigen::VectorXd z(static_cast<Eigen::Index>(n1));
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
      ys.col(static_cast<Eigen::Index>(j)) =
          (mom.mean + llt.matrixL() * z).array() + model.centering()[j];
    }

    std::vector<double> row(d);
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < d; ++j)
        row[j] = ys(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      band.sample_distances[rep * n1 + i] = point_to_polyline_distance(row, curve);
    }
  });

  band.rho = empirical_quantile(band.sample_distances, settings.eta);
  return band;
}

PartialObservation PartialObservation::from_record(std::span<const double> record) {
  PartialObservation obs;
  for (std::size_t j = 0; j < record.size(); ++j) {
    if (std::isnan(record[j])) {
      obs.missing_dims.push_back(j);
    } else {
      obs.observed_dims.push_back(j);
      obs.observed_values.push_back(record[j]);
    }
  }
  return obs;
}

void PartialObservation::validate(std::size_t d) const {
  if (observed_dims.size() != observed_values.size())
    throw ValidationError("partial observation: observed dims and values differ in length");
  std::vector<int> seen(d, 0);
  for (std::size_t j : observed_dims) {
    if (j >= d) throw ValidationError("partial observation: dimension index out of range");
    ++seen[j];
  }
  for (std::size_t j : missing_dims) {
    if (j >= d) throw ValidationError("partial observation: dimension index out of range");
    ++seen[j];
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }))
    throw ValidationError("partial observation: observed and missing dims must partition 0..d-1");
  for (double v : observed_values)
    if (!std::isfinite(v)) throw ValidationError("partial observation: non-finite observed value");
}

Eigen::VectorXd latent_log_posterior(const FittedModel& model, const PartialObservation& obs,
                                     std::span<const double> xs) {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(xs.size()));
  Eigen::VectorXd mean, var;
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < obs.observed_dims.size(); ++k) {
    const std::size_t j = obs.observed_dims[k];
    const GPDim& dim = model.per_dim()[j];
    dim.posterior_mean_var(xs, mean, var);
    const double z = obs.observed_values[k] - model.centering()[j];
    const Eigen::ArrayXd s2 = var.array() + dim.params().sigma2();
    total.array() += -0.5 * (log2pi + s2.log()) - 0.5 * (z - mean.array()).square() / s2;
  }
  return total;
}

double latent_log_posterior(const FittedModel& model, const PartialObservation& obs, double x) {
  const double xs[1] = {x};
  return latent_log_posterior(model, obs, xs)[0];
}

LatentPosterior predict_latent_map(const FittedModel& model, const PartialObservation& obs,
                                   const MapSettings& settings) {
  obs.validate(model.d());
  if (obs.observed_dims.empty())
    throw ValidationError("predict_latent_map: at least one observed dimension is required");
  const std::size_t g = settings.grid_points;
  if (g < 3) throw ValidationError("predict_latent_map: grid needs at least 3 points");

  std::vector<double> grid(g);
  for (std::size_t i = 0; i < g; ++i) grid[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(g);
  const Eigen::VectorXd lp = latent_log_posterior(model, obs, grid);

  Eigen::Index best = 0;
  const double best_value = lp.maxCoeff(&best);
  LatentPosterior out;

  if (best_value - lp.minCoeff() < 1e-12) {
    out.mode = grid[static_cast<std::size_t>(best)];
    out.multimodal = true;
    return out;
  }

  // Competing local maxima on the scan.
  const auto last = static_cast<Eigen::Index>(g - 1);
  for (Eigen::Index i = 0; i <= last; ++i) {
    if (i == best) continue;
    const bool left_ok = i == 0 || lp[i] >= lp[i - 1];
    const bool right_ok = i == last || lp[i] > lp[i + 1];
    if (left_ok && right_ok && lp[i] >= best_value - settings.competing_mode_log_ratio) {
      // Skip shoulders of the best peak: there must be a dip in between.
      const Eigen::Index lo = std::min(i, best), hi = std::max(i, best);
      const double valley = lp.segment(lo, hi - lo + 1).minCoeff();
      if (valley < std::min(lp[i], best_value) - 1e-9) out.multimodal = true;
    }
  }

  // Golden-section refinement between the neighbouring grid nodes.
  const double lo = best > 0 ? grid[static_cast<std::size_t>(best - 1)] : 0.5 * grid.front();
  const double hi = best < last ? grid[static_cast<std::size_t>(best + 1)]
                                : 0.5 * (1.0 + grid.back());
  constexpr double kInvPhi = 0.6180339887498949;
  auto f = [&](double x) { return latent_log_posterior(model, obs, x); };
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), dd = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(dd);
  while (b - a > settings.refine_tol) {
    if (fc >= fd) {
      b = dd; dd = c; fd = fc;
      c = b - kInvPhi * (b - a); fc = f(c);
    } else {
      a = c; c = dd; fc = fd;
      dd = a + kInvPhi * (b - a); fd = f(dd);
    }
  }
  const double refined = 0.5 * (a + b);
  out.mode = f(refined) >= best_value ? refined : grid[static_cast<std::size_t>(best)];
  return out;
}

LatentPosterior predict_latent_mh(const FittedModel& model, const PartialObservation& obs,
                                  const MhSettings& settings) {
  obs.validate(model.d());
  if (settings.n_samples < 1) throw ValidationError("predict_latent_mh: n_samples must be >= 1");

  Rng rng = make_rng(settings.seed);
  double current = uniform_open(rng);
  double current_lp = latent_log_posterior(model, obs, current);
  LatentPosterior out;
  out.samples.reserve(settings.n_samples);
  std::size_t accepted = 0;
  const std::size_t total = settings.burn_in + settings.n_samples;
  for (std::size_t it = 0; it < total; ++it) {
    const double proposal = uniform_open(rng);
    const double proposal_lp = latent_log_posterior(model, obs, proposal);
    // Uniform proposal = uniform prior, so the ratio is the likelihood ratio.
    const double log_u = std::log(uniform_open(rng));
    if (log_u < proposal_lp - current_lp) {
      current = proposal;
      current_lp = proposal_lp;
      if (it >= settings.burn_in) ++accepted;
    }
    if (it >= settings.burn_in) out.samples.push_back(current);
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(settings.n_samples);
  out.low_acceptance = out.acceptance_rate < 1e-3;
  double sum = 0.0;
  for (double s : out.samples) sum += s;
  out.mode = sum / static_cast<double>(out.samples.size());
  return out;
}

Reconstruction reconstruct_missing(const FittedModel& model, const PartialObservation& obs,
                                   const LatentPosterior& latent) {
  obs.validate(model.d());
  Reconstruction out;
  out.dims = obs.missing_dims;
  const auto m = static_cast<Eigen::Index>(obs.missing_dims.size());
  out.mean = Eigen::VectorXd::Zero(m);
  out.cov = Eigen::MatrixXd::Zero(m, m);
  if (m == 0) return out;

  std::vector<double> xs = latent.samples;
  if (xs.empty()) xs.push_back(latent.mode);
  const auto s = static_cast<Eigen::Index>(xs.size());

  Eigen::MatrixXd means(s, m);
  Eigen::VectorXd mean, var;
  for (Eigen::Index k = 0; k < m; ++k) {
    const std::size_t j = obs.missing_dims[static_cast<std::size_t>(k)];
    const GPDim& dim = model.per_dim()[j];
    dim.posterior_mean_var(xs, mean, var);
    means.col(k) = mean.array() + model.centering()[j];
    out.cov(k, k) = var.mean() + dim.params().sigma2();
  }
  out.mean = means.colwise().mean().transpose();
  if (s > 1) {
    const Eigen::MatrixXd dev = means.rowwise() - out.mean.transpose();
    out.cov += dev.transpose() * dev / static_cast<double>(s);
  }
  return out;
}

}  // namespace electrogp
