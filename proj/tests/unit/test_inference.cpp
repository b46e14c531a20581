#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "electrogp/error.hpp"
#include "electrogp/inference.hpp"
#include "electrogp/model.hpp"
#include "electrogp/synthetic.hpp"
#include "unit/oracles.hpp"

using namespace electrogp;

namespace {

const FittedModel& parabola_model() {
  static const FittedModel model = [] {
    const SyntheticData syn = simulate(Shape::kParabola, 100, 0.05, 3);
    FitSettings s;
    s.center = true;
    return fit(syn.points, s);
  }();
  return model;
}

// Noise-free arc; fitted noise ends up at the floor.
const FittedModel& clean_arc_model() {
  static const FittedModel model = [] {
    const SyntheticData syn = simulate(Shape::kArc, 30, 0.0, 5);
    FitSettings s;
    s.center = true;
    return fit(syn.points, s);
  }();
  return model;
}

FittedModel manual_model(const std::vector<double>& latent, const Eigen::MatrixXd& data,
                         KernelParams params) {
  HyperParams theta;
  theta.dims.assign(static_cast<std::size_t>(data.cols()), params);
  return FittedModel(data, LatentConfig(latent), theta, {}, {});
}

std::span<const double> row_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

TEST_CASE("prior-only model has a zero mean curve") {
  const FittedModel m(Eigen::MatrixXd(0, 3), LatentConfig(), HyperParams{{KernelParams::natural(1, 1, 1),
                                                                          KernelParams::natural(1, 1, 1),
                                                                          KernelParams::natural(1, 1, 1)}},
                      {}, {});
  const CurveEstimate c = mean_curve(m, 17);
  REQUIRE(c.size() == 17);
  CHECK(c.grid.front() == 0.0);
  CHECK(c.grid.back() == 1.0);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.grid[i] > c.grid[i - 1]);
  CHECK(c.vertices.norm() == 0.0);
  CHECK_THROWS_AS(mean_curve(m, 1), ValidationError);
}

TEST_CASE("curve interpolates a nearly noise-free training point on a grid node") {
  Eigen::MatrixXd data(3, 2);
  data << 0.4, -1.0, 1.3, 0.2, -0.7, 0.9;
  const FittedModel m = manual_model({0.2, 0.5, 0.8}, data, KernelParams::natural(1.0, 20.0, 1e-9));
  const CurveEstimate c = mean_curve(m, 11);
  CHECK(std::abs(c.grid[5] - 0.5) < 1e-15);
  CHECK((c.vertices.row(5) - data.row(1)).norm() < 1e-4);
}

TEST_CASE("parabola mean curve stays within three noise deviations of the truth") {
  const FittedModel& m = parabola_model();
  const CurveEstimate c = mean_curve(m, 512);
  const auto [lo, hi] = std::minmax_element(m.latent().values().begin(), m.latent().values().end());
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.grid[i] < *lo || c.grid[i] > *hi) continue;
    worst = std::max(worst, distance_to_shape(Shape::kParabola, c.vertices.row(static_cast<Eigen::Index>(i)).transpose()));
  }
  CHECK(worst <= 0.15);
}

TEST_CASE("mean curve is deterministic") {
  const CurveEstimate a = mean_curve(parabola_model(), 64), b = mean_curve(parabola_model(), 64);
  CHECK(a.vertices == b.vertices);
}

TEST_CASE("point to polyline examples") {
  Eigen::MatrixXd seg(2, 2);
  seg << 0.0, 0.0, 1.0, 0.0;
  CHECK(point_to_polyline_distance(std::vector<double>{0.0, 1.0}, seg) == 1.0);
  CHECK(point_to_polyline_distance(std::vector<double>{2.0, 0.0}, seg) == 1.0);
  CHECK(point_to_polyline_distance(std::vector<double>{0.5, -0.25}, seg) == 0.25);
  Eigen::MatrixXd poly(3, 2);
  poly << 0.0, 0.0, 1.0, 1.0, 2.0, 0.0;
  CHECK(point_to_polyline_distance(std::vector<double>{1.0, 1.0}, poly) == 0.0);
  CHECK_THROWS_AS(point_to_polyline_distance(std::vector<double>{1.0}, poly), ValidationError);
}

TEST_CASE("point to polyline agrees with dense sampling and the vertex bound") {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    Eigen::MatrixXd poly(6, d);
    for (Eigen::Index i = 0; i < poly.size(); ++i) poly.data()[i] = z(gen);
    Eigen::VectorXd p(d);
    for (int k = 0; k < d; ++k) p[k] = 2.0 * z(gen);

    const int samples = 100000;
    const int per_segment = samples / 5;
    double brute = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 5; ++s) {
      for (int k = 0; k <= per_segment; ++k) {
        const double t = static_cast<double>(k) / per_segment;
        const Eigen::VectorXd q = ((1 - t) * poly.row(s) + t * poly.row(s + 1)).transpose();
        brute = std::min(brute, (q - p).norm());
      }
    }
    const double exact = point_to_polyline_distance(row_span(p), poly);
    CHECK(exact <= brute + 1e-12);
    CHECK(brute - exact < 1e-6);
    for (Eigen::Index v = 0; v < poly.rows(); ++v)
      CHECK(exact <= (poly.row(v).transpose() - p).norm() + 1e-15);
  }
}

TEST_CASE("empirical quantile") {
  const std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(empirical_quantile(v, 0.2) == 1);
  CHECK(empirical_quantile(v, 0.21) == 2);
  CHECK(empirical_quantile(v, 0.5) == 3);
  CHECK(empirical_quantile(v, 1.0) == 5);
  CHECK(empirical_quantile(v, 0.999999) == 5);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), ValidationError);
}

TEST_CASE("band settings are validated") {
  const CurveEstimate c = mean_curve(parabola_model(), 32);
  CHECK_THROWS_AS(uncertainty_band(parabola_model(), c, {.eta = 1.0}), ValidationError);
  CHECK_THROWS_AS(uncertainty_band(parabola_model(), c, {.eta = 0.0}), ValidationError);
  CHECK_THROWS_AS(uncertainty_band(parabola_model(), c, {.eta = 0.5, .n1 = 4, .n2 = 4}), ValidationError);
}

TEST_CASE("band radius is the quantile of the pooled sample") {
  const CurveEstimate c = mean_curve(parabola_model(), 256);
  const UncertaintyBand band = uncertainty_band(parabola_model(), c, {.eta = 0.95, .n1 = 40, .n2 = 10, .seed = 9});
  REQUIRE(band.sample_distances.size() == 400);
  CHECK(band.rho == empirical_quantile(band.sample_distances, 0.95));
  CHECK(band.rho >= 0.0);
  double previous = 0.0;
  for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999999}) {
    const double rho = empirical_quantile(band.sample_distances, eta);
    CHECK(rho >= previous);
    previous = rho;
  }
  CHECK(previous == *std::max_element(band.sample_distances.begin(), band.sample_distances.end()));

  const UncertaintyBand again = uncertainty_band(parabola_model(), c, {.eta = 0.95, .n1 = 40, .n2 = 10, .seed = 9});
  CHECK(again.sample_distances == band.sample_distances);
  const UncertaintyBand other = uncertainty_band(parabola_model(), c, {.eta = 0.95, .n1 = 40, .n2 = 10, .seed = 10});
  CHECK(other.sample_distances != band.sample_distances);
}

TEST_CASE("band shrinks with the noise") {
  const std::size_t n = 40;
  Eigen::MatrixXd data(n, 2);
  std::vector<double> latent(n);
  for (std::size_t i = 0; i < n; ++i) {
    latent[i] = (i + 0.5) / n;
    data.row(static_cast<Eigen::Index>(i)) << std::cos(latent[i]), std::sin(latent[i]);
  }
  double previous = std::numeric_limits<double>::infinity();
  for (double sigma2 : {1e-2, 1e-4, 1e-6}) {
    const FittedModel m = manual_model(latent, data, KernelParams::natural(1.0, 5.0, sigma2));
    const UncertaintyBand band = uncertainty_band(m, mean_curve(m, 512), {.eta = 0.95, .n1 = 50, .n2 = 10, .seed = 1});
    CHECK(band.rho < previous);
    previous = band.rho;
  }
  CHECK(previous < 5e-3);
}

TEST_CASE("band covers about 95% of fresh parabola points") {
  const FittedModel& m = parabola_model();
  const CurveEstimate c = mean_curve(m, 512);
  const UncertaintyBand band = uncertainty_band(m, c, {.eta = 0.95, .n1 = 100, .n2 = 50, .seed = 2024});
  const SyntheticData fresh = simulate(Shape::kParabola, 500, 0.05, 99);
  int inside = 0;
  for (Eigen::Index i = 0; i < 500; ++i) {
    const Eigen::VectorXd p = fresh.points.row(i).transpose();
    inside += point_to_polyline_distance(row_span(p), c) <= band.rho;
  }
  const double coverage = inside / 500.0;
  CHECK(coverage >= 0.88);
  CHECK(coverage <= 0.99);
}

TEST_CASE("partial observations") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const PartialObservation obs = PartialObservation::from_record(std::vector<double>{1.0, nan, 3.0});
  CHECK(obs.observed_dims == std::vector<std::size_t>{0, 2});
  CHECK(obs.observed_values == std::vector<double>{1.0, 3.0});
  CHECK(obs.missing_dims == std::vector<std::size_t>{1});
  CHECK_NOTHROW(obs.validate(3));
  CHECK_THROWS_AS(obs.validate(2), ValidationError);
  PartialObservation dup = obs;
  dup.missing_dims = {0};
  CHECK_THROWS_AS(dup.validate(3), ValidationError);
}

TEST_CASE("MAP latent of a training row recovers its fitted coordinate") {
  const FittedModel& m = clean_arc_model();
  for (std::size_t i = 0; i < m.n(); i += 5) {
    const Eigen::VectorXd row = m.data().row(static_cast<Eigen::Index>(i)).transpose();
    const PartialObservation obs = PartialObservation::from_record(row_span(row));
    const LatentPosterior post = predict_latent_map(m, obs);
    CHECK(std::abs(post.mode - m.latent()[i]) < 0.01);
    CHECK_FALSE(post.multimodal);
  }
}

TEST_CASE("MAP mode dominates the scan grid") {
  const FittedModel& m = parabola_model();
  const Eigen::VectorXd row = m.data().row(17).transpose();
  const PartialObservation obs = PartialObservation::from_record(row_span(row));
  const LatentPosterior post = predict_latent_map(m, obs);
  std::vector<double> grid(1024);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = (i + 0.5) / 1024.0;
  const double at_mode = latent_log_posterior(m, obs, post.mode);
  CHECK(at_mode >= latent_log_posterior(m, obs, grid).maxCoeff());
  CHECK(post.mode > 0.0);
  CHECK(post.mode < 1.0);
}

TEST_CASE("symmetric curve gives two modes and a flag") {
  const std::size_t n = 41;
  std::vector<double> latent(n);
  Eigen::MatrixXd data(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    latent[i] = (i + 0.5) / n;
    data(static_cast<Eigen::Index>(i), 0) = std::cos(2.0 * std::numbers::pi * (latent[i] - 0.5));
  }
  const FittedModel m = manual_model(latent, data, KernelParams::natural(1.0, 20.0, 1e-3));
  const LatentPosterior post = predict_latent_map(m, PartialObservation::from_record(std::vector<double>{0.0}));
  CHECK(post.multimodal);
  CHECK(std::min(std::abs(post.mode - 0.25), std::abs(post.mode - 0.75)) < 0.02);
}

TEST_CASE("flat posterior is flagged") {
  // Every training target zero and a huge noise: the observation carries no information.
  const FittedModel m = manual_model({0.3, 0.6}, Eigen::MatrixXd::Zero(2, 1), KernelParams::natural(1e-12, 1.0, 1e6));
  const LatentPosterior post = predict_latent_map(m, PartialObservation::from_record(std::vector<double>{0.0}));
  CHECK(post.multimodal);
  CHECK_THROWS_AS(predict_latent_map(m, PartialObservation::from_record(std::vector<double>{std::nan("")})),
                  ValidationError);
}

TEST_CASE("MH with nothing observed accepts every proposal") {
  const FittedModel& m = parabola_model();
  const PartialObservation obs{{}, {}, {0, 1}};
  const LatentPosterior post = predict_latent_mh(m, obs, {.n_samples = 500, .burn_in = 10, .seed = 1});
  CHECK(post.acceptance_rate == 1.0);
  CHECK_FALSE(post.low_acceptance);
  CHECK(post.samples.size() == 500);
}

TEST_CASE("MH chain matches the quadrature-normalized target") {
  // Large noise keeps the target broad so the chain mixes.
  const std::size_t n = 20;
  std::vector<double> latent(n);
  Eigen::MatrixXd data(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    latent[i] = (i + 0.5) / n;
    data.row(static_cast<Eigen::Index>(i)) << std::sin(3.0 * latent[i]), latent[i];
  }
  const FittedModel m = manual_model(latent, data, KernelParams::natural(0.5, 4.0, 0.3));
  const PartialObservation obs{{0}, {0.6}, {1}};
  const LatentPosterior post = predict_latent_mh(m, obs, {.n_samples = 10000, .burn_in = 1000, .seed = 8});
  CHECK(post.acceptance_rate > 0.5);
  const double peak = latent_log_posterior(m, obs, 0.5);
  const oracle::GridCdf cdf([&](double x) { return std::exp(latent_log_posterior(m, obs, x) - peak); }, 20000);
  CHECK(oracle::ks_distance(post.samples, [&](double x) { return cdf(x); }) < 0.05);
  for (double x : post.samples) {
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  double mean = 0.0;
  for (double x : post.samples) mean += x;
  CHECK(post.mode == doctest::Approx(mean / static_cast<double>(post.samples.size())));
}

TEST_CASE("MH determinism") {
  const FittedModel& m = parabola_model();
  const PartialObservation obs{{0}, {0.1}, {1}};
  const auto a = predict_latent_mh(m, obs, {.n_samples = 300, .burn_in = 50, .seed = 3});
  const auto b = predict_latent_mh(m, obs, {.n_samples = 300, .burn_in = 50, .seed = 3});
  const auto c = predict_latent_mh(m, obs, {.n_samples = 300, .burn_in = 50, .seed = 4});
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK_THROWS_AS(predict_latent_mh(m, obs, {.n_samples = 0}), ValidationError);
}

TEST_CASE("reconstruction of a masked training value") {
  const std::size_t n = 25;
  std::vector<double> latent(n);
  Eigen::MatrixXd data(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    latent[i] = (i + 0.5) / n;
    data.row(static_cast<Eigen::Index>(i)) << 2.0 * latent[i] - 1.0, std::sin(3.0 * latent[i]);
  }
  const FittedModel m = manual_model(latent, data, KernelParams::natural(1.0, 5.0, 1e-9));
  for (std::size_t i = 1; i < n; i += 4) {
    const auto ii = static_cast<Eigen::Index>(i);
    const std::vector<double> record{data(ii, 0), std::nan("")};
    const PartialObservation obs = PartialObservation::from_record(record);
    const LatentPosterior post = predict_latent_map(m, obs);
    const Reconstruction r = reconstruct_missing(m, obs, post);
    REQUIRE(r.dims == std::vector<std::size_t>{1});
    CHECK(std::abs(r.mean[0] - data(ii, 1)) < 1e-3);
    const KernelParams& p = m.theta().dims[1];
    CHECK(r.cov(0, 0) <= p.phi() + p.sigma2() + 1e-9);
  }
}

TEST_CASE("reconstruction with nothing missing is empty") {
  const FittedModel& m = clean_arc_model();
  const Eigen::VectorXd row = m.data().row(3).transpose();
  const PartialObservation obs = PartialObservation::from_record(row_span(row));
  const Reconstruction r = reconstruct_missing(m, obs, predict_latent_map(m, obs));
  CHECK(r.dims.empty());
  CHECK(r.mean.size() == 0);
}

TEST_CASE("sampled latents give mixture moments") {
  const FittedModel& m = parabola_model();
  const PartialObservation obs{{0}, {0.1}, {1}};
  LatentPosterior post;
  post.samples = {0.2, 0.4, 0.6};
  const Reconstruction r = reconstruct_missing(m, obs, post);
  const GPDim& dim = m.per_dim()[1];
  Eigen::VectorXd mean, var;
  dim.posterior_mean_var(post.samples, mean, var);
  mean.array() += m.centering()[1];
  const double mixture_mean = mean.mean();
  const double mixture_var =
      var.mean() + dim.params().sigma2() + (mean.array() - mixture_mean).square().mean();
  CHECK(r.mean[0] == doctest::Approx(mixture_mean).epsilon(1e-12));
  CHECK(r.cov(0, 0) == doctest::Approx(mixture_var).epsilon(1e-12));
}

TEST_CASE("records are predicted independently") {
  const FittedModel& m = parabola_model();
  const PartialObservation a{{0}, {0.3}, {1}}, b{{1}, {0.2}, {0}};
  const auto first = reconstruct_missing(m, a, predict_latent_map(m, a));
  reconstruct_missing(m, b, predict_latent_map(m, b));
  const auto again = reconstruct_missing(m, a, predict_latent_map(m, a));
  CHECK(first.mean == again.mean);
  CHECK(first.cov == again.cov);
}
