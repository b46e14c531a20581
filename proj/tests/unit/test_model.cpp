#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "electrogp/embed.hpp"
#include "electrogp/error.hpp"
#include "electrogp/inference.hpp"
#include "electrogp/latent.hpp"
#include "electrogp/model.hpp"
#include "electrogp/synthetic.hpp"
#include "unit/oracles.hpp"

using namespace electrogp;

namespace {

HyperParams random_theta(std::mt19937_64& gen, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HyperParams theta;
  for (std::size_t j = 0; j < d; ++j)
    theta.dims.push_back(KernelParams::natural(0.5 + u(gen), 2.0 + 10.0 * u(gen), 0.05 + 0.2 * u(gen)));
  return theta;
}

// Largest distance from any vertex of a to the polyline b.
double directed_hausdorff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Eigen::VectorXd p = a.row(i).transpose();
    worst = std::max(worst, point_to_polyline_distance(std::span<const double>(p.data(), p.size()), b));
  }
  return worst;
}

double hausdorff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// Vertices whose grid node lies inside the range covered by the fitted latents.
Eigen::MatrixXd covered_vertices(const FittedModel& m, const CurveEstimate& c) {
  const auto [lo, hi] = std::minmax_element(m.latent().values().begin(), m.latent().values().end());
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.grid[i] >= *lo && c.grid[i] <= *hi) keep.push_back(static_cast<Eigen::Index>(i));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), c.vertices.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = c.vertices.row(keep[k]);
  return out;
}

}  // namespace

TEST_CASE("half-period pair: prior term vanishes") {
  Eigen::MatrixXd data(2, 2);
  data << 0.3, -0.2, -0.1, 0.4;
  const std::vector<double> latent{0.25, 0.75};
  const HyperParams theta{{KernelParams::natural(1.0, 3.0, 0.1), KernelParams::natural(0.5, 8.0, 0.2)}};
  const ObjectiveValue v = objective(latent, theta, data, {});
  double likelihood = 0.0;
  for (int j = 0; j < 2; ++j) {
    likelihood += GPDim(latent, {data(0, j), data(1, j)}, theta.dims[static_cast<std::size_t>(j)])
                      .log_marginal_likelihood();
  }
  CHECK(v.value == doctest::Approx(likelihood).epsilon(1e-14));
}

TEST_CASE("objective gradient matches central differences") {
  std::mt19937_64 gen(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6, d = 2;
    std::vector<double> latent(n);
    for (std::size_t i = 0; i < n; ++i) latent[i] = (i + 0.2 + 0.6 * u(gen)) / n;
    std::shuffle(latent.begin(), latent.end(), gen);
    Eigen::MatrixXd data(n, d);
    for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = z(gen);
    const HyperParams theta = random_theta(gen, d);
    CorpConfig corp;
    corp.r = 0.5 + 1.5 * u(gen);

    const Eigen::VectorXd v = pack(theta, latent);
    Eigen::VectorXd analytic;
    objective_packed(v, &analytic, data, corp);
    const Eigen::VectorXd fd = oracle::fd_gradient(
        [&](const Eigen::VectorXd& w) { return objective_packed(w, nullptr, data, corp); }, v, 1e-6);
    for (Eigen::Index k = 0; k < v.size(); ++k)
      CHECK(std::abs(analytic[k] - fd[k]) <= 1e-5 * std::max(1.0, std::abs(fd[k])));
  }
}

TEST_CASE("equal spacing zeroes the prior part of the latent gradient") {
  const std::size_t n = 7;
  std::vector<double> latent(n);
  for (std::size_t i = 0; i < n; ++i) latent[i] = (i + 0.3) / n;
  Eigen::MatrixXd data = Eigen::MatrixXd::Random(n, 1);
  const HyperParams theta{{KernelParams::natural(1.0, 5.0, 0.1)}};
  const ObjectiveValue with = objective(latent, theta, data, {});
  const ObjectiveValue without = objective(latent, theta, data, {}, {.include_prior = false});
  CHECK((with.gradient - without.gradient).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("infeasible points give minus infinity, not an exception") {
  Eigen::MatrixXd data = Eigen::MatrixXd::Random(3, 1);
  const HyperParams theta{{KernelParams::natural(1.0, 5.0, 0.1)}};
  const double inf = -std::numeric_limits<double>::infinity();
  CHECK(objective(std::vector<double>{0.2, 0.2, 0.7}, theta, data, {}).value == inf);
  CHECK(objective(std::vector<double>{0.0, 0.4, 0.7}, theta, data, {}).value == inf);
  CHECK(objective(std::vector<double>{0.2, 0.4, 1.2}, theta, data, {}).value == inf);
  const HyperParams floor_hit{{KernelParams::natural(1.0, 5.0, 1e-12)}};
  const ObjectiveValue v = objective(std::vector<double>{0.2, 0.4, 0.7}, floor_hit, data, {});
  CHECK(v.value == inf);
  CHECK(v.gradient.norm() == 0.0);
  CHECK_THROWS_AS(objective(std::vector<double>{0.2, 0.4}, theta, data, {}), ValidationError);
}

TEST_CASE("pack and unpack are inverse") {
  std::mt19937_64 gen(1);
  const HyperParams theta = random_theta(gen, 3);
  const std::vector<double> latent{0.1, 0.5, 0.8, 0.3};
  HyperParams t;
  std::vector<double> l;
  unpack(pack(theta, latent), 3, t, l);
  CHECK(l == latent);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(t.dims[j].log_phi == theta.dims[j].log_phi);
    CHECK(t.dims[j].log_alpha == theta.dims[j].log_alpha);
    CHECK(t.dims[j].log_sigma2 == theta.dims[j].log_sigma2);
  }
}

TEST_CASE("noise-free line: noise collapses to the floor and the curve is the line") {
  const std::size_t n = 30;
  Eigen::MatrixXd data(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>((7 * i) % n) / (n - 1);  // shuffled rows
    data.row(static_cast<Eigen::Index>(i)) << 1.0 + 2.0 * s, -0.5 + 1.0 * s;
  }
  FitSettings settings;
  settings.center = true;
  const FittedModel model = fit(data, settings);
  for (const KernelParams& p : model.theta().dims) CHECK(p.sigma2() < 1e-6 * p.phi());

  const CurveEstimate curve = mean_curve(model, 512);
  const Eigen::MatrixXd covered = covered_vertices(model, curve);
  Eigen::MatrixXd line(2, 2);
  line << 1.0, -0.5, 3.0, 0.5;
  CHECK(directed_hausdorff(covered, line) < 1e-3);
}

TEST_CASE("fit stages: order kept, objective non-decreasing") {
  const SyntheticData syn = simulate(Shape::kParabola, 60, 0.05, 21);
  FitSettings settings;
  settings.center = true;
  settings.rank_init = false;  // raw embedding coordinates as the start
  const FittedModel model = fit(syn.points, settings);
  CHECK(model.stages.hyper_only >= model.stages.initial);
  CHECK(model.stages.final >= model.stages.hyper_only);
  CHECK(model.objective_value() == doctest::Approx(model.stages.final).epsilon(1e-10));

  LleSettings lle = settings.lle;
  Eigen::MatrixXd centered = syn.points.rowwise() - syn.points.colwise().mean();
  const std::vector<double> start = lle_1d(centered, lle);
  CHECK(rank_order(start) == rank_order(model.latent().values()));
}

TEST_CASE("spiral fit improves on its starting point") {
  const SyntheticData syn = simulate(Shape::kSpiral, 100, 0.05, 4);
  FitSettings settings;
  settings.center = true;
  const FittedModel model = fit(syn.points, settings);
  CHECK(model.stages.final > model.stages.initial + 1.0);
  CHECK(model.stages.final >= model.stages.hyper_only);
}

TEST_CASE("dropping the prior leaves holes in the latent coordinates") {
  const SyntheticData syn = simulate(Shape::kSpiral, 100, 0.05, 4);
  FitSettings settings;
  settings.center = true;
  const FittedModel with = fit(syn.points, settings);
  settings.include_prior = false;
  const FittedModel without = fit(syn.points, settings);
  CHECK(!without.include_prior());
  CHECK(max_wraparound_gap(without.latent().values()) > max_wraparound_gap(with.latent().values()));
}

TEST_CASE("row permutation gives the same curve") {
  const SyntheticData syn = simulate(Shape::kParabola, 50, 0.05, 8);
  std::vector<Eigen::Index> perm(50);
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
  Eigen::MatrixXd shuffled(50, 2);
  for (Eigen::Index i = 0; i < 50; ++i) shuffled.row(i) = syn.points.row(perm[static_cast<std::size_t>(i)]);

  FitSettings settings;
  settings.center = true;
  const FittedModel a = fit(syn.points, settings);
  const FittedModel b = fit(shuffled, settings);
  const CurveEstimate ca = mean_curve(a, 256), cb = mean_curve(b, 256);
  CHECK(hausdorff(covered_vertices(a, ca), covered_vertices(b, cb)) < 1e-3);
  CHECK(b.objective_value() == doctest::Approx(a.objective_value()).epsilon(1e-6));
}

TEST_CASE("mirrored start gives a mirrored solution") {
  const SyntheticData syn = simulate(Shape::kSine, 40, 0.05, 12);
  std::vector<double> start(40);
  for (std::size_t i = 0; i < 40; ++i) start[i] = syn.t[i] + 0.01 * std::sin(7.0 * i);
  std::vector<double> mirrored(40);
  for (std::size_t i = 0; i < 40; ++i) mirrored[i] = -start[i];

  FitSettings settings;
  settings.center = true;
  settings.initial_latent = start;
  const FittedModel a = fit(syn.points, settings);
  settings.initial_latent = mirrored;
  const FittedModel b = fit(syn.points, settings);
  for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(a.latent()[i] - (1.0 - b.latent()[i])) < 1e-4);
  const CurveEstimate ca = mean_curve(a, 256), cb = mean_curve(b, 256);
  CHECK(hausdorff(covered_vertices(a, ca), covered_vertices(b, cb)) < 1e-4);
}

TEST_CASE("fit validation carries the stage label") {
  CHECK_THROWS_AS(fit(Eigen::MatrixXd::Zero(2, 2), {}), ValidationError);
  Eigen::MatrixXd two_clusters(8, 2);
  for (int i = 0; i < 4; ++i) {
    two_clusters.row(i) << i * 0.1, 0.0;
    two_clusters.row(4 + i) << 100.0 + i * 0.1, 0.0;
  }
  FitSettings settings;
  settings.lle.k_neighbors = 2;
  try {
    fit(two_clusters, settings);
    FAIL("expected an embedding failure");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("stage 1") != std::string::npos);
  }
  settings.initial_latent = std::vector<double>{0.1, 0.2};
  CHECK_THROWS_AS(fit(two_clusters, settings), ValidationError);
}
