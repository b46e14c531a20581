#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "electrogp/embed.hpp"
#include "electrogp/error.hpp"
#include "electrogp/latent.hpp"
#include "electrogp/synthetic.hpp"
#include "unit/oracles.hpp"

using namespace electrogp;

TEST_CASE("straight segment embeds in arc-length order") {
  Eigen::MatrixXd data(10, 2);
  std::vector<double> s(10);
  for (int i = 0; i < 10; ++i) {
    s[i] = i / 9.0;
    data.row(i) << 0.3 + 2.0 * s[i], -1.0 + 1.0 * s[i];
  }
  LleSettings settings;
  settings.k_neighbors = 4;
  const auto e = lle_1d(data, settings);
  CHECK(std::abs(oracle::spearman(e, s)) == doctest::Approx(1.0));
}

TEST_CASE("noisy parabola ordering matches the generator up to a flip") {
  const SyntheticData syn = simulate(Shape::kParabola, 100, 0.05, 3);
  const auto e = lle_1d(syn.points, {});
  CHECK(oracle::pairwise_concordance(e, syn.t) >= 0.95);
}

TEST_CASE("three collinear points keep the middle in the middle") {
  Eigen::MatrixXd data(3, 2);
  data << 0.0, 0.0, 2.0, 1.0, 1.0, 0.5;
  LleSettings settings;
  settings.k_neighbors = 2;
  const auto e = lle_1d(data, settings);
  CHECK((e[2] - e[0]) * (e[2] - e[1]) < 0.0);
}

TEST_CASE("sign follows the first principal component") {
  Eigen::MatrixXd data(12, 2);
  for (int i = 0; i < 12; ++i) data.row(i) << i, 0.1 * std::sin(static_cast<double>(i));
  const auto e = lle_1d(data, {});
  CHECK(e.back() > e.front());
  const Eigen::MatrixXd flipped = -data;
  const auto f = lle_1d(flipped, {});
  // The principal axis keeps its sign convention, so the embedding follows it.
  CHECK(oracle::spearman(e, f) == doctest::Approx(-1.0));
}

TEST_CASE("embedding is invariant to rotation and translation") {
  const SyntheticData syn = simulate(Shape::kArc, 60, 0.02, 9);
  const auto base = lle_1d(syn.points, {});
  const double a = 1.1;
  Eigen::Matrix2d rot;
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  Eigen::MatrixXd moved = syn.points * rot.transpose();
  moved.rowwise() += Eigen::RowVector2d(5.0, -3.0);
  const auto e = lle_1d(moved, {});
  // Same up to sign and scale.
  const Eigen::Map<const Eigen::VectorXd> u(base.data(), 60), v(e.data(), 60);
  const double corr = u.dot(v) / (u.norm() * v.norm());
  CHECK(std::abs(corr) > 1.0 - 1e-6);
}

TEST_CASE("disconnected neighbour graph is reported with its components") {
  Eigen::MatrixXd data(8, 2);
  for (int i = 0; i < 4; ++i) {
    data.row(i) << i * 0.1, 0.0;
    data.row(4 + i) << 100.0 + i * 0.1, 0.0;
  }
  LleSettings settings;
  settings.k_neighbors = 2;
  try {
    lle_1d(data, settings);
    FAIL("expected DisconnectedGraphError");
  } catch (const DisconnectedGraphError& e) {
    REQUIRE(e.components().size() == 2);
    CHECK(e.components()[0] == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(e.components()[1] == std::vector<std::size_t>{4, 5, 6, 7});
    CHECK(std::string(e.what()).find("2 components") != std::string::npos);
  }
}

TEST_CASE("duplicate rows are handled by the ridge") {
  Eigen::MatrixXd data(10, 2);
  for (int i = 0; i < 10; ++i) data.row(i) << (i / 2), 0.5 * (i / 2);
  const auto e = lle_1d(data, {.k_neighbors = 4, .reg = 1e-3});
  for (double v : e) CHECK(std::isfinite(v));
}

TEST_CASE("invalid settings and inputs") {
  Eigen::MatrixXd data = Eigen::MatrixXd::Random(6, 2);
  CHECK_THROWS_AS(lle_1d(data, {.k_neighbors = 0}), ValidationError);
  CHECK_THROWS_AS(lle_1d(data, {.k_neighbors = 6}), ValidationError);
  CHECK_THROWS_AS(lle_1d(data, {.k_neighbors = 3, .reg = -1.0}), ValidationError);
  CHECK_THROWS_AS(lle_1d(Eigen::MatrixXd::Zero(2, 2), {.k_neighbors = 1}), ValidationError);
  data(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(lle_1d(data, {.k_neighbors = 3}), ValidationError);
}

TEST_CASE("rescale onto the margin interval") {
  const std::vector<double> in{-2.0, 0.0, 2.0};
  const LatentConfig out = rescale_unit(in);
  CHECK(out[0] == doctest::Approx(1.0 / 6.0));
  CHECK(out[1] == doctest::Approx(0.5));
  CHECK(out[2] == doctest::Approx(5.0 / 6.0));
  CHECK_THROWS_AS(rescale_unit(std::vector<double>{1.0, 1.0, 1.0}), ValidationError);
}

TEST_CASE("rescale keeps ranks and hits both margins") {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> z(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + trial;
    std::vector<double> in(n);
    for (double& v : in) v = z(gen);
    const LatentConfig out = rescale_unit(in);
    const double m = 1.0 / (2.0 * static_cast<double>(n));
    double lo = 1.0, hi = 0.0;
    for (double v : out.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    CHECK(lo == doctest::Approx(m));
    CHECK(hi == doctest::Approx(1.0 - m));
    CHECK(rank_order(in) == rank_order(out.values()));
  }
}

TEST_CASE("latent config validation and helpers") {
  CHECK_THROWS_AS(LatentConfig({0.1, 0.1}), ValidationError);
  CHECK_THROWS_AS(LatentConfig({0.0, 0.5}), ValidationError);
  CHECK_THROWS_AS(LatentConfig({0.5, 1.0}), ValidationError);
  CHECK(rank_order(std::vector<double>{0.3, 0.1, 0.2}) == std::vector<std::size_t>{2, 0, 1});
  CHECK(max_wraparound_gap(std::vector<double>{0.1, 0.2, 0.6}) == doctest::Approx(0.5));
  CHECK(max_wraparound_gap(std::vector<double>{0.4, 0.5}) == doctest::Approx(0.9));
}
