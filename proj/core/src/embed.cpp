#include "electrogp/embed.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace electrogp {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& data) {
  const Eigen::VectorXd norms = data.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * data * data.transpose();
  d2.colwise() += norms;
  d2.rowwise() += norms.transpose();
  return d2.cwiseMax(0.0);
}

// First principal component score, sign fixed so the loading with the largest
// magnitude is positive.
Eigen::VectorXd first_pc_score(const Eigen::MatrixXd& data) {
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered * centered.transpose());
  const Eigen::VectorXd u = eig.eigenvectors().col(centered.rows() - 1);
  Eigen::VectorXd loading = centered.transpose() * u;
  Eigen::Index arg = 0;
  loading.cwiseAbs().maxCoeff(&arg);
  if (loading[arg] < 0.0) loading = -loading;
  return centered * loading;
}

}  // namespace

std::vector<double> lle_1d(const Eigen::MatrixXd& data, const LleSettings& settings) {
  const Eigen::Index n = data.rows();
  if (n < 3) throw ValidationError("lle: need at least 3 observations");
  if (!data.allFinite()) throw ValidationError("lle: data contains non-finite values");
  if (settings.k_neighbors < 1 || settings.k_neighbors >= n)
    throw ValidationError("lle: k_neighbors must satisfy 1 <= k < n");
  if (settings.reg < 0.0) throw ValidationError("lle: reg must be nonnegative");
  const auto k = static_cast<Eigen::Index>(settings.k_neighbors);

  const Eigen::MatrixXd d2 = squared_distances(data);
  std::vector<std::vector<Eigen::Index>> neighbors(n);
  DisjointSets components(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> order;
    order.reserve(n - 1);
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        return d2(i, a) < d2(i, b) || (d2(i, a) == d2(i, b) && a < b);
                      });
    order.resize(k);
    for (Eigen::Index j : order) components.join(i, j);
    neighbors[i] = std::move(order);
  }

  std::vector<std::vector<std::size_t>> groups;
  {
    std::vector<std::ptrdiff_t> group_of(n, -1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t root = components.find(i);
      if (group_of[root] < 0) {
        group_of[root] = static_cast<std::ptrdiff_t>(groups.size());
        groups.emplace_back();
      }
      groups[group_of[root]].push_back(static_cast<std::size_t>(i));
    }
  }
  if (groups.size() > 1) {
    std::ostringstream msg;
    msg << "lle: k-NN graph (k=" << k << ") has " << groups.size() << " components:";
    for (std::size_t g = 0; g < groups.size(); ++g) {
      msg << " [" << g << ": " << groups[g].size() << " rows starting at row " << groups[g].front()
          << "]";
    }
    throw DisconnectedGraphError(msg.str(), std::move(groups));
  }

  // Reconstruction weights: min ||x_i - sum_j w_j x_j||^2 s.t. sum_j w_j = 1.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd z(k, data.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < k; ++a) z.row(a) = data.row(neighbors[i][a]) - data.row(i);
    Eigen::MatrixXd gram = z * z.transpose();
    const double trace = gram.trace();
    gram.diagonal().array() += trace > 0.0 ? settings.reg * trace : 1e-12;
    Eigen::VectorXd wi = gram.ldlt().solve(Eigen::VectorXd::Ones(k));
    wi /= wi.sum();
    for (Eigen::Index a = 0; a < k; ++a) w(i, neighbors[i][a]) = wi[a];
  }

  const Eigen::MatrixXd iw = Eigen::MatrixXd::Identity(n, n) - w;
  const Eigen::MatrixXd m = iw.transpose() * iw;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw NumericalError("lle: eigendecomposition failed");
  Eigen::VectorXd coord = eig.eigenvectors().col(1);
  coord.array() -= coord.mean();

  if (coord.dot(first_pc_score(data)) < 0.0) coord = -coord;
  return {coord.data(), coord.data() + n};
}

LatentConfig rescale_unit(std::span<const double> coords) {
  if (coords.empty()) throw ValidationError("rescale_unit: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(coords.begin(), coords.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw ValidationError("rescale_unit: constant input cannot be rescaled");
  const double margin = 1.0 / (2.0 * static_cast<double>(coords.size()));
  std::vector<double> out(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i)
    out[i] = margin + (coords[i] - lo) / (hi - lo) * (1.0 - 2.0 * margin);
  return LatentConfig(std::move(out));
}

}  // namespace electrogp
