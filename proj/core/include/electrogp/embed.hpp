#pragma once

// Latent initialization: one-dimensional locally linear embedding followed by
// an affine rescale into (0,1).

#include <span>
#include <vector>

#include <Eigen/Core>

#include "electrogp/error.hpp"
#include "electrogp/latent.hpp"

namespace electrogp {

struct LleSettings {
  int k_neighbors = 8;
  double reg = 0.1;  // ridge added to each local Gram, as a fraction of its trace
};

// Raised when the symmetrized k-NN graph has more than one component.
class DisconnectedGraphError : public ValidationError {
 public:
  DisconnectedGraphError(const std::string& what, std::vector<std::vector<std::size_t>> components)
      : ValidationError(what), components_(std::move(components)) {}
  const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }

 private:
  std::vector<std::vector<std::size_t>> components_;
};

// Rows of data are observations. Returns the coordinate from the eigenvector
// of (I - W)^T (I - W) with the second-smallest eigenvalue, signed so it
// correlates positively with the first principal component score.
std::vector<double> lle_1d(const Eigen::MatrixXd& data, const LleSettings& settings);

// Affine map onto [1/(2n), 1 - 1/(2n)].
LatentConfig rescale_unit(std::span<const double> coords);

}  // namespace electrogp
