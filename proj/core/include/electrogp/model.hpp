#pragma once

// Joint MAP fit of latent coordinates and kernel hyperparameters:
//   sum_j log p(y_.j | x, theta_j) + log Corp(x; r)

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "electrogp/corp.hpp"
#include "electrogp/embed.hpp"
#include "electrogp/gpcore.hpp"
#include "electrogp/latent.hpp"
#include "electrogp/optim.hpp"

namespace electrogp {

inline constexpr double kNoiseFloor = 1e-10;  // sigma2_j >= kNoiseFloor * phi_j

struct HyperParams {
  std::vector<KernelParams> dims;

  std::size_t size() const noexcept { return dims.size(); }
};

// Parameter vector layout shared by the objective and the optimizer:
// [log phi_1, log alpha_1, log sigma2_1, ..., log phi_d, ..., x_1, ..., x_n].
Eigen::VectorXd pack(const HyperParams& theta, std::span<const double> latent);
void unpack(const Eigen::VectorXd& v, std::size_t d, HyperParams& theta,
            std::vector<double>& latent);

struct ObjectiveOptions {
  bool include_prior = true;  // false drops the Corp term (unconstrained GP-LVM ablation)
};

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;  // same layout as pack()
};

// -inf (no exception) when latents coincide, leave (0,1), or a noise variance
// drops below the floor. `data` is the (already centered) n x d training matrix.
ObjectiveValue objective(std::span<const double> latent, const HyperParams& theta,
                         const Eigen::MatrixXd& data, const CorpConfig& corp,
                         ObjectiveOptions options = {});

// Same quantity in the form the optimizer consumes.
double objective_packed(const Eigen::VectorXd& v, Eigen::VectorXd* grad,
                        const Eigen::MatrixXd& data, const CorpConfig& corp,
                        ObjectiveOptions options = {});

struct FitSettings {
  CorpConfig corp;
  LleSettings lle;
  ScgSettings scg;
  bool center = false;  // subtract per-column means before fitting
  bool include_prior = true;
  // Start from equally spaced coordinates in the embedding's order instead of
  // the affinely rescaled embedding itself.
  bool rank_init = true;
  std::optional<std::vector<double>> initial_latent;  // skips LLE; rescaled into (0,1)
};

struct StageReport {
  double initial = 0.0;      // joint objective at (x0, theta_init)
  double hyper_only = 0.0;   // joint objective after the hyperparameter-only stage
  double final = 0.0;        // joint objective after the joint stage
  int hyper_iterations = 0;
  int joint_iterations = 0;
};

// Model after fitting; caches one GPDim per output dimension.
class FittedModel {
 public:
  FittedModel() = default;
  // Rebuilds the GP caches from stored fields and recomputes the objective.
  FittedModel(Eigen::MatrixXd data, LatentConfig latent, HyperParams theta, CorpConfig corp,
              std::vector<double> centering, bool include_prior = true);

  const Eigen::MatrixXd& data() const noexcept { return data_; }
  const LatentConfig& latent() const noexcept { return latent_; }
  const HyperParams& theta() const noexcept { return theta_; }
  const CorpConfig& corp() const noexcept { return corp_; }
  const std::vector<double>& centering() const noexcept { return centering_; }
  const std::vector<GPDim>& per_dim() const noexcept { return per_dim_; }
  bool include_prior() const noexcept { return include_prior_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(data_.cols()); }
  double objective_value() const noexcept { return objective_; }

  StageReport stages;

 private:
  Eigen::MatrixXd data_;
  LatentConfig latent_;
  HyperParams theta_;
  CorpConfig corp_;
  std::vector<double> centering_;
  bool include_prior_ = true;
  std::vector<GPDim> per_dim_;
  double objective_ = 0.0;
};

// Heuristic starting hyperparameters: phi = column variance, sigma2 = 0.1 phi,
// alpha = 1 / (2 median^2) of pairwise latent distances.
HyperParams initial_hyperparams(const Eigen::MatrixXd& centered, std::span<const double> latent);

// Errors from the embedding or optimizer are rethrown with a stage label.
FittedModel fit(const Eigen::MatrixXd& data, const FitSettings& settings);

}  // namespace electrogp
