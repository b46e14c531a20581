#pragma once

// One-output Gaussian process with squared-exponential covariance
//   k(x, y) = phi * exp(-alpha (x - y)^2)
// and Gaussian observation noise sigma2.

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

namespace electrogp {

// Kernel triple held in log space so optimizers work unconstrained.
struct KernelParams {
  double log_phi = 0.0;
  double log_alpha = 0.0;
  double log_sigma2 = 0.0;

  static KernelParams natural(double phi, double alpha, double sigma2);

  double phi() const noexcept { return std::exp(log_phi); }
  double alpha() const noexcept { return std::exp(log_alpha); }
  double sigma2() const noexcept { return std::exp(log_sigma2); }
  bool finite() const noexcept;
};

inline double kernel(double x, double y, const KernelParams& p) {
  const double d = x - y;
  return p.phi() * std::exp(-p.alpha() * d * d);
}

Eigen::MatrixXd kernel_matrix(std::span<const double> a, std::span<const double> b,
                              const KernelParams& p);

struct LmlGradient {
  double d_log_phi = 0.0;
  double d_log_alpha = 0.0;
  double d_log_sigma2 = 0.0;
  Eigen::VectorXd d_x;           // total, = d_x_data_fit + d_x_complexity
  Eigen::VectorXd d_x_data_fit;  // from -1/2 y^T K^-1 y
  Eigen::VectorXd d_x_complexity;  // from -1/2 log det K
};

struct PosteriorMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Training set and factorization for one output dimension. Immutable after
// construction.
class GPDim {
 public:
  static constexpr double kJitterStart = 1e-10;  // relative to phi
  static constexpr double kJitterMax = 1e-4;

  GPDim() = default;
  // Factorizes K + sigma2 I + jitter I, escalating jitter x10 from
  // kJitterStart*phi up to kJitterMax*phi. Throws NumericalError if the Gram
  // matrix is still not positive definite.
  GPDim(std::vector<double> train_x, std::vector<double> train_y, KernelParams params);

  const std::vector<double>& train_x() const noexcept { return x_; }
  const std::vector<double>& train_y() const noexcept { return y_; }
  const KernelParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return x_.size(); }
  double jitter() const noexcept { return jitter_; }

  // Lower factor L with L L^T = K + (sigma2 + jitter) I.
  Eigen::MatrixXd chol() const;
  // (K + (sigma2 + jitter) I)^{-1} y
  const Eigen::VectorXd& weights() const noexcept { return weights_; }

  double log_marginal_likelihood() const;
  LmlGradient grad_log_marginal() const;

  // Noise-free posterior of the latent function at the query points.
  PosteriorMoments posterior_moments(std::span<const double> query) const;
  // Diagonal-only version; cheaper when covariances are not needed.
  void posterior_mean_var(std::span<const double> query, Eigen::VectorXd& mean,
                          Eigen::VectorXd& var) const;
  double posterior_mean(double query) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  KernelParams params_;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd weights_;
};

}  // namespace electrogp
