#include "electrogp/gpcore.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "electrogp/error.hpp"

namespace electrogp {

KernelParams KernelParams::natural(double phi, double alpha, double sigma2) {
  if (!(phi > 0.0) || !(alpha > 0.0) || !(sigma2 > 0.0))
    throw ValidationError("kernel parameters must be strictly positive");
  return {std::log(phi), std::log(alpha), std::log(sigma2)};
}

bool KernelParams::finite() const noexcept {
  return std::isfinite(log_phi) && std::isfinite(log_alpha) && std::isfinite(log_sigma2);
}

Eigen::MatrixXd kernel_matrix(std::span<const double> a, std::span<const double> b,
                              const KernelParams& p) {
  const double phi = p.phi();
  const double alpha = p.alpha();
  Eigen::MatrixXd k(a.size(), b.size());
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      const double d = a[i] - b[j];
      k(i, j) = phi * std::exp(-alpha * d * d);
    }
  }
  return k;
}

GPDim::GPDim(std::vector<double> train_x, std::vector<double> train_y, KernelParams params)
    : x_(std::move(train_x)), y_(std::move(train_y)), params_(params) {
  if (x_.size() != y_.size()) throw ValidationError("GPDim: x and y lengths differ");
  if (!params_.finite()) throw NumericalError("GPDim: non-finite kernel parameters");
  const auto n = static_cast<Eigen::Index>(x_.size());
  if (n == 0) return;

  Eigen::MatrixXd gram = kernel_matrix(x_, x_, params_);
  gram.diagonal().array() += params_.sigma2();
  const double phi = params_.phi();
  for (double rel = kJitterStart; rel <= kJitterMax * 1.0000001; rel *= 10.0) {
    jitter_ = rel * phi;
    Eigen::MatrixXd regularized = gram;
    regularized.diagonal().array() += jitter_;
    llt_.compute(regularized);
    if (llt_.info() == Eigen::Success) {
      const auto diag = llt_.matrixLLT().diagonal();
      if (diag.allFinite() && (diag.array() > 0.0).all()) {
        weights_ = llt_.solve(Eigen::Map<const Eigen::VectorXd>(y_.data(), n));
        if (weights_.allFinite()) return;
      }
    }
  }
  std::ostringstream msg;
  msg << "GPDim: Gram matrix not positive definite with jitter up to " << kJitterMax
      << " * phi (phi=" << phi << ", alpha=" << params_.alpha()
      << ", sigma2=" << params_.sigma2() << ", n=" << n << ")";
  throw NumericalError(msg.str());
}

Eigen::MatrixXd GPDim::chol() const {
  if (x_.empty()) return {};
  return llt_.matrixL();
}

double GPDim::log_marginal_likelihood() const {
  const auto n = static_cast<double>(x_.size());
  if (x_.empty()) return 0.0;
  const Eigen::Map<const Eigen::VectorXd> y(y_.data(), static_cast<Eigen::Index>(y_.size()));
  const double fit = -0.5 * y.dot(weights_);
  const double half_logdet = llt_.matrixLLT().diagonal().array().log().sum();
  return fit - half_logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

LmlGradient GPDim::grad_log_marginal() const {
  const auto n = static_cast<Eigen::Index>(x_.size());
  LmlGradient g;
  g.d_x = Eigen::VectorXd::Zero(n);
  g.d_x_data_fit = Eigen::VectorXd::Zero(n);
  g.d_x_complexity = Eigen::VectorXd::Zero(n);
  if (n == 0) return g;

  const Eigen::MatrixXd inv = llt_.solve(Eigen::MatrixXd::Identity(n, n));
  const double phi = params_.phi();
  const double alpha = params_.alpha();
  const double sigma2 = params_.sigma2();

  // dL/dtheta = 1/2 tr((w w^T - K^-1) dK/dtheta)
  double trace_w = 0.0;
  double s_phi = 0.0;
  double s_alpha = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    trace_w += weights_[j] * weights_[j] - inv(j, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = x_[i] - x_[j];
      const double kf = phi * std::exp(-alpha * d * d);
      const double fit = weights_[i] * weights_[j];
      const double w = fit - inv(i, j);
      s_phi += w * kf;
      s_alpha += w * kf * (-alpha * d * d);
      // Row and column i both depend on x_i; the factor 2 cancels the 1/2.
      const double dk = -2.0 * alpha * d * kf;
      g.d_x_data_fit[i] += fit * dk;
      g.d_x_complexity[i] -= inv(i, j) * dk;
    }
  }
  // jitter_ is proportional to phi, so it moves with log phi.
  g.d_log_phi = 0.5 * (s_phi + jitter_ * trace_w);
  g.d_log_alpha = 0.5 * s_alpha;
  g.d_log_sigma2 = 0.5 * sigma2 * trace_w;
  g.d_x = g.d_x_data_fit + g.d_x_complexity;
  return g;
}

PosteriorMoments GPDim::posterior_moments(std::span<const double> query) const {
  PosteriorMoments out;
  Eigen::MatrixXd kqq = kernel_matrix(query, query, params_);
  const auto q = static_cast<Eigen::Index>(query.size());
  if (x_.empty()) {
    out.mean = Eigen::VectorXd::Zero(q);
    out.cov = std::move(kqq);
    return out;
  }
  const Eigen::MatrixXd ks = kernel_matrix(x_, query, params_);
  out.mean = ks.transpose() * weights_;
  const Eigen::MatrixXd v = llt_.matrixL().solve(ks);
  out.cov = kqq - v.transpose() * v;
  out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();
  return out;
}

void GPDim::posterior_mean_var(std::span<const double> query, Eigen::VectorXd& mean,
                               Eigen::VectorXd& var) const {
  const auto q = static_cast<Eigen::Index>(query.size());
  const double phi = params_.phi();
  if (x_.empty()) {
    mean = Eigen::VectorXd::Zero(q);
    var = Eigen::VectorXd::Constant(q, phi);
    return;
  }
  const Eigen::MatrixXd ks = kernel_matrix(x_, query, params_);
  mean = ks.transpose() * weights_;
  const Eigen::MatrixXd v = llt_.matrixL().solve(ks);
  var = (phi - v.colwise().squaredNorm().transpose().array()).max(0.0).matrix();
}

double GPDim::posterior_mean(double query) const {
  double m = 0.0;
  const double phi = params_.phi();
  const double alpha = params_.alpha();
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double d = x_[i] - query;
    m += phi * std::exp(-alpha * d * d) * weights_[static_cast<Eigen::Index>(i)];
  }
  return m;
}

}  // namespace electrogp
