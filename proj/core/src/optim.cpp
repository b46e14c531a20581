#include "electrogp/optim.hpp"

#include <algorithm>
#include <cmath>

#include "electrogp/error.hpp"

namespace electrogp {

void ScgSettings::validate() const {
  if (max_iters < 1) throw ValidationError("scg: max_iters must be at least 1");
  if (rel_tol < 0.0 || grad_tol < 0.0) throw ValidationError("scg: tolerances must be nonnegative");
  if (!(init_lambda > 0.0)) throw ValidationError("scg: init_lambda must be positive");
}

std::string_view to_string(ScgStop stop) {
  switch (stop) {
    case ScgStop::kRelTol: return "relative objective change";
    case ScgStop::kGradTol: return "gradient norm";
    case ScgStop::kMaxIters: return "iteration limit";
    case ScgStop::kNoDirection: return "zero gradient";
  }
  return "unknown";
}

ScgResult maximize(const Objective& objective, Eigen::VectorXd x0, const ScgSettings& settings) {
  settings.validate();

  // Internally minimize E = -f.
  Eigen::VectorXd grad_buf;
  auto energy_grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double f = objective(x, &grad_buf);
    g = -grad_buf;
    return -f;
  };
  auto energy = [&](const Eigen::VectorXd& x) { return -objective(x, nullptr); };

  ScgResult result;
  Eigen::VectorXd grad_new;
  double e_old = energy_grad(x0, grad_new);
  if (!std::isfinite(e_old) || !grad_new.allFinite())
    throw ValidationError("scg: objective or gradient is not finite at the starting point");

  constexpr double kSigma0 = 1e-4;
  constexpr double kBetaMin = 1e-15;
  constexpr double kBetaMax = 1e100;
  const auto npar = x0.size();

  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd grad_old = grad_new;
  Eigen::VectorXd d = -grad_new;
  Eigen::VectorXd grad_plus;
  bool success = true;
  Eigen::Index nsuccess = 0;
  double beta = settings.init_lambda;
  double mu = 0.0, kappa = 0.0, theta = 0.0;

  result.trace.push_back(-e_old);
  result.stop = ScgStop::kMaxIters;

  for (int iter = 1; iter <= settings.max_iters; ++iter) {
    result.iterations = iter;
    if (success) {
      if (grad_new.squaredNorm() == 0.0) {
        result.stop = ScgStop::kNoDirection;
        break;
      }
      mu = d.dot(grad_new);
      if (mu >= 0.0) {
        d = -grad_new;
        mu = d.dot(grad_new);
      }
      kappa = d.squaredNorm();
      // Curvature along d by gradient differencing; shrink the probe if it
      // lands somewhere infeasible.
      theta = 0.0;
      double sigma = kSigma0 / std::sqrt(kappa);
      for (int probe = 0; probe < 6; ++probe, sigma *= 0.1) {
        const double e_plus = energy_grad(x + sigma * d, grad_plus);
        if (std::isfinite(e_plus) && grad_plus.allFinite()) {
          theta = d.dot(grad_plus - grad_new) / sigma;
          break;
        }
      }
    }

    double delta = theta + beta * kappa;
    if (delta <= 0.0) {
      delta = beta * kappa;
      beta -= theta / kappa;
    }
    const double alpha = -mu / delta;
    const Eigen::VectorXd x_new = x + alpha * d;
    const double e_new = energy(x_new);

    double comparison = -1.0;
    if (std::isfinite(e_new)) comparison = 2.0 * (e_new - e_old) / (alpha * mu);
    if (std::isnan(comparison)) comparison = -1.0;

    success = comparison >= 0.0;
    if (success) {
      ++nsuccess;
      ++result.accepted;
      const double step = (alpha * d).cwiseAbs().maxCoeff();
      const double x_scale = std::max(x.cwiseAbs().maxCoeff(), 1.0);
      x = x_new;
      result.trace.push_back(-e_new);
      const double change = std::abs(e_new - e_old);
      const double scale = std::max(std::abs(e_old), 1.0);
      e_old = e_new;
      // Both the objective and the parameters have to settle.
      if (change < settings.rel_tol * scale && step < settings.rel_tol * x_scale) {
        result.stop = ScgStop::kRelTol;
        break;
      }
      grad_old = grad_new;
      energy_grad(x, grad_new);
      if (!grad_new.allFinite()) {
        // Feasible value with a broken gradient: restart along steepest ascent
        // of the previous point.
        grad_new = grad_old;
      }
      if (grad_new.norm() < settings.grad_tol) {
        result.stop = ScgStop::kGradTol;
        break;
      }
    }

    if (comparison < 0.25) beta = std::min(4.0 * beta, kBetaMax);
    if (comparison > 0.75) beta = std::max(0.5 * beta, kBetaMin);

    if (nsuccess == npar) {
      d = -grad_new;
      nsuccess = 0;
    } else if (success) {
      const double gamma = (grad_old - grad_new).dot(grad_new) / mu;
      d = gamma * d - grad_new;
    }
  }

  result.x = std::move(x);
  result.value = -e_old;
  return result;
}

}  // namespace electrogp
