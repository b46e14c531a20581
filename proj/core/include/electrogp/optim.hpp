#pragma once

// Scaled conjugate gradients (Moller 1993), maximization orientation.

#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace electrogp {

struct ScgSettings {
  int max_iters = 500;
  double rel_tol = 1e-7;   // stop once both |f change| < rel_tol*max(|f|,1) and step < rel_tol*max(|x|_inf,1)
  double grad_tol = 1e-6;  // stop when ||grad|| <= grad_tol
  double init_lambda = 1e-6;

  void validate() const;
};

// Returns the objective value at x. When grad is non-null it must be resized
// and filled with the gradient. Returning -inf (or NaN) marks x infeasible.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

enum class ScgStop { kRelTol, kGradTol, kMaxIters, kNoDirection };

std::string_view to_string(ScgStop stop);

struct ScgResult {
  Eigen::VectorXd x;
  double value = 0.0;
  std::vector<double> trace;  // objective after each accepted step, trace[0] at x0
  int iterations = 0;
  int accepted = 0;
  ScgStop stop = ScgStop::kMaxIters;
};

// Throws ValidationError if the objective is not finite at x0.
ScgResult maximize(const Objective& objective, Eigen::VectorXd x0, const ScgSettings& settings);

}  // namespace electrogp
