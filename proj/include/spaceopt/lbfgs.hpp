#pragma once

#include <Eigen/Core>
#include <functional>

namespace spaceopt {

struct LbfgsOptions {
  int max_iterations = 3000;
  double grad_tolerance = 1e-8;  // stop when ||g||_inf drops below this
  int memory = 10;               // stored curvature pairs
  int max_line_search = 50;
  double wolfe_c1 = 1e-4;  // sufficient decrease
  double wolfe_c2 = 0.9;   // curvature condition
};

struct LbfgsResult {
  Eigen::VectorXd x;  // best iterate seen (by objective value)
  double f = 0.0;
  Eigen::VectorXd grad;  // gradient at the best iterate
  int iterations = 0;
  int n_evals = 0;
  bool converged = false;  // gradient tolerance reached
};

/// f(x, grad_out) -> objective value, writing the gradient into grad_out.
using LbfgsObjective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with a strong-Wolfe line search (bracket + zoom).
/// Returns the best evaluated point, which need not be the final iterate.
LbfgsResult lbfgs_minimize(const LbfgsObjective& f, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {});

}  // namespace spaceopt
