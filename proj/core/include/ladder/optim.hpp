#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <utility>

#include "ladder/types.hpp"

namespace ladder {

struct Bounds {
  Eigen::VectorXd lower; // -inf entries allowed
  Eigen::VectorXd upper; // +inf entries allowed

  static Bounds unbounded(int dim);
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
};

struct OptResult {
  Eigen::VectorXd params;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0; // projected gradient infinity norm
  bool degenerate = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Huber loss: 0.5 r^2 for |r| <= delta, else delta (|r| - 0.5 delta).
double huber(double r, double delta);

/// Projected-gradient L-BFGS over a box. Gradients by central differences.
/// Never returns params outside bounds; non-finite objective values mid-run
/// trigger step backtracking instead of propagating.
OptResult minimize_bounded(const Objective& objective, const Eigen::VectorXd& x0,
                           const Bounds& bounds, const FitConfig& cfg);

/// Levenberg-Marquardt for sum of squares of model(p, x_i) - y_i.
/// A numerically rank-deficient Jacobian sets `degenerate` and returns the
/// best point found instead of failing.
OptResult least_squares(
    const std::function<double(const Eigen::VectorXd&, double)>& model,
    std::span<const std::pair<double, double>> data, const Eigen::VectorXd& p0,
    const FitConfig& cfg);

Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x,
                                   double h = 1e-6);

/// Central-difference Hessian, symmetrized as (H + H^T) / 2.
Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x,
                                  double h = 1e-4);

/// Runs the minimizer from every start and keeps the best objective
/// (ties resolve to the earliest start). Throws if every start fails.
OptResult multistart(const std::function<OptResult(const Eigen::VectorXd&)>& minimize_one,
                     std::span<const Eigen::VectorXd> starts);

} // namespace ladder
