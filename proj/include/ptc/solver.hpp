#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ptc/types.hpp"

namespace ptc {

using Vec = Eigen::Matrix<real, Eigen::Dynamic, 1>;
using Mat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;

using ResidualFn = std::function<Vec(const Vec&)>;

struct SolverOptions {
  /// Convergence test on the max-norm of the residual.
  real tol = 1e-12L;
  std::size_t max_iterations = 200;
  /// Relative forward-difference step.
  real fd_step = 1e-7L;
  /// Initial trust radius, relative to max(1, |D x|).
  real initial_radius = 1;
  /// The solve stagnates once the trust radius falls below this.
  real min_radius = 1e-14L;
};

enum class SolveStatus { converged, stagnation, iteration_limit };

struct SolveReport {
  Vec root;
  real residual_norm = 0;
  std::size_t iterations = 0;
  std::size_t jacobian_evals = 0;
  std::size_t function_evals = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::iteration_limit;
  /// Residual 2-norm at the start and after every accepted step.
  std::vector<real> history;
};

/// Raised when the residual is not finite at the starting point.
class EvaluationError : public NumericalError {
 public:
  EvaluationError(const std::string& what, Vec point) : NumericalError(what), point_(std::move(point)) {}
  const Vec& point() const { return point_; }

 private:
  Vec point_;
};

/// Forward-difference Jacobian with step h_i = fd_step·max(1, |x_i|).
Mat fd_jacobian(const ResidualFn& f, const Vec& x, const Vec& fx, real fd_step);

/// Powell hybrid (dogleg trust region) with Broyden updates. Trial points where
/// the residual throws a NumericalError or is non-finite count as rejected steps.
SolveReport solve_system(const ResidualFn& f, const Vec& x0, const SolverOptions& opts = {});

using FamilyFn = std::function<Vec(const Vec&, real)>;

struct ContinuationOptions {
  SolverOptions solver;
  real min_dt = 1e-4L;
  /// Seed each step by linear extrapolation of the last two solutions
  /// instead of the previous solution alone.
  bool extrapolate = false;
};

struct ContinuationPoint {
  real t = 0;
  SolveReport report;
};

class PathFailureError : public NoConvergenceError {
 public:
  PathFailureError(const std::string& what, std::vector<ContinuationPoint> partial)
      : NoConvergenceError(what), partial_(std::move(partial)) {}
  const std::vector<ContinuationPoint>& partial() const { return partial_; }

 private:
  std::vector<ContinuationPoint> partial_;
};

/// Follows the roots of family(·, t) from t = 0 (solved by x_start) to t = 1
/// in `steps` nominal increments, halving the increment on failure.
std::vector<ContinuationPoint> continuation(const FamilyFn& family, const Vec& x_start, std::size_t steps,
                                            const ContinuationOptions& opts = {});

}  // namespace ptc
