#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ptc/types.hpp"

namespace ptc {

struct QuadratureRule {
  std::vector<real> nodes;
  std::vector<real> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre rule on [a, b]: `panels` equal panels of `n` nodes,
/// nodes in increasing order.
QuadratureRule composite_gauss(real a, real b, std::size_t panels, std::size_t n);

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]: the panel with
/// the largest error estimate is bisected until the summed estimate is below
/// abs_tol. Panels whose estimate is at roundoff level count as exact.
/// Throws NoConvergenceError when a panel would need more than max_depth bisections.
real integrate_adaptive(const std::function<real(real)>& f, real a, real b, real abs_tol = 1e-14L,
                        std::size_t max_depth = 40);

}  // namespace ptc
