#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ptc/types.hpp"

namespace ptc {

/// Truncated power (or Laurent) series in t with complex coefficients.
///
/// Coefficient k multiplies t^(k + lead_exponent). The order is the number
/// of stored coefficients. A radius-of-convergence estimate is computed once
/// on construction, so values are immutable and safe to share.
class ComplexSeries {
 public:
  ComplexSeries() = default;
  explicit ComplexSeries(std::vector<cplx> coeffs, int lead_exponent = 0);

  static ComplexSeries constant(cplx c, std::size_t order);
  /// c0 + t, truncated to `order`.
  static ComplexSeries variable(cplx c0, std::size_t order);

  std::size_t order() const { return coeffs_.size(); }
  int lead_exponent() const { return lead_exponent_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  cplx operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : cplx{}; }

  /// Estimated convergence radius in t; +inf for a polynomial tail.
  real radius_estimate() const { return radius_; }

  cplx evaluate(cplx t) const;
  /// d/dt of the series at t.
  cplx derivative(cplx t) const;
  /// Magnitude of the last two retained terms at |t| = h.
  real tail_magnitude(real h) const;

  ComplexSeries truncated(std::size_t order) const;

 private:
  std::vector<cplx> coeffs_;
  int lead_exponent_ = 0;
  real radius_ = 0;
};

ComplexSeries operator+(const ComplexSeries& a, const ComplexSeries& b);
ComplexSeries operator-(const ComplexSeries& a, const ComplexSeries& b);
ComplexSeries operator*(const ComplexSeries& a, const ComplexSeries& b);
ComplexSeries operator*(cplx s, const ComplexSeries& a);
/// Throws SingularSeriesError when b has a vanishing constant term.
ComplexSeries operator/(const ComplexSeries& a, const ComplexSeries& b);

ComplexSeries series_add(const ComplexSeries& a, const ComplexSeries& b);
ComplexSeries series_mul(const ComplexSeries& a, const ComplexSeries& b);
ComplexSeries series_div(const ComplexSeries& a, const ComplexSeries& b);

/// p-th root whose constant term is the root of a[0] nearest to branch_hint.
/// Throws BranchPointError when a[0] == 0.
ComplexSeries series_root(const ComplexSeries& a, int p, cplx branch_hint);

/// Root test: least-squares slope of log|c_n| against n over the last quarter
/// of the coefficient window (widened when too few coefficients are nonzero).
real estimate_radius(std::span<const cplx> coeffs);
inline real estimate_radius(const ComplexSeries& a) { return a.radius_estimate(); }

// ---------------------------------------------------------------------------
// ODE jets
//
// Inner form, z(t) = f(t e^{iγ}):   (t z'/z)^2 = C Π(z - a_i) / Π(z - b_j)
// Outer form, y(t) = g(e^{iγ}/t):   (t y')^2   =   Π(y - a_i) / Π(y - b_j)
// Zeros are listed with multiplicity. For the inner form C is fixed by
// C = Π(-b_j) / Π(-a_i) so that the origin is an integrable singularity.

struct OdeParams {
  Formulation formulation = Formulation::inner;
  std::vector<cplx> anchors;
  std::vector<cplx> zeros;
  cplx scale{1};

  static OdeParams inner(std::vector<cplx> anchors, std::vector<cplx> zeros);
  static OdeParams outer(std::vector<cplx> anchors, std::vector<cplx> zeros);

  /// scale * Π(y - a) / Π(y - b)
  cplx ratio(cplx y) const;
  /// Smallest |y - b_j|; +inf without zeros.
  real pole_distance(cplx y) const;
};

/// Series of the ray solution at t = 0.
///   inner: z = Σ_{k≥1} z_k t^k with z_1 = lead (= f'(0) e^{iγ}); lead_exponent 0.
///   outer: y = Σ_{k≥0} u_k t^{k-1} with u_0 = lead (= cap·e^{iγ}); lead_exponent -1.
ComplexSeries origin_jet(const OdeParams& p, cplx lead, std::size_t order);

/// Taylor series of the ray solution about a regular point (t0 > 0, y0) in
/// the local variable s = t - t0. The branch of the square root is the one
/// whose derivative y'(t0) is closest to dy_hint.
/// Throws NearPoleError when y0 is within pole_tolerance of a zero b_j.
ComplexSeries regular_jet(const OdeParams& p, real t0, cplx y0, cplx dy_hint, std::size_t order,
                          real pole_tolerance = 1e-3L);

/// Dispatches to origin_jet when t0 == 0 (y0 ignored, dz_hint is the lead
/// coefficient) and to regular_jet otherwise.
ComplexSeries ode_step_series(const OdeParams& p, real t0, cplx z0, cplx dz_hint, std::size_t order);

}  // namespace ptc
