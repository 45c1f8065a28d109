#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ptc/domains.hpp"

namespace ptc {

/// J0 by its ascending power series (intended for |x| ≤ 12).
real bessel_j0(real x);
/// First positive zero of J0 (Newton on the series, bracketed by bisection).
real bessel_j0_zero();

/// δ_n = n^2 ∫ J0(j0 r)^2 r^(2n-1) dr / ∫ J0(j0 r)^2 r dr over [0, 1].
real delta_n(std::size_t n);
/// δ_1 .. δ_nmax (index 0 unused).
std::vector<real> delta_table(std::size_t nmax);

/// A boundary singularity of the exterior map composed with φ^{-1}: the
/// prime end at angle `angle` ∈ (0, π) of the upper half circle, where the
/// composed map behaves like (w - e^{i angle})^exponent.
struct BoundaryCorner {
  real angle = 0;
  real exponent = 0.5L;
  /// "branch" for a zero of Q, "fold" for a critical value of φ on E.
  std::string kind;
};

struct CornerWalk {
  std::vector<BoundaryCorner> corners;
  /// |angle reached by the walk at the last real branch point - (π - Q-length to 0)|.
  real closure = 0;
};

/// Corner angles of the symmetric six-point continuum E in spec, by walking
/// the upper side of E from 1 (angle 0) to 0 (angle π) with real Q-lengths
/// and the solved tip angles.
CornerWalk boundary_corners(const DomainSpec& spec);

/// Taylor coefficients of the map F from the disk onto D_{w1,w2,R}, F(0) = 0.
struct CoefficientMap {
  /// coeffs[n] = a_n; coeffs[0] = 0.
  std::vector<cplx> coeffs;
  /// π R^2.
  real domain_area = 0;
  /// Σ n |a_n|^2 over the computed coefficients.
  real area_sum = 0;
  /// Estimate of the missing Σ n |a_n|^2 beyond the last coefficient.
  real area_tail = 0;
  /// Estimate of the missing Σ |a_n|^2 beyond the last coefficient.
  real truncation_tail = 0;
  real R = 0;
  /// Corners used by the tail model.
  std::vector<BoundaryCorner> corners;
  /// Largest relative misfit of the tail model over its fitting window.
  real tail_fit_residual = 0;

  /// |Σ n|a_n|^2 + area_tail - R^2| / R^2.
  real area_deviation() const;
};

struct CoefficientOptions {
  /// Number of Laurent coefficients of the exterior map (F gets about 3 times as many).
  std::size_t laurent_terms = 8000;
};

/// F = cube-root symmetrization of φ^{-1}(g(-1/u)), where g is the exterior
/// map of the continuum E solved in spec, expanded by the outer ODE recurrence.
/// The result has real coefficients, a_1 > 0 and a_n = 0 unless n ≡ 1 (mod 3).
CoefficientMap coefficients_of_F(const DomainSpec& spec, const CoefficientOptions& opts = {});

/// F(z) for |z| < 1 evaluated by ray integration of the exterior map.
cplx evaluate_F(const DomainSpec& spec, cplx z, const IntegratorOptions& opts = {});

struct FourierCheck {
  /// Coefficients from discrete Fourier analysis of F(ρ e^{iθ}), scaled by ρ^-n.
  std::vector<cplx> fourier;
  /// Largest |a_n - fourier_n| over the compared coefficients.
  real max_difference = 0;
};

/// Compares the first `count` coefficients n ≡ 1 (mod 3) of map with a DFT of
/// `samples` boundary values on |z| = rho.
FourierCheck fourier_cross_check(const DomainSpec& spec, const CoefficientMap& map, std::size_t count = 10,
                                 real rho = 0.95L, std::size_t samples = 1024);

/// Taylor degree of the partial sums behind the published lifetime and
/// frequency values (a_0 .. a_99).
inline constexpr std::size_t published_degree = 99;

/// ½ Σ_{n ≤ max_degree} |a_n|^2. max_degree = 0 sums every coefficient and
/// adds the tail estimate.
real lifetime_bound(const CoefficientMap& map, std::size_t max_degree = 0);
/// j0^2 / Σ_{n ≤ max_degree} |a_n|^2 δ_n (every coefficient when max_degree = 0).
real frequency_bound(const CoefficientMap& map, std::size_t max_degree = 0);

enum class BoundKind { bloch_landau, lifetime, frequency };
const char* to_string(BoundKind k);
BoundKind bound_kind_from_string(const std::string& s);

struct BoundReport {
  BoundKind kind = BoundKind::bloch_landau;
  real x = 0, R = 0;
  /// The bound from the partial sum up to BoundOptions::max_degree.
  real value = 0;
  /// The bound from every computed coefficient (with the tail estimate for
  /// the lifetime). Equals value for bloch_landau.
  real full_value = 0;
  bool valid = false;
  real capacity = 0;
  real residual_norm = 0;
  real inradius_margin = 0;
  /// Relative deviation of the area identity (lifetime and frequency only).
  real area_deviation = 0;
  /// Largest disagreement of the series and Fourier coefficients.
  real fourier_difference = 0;
  std::size_t coefficient_count = 0;
  std::size_t delta_count = 0;
  std::string detail;
};

struct BoundOptions {
  RadiusOptions radius;
  CoefficientOptions coefficients;
  real area_tolerance = 1e-6L;
  real fourier_tolerance = 1e-8L;
  /// Partial-sum degree for value; 0 uses every coefficient.
  std::size_t max_degree = published_degree;
};

/// Runs max_radius_for_x and evaluates the requested constant at x.
BoundReport compute_bound(BoundKind kind, real x, const BoundOptions& opts = {});
/// R^-1 (|ψ(-8) - ψ(1)| cap(E))^{1/3} for a built domain.
real bloch_landau_value(const DomainSpec& spec);

struct ScanResult {
  BoundReport best;
  std::vector<BoundReport> grid;
  /// Points visited by the golden-section refinement.
  std::vector<BoundReport> refinement;
};

struct ScanOptions {
  BoundOptions bound;
  /// Final bracket width of the golden-section refinement.
  real x_tol = 1e-4L;
};

/// Grid scan of x over [x_lo, x_hi] followed by golden-section refinement
/// around the best grid point. Minimizes bloch_landau and frequency,
/// maximizes lifetime. Throws NoConvergenceError when every grid point fails.
ScanResult scan_optimize(BoundKind kind, real x_lo, real x_hi, std::size_t grid, const ScanOptions& opts = {});

}  // namespace ptc
