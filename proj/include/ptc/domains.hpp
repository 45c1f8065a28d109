#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ptc/configurations.hpp"
#include "ptc/series.hpp"

namespace ptc {

/// k(z) = z / (1 - z)^2. Throws PoleError at z = 1.
cplx koebe(cplx z);
/// ψ(z) = -1 / k(z / R^3) = -(R^3 - z)^2 / (R^3 z). Throws PoleError at z = 0.
cplx psi(cplx z, real R);
/// |ψ(-8) - ψ(1)| = (9 R^6 + 72) / (8 R^3).
real psi_gap(real R);
/// φ(z) = (ψ(z) - ψ(1)) / |ψ(-8) - ψ(1)|; φ(1) = 0, φ(-8) = 1, φ(0) = ∞.
cplx phi(cplx z, real R);
/// Inverse of φ with values in |z| < R^3.
cplx phi_inv(cplx w, real R);
/// d/dw of phi_inv at w, given z = phi_inv(w).
cplx phi_inv_derivative(cplx z, real R);

/// 1 + sqrt(2 sqrt(3) - 3), the smallest admissible x.
real min_x();

/// Which circles carry the second tip w2. Under both readings w1 is the
/// intersection of C1 and C2 of larger real part.
enum class TipReading {
  /// w2 is the other intersection of C1 and C2.
  c1_c2,
  /// w2 is the intersection of C2 and C3 of larger real part.
  c2_c3,
};

const char* to_string(TipReading r);
TipReading tip_reading_from_string(const std::string& s);

struct TipGeometry {
  real x = 0, R = 0;
  cplx P1, P2, P3;
  cplx w1, w2;
};

/// Circle centers and tips for the given x (the real part of P2) and R.
/// Throws InfeasibleGeometryError when the circles do not meet.
TipGeometry tip_geometry(real x, real R, TipReading reading = TipReading::c2_c3);

struct DomainArc {
  /// 1 or 2: the tip the arc starts from; 0 for the stem of a forked continuum.
  int tip = 0;
  std::vector<cplx> points;
  /// Unit tangents along the arc.
  std::vector<cplx> tangents;
  /// The traced trajectory in the E-plane and its Q-metric arc length.
  std::vector<cplx> e_points;
  std::vector<cplx> e_tangents;
  std::vector<real> s;
};

struct DomainSpec {
  TipGeometry geometry;
  TipReading reading = TipReading::c1_c2;
  /// z_i = w_i^3 and the anchors a_i = φ(z_i) of the continuum E.
  cplx z1, z2, a1, a2;
  /// The capacity problem for E with anchors {1, a1, a2, 0, conj(a2), conj(a1)}.
  PTSolution solution;
  /// Arcs γ in the sector 0 ≤ arg w ≤ π/3 of the w-plane.
  std::vector<DomainArc> arcs;

  real x() const { return geometry.x; }
  real R() const { return geometry.R; }
  real capacity() const { return solution.capacity(); }
};

struct DomainOptions {
  /// c2_c3 reproduces the published (x, R) pairs; c1_c2 is kept for comparison.
  TipReading reading = TipReading::c2_c3;
  PTOptions pt;
  TraceOptions trace;
  /// Explicit start for the capacity solve and the topology it belongs to.
  std::optional<Vec> seed;
  int seed_topology = 0;

  DomainOptions() { trace.step = 1e-4L; }
};

/// Builds D_{w1,w2,R}: the tips, the capacity solution for E, and the arcs
/// traced in the E-plane and pulled back through φ^{-1} and the cube root.
/// Throws InfeasibleGeometryError for bad (x, R) and NoConvergenceError when
/// the capacity solve fails.
DomainSpec build_domain(real x, real R, const DomainOptions& opts = {});

struct InradiusCheck {
  bool passed = false;
  /// |q| - (R - 1).
  real margin = 0;
  cplx q;
  std::string detail;
};

/// Parallel curves at distance 1 from γ1, γ2 on the sides facing each other,
/// their intersection q, and the test |q| ≥ R - 1. The polyline intersection
/// is refined by Newton's method on the traced trajectories.
InradiusCheck inradius_check(const DomainSpec& spec);

/// Every boundary polyline of the full domain: the six radial slits and the
/// twelve images of the arcs under rotation by 2π/3 and conjugation. The
/// outer circle |w| = R is not included.
std::vector<std::vector<cplx>> boundary_polylines(const DomainSpec& spec);

struct RadiusSearch {
  real R = 0;
  DomainSpec spec;
  InradiusCheck check;
  std::size_t evaluations = 0;
};

struct RadiusOptions {
  DomainOptions domain;
  real R_lo = 5;
  real R_hi = 5.3L;
  real tol = 1e-9L;
};

/// Largest R whose domain passes inradius_check, by bisection on the margin.
/// Throws NoConvergenceError when the bracket does not contain a sign change
/// or a pipeline stage fails inside it.
RadiusSearch max_radius_for_x(real x, const RadiusOptions& opts = {});

/// f(z) = z (g(z^3) / z^3)^{1/3} for g(ζ) = Σ g_k ζ^k with g_0 = 0, taking
/// the principal cube root of g'(0). The result has order 3 (order(g) - 1) - 1.
/// Throws std::invalid_argument when g'(0) = 0 or g_0 != 0.
ComplexSeries symmetrize_cube_root(const ComplexSeries& g);

}  // namespace ptc
