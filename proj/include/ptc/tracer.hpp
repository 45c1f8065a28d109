#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ptc/series.hpp"

namespace ptc {

struct RaySpec {
  real gamma = 0;
  real t_end = 1;
  Formulation formulation = Formulation::inner;
};

struct IntegratorOptions {
  std::size_t order = 30;
  real step_safety = 0.25L;
  real pole_tolerance = 1e-3L;
  /// Allowed size of the dropped tail per step, relative to max(1, |y|).
  real truncation_tol = 1e-18L;
  std::size_t max_steps = 4000;
};

struct RayResult {
  cplx value;
  /// d/dt of the ray solution at t_end.
  cplx derivative;
  std::size_t steps = 0;
};

/// Analytic continuation of the ray solution from t = 0 to ray.t_end.
/// `lead` is f'(0) (inner) or the Laurent leading coefficient of g at ∞
/// (outer); the ray direction e^{iγ} is applied here.
RayResult integrate_ray(const OdeParams& p, cplx lead, const RaySpec& ray, const IntegratorOptions& opts = {});

/// f(t_end e^{iγ}) for the inner map with f'(0) = fprime0.
cplx integrate_ray_inner(const std::vector<cplx>& anchors, const std::vector<cplx>& zeros, cplx fprime0,
                         real gamma, real t_end = 1, const IntegratorOptions& opts = {});

/// g(e^{iγ}/t_end) for the outer map g(w) = lead·w + O(1).
cplx integrate_ray_outer(const std::vector<cplx>& anchors, const std::vector<cplx>& zeros, cplx lead,
                         real gamma, real t_end = 1, const IntegratorOptions& opts = {});

// ---------------------------------------------------------------------------
// Critical trajectories of Q(z) dz^2
//   outer:  Q = -Π(z - b) / Π(z - a)
//   inner:  Q = -Π(z - b) / (C z^2 Π(z - a))
// The Q-length of a boundary arc equals the angular length of its preimage.

class QuadraticDifferential {
 public:
  explicit QuadraticDifferential(const OdeParams& p);

  cplx operator()(cplx z) const;

  /// Q(z) ≈ coeff·(z - p)^order near a critical point p.
  struct Local {
    cplx coeff;
    int order = 0;
  };
  Local local_at(cplx p, real tol = 1e-9L) const;

  /// Directions (angles) of the critical trajectories leaving p.
  std::vector<real> launch_directions(cplx p) const;

  const OdeParams& params() const { return params_; }

 private:
  OdeParams params_;
};

enum class StopReason { im_threshold, arc_length, met_point, escaped };

struct StopCondition {
  /// Stop when Im z crosses this level (refined onto it).
  std::optional<real> im_level;
  /// Stop on reaching this point (the point itself is appended).
  std::optional<cplx> target;
  /// Stop on reaching any of these points.
  std::vector<cplx> targets;
  /// Stop once |z| exceeds this (trajectories running to ∞).
  std::optional<real> max_modulus;
  real target_tol = 1e-9L;
  real max_arc_length = 10;
};

struct TraceOptions {
  /// RK4 step in the Q-metric.
  real step = 1e-3L;
  /// Largest allowed z-plane distance between consecutive points.
  real max_dz = 1e-2L;
  /// Which launch direction to use at a zero of Q (index into launch_directions).
  std::optional<std::size_t> direction;
  std::size_t max_steps = 200000;
};

struct Trajectory {
  std::vector<cplx> points;
  /// Unit tangents at each point.
  std::vector<cplx> tangents;
  /// Q-metric arc length at each point.
  std::vector<real> s;
  cplx start_anchor;
  StopReason stop_reason = StopReason::arc_length;
};

/// Traces the critical trajectory leaving `start` (a zero or simple pole of Q).
/// Throws AmbiguousStartError at a zero when no direction is given.
Trajectory trace_trajectory(const QuadraticDifferential& q, cplx start, const StopCondition& stop,
                            const TraceOptions& opts = {});

}  // namespace ptc
