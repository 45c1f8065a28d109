#include "ptc/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ptc {

namespace {

std::string ray_tag(real gamma) {
  std::ostringstream os;
  os.precision(17);
  os << " [ray gamma=" << static_cast<double>(gamma) << "]";
  return os.str();
}

// Largest step not exceeding `limit` whose dropped tail stays under tolerance.
real choose_step(const ComplexSeries& jet, real limit, const IntegratorOptions& opts) {
  real h = std::min(limit, opts.step_safety * jet.radius_estimate());
  for (int i = 0; i < 200; ++i) {
    const real scale = std::max<real>(1, std::abs(jet.evaluate(h)));
    if (jet.tail_magnitude(h) <= opts.truncation_tol * scale) break;
    h *= 0.5L;
  }
  return h;
}

}  // namespace

RayResult integrate_ray(const OdeParams& p, cplx lead, const RaySpec& ray, const IntegratorOptions& opts) {
  if (!(ray.t_end > 0)) throw std::invalid_argument("integrate_ray: t_end must be positive");
  if (p.formulation != ray.formulation) throw std::invalid_argument("integrate_ray: formulation mismatch");
  const cplx lead0 = lead * std::polar<real>(1, ray.gamma);
  try {
    ComplexSeries jet = origin_jet(p, lead0, opts.order);
    real h = choose_step(jet, ray.t_end, opts);
    RayResult r;
    r.value = jet.evaluate(h);
    r.derivative = jet.derivative(h);
    r.steps = 1;
    real t = h;
    while (t < ray.t_end) {
      if (r.steps >= opts.max_steps) throw NoConvergenceError("ray integration exceeded its step budget");
      jet = regular_jet(p, t, r.value, r.derivative, opts.order, opts.pole_tolerance);
      h = choose_step(jet, ray.t_end - t, opts);
      if (!(h > 0)) throw NoConvergenceError("ray integration step underflow");
      r.value = jet.evaluate(h);
      r.derivative = jet.derivative(h);
      t = (ray.t_end - t <= h) ? ray.t_end : t + h;
      ++r.steps;
      if (!is_finite(r.value)) throw NoConvergenceError("ray integration produced a non-finite value");
    }
    return r;
  } catch (const NearPoleError& e) {
    throw NearPoleError(e.what() + ray_tag(ray.gamma));
  } catch (const NoConvergenceError& e) {
    throw NoConvergenceError(e.what() + ray_tag(ray.gamma));
  } catch (const BranchPointError& e) {
    throw BranchPointError(e.what() + ray_tag(ray.gamma));
  }
}

cplx integrate_ray_inner(const std::vector<cplx>& anchors, const std::vector<cplx>& zeros, cplx fprime0, real gamma,
                         real t_end, const IntegratorOptions& opts) {
  return integrate_ray(OdeParams::inner(anchors, zeros), fprime0, {gamma, t_end, Formulation::inner}, opts).value;
}

cplx integrate_ray_outer(const std::vector<cplx>& anchors, const std::vector<cplx>& zeros, cplx lead, real gamma,
                         real t_end, const IntegratorOptions& opts) {
  return integrate_ray(OdeParams::outer(anchors, zeros), lead, {gamma, t_end, Formulation::outer}, opts).value;
}

// ---------------------------------------------------------------------------

QuadraticDifferential::QuadraticDifferential(const OdeParams& p) : params_(p) {}

cplx QuadraticDifferential::operator()(cplx z) const {
  cplx num{-1}, den{1};
  for (auto b : params_.zeros) num *= (z - b);
  for (auto a : params_.anchors) den *= (z - a);
  if (params_.formulation == Formulation::inner) den *= params_.scale * z * z;
  return num / den;
}

QuadraticDifferential::Local QuadraticDifferential::local_at(cplx p, real tol) const {
  Local loc;
  cplx num{-1}, den{1};
  for (auto b : params_.zeros) {
    if (std::abs(p - b) <= tol)
      ++loc.order;
    else
      num *= (p - b);
  }
  for (auto a : params_.anchors) {
    if (std::abs(p - a) <= tol)
      --loc.order;
    else
      den *= (p - a);
  }
  if (params_.formulation == Formulation::inner) {
    if (std::abs(p) <= tol)
      loc.order -= 2;
    else
      den *= p * p;
    den *= params_.scale;
  }
  loc.coeff = num / den;
  return loc;
}

std::vector<real> QuadraticDifferential::launch_directions(cplx p) const {
  const Local loc = local_at(p);
  if (loc.order < -1) throw TracingError("no critical trajectory leaves a pole of order two or more");
  std::vector<real> dirs;
  const int k = loc.order + 2;
  for (int j = 0; j < k; ++j) dirs.push_back(wrap_angle((-std::arg(loc.coeff) + two_pi * j) / k));
  return dirs;
}

Trajectory trace_trajectory(const QuadraticDifferential& q, cplx start, const StopCondition& stop,
                            const TraceOptions& opts) {
  const auto loc = q.local_at(start);
  if (loc.order == 0) throw TracingError("trajectory start is not a zero or pole of Q");
  const auto dirs = q.launch_directions(start);
  if (dirs.size() > 1 && !opts.direction) throw AmbiguousStartError("a direction index is required at a zero of Q");
  const std::size_t idx = opts.direction.value_or(0);
  if (idx >= dirs.size()) throw std::invalid_argument("trace_trajectory: direction index out of range");

  // dz/ds = Q^{-1/2}, sign continued from the reference direction
  auto field = [&](cplx z, cplx ref) {
    cplx v = real(1) / std::sqrt(q(z));
    if (std::real(v * std::conj(ref)) < 0) v = -v;
    return v;
  };

  Trajectory tr;
  tr.start_anchor = start;
  const int m = loc.order;
  real s = std::min<real>(1e-8L, opts.step);
  const real r0 = std::pow((m + 2) * s / (2 * std::sqrt(std::abs(loc.coeff))), real(2) / (m + 2));
  cplx tangent = std::polar<real>(1, dirs[idx]);
  tr.points = {start, start + r0 * tangent};
  tr.tangents = {tangent, tangent};
  tr.s = {0, s};
  cplx z = tr.points.back();
  tangent = field(z, tangent);

  auto rk4 = [&](cplx z0, cplx t0, real h) {
    const cplx k1 = field(z0, t0);
    const cplx k2 = field(z0 + h / 2 * k1, k1);
    const cplx k3 = field(z0 + h / 2 * k2, k2);
    const cplx k4 = field(z0 + h * k3, k3);
    return z0 + h / 6 * (k1 + real(2) * k2 + real(2) * k3 + k4);
  };
  auto push = [&](cplx zz, cplx ref, real ss) {
    tr.points.push_back(zz);
    const cplx v = field(zz, ref);
    tr.tangents.push_back(v / std::abs(v));
    tr.s.push_back(ss);
    return v;
  };

  auto pole_distance = [&](cplx zz) {
    real d = std::numeric_limits<real>::infinity();
    for (auto a : q.params().anchors)
      if (std::abs(a - start) > 1e-12L) d = std::min(d, std::abs(zz - a));
    if (q.params().formulation == Formulation::inner) d = std::min(d, std::abs(zz));
    return d;
  };

  std::vector<cplx> goals = stop.targets;
  if (stop.target) goals.push_back(*stop.target);
  std::vector<real> prev_dist;
  for (cplx g : goals) prev_dist.push_back(std::abs(z - g));
  for (std::size_t n = 0;; ++n) {
    if (n >= opts.max_steps) throw TracingError("trajectory exceeded its step budget");
    real h = std::min(opts.step, real(0.25) * s);
    const real qs = std::sqrt(std::abs(q(z)));
    h = std::min(h, opts.max_dz * qs);
    h = std::min(h, real(0.25) * pole_distance(z) * qs);
    bool last = false;
    if (s + h >= stop.max_arc_length) {
      h = stop.max_arc_length - s;
      last = true;
    }
    const cplx zn = rk4(z, tangent, h);
    if (!is_finite(zn)) throw TracingError("trajectory produced a non-finite point");

    if (stop.im_level) {
      const real lv = *stop.im_level;
      if ((std::imag(z) - lv) * (std::imag(zn) - lv) <= 0 && std::imag(zn) != std::imag(z)) {
        real lo = 0, hi = h;
        for (int i = 0; i < 80; ++i) {
          const real mid = (lo + hi) / 2;
          const cplx zm = rk4(z, tangent, mid);
          if ((std::imag(z) - lv) * (std::imag(zm) - lv) <= 0)
            hi = mid;
          else
            lo = mid;
        }
        const cplx zc = rk4(z, tangent, hi);
        push(cplx(std::real(zc), lv), tangent, s + hi);
        tr.stop_reason = StopReason::im_threshold;
        return tr;
      }
    }
    if (pole_distance(zn) <= stop.target_tol) {
      // critical trajectories end at the poles they run into
      cplx pole = 0;
      for (auto a : q.params().anchors)
        if (std::abs(zn - a) <= stop.target_tol) pole = a;
      push(pole, tangent, s + h);
      tr.stop_reason = StopReason::met_point;
      return tr;
    }
    {
      const real step_len = std::abs(zn - z);
      for (std::size_t k = 0; k < goals.size(); ++k) {
        const real d = std::abs(zn - goals[k]);
        if (d <= stop.target_tol) {
          push(goals[k], tangent, s + h);
          tr.stop_reason = StopReason::met_point;
          return tr;
        }
        if (d > prev_dist[k] && prev_dist[k] <= 2 * step_len) {
          // closest approach lay between z and zn
          push(goals[k], tangent, s + prev_dist[k] * std::sqrt(std::abs(q(z))));
          tr.stop_reason = StopReason::met_point;
          return tr;
        }
        prev_dist[k] = d;
      }
    }
    if (stop.max_modulus && std::abs(zn) > *stop.max_modulus) {
      push(zn, tangent, s + h);
      tr.stop_reason = StopReason::escaped;
      return tr;
    }
    s += h;
    tangent = push(zn, tangent, s);
    z = zn;
    if (last) {
      tr.stop_reason = StopReason::arc_length;
      return tr;
    }
  }
}

}  // namespace ptc
