#include "ptc/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ptc {

cplx koebe(cplx z) {
  if (z == cplx(1)) throw PoleError("koebe: pole at z = 1");
  return z / ((real(1) - z) * (real(1) - z));
}

cplx psi(cplx z, real R) {
  if (z == cplx(0)) throw PoleError("psi: pole at z = 0");
  const real R3 = R * R * R;
  return -(R3 - z) * (R3 - z) / (R3 * z);
}

real psi_gap(real R) {
  const real R3 = R * R * R;
  return (9 * R3 * R3 + 72) / (8 * R3);
}

cplx phi(cplx z, real R) { return (psi(z, R) - psi(cplx(1), R)) / psi_gap(R); }

namespace {

// Both solutions of φ(z) = w, the one inside |z| < R^3 first.
std::pair<cplx, cplx> phi_preimages(cplx w, real R) {
  const real R3 = R * R * R;
  const cplx target = psi_gap(R) * w + psi(cplx(1), R);
  // z^2 + (target R^3 - 2 R^3) z + R^6 = 0; the roots multiply to R^6
  const cplx b = (target - real(2)) * R3;
  const cplx disc = std::sqrt(b * b - real(4) * R3 * R3);
  const cplx big = std::abs(-b + disc) > std::abs(-b - disc) ? (-b + disc) / real(2) : (-b - disc) / real(2);
  return {R3 * R3 / big, big};
}

}  // namespace

cplx phi_inv(cplx w, real R) { return phi_preimages(w, R).first; }

cplx phi_inv_derivative(cplx z, real R) {
  const real R3 = R * R * R;
  return psi_gap(R) / (R3 / (z * z) - real(1) / R3);
}

real min_x() { return 1 + std::sqrt(2 * std::sqrt(real(3)) - 3); }

const char* to_string(TipReading r) { return r == TipReading::c1_c2 ? "c1_c2" : "c2_c3"; }

TipReading tip_reading_from_string(const std::string& s) {
  if (s == "c1_c2") return TipReading::c1_c2;
  if (s == "c2_c3") return TipReading::c2_c3;
  throw std::invalid_argument("unknown tip reading '" + s + "'");
}

namespace {

const cplx sixth = std::polar<real>(1, pi / 3);

// Intersections of the unit circles about c1 and c2, larger real part first.
std::pair<cplx, cplx> unit_circle_intersections(cplx c1, cplx c2, const char* what) {
  const real d = std::abs(c2 - c1);
  if (!(d <= 2) || d == 0) throw InfeasibleGeometryError(std::string(what) + " do not intersect");
  const cplx m = (c1 + c2) / real(2);
  const cplx n = (c2 - c1) / d * cplx(0, 1);
  const real h = std::sqrt(std::max<real>(0, 1 - d * d / 4));
  cplx p = m + h * n, q = m - h * n;
  if (std::real(q) > std::real(p)) std::swap(p, q);
  return {p, q};
}

// Cube root nearest to `near`.
cplx cube_root_near(cplx z, cplx near) {
  const cplx r = std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3);
  cplx best = r;
  for (int k = 1; k < 3; ++k) {
    const cplx c = r * std::polar<real>(1, two_pi * k / 3);
    if (std::abs(c - near) < std::abs(best - near)) best = c;
  }
  return best;
}

// Pulls a trajectory of the E-plane back to the w-plane, continuing the cube
// root from `start`.
DomainArc pull_back(const Trajectory& tr, real R, cplx start, int tip) {
  DomainArc arc;
  arc.tip = tip;
  cplx prev = start;
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    // on the image of |z| = R^3 both preimages lie on the circle
    const auto [inside, outside] = phi_preimages(tr.points[i], R);
    const cplx z = std::abs(inside - prev * prev * prev) <= std::abs(outside - prev * prev * prev) ? inside : outside;
    const cplx w = cube_root_near(z, prev);
    const cplx d = tr.tangents[i] * phi_inv_derivative(z, R) * w / (real(3) * z);
    arc.points.push_back(w);
    arc.tangents.push_back(d / std::abs(d));
    prev = w;
  }
  arc.e_points = tr.points;
  arc.e_tangents = tr.tangents;
  arc.s = tr.s;
  return arc;
}

// Point and unit normal of an arc at Q-length s, integrated from the nearest
// traced node below s.
struct ArcPoint {
  cplx w, normal;
};

ArcPoint arc_at(const QuadraticDifferential& q, const DomainArc& arc, real R, real s) {
  auto it = std::upper_bound(arc.s.begin(), arc.s.end(), s);
  std::size_t k = it == arc.s.begin() ? 0 : static_cast<std::size_t>(it - arc.s.begin()) - 1;
  k = std::min(k, arc.s.size() - 2);
  auto field = [&](cplx z, cplx ref) {
    cplx v = real(1) / std::sqrt(q(z));
    if (std::real(v * std::conj(ref)) < 0) v = -v;
    return v;
  };
  cplx z = arc.e_points[k], t = arc.e_tangents[k];
  const int n = 8;
  const real h = (s - arc.s[k]) / n;
  for (int i = 0; i < n; ++i) {
    const cplx k1 = field(z, t);
    const cplx k2 = field(z + h / 2 * k1, k1);
    const cplx k3 = field(z + h / 2 * k2, k2);
    const cplx k4 = field(z + h * k3, k3);
    z += h / 6 * (k1 + real(2) * k2 + real(2) * k3 + k4);
    t = k4;
  }
  t = field(z, t);
  const auto [inside, outside] = phi_preimages(z, R);
  const cplx near3 = arc.points[k] * arc.points[k] * arc.points[k];
  const cplx zeta = std::abs(inside - near3) <= std::abs(outside - near3) ? inside : outside;
  const cplx w = cube_root_near(zeta, arc.points[k]);
  const cplx d = t * phi_inv_derivative(zeta, R) * w / (real(3) * zeta);
  return {w, cplx(0, 1) * d / std::abs(d)};
}

std::size_t nearest_direction(const QuadraticDifferential& q, cplx from, cplx toward) {
  const auto dirs = q.launch_directions(from);
  std::size_t best = 0;
  for (std::size_t k = 1; k < dirs.size(); ++k)
    if (std::cos(dirs[k] - std::arg(toward - from)) > std::cos(dirs[best] - std::arg(toward - from))) best = k;
  return best;
}

bool segment_intersection(cplx p0, cplx p1, cplx q0, cplx q1, cplx& out) {
  const cplx r = p1 - p0, s = q1 - q0;
  const real den = std::imag(std::conj(r) * s);
  if (den == 0) return false;
  const real t = std::imag(std::conj(q0 - p0) * s) / den;
  const real u = std::imag(std::conj(q0 - p0) * r) / den;
  if (t < 0 || t > 1 || u < 0 || u > 1) return false;
  out = p0 + t * r;
  return true;
}

}  // namespace

TipGeometry tip_geometry(real x, real R, TipReading reading) {
  if (!(x >= min_x() - 1e-15L)) throw InfeasibleGeometryError("x is below 1 + sqrt(2 sqrt(3) - 3)");
  if (!(R > 4)) throw InfeasibleGeometryError("R must exceed 4");
  TipGeometry g;
  g.x = x;
  g.R = R;
  g.P1 = cplx(min_x(), 1);
  // unit distance below the halfline of argument π/3
  g.P2 = cplx(x, std::sqrt(real(3)) * x - 2);
  g.P3 = std::polar(R - 1, pi / 3 - std::asin(1 / (R - 1)));
  const auto [p, q] = unit_circle_intersections(g.P1, g.P2, "C1 and C2");
  g.w1 = p;
  g.w2 = reading == TipReading::c1_c2 ? q : unit_circle_intersections(g.P2, g.P3, "C2 and C3").first;
  return g;
}

DomainSpec build_domain(real x, real R, const DomainOptions& opts) {
  DomainSpec spec;
  spec.reading = opts.reading;
  spec.geometry = tip_geometry(x, R, opts.reading);
  const auto& g = spec.geometry;
  spec.z1 = g.w1 * g.w1 * g.w1;
  spec.z2 = g.w2 * g.w2 * g.w2;
  spec.a1 = phi(spec.z1, R);
  spec.a2 = phi(spec.z2, R);

  const auto problem = PTProblem::make(
      ConfigId::outer_six_sym, {1, spec.a1, spec.a2, 0, std::conj(spec.a2), std::conj(spec.a1)},
      opts.seed ? opts.seed_topology : 0);
  spec.solution = solve_pt(problem, opts.seed, opts.pt);
  if (!spec.solution.converged) throw NoConvergenceError("capacity solve for E did not converge");

  // the solve may relabel a1 and a2
  const auto& sol = spec.solution;
  const auto& anchors = sol.problem.anchors;
  const QuadraticDifferential q(ode_params(sol.problem, sol.map));
  const int topo = sol.problem.topology;
  auto tip_of = [&](cplx a) { return std::abs(a - spec.a1) < std::abs(a - spec.a2) ? 1 : 2; };
  auto start_of = [&](int tip) { return tip == 1 ? g.w1 : g.w2; };

  for (std::size_t i = 1; i <= 2; ++i) {
    const cplx a = anchors[i];
    const cplx b = topo == 1 ? sol.map.b_points[i - 1] : sol.map.b_points[1];
    StopCondition stop;
    stop.target = b;
    stop.target_tol = 1e-9L;
    stop.max_arc_length = two_pi;
    const auto tr = trace_trajectory(q, a, stop, opts.trace);
    if (tr.stop_reason != StopReason::met_point) throw TracingError("arc from a tip did not reach its branch point");
    const int tip = tip_of(a);
    spec.arcs.push_back(pull_back(tr, R, start_of(tip), tip));
  }
  std::sort(spec.arcs.begin(), spec.arcs.end(), [](const DomainArc& u, const DomainArc& v) { return u.tip < v.tip; });
  if (topo == 2) {
    TraceOptions t = opts.trace;
    const cplx b1 = sol.map.b_points[0], b2 = sol.map.b_points[1];
    t.direction = nearest_direction(q, b2, b1);
    StopCondition stop;
    stop.target = b1;
    stop.max_arc_length = two_pi;
    const auto tr = trace_trajectory(q, b2, stop, t);
    if (tr.stop_reason != StopReason::met_point) throw TracingError("stem arc did not reach the real axis");
    spec.arcs.push_back(pull_back(tr, R, spec.arcs[0].points.back(), 0));
  }
  return spec;
}

InradiusCheck inradius_check(const DomainSpec& spec) {
  InradiusCheck res;
  const DomainArc* arc[2] = {nullptr, nullptr};
  for (const auto& a : spec.arcs)
    if (a.tip == 1 || a.tip == 2) arc[a.tip - 1] = &a;
  if (!arc[0] || !arc[1]) throw std::invalid_argument("inradius_check: the spec has no arcs");

  // offset each arc towards the other one
  std::vector<cplx> gamma[2];
  real sign[2];
  for (int k = 0; k < 2; ++k) {
    const auto& pts = arc[k]->points;
    const auto& tan = arc[k]->tangents;
    const auto& other = arc[1 - k]->points;
    const std::size_t mid = pts.size() / 2;
    const cplx n_mid = cplx(0, 1) * tan[mid];
    sign[k] = std::real(std::conj(n_mid) * (other[other.size() / 2] - pts[mid])) >= 0 ? 1 : -1;
    for (std::size_t i = 0; i < pts.size(); ++i) gamma[k].push_back(pts[i] + sign[k] * cplx(0, 1) * tan[i]);
  }

  real best = std::numeric_limits<real>::infinity();
  bool found = false;
  std::size_t seg[2] = {0, 0};
  real frac[2] = {0, 0};
  for (std::size_t i = 0; i + 1 < gamma[0].size(); ++i) {
    const cplx p0 = gamma[0][i], p1 = gamma[0][i + 1];
    for (std::size_t j = 0; j + 1 < gamma[1].size(); ++j) {
      cplx hit;
      if (segment_intersection(p0, p1, gamma[1][j], gamma[1][j + 1], hit) && std::abs(hit) < best) {
        best = std::abs(hit);
        res.q = hit;
        found = true;
        seg[0] = i;
        seg[1] = j;
        frac[0] = std::abs(hit - p0) / std::abs(p1 - p0);
        frac[1] = std::abs(hit - gamma[1][j]) / std::abs(gamma[1][j + 1] - gamma[1][j]);
      }
    }
  }
  if (found) {
    // Newton on Γ1(s) = Γ2(u) with the arcs integrated between their nodes
    const QuadraticDifferential q(ode_params(spec.solution.problem, spec.solution.map));
    auto offset = [&](int k, real s) {
      const auto p = arc_at(q, *arc[k], spec.R(), s);
      return p.w + sign[k] * p.normal;
    };
    real su[2];
    for (int k = 0; k < 2; ++k) {
      const auto& sv = arc[k]->s;
      su[k] = sv[seg[k]] + frac[k] * (sv[seg[k] + 1] - sv[seg[k]]);
    }
    try {
      for (int it = 0; it < 8; ++it) {
        const cplx F = offset(0, su[0]) - offset(1, su[1]);
        const real h = 1e-7L;
        const cplx d0 = (offset(0, su[0] + h) - offset(0, su[0] - h)) / (2 * h);
        const cplx d1 = -(offset(1, su[1] + h) - offset(1, su[1] - h)) / (2 * h);
        // solve [d0 d1] (ds, du) = -F over the reals
        const real det = std::real(d0) * std::imag(d1) - std::imag(d0) * std::real(d1);
        if (det == 0) break;
        const real ds = (-std::real(F) * std::imag(d1) + std::imag(F) * std::real(d1)) / det;
        const real du = (-std::real(d0) * std::imag(F) + std::imag(d0) * std::real(F)) / det;
        su[0] += ds;
        su[1] += du;
        if (std::abs(ds) + std::abs(du) < 1e-15L) break;
      }
      const cplx refined = offset(0, su[0]);
      if (is_finite(refined) && std::abs(refined - res.q) < 1e-2L) res.q = refined;
    } catch (const NumericalError&) {
      // keep the polyline intersection
    }
  }
  if (!found) {
    res.passed = false;
    res.margin = -std::numeric_limits<real>::infinity();
    res.detail = "parallel curves do not intersect";
    return res;
  }
  res.margin = std::abs(res.q) - (spec.R() - 1);
  res.passed = res.margin >= 0;
  res.detail = res.passed ? "ok" : "|q| < R - 1";
  return res;
}

std::vector<std::vector<cplx>> boundary_polylines(const DomainSpec& spec) {
  const real R = spec.R();
  std::vector<std::vector<cplx>> out;
  for (int k = 0; k < 3; ++k) {
    const cplx rot = std::polar<real>(1, two_pi * k / 3);
    out.push_back({rot, R * rot});
    out.push_back({real(2) * sixth * rot, R * sixth * rot});
    for (const auto& a : spec.arcs) {
      std::vector<cplx> p, c;
      for (auto w : a.points) {
        p.push_back(w * rot);
        c.push_back(std::conj(w) * rot);
      }
      out.push_back(std::move(p));
      out.push_back(std::move(c));
    }
  }
  return out;
}

RadiusSearch max_radius_for_x(real x, const RadiusOptions& opts) {
  RadiusSearch res;
  auto eval = [&](real R) {
    ++res.evaluations;
    try {
      DomainSpec s = build_domain(x, R, opts.domain);
      return std::make_pair(inradius_check(s), std::move(s));
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os.precision(17);
      os << "max_radius_for_x: pipeline failed at R = " << static_cast<double>(R) << ": " << e.what();
      throw NoConvergenceError(os.str());
    }
  };

  real lo = opts.R_lo, hi = opts.R_hi;
  auto [c_lo, s_lo] = eval(lo);
  if (!c_lo.passed) throw NoConvergenceError("max_radius_for_x: the check fails at the lower end of the bracket");
  if (eval(hi).first.passed) throw NoConvergenceError("max_radius_for_x: the check passes at the upper end of the bracket");
  res.R = lo;
  res.spec = std::move(s_lo);
  res.check = c_lo;
  while (hi - lo > opts.tol) {
    const real mid = (lo + hi) / 2;
    auto [c, s] = eval(mid);
    if (c.passed) {
      lo = mid;
      res.R = mid;
      res.spec = std::move(s);
      res.check = c;
    } else {
      hi = mid;
    }
  }
  return res;
}

ComplexSeries symmetrize_cube_root(const ComplexSeries& g) {
  if (g.lead_exponent() != 0 || g.order() < 2) throw std::invalid_argument("symmetrize_cube_root: need a power series");
  if (g[0] != cplx(0)) throw std::invalid_argument("symmetrize_cube_root: g(0) must vanish");
  if (g[1] == cplx(0)) throw std::invalid_argument("symmetrize_cube_root: degenerate map, g'(0) = 0");
  std::vector<cplx> h(g.coeffs().begin() + 1, g.coeffs().end());
  const cplx hint = std::polar(std::cbrt(std::abs(g[1])), std::arg(g[1]) / 3);
  const ComplexSeries r = series_root(ComplexSeries(std::move(h)), 3, hint);
  std::vector<cplx> f(3 * r.order() - 1, cplx{});
  for (std::size_t m = 0; m < r.order(); ++m) f[3 * m + 1] = r[m];
  return ComplexSeries(std::move(f));
}

}  // namespace ptc
