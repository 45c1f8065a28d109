#include "ptc/configurations.hpp"

#include "ptc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptc {

namespace {

bool is_six(ConfigId c) { return c == ConfigId::six_sym_1 || c == ConfigId::six_sym_2 || c == ConfigId::outer_six_sym; }

int six_topology(const PTProblem& p) {
  if (p.config == ConfigId::six_sym_1) return 1;
  if (p.config == ConfigId::six_sym_2) return 2;
  return p.topology;
}

// Sign of the outer lead for the six-point word: positive when a0 is the
// rightmost real anchor.
real outer_six_sign(const PTProblem& p) { return std::real(p.anchors[0]) > std::real(p.anchors[3]) ? 1 : -1; }

Vec vec_of(std::initializer_list<real> v) {
  Vec r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (real x : v) r[i++] = x;
  return r;
}

void push_diff(std::vector<real>& out, cplx d) {
  out.push_back(std::real(d));
  out.push_back(std::imag(d));
}

Vec to_vec(const std::vector<real>& v) {
  Vec r(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r[static_cast<Eigen::Index>(i)] = v[i];
  return r;
}

// Six-point words share their tail; the outer form starts with alpha0 = 0.
std::vector<std::pair<std::string, real>> six_word(int topology, const Vec& x, bool outer) {
  std::vector<std::pair<std::string, real>> w;
  if (outer) w.push_back({"alpha0", 0});
  if (topology == 1) {
    const real b11 = x[3], b12 = x[4], b21 = x[5], b22 = x[6];
    const real a1 = (b11 + b12) / 2, a2 = (b21 + b22) / 2;
    w.insert(w.end(), {{"beta1_1", b11},
                       {"alpha1", a1},
                       {"beta1_2", b12},
                       {"beta2_1", b21},
                       {"alpha2", a2},
                       {"beta2_2", b22},
                       {"alpha3", pi},
                       {"beta2_3", two_pi - b22},
                       {"alpha4", two_pi - a2},
                       {"beta2_4", two_pi - b21},
                       {"beta1_3", two_pi - b12},
                       {"alpha5", two_pi - a1},
                       {"beta1_4", two_pi - b11}});
  } else {
    const real b11 = x[4], b21 = x[5], b22 = x[6], b23 = x[7];
    const real b12 = b21 - b11 + b23;
    const real a1 = (b21 + b22) / 2, a2 = (b22 + b23) / 2;
    w.insert(w.end(), {{"beta1_1", b11},
                       {"beta2_1", b21},
                       {"alpha1", a1},
                       {"beta2_2", b22},
                       {"alpha2", a2},
                       {"beta2_3", b23},
                       {"beta1_2", b12},
                       {"alpha3", pi},
                       {"beta1_3", two_pi - b12},
                       {"beta3_1", two_pi - b23},
                       {"alpha4", two_pi - a2},
                       {"beta3_2", two_pi - b22},
                       {"alpha5", two_pi - a1},
                       {"beta3_3", two_pi - b21},
                       {"beta1_4", two_pi - b11}});
  }
  return w;
}

void require_symmetric(const PTProblem& p, std::size_t first) {
  const auto& a = p.anchors;
  const real scale = std::max<real>(1, std::abs(a[first]) + std::abs(a[first + 1]) + std::abs(a[first + 2]));
  const real tol = 1e-12L * scale;
  if (std::abs(std::imag(a[first + 2])) > tol || std::abs(a[first + 3] - std::conj(a[first + 1])) > tol ||
      std::abs(a[first + 4] - std::conj(a[first])) > tol)
    throw std::invalid_argument("symmetric six-point anchors must satisfy a3 real, a4 = conj(a2), a5 = conj(a1)");
}

}  // namespace

const char* to_string(ConfigId c) {
  switch (c) {
    case ConfigId::three_point:
      return "three_point";
    case ConfigId::six_sym_1:
      return "six_sym_1";
    case ConfigId::six_sym_2:
      return "six_sym_2";
    case ConfigId::outer_two:
      return "outer_two";
    case ConfigId::outer_three_sym:
      return "outer_three_sym";
    case ConfigId::outer_six_sym:
      return "outer_six_sym";
  }
  return "unknown";
}

ConfigId config_from_string(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), '-', '_');
  for (ConfigId c : {ConfigId::three_point, ConfigId::six_sym_1, ConfigId::six_sym_2, ConfigId::outer_two,
                     ConfigId::outer_three_sym, ConfigId::outer_six_sym})
    if (t == to_string(c)) return c;
  if (t == "outer_three") return ConfigId::outer_three_sym;
  if (t == "outer_six") return ConfigId::outer_six_sym;
  throw std::invalid_argument("unknown configuration '" + s + "'");
}

PTProblem PTProblem::make(ConfigId config, std::vector<cplx> anchors, int topology) {
  PTProblem p;
  p.config = config;
  p.anchors = std::move(anchors);
  p.topology = topology;
  std::size_t expected = 0;
  switch (config) {
    case ConfigId::three_point:
      expected = 2;
      p.formulation = Formulation::inner;
      break;
    case ConfigId::six_sym_1:
    case ConfigId::six_sym_2:
      expected = 5;
      p.formulation = Formulation::inner;
      p.symmetric = true;
      p.topology = config == ConfigId::six_sym_1 ? 1 : 2;
      break;
    case ConfigId::outer_two:
      expected = 2;
      p.formulation = Formulation::outer;
      break;
    case ConfigId::outer_three_sym:
      expected = 3;
      p.formulation = Formulation::outer;
      break;
    case ConfigId::outer_six_sym:
      expected = 6;
      p.formulation = Formulation::outer;
      p.symmetric = true;
      if (topology < 0 || topology > 2) throw std::invalid_argument("outer_six_sym topology must be 0, 1 or 2");
      break;
  }
  if (p.anchors.size() != expected)
    throw std::invalid_argument(std::string(to_string(config)) + " needs " + std::to_string(expected) + " anchors");
  for (std::size_t i = 0; i < p.anchors.size(); ++i) {
    if (!is_finite(p.anchors[i])) throw std::invalid_argument("anchors must be finite");
    if (p.formulation == Formulation::inner && p.anchors[i] == cplx{})
      throw std::invalid_argument("inner anchors must be nonzero");
    for (std::size_t j = 0; j < i; ++j)
      if (p.anchors[i] == p.anchors[j]) throw std::invalid_argument("anchors must be distinct");
  }
  if (config == ConfigId::six_sym_1 || config == ConfigId::six_sym_2) require_symmetric(p, 0);
  if (config == ConfigId::outer_six_sym) {
    require_symmetric(p, 1);
    if (std::abs(std::imag(p.anchors[0])) > 1e-12L * std::max<real>(1, std::abs(p.anchors[0])))
      throw std::invalid_argument("outer_six_sym anchor a0 must be real");
  }
  if (config == ConfigId::outer_three_sym) {
    bool closed = true;
    for (auto a : p.anchors) {
      bool found = false;
      for (auto b : p.anchors) found = found || std::abs(std::conj(a) - b) <= 1e-12L * std::max<real>(1, std::abs(a));
      closed = closed && found;
    }
    p.symmetric = closed;
  }
  return p;
}

real MapData::angle(const std::string& name) const {
  for (const auto& [n, v] : angles)
    if (n == name) return v;
  throw std::out_of_range("no angle named " + name);
}

std::size_t unknown_count(ConfigId config, int topology) {
  switch (config) {
    case ConfigId::three_point:
      return 6;
    case ConfigId::six_sym_1:
      return 7;
    case ConfigId::six_sym_2:
      return 8;
    case ConfigId::outer_two:
      return 2;
    case ConfigId::outer_three_sym:
      return 6;
    case ConfigId::outer_six_sym:
      return topology == 2 ? 8 : 7;
  }
  return 0;
}

MapData decode(const PTProblem& problem, const Vec& x) {
  const int topo = six_topology(problem);
  if (static_cast<std::size_t>(x.size()) != unknown_count(problem.config, topo))
    throw std::invalid_argument("unknown vector has the wrong dimension for " + std::string(to_string(problem.config)));
  MapData m;
  switch (problem.config) {
    case ConfigId::three_point: {
      m.lead = {x[0], x[1]};
      m.b_points = {{x[2], x[3]}};
      m.zeros = m.b_points;
      const real b1 = x[4], b2 = x[5], b3 = two_pi - x[4];
      m.angles = {{"beta1", b1}, {"alpha1", (b1 + b2) / 2}, {"beta2", b2}, {"alpha2", (b2 + b3) / 2}, {"beta3", b3}};
      break;
    }
    case ConfigId::six_sym_1:
    case ConfigId::six_sym_2:
    case ConfigId::outer_six_sym: {
      const bool outer = problem.config == ConfigId::outer_six_sym;
      m.lead = outer ? outer_six_sign(problem) * x[0] : x[0];
      if (topo == 1) {
        m.b_points = {x[1], x[2]};
        m.zeros = {x[1], x[1], x[2], x[2]};
      } else {
        const cplx b2{x[2], x[3]};
        m.b_points = {x[1], b2, std::conj(b2)};
        m.zeros = {x[1], x[1], b2, std::conj(b2)};
      }
      m.angles = six_word(topo, x, outer);
      break;
    }
    case ConfigId::outer_two:
      m.lead = x[0];
      m.angles = {{"alpha1", wrap_angle(x[1])}, {"alpha2", wrap_angle(x[1] + pi)}};
      break;
    case ConfigId::outer_three_sym: {
      m.lead = x[0];
      m.b_points = {{x[1], x[2]}};
      m.zeros = m.b_points;
      const real b1 = x[3], b2 = x[4], b3 = x[5];
      m.angles = {{"alpha1", wrap_angle((b3 - two_pi + b1) / 2)},
                  {"beta1", wrap_angle(b1)},
                  {"alpha2", wrap_angle((b1 + b2) / 2)},
                  {"beta2", wrap_angle(b2)},
                  {"alpha3", wrap_angle((b2 + b3) / 2)},
                  {"beta3", wrap_angle(b3)}};
      break;
    }
  }
  return m;
}

OdeParams ode_params(const PTProblem& problem, const MapData& m) {
  if (problem.formulation == Formulation::inner) return OdeParams::inner(problem.anchors, m.zeros);
  return OdeParams::outer(problem.anchors, m.zeros);
}

cplx boundary_value(const PTProblem& problem, const MapData& m, real gamma, const IntegratorOptions& opts) {
  return integrate_ray(ode_params(problem, m), m.lead, {gamma, 1, problem.formulation}, opts).value;
}

bool angles_in_word_order(const MapData& m) {
  // the inner words start right after the point at angle 0 (f = ∞)
  std::vector<real> seq;
  const bool fixed_zero = m.angles.size() >= 5 && m.angles.front().first != "alpha1";
  if (fixed_zero && m.angles.front().first != "alpha0") seq.push_back(0);
  for (const auto& a : m.angles) {
    if (!std::isfinite(a.second)) return false;
    seq.push_back(a.second);
  }
  if (fixed_zero) {
    for (std::size_t i = 1; i < seq.size(); ++i)
      if (!(seq[i] > seq[i - 1])) return false;
    return seq.back() < two_pi;
  }
  real total = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const real gap = wrap_angle(seq[(i + 1) % seq.size()] - seq[i]);
    if (!(gap > 0)) return false;
    total += gap;
  }
  return std::abs(total - two_pi) < 1e-9L;
}

// ---------------------------------------------------------------------------

Vec residuals_3pt(const PTProblem& problem, const Vec& x, const IntegratorOptions& opts) {
  if (problem.config != ConfigId::three_point) throw std::invalid_argument("residuals_3pt: wrong configuration");
  const MapData m = decode(problem, x);
  const auto ode = ode_params(problem, m);
  auto f = [&](real g) { return integrate_ray(ode, m.lead, {g, 1, Formulation::inner}, opts).value; };
  const real b1 = m.angle("beta1"), b2 = m.angle("beta2"), b3 = m.angle("beta3");
  const real a1 = m.angle("alpha1"), a2 = m.angle("alpha2");
  std::vector<real> r;
  push_diff(r, f(b1 / 2) - f(-b1 / 2));
  push_diff(r, f((a1 + b1) / 2) - f((a1 + b2) / 2));
  push_diff(r, f((a2 + b2) / 2) - f((a2 + b3) / 2));
  return to_vec(r);
}

Vec residuals_6pt_sym(const PTProblem& problem, int config, const Vec& x, const IntegratorOptions& opts) {
  if (!is_six(problem.config)) throw std::invalid_argument("residuals_6pt_sym: wrong configuration");
  if (six_topology(problem) != config) throw std::invalid_argument("residuals_6pt_sym: topology mismatch with problem");
  const MapData m = decode(problem, x);
  const auto ode = ode_params(problem, m);
  auto f = [&](real g) { return integrate_ray(ode, m.lead, {g, 1, problem.formulation}, opts).value; };
  auto A = [&](const char* n) { return m.angle(n); };
  std::vector<real> r;
  if (config == 1) {
    r.push_back(std::imag(f(A("beta1_1") / 2)));
    push_diff(r, f((A("alpha1") + A("beta1_1")) / 2) - f((A("alpha1") + A("beta1_2")) / 2));
    r.push_back(std::imag(f((A("beta1_2") + A("beta2_1")) / 2)));
    push_diff(r, f((A("alpha2") + A("beta2_1")) / 2) - f((A("alpha2") + A("beta2_2")) / 2));
    r.push_back(std::imag(f((A("alpha3") + A("beta2_2")) / 2)));
  } else {
    r.push_back(std::imag(f(A("beta1_1") / 2)));
    push_diff(r, f((A("alpha1") + A("beta2_1")) / 2) - f((A("alpha1") + A("beta2_2")) / 2));
    push_diff(r, f((A("alpha2") + A("beta2_2")) / 2) - f((A("alpha2") + A("beta2_3")) / 2));
    // midpoint of the arc (beta1_2, alpha3), which always lies on the real edge b1-a3
    r.push_back(std::imag(f((A("alpha3") + A("beta1_2")) / 2)));
    push_diff(r, f((A("beta1_1") + A("beta2_1")) / 2) - f((A("beta2_3") + A("beta1_2")) / 2));
  }
  return to_vec(r);
}

Vec residuals_outer_two(const PTProblem& problem, const Vec& x, const IntegratorOptions& opts) {
  if (problem.config != ConfigId::outer_two) throw std::invalid_argument("residuals_outer_two: wrong configuration");
  const MapData m = decode(problem, x);
  const auto ode = ode_params(problem, m);
  auto g = [&](real a) { return integrate_ray(ode, m.lead, {a, 1, Formulation::outer}, opts).value; };
  std::vector<real> r;
  push_diff(r, g(x[1] + pi / 2) - g(x[1] - pi / 2));
  return to_vec(r);
}

Vec residuals_outer_three(const PTProblem& problem, const Vec& x, const IntegratorOptions& opts) {
  if (problem.config != ConfigId::outer_three_sym) throw std::invalid_argument("residuals_outer_three: wrong configuration");
  const MapData m = decode(problem, x);
  const auto ode = ode_params(problem, m);
  auto g = [&](real a) { return integrate_ray(ode, m.lead, {a, 1, Formulation::outer}, opts).value; };
  const real b1 = x[3], b2 = x[4], b3 = x[5];
  const real b0 = b3 - two_pi;
  const real a1 = (b0 + b1) / 2, a2 = (b1 + b2) / 2, a3 = (b2 + b3) / 2;
  std::vector<real> r;
  push_diff(r, g((b0 + a1) / 2) - g((a1 + b1) / 2));
  push_diff(r, g((b1 + a2) / 2) - g((a2 + b2) / 2));
  push_diff(r, g((b2 + a3) / 2) - g((a3 + b3) / 2));
  return to_vec(r);
}

Vec residuals(const PTProblem& problem, const Vec& x, const IntegratorOptions& opts) {
  // iterates off the configuration word describe another topology
  if (!angles_in_word_order(decode(problem, x))) throw NumericalError("angles out of word order");
  switch (problem.config) {
    case ConfigId::three_point:
      return residuals_3pt(problem, x, opts);
    case ConfigId::six_sym_1:
    case ConfigId::six_sym_2:
    case ConfigId::outer_six_sym:
      return residuals_6pt_sym(problem, six_topology(problem), x, opts);
    case ConfigId::outer_two:
      return residuals_outer_two(problem, x, opts);
    case ConfigId::outer_three_sym:
      return residuals_outer_three(problem, x, opts);
  }
  throw std::invalid_argument("unsupported configuration");
}

// ---------------------------------------------------------------------------

void check_orbit_guard(const PTProblem& problem, const OrbitOptions& oopts) {
  if (problem.config != ConfigId::six_sym_1) throw std::invalid_argument("critical-orbit residuals need six_sym_1");
  const auto& a = problem.anchors;
  const real ratio = std::max(std::abs(a[0]), std::abs(a[1])) / std::abs(a[2]);
  if (ratio > oopts.max_anchor_ratio)
    throw std::invalid_argument("critical-orbit mode rejected: a1, a2 are too close to infinity relative to a3");
}

Vec orbit_unknowns(const Vec& x) { return vec_of({x[0], x[1], x[2]}); }

Vec residuals_critical_orbit(const PTProblem& problem, const Vec& x, const IntegratorOptions& iopts,
                             const OrbitOptions& oopts) {
  check_orbit_guard(problem, oopts);
  if (x.size() != 3) throw std::invalid_argument("critical-orbit residuals take 3 unknowns");
  MapData m;
  m.lead = x[0];
  m.b_points = {x[1], x[2]};
  m.zeros = {x[1], x[1], x[2], x[2]};
  const auto ode = ode_params(problem, m);
  const QuadraticDifferential q(ode);

  auto level_point = [&](cplx start, cplx toward, real level) {
    TraceOptions t = oopts.trace;
    const auto dirs = q.launch_directions(start);
    if (dirs.size() > 1) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < dirs.size(); ++k)
        if (std::cos(dirs[k] - std::arg(toward - start)) > std::cos(dirs[best] - std::arg(toward - start))) best = k;
      t.direction = best;
    }
    StopCondition stop;
    stop.im_level = level;
    stop.max_arc_length = two_pi + 1;
    auto tr = trace_trajectory(q, start, stop, t);
    if (tr.stop_reason != StopReason::im_threshold)
      throw TracingError("critical orbit did not reach the imaginary-part threshold");
    return tr.points.back();
  };

  std::vector<real> r;
  for (int i = 0; i < 2; ++i) {
    const cplx a = problem.anchors[static_cast<std::size_t>(i)];
    const cplx b = x[1 + i];
    const real level = std::imag(a) / 2;
    r.push_back(std::real(level_point(a, b, level)) - std::real(level_point(b, a, level)));
  }
  r.push_back(std::imag(integrate_ray(ode, m.lead, {oopts.probe_angle, 1, Formulation::inner}, iopts).value));
  return to_vec(r);
}

// ---------------------------------------------------------------------------
// Seeds

namespace {

// Unperturbed boundary: the slit from T to ∞ along the ray through T (inner),
// or the real segment between a0 and a3 (outer six).
struct LineModel {
  bool inner = true;
  cplx tip;           // inner
  real m = 0, r = 0;  // outer: x(θ) = m + r cos θ
  cplx lead0;

  // angle of the base point x (a point of the line)
  real theta(cplx x) const {
    if (inner) {
      const real s = std::real(x / tip);
      if (!(s > 1)) throw std::domain_error("spike base is not on the slit");
      return 2 * std::asin(1 / std::sqrt(s));
    }
    const real c = (std::real(x) - m) / r;
    if (!(std::abs(c) < 1)) throw std::domain_error("spike base is not on the segment");
    return std::acos(c);
  }
  // |dx/dθ| at θ
  real speed(real th) const {
    if (inner) return std::abs(tip) * std::cos(th / 2) / std::pow(std::sin(th / 2), 3);
    return std::abs(r) * std::sin(th);
  }
  // point on the line below the spike point p
  cplx base(cplx p) const {
    if (inner) return tip * std::real(p / tip);
    return std::real(p);
  }
  // signed height of p above the line, positive on the side traversed for θ in (0, π)
  real height(cplx p) const {
    if (inner) return -std::imag(p / tip) * std::abs(tip);
    return (r > 0 ? 1 : -1) * std::imag(p);
  }
};

LineModel inner_model(cplx tip) {
  LineModel lm;
  lm.inner = true;
  lm.tip = tip;
  lm.lead0 = -real(4) * tip;
  return lm;
}

LineModel outer_model(real a0, real a3) {
  LineModel lm;
  lm.inner = false;
  lm.m = (a0 + a3) / 2;
  lm.r = a0 - lm.m;
  lm.lead0 = lm.r / 2;
  return lm;
}

LineModel six_model(const PTProblem& p) {
  if (p.config == ConfigId::outer_six_sym) return outer_model(std::real(p.anchors[0]), std::real(p.anchors[3]));
  return inner_model(p.anchors[2]);
}

// Canonical labels for symmetric six-point anchors: a1, a2 on the side
// traversed first, a1 the spike met first.
void canonicalize_six(PTProblem& p) {
  const LineModel lm = six_model(p);
  const std::size_t o = p.config == ConfigId::outer_six_sym ? 1 : 0;
  auto& a = p.anchors;
  auto fix_side = [&](std::size_t i, std::size_t j) {
    if (lm.height(a[o + i]) < 0) std::swap(a[o + i], a[o + j]);
  };
  fix_side(0, 4);
  fix_side(1, 3);
  const real t1 = lm.theta(lm.base(a[o + 0])), t2 = lm.theta(lm.base(a[o + 1]));
  if (t1 > t2) {
    std::swap(a[o + 0], a[o + 1]);
    std::swap(a[o + 3], a[o + 4]);
  }
}

PTSolution solve_one(const PTProblem& problem_in, const std::optional<Vec>& seed, const PTOptions& opts);
PTProblem interpolate(const PTProblem& a, const PTProblem& b, real t);

// ∫ sqrt(Q) dz along the segment p -> r with the branch continued from p; the
// cosine substitution absorbs inverse square-root singularities at both ends.
// Normalized to a non-negative real part.
cplx edge_integral(const QuadraticDifferential& q, cplx p, cplx r) {
  static const QuadratureRule rule = composite_gauss(0, 1, 16, 16);
  cplx sum = 0, prev = 0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const real s = rule.nodes[k];
    const cplx z = p + (r - p) * ((1 - std::cos(pi * s)) / 2);
    cplx v = std::sqrt(q(z)) * (r - p) * (pi / 2 * std::sin(pi * s));
    if (k > 0 && std::real(v * std::conj(prev)) < 0) v = -v;
    prev = v;
    sum += rule.weights[k] * v;
  }
  return std::real(sum) < 0 ? -sum : sum;
}

// b-points of a symmetric six-point problem from the trajectory conditions
// Im ∫ sqrt(Q) dz = 0 along the non-real edges; angles from the Q-lengths.
std::optional<Vec> trajectory_seed(const PTProblem& p, const PTOptions& opts) {
  const bool outer = p.config == ConfigId::outer_six_sym;
  const std::size_t o = outer ? 1 : 0;
  const int topo = six_topology(p);
  const LineModel lm = six_model(p);
  const cplx a1 = p.anchors[o], a2 = p.anchors[o + 1], a3 = p.anchors[o + 2];

  auto qd = [&](const PTProblem& pp, const Vec& u) {
    std::vector<cplx> zeros;
    if (topo == 1)
      zeros = {u[0], u[0], u[1], u[1]};
    else
      zeros = {u[0], u[0], cplx(u[1], u[2]), cplx(u[1], -u[2])};
    return QuadraticDifferential(outer ? OdeParams::outer(pp.anchors, zeros) : OdeParams::inner(pp.anchors, zeros));
  };
  auto conditions = [&](const PTProblem& pp, const Vec& u) {
    const auto q = qd(pp, u);
    const cplx c1 = pp.anchors[o], c2 = pp.anchors[o + 1];
    if (topo == 1) return vec_of({std::imag(edge_integral(q, u[0], c1)), std::imag(edge_integral(q, u[1], c2))});
    const cplx b2(u[1], u[2]);
    return vec_of({std::imag(edge_integral(q, b2, c1)), std::imag(edge_integral(q, b2, c2)),
                   std::imag(edge_integral(q, u[0], b2))});
  };

  // start with short spikes, where the line model is accurate, and grow them
  PTProblem base = p;
  const real tau = real(0.02);
  Vec u0;
  if (topo == 1) {
    for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
      const cplx v = lm.base(p.anchors[o + i]) + tau * (p.anchors[o + i] - lm.base(p.anchors[o + i]));
      base.anchors[o + i] = v;
      base.anchors[o + 4 - i] = std::conj(v);
    }
    u0 = vec_of({std::real(lm.base(a1)), std::real(lm.base(a2))});
  } else {
    const cplx c = (lm.base(a1) + lm.base(a2)) / real(2);
    for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
      const cplx v = c + tau * (p.anchors[o + i] - c);
      base.anchors[o + i] = v;
      base.anchors[o + 4 - i] = std::conj(v);
    }
    const real hb = real(0.5) * std::min(std::abs(lm.height(base.anchors[o])), std::abs(lm.height(base.anchors[o + 1])));
    const cplx up = (base.anchors[o] - lm.base(base.anchors[o])) / std::abs(base.anchors[o] - lm.base(base.anchors[o]));
    const cplx b2 = c + hb * up;
    u0 = vec_of({std::real(c), std::real(b2), std::imag(b2)});
  }
  ContinuationOptions copts;
  copts.solver = opts.solver;
  copts.solver.tol = 1e-13L;
  copts.extrapolate = true;
  Vec u;
  try {
    auto path = continuation([&](const Vec& v, real t) { return conditions(interpolate(base, p, t), v); }, u0,
                             opts.continuation_steps, copts);
    u = path.back().report.root;
  } catch (const NumericalError&) {
    return std::nullopt;
  }

  const auto q = qd(p, u);
  auto len = [&](cplx from, cplx to) { return std::abs(edge_integral(q, from, to)); };
  Vec x(topo == 1 ? 7 : 8);
  x[0] = outer ? std::abs(std::real(lm.lead0)) : std::real(lm.lead0);
  if (topo == 1) {
    const real l1 = len(u[0], a1), l2 = len(u[1], a2);
    const real b22 = pi - len(u[1], a3);
    const real b21 = b22 - 2 * l2;
    const real b12 = b21 - len(u[0], u[1]);
    x << x[0], u[0], u[1], b12 - 2 * l1, b12, b21, b22;
  } else {
    const cplx b2(u[1], u[2]);
    const real stem = len(u[0], b2);
    const real b12 = pi - len(u[0], a3);
    const real b23 = b12 - stem;
    const real b22 = b23 - 2 * len(b2, a2);
    const real b21 = b22 - 2 * len(b2, a1);
    x << x[0], u[0], u[1], u[2], b21 - stem, b21, b22, b23;
  }
  return x;
}

}  // namespace

std::pair<PTProblem, Vec> initial_seed(const PTProblem& problem, const PTOptions& opts) {
  const real width = opts.seed_spike_width;
  switch (problem.config) {
    case ConfigId::outer_two: {
      const cplx d = problem.anchors[0] - problem.anchors[1];
      return {problem, vec_of({std::abs(d) / 4, std::arg(d)})};
    }
    case ConfigId::outer_three_sym: {
      // equilateral triangle fitted to the anchors, solved exactly
      const auto& a = problem.anchors;
      const cplx c = (a[0] + a[1] + a[2]) / real(3);
      const cplx om = std::polar<real>(1, two_pi / 3);
      const cplx z = ((a[0] - c) + (a[1] - c) * std::conj(om) + (a[2] - c) * std::conj(om * om)) / real(3);
      if (std::abs(z) == 0) throw std::invalid_argument("outer_three_sym: anchors are not in counter-clockwise order");
      PTProblem base = problem;
      base.anchors = {c + z, c + z * om, c + z * om * om};
      const real phi = std::arg(z);
      const real cap = std::abs(z) * std::pow(real(4), -real(1) / 3);
      return {base, vec_of({cap, std::real(c), std::imag(c), phi + pi / 3, phi + pi, phi + 5 * pi / 3})};
    }
    case ConfigId::three_point: {
      // z -> 1/z carries the tree onto the outer three-point tree of {0, 1/a1, 1/a2}
      const auto outer = solve_one(PTProblem::make(ConfigId::outer_three_sym,
                                                   {cplx{}, real(1) / problem.anchors[0], real(1) / problem.anchors[1]}),
                                   std::nullopt, opts);
      if (!outer.converged) throw NoConvergenceError("three_point: the inverted outer problem did not converge");
      const auto& om = outer.map;
      std::vector<real> alphas, betas;
      for (const auto& [name, ang] : om.angles) (name[0] == 'a' ? alphas : betas).push_back(ang);
      // the anchor at 0; g - a vanishes to second order there, so probe beside it
      auto near_zero = [&](real a) { return std::abs(outer.evaluate(a + real(1e-3), opts.integrator)); };
      real a0 = alphas[0];
      for (real a : alphas)
        if (near_zero(a) < near_zero(a0)) a0 = a;
      for (real& b : betas) b = wrap_angle(a0 - b);
      std::sort(betas.begin(), betas.end());
      const cplx lead = real(1) / (om.lead * std::polar<real>(1, a0));
      const cplx b = real(1) / om.b_points[0];
      Vec x(6);
      x << std::real(lead), std::imag(lead), std::real(b), std::imag(b), betas[0], betas[1];
      return {problem, x};
    }
    case ConfigId::six_sym_1:
    case ConfigId::six_sym_2:
    case ConfigId::outer_six_sym: {
      const bool outer = problem.config == ConfigId::outer_six_sym;
      const std::size_t o = outer ? 1 : 0;
      PTProblem p = problem;
      canonicalize_six(p);
      const LineModel lm = six_model(p);
      const int topo = six_topology(p);
      const cplx a1 = p.anchors[o], a2 = p.anchors[o + 1];
      const real lead_unknown = outer ? std::abs(std::real(lm.lead0)) : std::real(lm.lead0);
      PTProblem base = p;
      auto set_pair = [&](std::size_t i, cplx v) {
        base.anchors[o + i] = v;
        base.anchors[o + 4 - i] = std::conj(v);
      };
      if (topo == 1) {
        // each spike shrinks onto its own base point
        const real d1 = std::abs(lm.height(a1)) / lm.speed(lm.theta(lm.base(a1)));
        const real d2 = std::abs(lm.height(a2)) / lm.speed(lm.theta(lm.base(a2)));
        const real tau = std::min<real>(1, width / std::max(d1, d2));
        const cplx s1 = lm.base(a1) + tau * (a1 - lm.base(a1));
        const cplx s2 = lm.base(a2) + tau * (a2 - lm.base(a2));
        set_pair(0, s1);
        set_pair(1, s2);
        const real t1 = lm.theta(lm.base(s1)), t2 = lm.theta(lm.base(s2));
        const real e1 = lm.height(s1) / lm.speed(t1), e2 = lm.height(s2) / lm.speed(t2);
        Vec x(7);
        x << lead_unknown, std::real(lm.base(s1)), std::real(lm.base(s2)), t1 - e1, t1 + e1, t2 - e2, t2 + e2;
        return {base, x};
      }
      // a Y-shaped pair of spikes shrinks homothetically onto the stem base
      const cplx c = (lm.base(a1) + lm.base(a2)) / real(2);
      const real h = std::max(std::abs(lm.height(a1)), std::abs(lm.height(a2)));
      const real tc = lm.theta(c);
      const real tau = std::min<real>(1, width * lm.speed(tc) / h);
      const cplx s1 = c + tau * (a1 - c), s2 = c + tau * (a2 - c);
      set_pair(0, s1);
      set_pair(1, s2);
      const real hs = tau * h;
      const real delta = hs / lm.speed(tc);
      const real hb = real(0.5) * std::min(std::abs(lm.height(s1)), std::abs(lm.height(s2)));
      const cplx up = (s1 - lm.base(s1)) / std::abs(s1 - lm.base(s1));
      const cplx b2 = c + hb * up;
      const real inner_frac = std::sqrt(1 - (hb / hs) * (hb / hs));
      Vec x(8);
      x << lead_unknown, std::real(c), std::real(b2), std::imag(b2), tc - delta, tc - inner_frac * delta, tc,
          tc + inner_frac * delta;
      return {base, x};
    }
  }
  throw std::invalid_argument("unsupported configuration");
}

namespace {

PTSolution finish_solution(const PTProblem& problem, SolveReport rep, const PTOptions& opts) {
  PTSolution s;
  s.problem = problem;
  s.unknowns = rep.root;
  s.map = decode(problem, rep.root);
  s.residual_norm = rep.residual_norm;
  s.converged = rep.converged;
  s.report = std::move(rep);
  if (!s.converged) return s;
  if (!angles_in_word_order(s.map))
    throw TopologyMismatchError(std::string("solved angles leave the word order of ") + to_string(problem.config) +
                                (is_six(problem.config) ? "; try the other six-point configuration" : ""));
  IntegratorOptions fine = opts.integrator;
  fine.order = opts.verify_order;
  s.verified_residual = residuals(problem, s.unknowns, fine).cwiseAbs().maxCoeff();
  if (s.verified_residual > 10 * opts.solver.tol) s.converged = false;
  if (problem.config == ConfigId::three_point && s.converged) {
    // report the anchor at alpha1 first
    const cplx v = s.evaluate(s.map.angle("alpha1") + real(1e-3), opts.integrator);
    if (std::abs(v - problem.anchors[1]) < std::abs(v - problem.anchors[0]))
      std::swap(s.problem.anchors[0], s.problem.anchors[1]);
  }
  return s;
}

PTSolution unsolved(const PTProblem& problem, SolveReport rep) {
  PTSolution s;
  s.problem = problem;
  s.unknowns = rep.root;
  s.map = decode(problem, rep.root);
  s.residual_norm = std::numeric_limits<real>::infinity();
  s.converged = false;
  s.report = std::move(rep);
  return s;
}

PTProblem interpolate(const PTProblem& a, const PTProblem& b, real t) {
  PTProblem p = b;
  for (std::size_t i = 0; i < p.anchors.size(); ++i) p.anchors[i] = a.anchors[i] + t * (b.anchors[i] - a.anchors[i]);
  return p;
}

PTSolution solve_one(const PTProblem& problem_in, const std::optional<Vec>& seed, const PTOptions& opts) {
  PTProblem problem = problem_in;
  if (problem.config == ConfigId::outer_three_sym) {
    // counter-clockwise labels around the centroid
    const cplx c = (problem.anchors[0] + problem.anchors[1] + problem.anchors[2]) / real(3);
    const cplx first = problem.anchors[0];
    std::sort(problem.anchors.begin() + 1, problem.anchors.end(), [&](cplx u, cplx v) {
      return wrap_angle(std::arg(u - c) - std::arg(first - c)) < wrap_angle(std::arg(v - c) - std::arg(first - c));
    });
  }
  if (is_six(problem.config) && !seed) canonicalize_six(problem);
  auto fn = [&](const PTProblem& p) { return [p, &opts](const Vec& x) { return residuals(p, x, opts.integrator); }; };
  if (seed) return finish_solution(problem, solve_system(fn(problem), *seed, opts.solver), opts);

  ContinuationOptions copts;
  copts.solver = opts.solver;
  copts.extrapolate = true;

  // Newton homotopy F(x) = (1 - t) F(x0) when the seed is outside the basin
  auto solve_from = [&](const PTProblem& p, const Vec& start) {
    auto rep = solve_system(fn(p), start, opts.solver);
    if (rep.converged) return rep;
    const Vec r0 = residuals(p, start, opts.integrator);
    FamilyFn pull = [&](const Vec& x, real t) { return Vec(residuals(p, x, opts.integrator) - (1 - t) * r0); };
    return continuation(pull, start, opts.continuation_steps, copts).back().report;
  };

  if (is_six(problem.config)) {
    if (auto x = trajectory_seed(problem, opts)) {
      try {
        auto s = finish_solution(problem, solve_from(problem, *x), opts);
        if (s.converged) return s;
      } catch (const PathFailureError&) {
      }
    }
  }

  auto [base, x0] = initial_seed(problem, opts);
  bool same = true;
  for (std::size_t i = 0; i < base.anchors.size(); ++i) same = same && base.anchors[i] == problem.anchors[i];
  FamilyFn family = [&](const Vec& x, real t) { return residuals(interpolate(base, problem, t), x, opts.integrator); };
  try {
    auto start = solve_from(base, x0);
    if (same) return finish_solution(problem, std::move(start), opts);
    auto path = continuation(family, start.root, opts.continuation_steps, copts);
    return finish_solution(problem, std::move(path.back().report), opts);
  } catch (const PathFailureError& e) {
    SolveReport rep;
    if (!e.partial().empty()) rep = e.partial().back().report;
    rep.converged = false;
    rep.status = SolveStatus::stagnation;
    if (rep.root.size() == 0) rep.root = x0;
    return unsolved(problem, std::move(rep));
  }
}

}  // namespace

PTSolution solve_pt(const PTProblem& problem, const std::optional<Vec>& seed, const PTOptions& opts) {
  if (problem.config == ConfigId::outer_six_sym && problem.topology == 0) {
    PTProblem p1 = problem, p2 = problem;
    p1.topology = 1;
    p2.topology = 2;
    try {
      auto s = solve_one(p1, seed && seed->size() == 7 ? seed : std::nullopt, opts);
      if (s.converged) return s;
    } catch (const NumericalError&) {
    } catch (const std::domain_error&) {
    }
    return solve_one(p2, seed && seed->size() == 8 ? seed : std::nullopt, opts);
  }
  auto s = solve_one(problem, seed, opts);
  if (s.converged || seed || !is_six(problem.config)) return s;
  // a failed six-point solve: see whether the other topology fits
  PTProblem other = problem;
  if (problem.config == ConfigId::outer_six_sym) {
    other.topology = problem.topology == 1 ? 2 : 1;
  } else {
    other.config = problem.config == ConfigId::six_sym_1 ? ConfigId::six_sym_2 : ConfigId::six_sym_1;
    other.topology = other.config == ConfigId::six_sym_1 ? 1 : 2;
  }
  bool fits = false;
  try {
    fits = solve_one(other, std::nullopt, opts).converged;
  } catch (const NumericalError&) {
  } catch (const std::domain_error&) {
  }
  if (fits)
    throw TopologyMismatchError(std::string("no solution in ") + to_string(problem.config) + " topology " +
                                std::to_string(problem.topology) + "; the instance solves in " +
                                to_string(other.config) + " topology " + std::to_string(other.topology));
  return s;
}

std::vector<Trajectory> critical_graph(const PTSolution& s, const TraceOptions& opts, real escape_radius) {
  const QuadraticDifferential q(ode_params(s.problem, s.map));
  const auto& anchors = s.problem.anchors;
  const auto& zeros = s.map.b_points;
  real scale = 0;
  for (cplx a : anchors) scale = std::max(scale, std::abs(a));

  StopCondition base;
  base.max_arc_length = 4 * pi;
  base.target_tol = 1e-9L;
  if (s.problem.formulation == Formulation::inner) base.max_modulus = escape_radius * scale;

  auto index_of = [](const std::vector<cplx>& pts, cplx z) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (std::abs(pts[i] - z) <= 1e-8L * std::max<real>(1, std::abs(z))) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };

  std::vector<Trajectory> edges;
  if (zeros.empty()) {
    // anchors joined directly; keep each edge once
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      auto tr = trace_trajectory(q, anchors[i], base, opts);
      const auto ai = index_of(anchors, tr.points.back());
      if (ai >= 0 && static_cast<std::size_t>(ai) < i) continue;
      edges.push_back(std::move(tr));
    }
    return edges;
  }
  // every edge has a zero of Q at one end at least
  for (std::size_t j = 0; j < zeros.size(); ++j) {
    const std::size_t dirs = q.launch_directions(zeros[j]).size();
    StopCondition stop = base;
    for (std::size_t m = 0; m < zeros.size(); ++m)
      if (m != j) stop.targets.push_back(zeros[m]);
    for (std::size_t k = 0; k < dirs; ++k) {
      TraceOptions t = opts;
      t.direction = k;
      auto tr = trace_trajectory(q, zeros[j], stop, t);
      const auto zm = index_of(zeros, tr.points.back());
      if (tr.stop_reason == StopReason::met_point && zm >= 0 && static_cast<std::size_t>(zm) < j) continue;
      edges.push_back(std::move(tr));
    }
  }
  return edges;
}

}  // namespace ptc
