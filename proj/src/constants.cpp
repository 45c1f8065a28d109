#include "ptc/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "ptc/quadrature.hpp"
#include "ptc/solver.hpp"

namespace ptc {

real bessel_j0(real x) {
  const real q = -x * x / 4;
  real term = 1, sum = 1;
  for (int k = 1; k < 200; ++k) {
    term *= q / (real(k) * real(k));
    sum += term;
    if (std::abs(term) < 1e-21L * std::max<real>(1, std::abs(sum))) break;
  }
  return sum;
}

namespace {

real bessel_j1(real x) {
  const real q = -x * x / 4;
  real term = x / 2, sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (real(k) * real(k + 1));
    sum += term;
    if (std::abs(term) < 1e-21L * std::max<real>(1, std::abs(sum))) break;
  }
  return sum;
}

}  // namespace

real bessel_j0_zero() {
  static const real zero = [] {
    real lo = 2, hi = 3;
    for (int i = 0; i < 20; ++i) {
      const real mid = (lo + hi) / 2;
      (bessel_j0(mid) > 0 ? lo : hi) = mid;
    }
    real x = (lo + hi) / 2;
    for (int i = 0; i < 20; ++i) {
      const real dx = bessel_j0(x) / -bessel_j1(x);
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    return x;
  }();
  return zero;
}

namespace {

// J0(j0 (1 + d)); for d > -1/2 by the Taylor series at j0, which keeps full
// relative accuracy near the zero.
real j0_offset(real d) {
  static const std::vector<real> c = [] {
    const real x0 = bessel_j0_zero();
    std::vector<real> c(90, 0);
    c[1] = -bessel_j1(x0);
    // x y'' + y' + x y = 0 about x0
    for (std::size_t k = 0; k + 2 < c.size(); ++k) {
      const real kk = static_cast<real>(k);
      const real prev = k >= 1 ? c[k - 1] : 0;
      c[k + 2] = -((kk + 1) * (kk + 1) * c[k + 1] + x0 * c[k] + prev) / (x0 * (kk + 2) * (kk + 1));
    }
    return c;
  }();
  const real x0 = bessel_j0_zero();
  if (d <= -0.5L) return bessel_j0(x0 * (1 + d));
  const real h = x0 * d;
  real s = 0;
  for (std::size_t k = c.size(); k-- > 0;) s = s * h + c[k];
  return s;
}

}  // namespace

real delta_n(std::size_t n) {
  if (n == 0) throw std::invalid_argument("delta_n: n must be positive");
  auto weight = [](real d) {
    const real J = j0_offset(d);
    return J * J;
  };
  static const real den = integrate_adaptive([&](real r) { return weight(r - 1) * r; }, 0, 1, 1e-18L);
  if (n == 1) return 1;
  const real nn = static_cast<real>(n);
  // r = exp(-v/n) resolves the peak of r^(2n-1) at r = 1
  const real num = integrate_adaptive([&](real v) { return weight(std::expm1(-v / nn)) * std::exp(-2 * v); }, 0, 48,
                                      1e-16L / (nn * nn));
  return nn * num / den;
}

std::vector<real> delta_table(std::size_t nmax) {
  std::vector<real> d(nmax + 1, 0);
  for (std::size_t n = 1; n <= nmax; ++n) d[n] = delta_n(n);
  return d;
}

// ---------------------------------------------------------------------------

real CoefficientMap::area_deviation() const { return std::abs(area_sum + area_tail - R * R) / (R * R); }

namespace {

// ∫ sqrt|Q(x)| dx over [lo, hi] ⊂ ℝ; the substitutions x = lo + t^2 and
// x = hi - t^2 absorb inverse square-root poles at the ends.
real real_q_length(const QuadraticDifferential& q, real lo, real hi) {
  if (hi < lo) std::swap(lo, hi);
  const real mid = (lo + hi) / 2;
  const auto& p = q.params();
  // sqrt|Q| at end + d, with every factor formed as (end - c) + d
  auto f = [&](real end, real d) {
    real num = 1, den = 1;
    for (auto b : p.zeros) num *= std::abs((cplx(end) - b) + d);
    for (auto a : p.anchors) den *= std::abs((cplx(end) - a) + d);
    return std::sqrt(num / den);
  };
  try {
    const real left = integrate_adaptive([&](real t) { return 2 * t * f(lo, t * t); }, 0, std::sqrt(mid - lo), 1e-15L);
    const real right = integrate_adaptive([&](real t) { return 2 * t * f(hi, -t * t); }, 0, std::sqrt(hi - mid), 1e-15L);
    return left + right;
  } catch (const NoConvergenceError&) {
    throw NoConvergenceError("Q-length quadrature failed on [" + std::to_string(static_cast<double>(lo)) + ", " +
                             std::to_string(static_cast<double>(hi)) + "]");
  }
}

}  // namespace

CornerWalk boundary_corners(const DomainSpec& spec) {
  const auto& sol = spec.solution;
  const QuadraticDifferential q(ode_params(sol.problem, sol.map));
  const real R = spec.R();

  std::vector<real> real_b;
  cplx upper_b{};
  bool has_upper = false;
  for (auto b : sol.map.b_points) {
    if (std::abs(std::imag(b)) < 1e-12L) {
      if (std::none_of(real_b.begin(), real_b.end(), [&](real r) { return std::abs(r - std::real(b)) < 1e-12L; }))
        real_b.push_back(std::real(b));
    } else if (std::imag(b) > 0) {
      upper_b = b;
      has_upper = true;
    }
  }
  std::sort(real_b.rbegin(), real_b.rend());
  const real alpha_a = std::min(sol.map.angle("alpha1"), sol.map.angle("alpha2"));
  const real alpha_b = std::max(sol.map.angle("alpha1"), sol.map.angle("alpha2"));

  CornerWalk walk;
  auto add = [&](real angle, real exponent, const char* kind) { walk.corners.push_back({angle, exponent, kind}); };
  // angle at the right and left prime ends of each real branch point
  std::vector<std::pair<real, real>> ends;
  if (!has_upper && real_b.size() == 2) {
    const real r1 = real_b[0], r2 = real_b[1];
    const real r1_right = real_q_length(q, r1, 1);
    const real r1_left = 2 * alpha_a - r1_right;
    const real r2_right = r1_left + real_q_length(q, r2, r1);
    const real r2_left = 2 * alpha_b - r2_right;
    walk.closure = std::abs(r2_left - (pi - real_q_length(q, 0, r2)));
    ends = {{r1_right, r1_left}, {r2_right, r2_left}};
    for (auto [a, b] : ends) {
      add(a, 0.5L, "branch");
      add(b, 0.5L, "branch");
    }
  } else if (has_upper && real_b.size() == 1) {
    const real r1 = real_b[0];
    const real right = real_q_length(q, r1, 1);
    const real left = pi - real_q_length(q, 0, r1);
    // right + 2 stem + 2 (alpha_b - alpha_a) = left
    const real stem = (left - right - 2 * (alpha_b - alpha_a)) / 2;
    const real y1 = right + stem, y2 = 2 * alpha_a - y1, y3 = 2 * alpha_b - y2;
    walk.closure = std::abs(y3 + stem - left);
    (void)upper_b;
    ends = {{right, left}};
    add(right, 0.5L, "branch");
    add(left, 0.5L, "branch");
    for (real y : {y1, y2, y3}) add(y, real(2) / 3, "branch");
  } else {
    throw std::invalid_argument("boundary_corners: unsupported branch point layout");
  }

  const real gap = psi_gap(R), psi1 = std::real(psi(cplx(1), R));
  for (real w : {-psi1 / gap, (4 - psi1) / gap}) {
    if (!(w > 0 && w < 1)) continue;
    real angle;
    if (w >= real_b.front()) {
      angle = real_q_length(q, w, 1);
    } else if (w <= real_b.back()) {
      angle = pi - real_q_length(q, 0, w);
    } else {
      std::size_t i = 0;
      while (!(real_b[i + 1] <= w)) ++i;
      angle = ends[i].second + real_q_length(q, w, real_b[i]);
    }
    add(angle, 0.5L, "fold");
  }
  std::sort(walk.corners.begin(), walk.corners.end(),
            [](const BoundaryCorner& u, const BoundaryCorner& v) { return u.angle < v.angle; });
  return walk;
}

namespace {

struct TailColumn {
  real theta;
  real power;
  bool sine;
};

// Singular exponents e j + p (j ≥ 1, p ≥ 0) of a corner up to e + 3, skipping integers.
std::vector<real> corner_powers(real e) {
  std::vector<real> out;
  for (int j = 1; j <= 8; ++j)
    for (int p = 0; p <= 3; ++p) {
      const real v = e * j + p;
      if (v > e + 3 + 1e-9L || std::abs(v - std::round(v)) < 1e-9L) continue;
      if (std::none_of(out.begin(), out.end(), [&](real u) { return std::abs(u - v) < 1e-9L; })) out.push_back(v);
    }
  std::sort(out.begin(), out.end());
  return out;
}

struct TailEstimate {
  real weighted = 0;  // Σ_{m > M} (3m + 1) h_m^2
  real plain = 0;     // Σ_{m > M} h_m^2
  real misfit = 0;
};

// Fits h_m ≈ Σ m^{-1-v} (A cos mθ + B sin mθ) on m ∈ [M/2, M] and sums the
// model beyond M. The singular points of η^{1/3} sit at u = -e^{-iβ}.
TailEstimate model_tail(const std::vector<real>& h, const std::vector<BoundaryCorner>& corners) {
  TailEstimate est;
  const std::size_t M = h.size() - 1;
  std::vector<TailColumn> cols;
  for (const auto& c : corners)
    for (real v : corner_powers(c.exponent)) {
      cols.push_back({c.angle - pi, v, false});
      cols.push_back({c.angle - pi, v, true});
    }
  const std::size_t m0 = std::max<std::size_t>(M / 2, 1);
  const std::size_t rows = M - m0 + 1;
  if (rows < 4 * cols.size()) return est;
  const real Mr = static_cast<real>(M);
  auto column = [&](const TailColumn& c, real m) {
    const real amp = std::pow(m / Mr, -1 - c.power);
    return amp * (c.sine ? std::sin(m * c.theta) : std::cos(m * c.theta));
  };
  Mat X(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols.size()));
  Vec y(static_cast<Eigen::Index>(rows));
  real hmax = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const real m = static_cast<real>(m0 + r);
    for (std::size_t k = 0; k < cols.size(); ++k) X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = column(cols[k], m);
    y[static_cast<Eigen::Index>(r)] = h[m0 + r];
    hmax = std::max(hmax, std::abs(h[m0 + r]));
  }
  const Vec coef = X.colPivHouseholderQr().solve(y);
  est.misfit = (X * coef - y).cwiseAbs().maxCoeff() / hmax;

  // direct summation of the model, then the leading-order mean beyond m_max
  const std::size_t m_max = std::max<std::size_t>(400 * M, 2000000);
  std::vector<cplx> rot, step;
  for (const auto& c : cols) {
    step.push_back(std::polar<real>(1, c.theta));
    rot.push_back(std::polar<real>(1, (Mr + 1) * c.theta));
  }
  std::vector<real> powers;
  std::vector<std::size_t> power_of;
  for (const auto& c : cols) {
    auto it = std::find_if(powers.begin(), powers.end(), [&](real v) { return std::abs(v - c.power) < 1e-12L; });
    power_of.push_back(static_cast<std::size_t>(it - powers.begin()));
    if (it == powers.end()) powers.push_back(c.power);
  }
  std::vector<real> amp(powers.size());
  for (std::size_t m = M + 1; m <= m_max; ++m) {
    const real mr = static_cast<real>(m);
    if ((m - M) % 4096 == 0)
      for (std::size_t k = 0; k < cols.size(); ++k) rot[k] = std::polar<real>(1, mr * cols[k].theta);
    const real lr = std::log(mr / Mr);
    for (std::size_t i = 0; i < powers.size(); ++i) amp[i] = std::exp((-1 - powers[i]) * lr);
    real v = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const real trig = cols[k].sine ? std::imag(rot[k]) : std::real(rot[k]);
      v += coef[static_cast<Eigen::Index>(k)] * amp[power_of[k]] * trig;
      rot[k] *= step[k];
    }
    est.weighted += (3 * mr + 1) * v * v;
    est.plain += v * v;
  }
  // cross terms average out; cos^2 and sin^2 average to 1/2
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const real e = cols[k].power;
    bool leading = true;
    for (const auto& c : corners)
      if (std::abs(c.angle - pi - cols[k].theta) < 1e-15L && e > c.exponent + 1e-9L) leading = false;
    if (!leading) continue;
    const real amp2 = coef[static_cast<Eigen::Index>(k)] * coef[static_cast<Eigen::Index>(k)] *
                      std::pow(Mr, 2 + 2 * e) / 2;
    const real mm = static_cast<real>(m_max);
    est.weighted += 3 * amp2 * std::pow(mm, -2 * e) / (2 * e);
    est.plain += amp2 * std::pow(mm, -1 - 2 * e) / (1 + 2 * e);
  }
  return est;
}

}  // namespace

CoefficientMap coefficients_of_F(const DomainSpec& spec, const CoefficientOptions& opts) {
  const std::size_t N = opts.laurent_terms;
  if (N < 8) throw std::invalid_argument("coefficients_of_F: too few terms");
  const auto& sol = spec.solution;
  const real R = spec.R();
  const real R3 = R * R * R;
  const real gap = psi_gap(R);
  const cplx psi1 = psi(cplx(1), R);

  // g(1/t) = Σ u_k t^{k-1}
  const ComplexSeries jet = origin_jet(ode_params(sol.problem, sol.map), sol.map.lead, N);
  // τ(u) = u (gap g(-1/u) + ψ(1))
  std::vector<cplx> tau(N);
  for (std::size_t k = 0; k < N; ++k) tau[k] = gap * jet[k] * (k % 2 == 1 ? real(1) : real(-1));
  tau[1] += psi1;

  // φ^{-1}(g(-1/u)) = u η(u) with τ η = -R^3 + 2 u η - u^2 η^2 / R^3
  std::vector<cplx> eta(N), eta2(N);
  for (std::size_t n = 0; n < N; ++n) {
    cplx rhs = n == 0 ? cplx(-R3) : cplx{};
    if (n >= 1) rhs += real(2) * eta[n - 1];
    if (n >= 2) rhs -= eta2[n - 2] / R3;
    for (std::size_t k = 1; k <= n; ++k) rhs -= tau[k] * eta[n - k];
    eta[n] = rhs / tau[0];
    if (n + 2 <= N) {
      cplx s{};
      for (std::size_t j = 0; j <= n; ++j) s += eta[j] * eta[n - j];
      eta2[n] = s;
    }
  }
  if (!(std::real(eta[0]) > 0)) throw NumericalError("coefficients_of_F: unexpected orientation of the exterior map");

  std::vector<cplx> g(N + 1);
  for (std::size_t k = 0; k < N; ++k) g[k + 1] = eta[k];
  const ComplexSeries f = symmetrize_cube_root(ComplexSeries(std::move(g)));

  CoefficientMap m;
  m.R = R;
  m.domain_area = pi * R * R;
  m.coeffs.assign(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t n = 0; n < m.coeffs.size(); ++n) {
    // symmetry makes the coefficients real; drop round-off
    m.coeffs[n] = (n % 3 == 1) ? cplx(std::real(m.coeffs[n]), 0) : cplx{};
    m.area_sum += static_cast<real>(n) * std::norm(m.coeffs[n]);
  }
  m.corners = boundary_corners(spec).corners;
  std::vector<real> h;
  for (std::size_t n = 1; n < m.coeffs.size(); n += 3) h.push_back(std::real(m.coeffs[n]));
  const TailEstimate tail = model_tail(h, m.corners);
  m.area_tail = tail.weighted;
  m.truncation_tail = tail.plain;
  m.tail_fit_residual = tail.misfit;
  return m;
}

cplx evaluate_F(const DomainSpec& spec, cplx z, const IntegratorOptions& opts) {
  if (!(std::abs(z) < 1)) throw std::domain_error("evaluate_F: |z| must be below 1");
  if (z == cplx{}) return 0;
  const auto& sol = spec.solution;
  const real R = spec.R();
  const cplx u = z * z * z;
  // g(-1/u) lies on the ray of angle π - arg u at parameter t = |u|
  const cplx gv =
      integrate_ray(ode_params(sol.problem, sol.map), sol.map.lead,
                    {wrap_angle(pi - std::arg(u)), std::abs(u), Formulation::outer}, opts)
          .value;
  const cplx eta = phi_inv(gv, R) / u;
  const real R3 = R * R * R;
  const real eta0 = R3 / (psi_gap(R) * std::real(sol.map.lead));
  // the cube-root branch continuous from η(0)^{1/3} > 0
  cplx r = std::polar(std::cbrt(std::abs(eta)), std::arg(eta) / 3);
  cplx best = r;
  for (int k = 1; k < 3; ++k) {
    const cplx c = r * std::polar<real>(1, two_pi * k / 3);
    if (std::abs(c - std::cbrt(eta0)) < std::abs(best - std::cbrt(eta0))) best = c;
  }
  return z * best;
}

FourierCheck fourier_cross_check(const DomainSpec& spec, const CoefficientMap& map, std::size_t count, real rho,
                                 std::size_t samples) {
  FourierCheck res;
  std::vector<cplx> values(samples);
  for (std::size_t j = 0; j < samples; ++j)
    values[j] = evaluate_F(spec, std::polar(rho, two_pi * static_cast<real>(j) / static_cast<real>(samples)));
  for (std::size_t m = 0; m < count; ++m) {
    const std::size_t n = 3 * m + 1;
    cplx s{};
    for (std::size_t j = 0; j < samples; ++j)
      s += values[j] * std::polar<real>(1, -two_pi * static_cast<real>(n * j % samples) / static_cast<real>(samples));
    const cplx c = s / static_cast<real>(samples) / std::pow(rho, static_cast<real>(n));
    res.fourier.push_back(c);
    const cplx a = n < map.coeffs.size() ? map.coeffs[n] : cplx{};
    res.max_difference = std::max(res.max_difference, std::abs(a - c));
  }
  return res;
}

real lifetime_bound(const CoefficientMap& map, std::size_t max_degree) {
  const std::size_t top = max_degree == 0 ? map.coeffs.size() - 1 : std::min(max_degree, map.coeffs.size() - 1);
  real s = 0;
  for (std::size_t n = 1; n <= top; ++n) s += std::norm(map.coeffs[n]);
  if (max_degree == 0) s += map.truncation_tail;
  return s / 2;
}

real frequency_bound(const CoefficientMap& map, std::size_t max_degree) {
  std::size_t top = 0;
  for (std::size_t n = 0; n < map.coeffs.size(); ++n)
    if (map.coeffs[n] != cplx{}) top = n;
  if (max_degree != 0) top = std::min(top, max_degree);
  real s = 0;
  for (std::size_t n = 1; n <= top; ++n)
    if (map.coeffs[n] != cplx{}) s += std::norm(map.coeffs[n]) * delta_n(n);
  const real j0 = bessel_j0_zero();
  return j0 * j0 / s;
}

}  // namespace ptc

namespace ptc {

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::bloch_landau: return "bloch_landau";
    case BoundKind::lifetime: return "lifetime";
    case BoundKind::frequency: return "frequency";
  }
  return "?";
}

BoundKind bound_kind_from_string(const std::string& s) {
  if (s == "bloch_landau" || s == "bloch" || s == "bl") return BoundKind::bloch_landau;
  if (s == "lifetime") return BoundKind::lifetime;
  if (s == "frequency") return BoundKind::frequency;
  throw std::invalid_argument("unknown bound kind: " + s);
}

real bloch_landau_value(const DomainSpec& spec) {
  return std::cbrt(psi_gap(spec.R()) * spec.capacity()) / spec.R();
}

BoundReport compute_bound(BoundKind kind, real x, const BoundOptions& opts) {
  BoundReport rep;
  rep.kind = kind;
  rep.x = x;
  const RadiusSearch rs = max_radius_for_x(x, opts.radius);
  const DomainSpec& spec = rs.spec;
  rep.R = rs.R;
  rep.capacity = spec.capacity();
  rep.residual_norm = spec.solution.residual_norm;
  rep.inradius_margin = rs.check.margin;
  rep.valid = rs.check.passed && spec.solution.converged;
  if (!rep.valid) rep.detail = "inradius check failed: " + rs.check.detail;

  if (kind == BoundKind::bloch_landau) {
    rep.value = rep.full_value = bloch_landau_value(spec);
    return rep;
  }

  const CoefficientMap map = coefficients_of_F(spec, opts.coefficients);
  rep.area_deviation = map.area_deviation();
  rep.fourier_difference = fourier_cross_check(spec, map).max_difference;
  for (auto a : map.coeffs)
    if (a != cplx{}) ++rep.coefficient_count;
  if (kind == BoundKind::lifetime) {
    rep.value = lifetime_bound(map, opts.max_degree);
    rep.full_value = lifetime_bound(map);
  } else {
    rep.value = frequency_bound(map, opts.max_degree);
    rep.full_value = frequency_bound(map);
    rep.delta_count = rep.coefficient_count;
  }
  if (!(rep.area_deviation <= opts.area_tolerance)) {
    rep.valid = false;
    rep.detail = "area identity deviation " + std::to_string(static_cast<double>(rep.area_deviation));
  }
  if (!(rep.fourier_difference <= opts.fourier_tolerance)) {
    rep.valid = false;
    rep.detail = "fourier cross-check difference " + std::to_string(static_cast<double>(rep.fourier_difference));
  }
  return rep;
}

namespace {

bool better(BoundKind kind, const BoundReport& a, const BoundReport& b) {
  if (a.valid != b.valid) return a.valid;
  return kind == BoundKind::lifetime ? a.value > b.value : a.value < b.value;
}

}  // namespace

ScanResult scan_optimize(BoundKind kind, real x_lo, real x_hi, std::size_t grid, const ScanOptions& opts) {
  if (!(x_hi > x_lo) || grid < 3) throw std::invalid_argument("scan_optimize: need x_lo < x_hi and grid >= 3");
  ScanResult res;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < grid; ++i) {
    const real x = x_lo + (x_hi - x_lo) * static_cast<real>(i) / static_cast<real>(grid - 1);
    BoundReport r;
    try {
      r = compute_bound(kind, x, opts.bound);
    } catch (const NumericalError& e) {
      r.kind = kind;
      r.x = x;
      r.detail = e.what();
    }
    res.grid.push_back(r);
    if (r.valid && (!best || better(kind, r, res.grid[*best]))) best = i;
  }
  if (!best) throw NoConvergenceError("scan_optimize: no valid grid point");
  res.best = res.grid[*best];

  const real h = (x_hi - x_lo) / static_cast<real>(grid - 1);
  real a = std::max(x_lo, res.best.x - h), b = std::min(x_hi, res.best.x + h);
  const real g = (std::sqrt(real(5)) - 1) / 2;
  auto eval = [&](real x) {
    BoundReport r;
    try {
      r = compute_bound(kind, x, opts.bound);
    } catch (const NumericalError& e) {
      r.kind = kind;
      r.x = x;
      r.detail = e.what();
    }
    res.refinement.push_back(r);
    if (r.valid && better(kind, r, res.best)) res.best = r;
    return r;
  };
  real c = b - g * (b - a), d = a + g * (b - a);
  BoundReport fc = eval(c), fd = eval(d);
  while (b - a > opts.x_tol) {
    if (better(kind, fc, fd)) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = eval(d);
    }
  }
  return res;
}

}  // namespace ptc
