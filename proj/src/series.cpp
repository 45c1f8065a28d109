#include "ptc/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptc {

namespace {

void require_finite(std::span<const cplx> c) {
  for (const auto& z : c)
    if (!is_finite(z)) throw NumericalError("series coefficient is not finite");
}

// Coefficient k of a*b restricted to the index range [lo, hi] of a.
cplx conv(std::span<const cplx> a, std::span<const cplx> b, std::size_t k, std::size_t lo, std::size_t hi) {
  cplx s{};
  for (std::size_t m = lo; m <= hi; ++m) s += a[m] * b[k - m];
  return s;
}

// Incrementally maintained partial products P_i = Π_{j<=i} (y - shift_j(t)).
// The shift of factor j is r_j (at power 0) or r_j t (at power 1).
class FactorChain {
 public:
  FactorChain(std::span<const cplx> roots, std::size_t shift_power, std::size_t order)
      : roots_(roots.begin(), roots.end()), shift_power_(shift_power),
        partial_(roots.size(), std::vector<cplx>(order)) {}

  // Requires y[0..k]; (re)computes order k of every partial product.
  void compute(std::size_t k, std::span<const cplx> y) {
    for (std::size_t i = 0; i < roots_.size(); ++i) {
      cplx v;
      if (i == 0) {
        v = y[k];
      } else {
        const auto& prev = partial_[i - 1];
        v = conv(prev, y, k, 0, k);
      }
      if (k >= shift_power_) {
        const cplx p = (i == 0) ? (k == shift_power_ ? cplx{1} : cplx{}) : partial_[i - 1][k - shift_power_];
        v -= roots_[i] * p;
      }
      partial_[i][k] = v;
    }
  }

  cplx product(std::size_t k) const {
    if (roots_.empty()) return k == 0 ? cplx{1} : cplx{};
    return partial_.back()[k];
  }

 private:
  std::vector<cplx> roots_;
  std::size_t shift_power_;
  std::vector<std::vector<cplx>> partial_;
};

// p-th root of c nearest to hint.
cplx nearest_root(cplx c, int p, cplx hint) {
  const real mag = std::pow(std::abs(c), real(1) / p);
  const real arg = std::arg(c) / p;
  cplx best{};
  real best_d = std::numeric_limits<real>::infinity();
  for (int j = 0; j < p; ++j) {
    const cplx r = std::polar(mag, arg + two_pi * j / p);
    const real d = std::abs(r - hint);
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return best;
}

}  // namespace

ComplexSeries::ComplexSeries(std::vector<cplx> coeffs, int lead_exponent)
    : coeffs_(std::move(coeffs)), lead_exponent_(lead_exponent) {
  if (coeffs_.empty()) throw std::invalid_argument("series order must be positive");
  require_finite(coeffs_);
  radius_ = estimate_radius(coeffs_);
}

ComplexSeries ComplexSeries::constant(cplx c, std::size_t order) {
  std::vector<cplx> v(order);
  v.at(0) = c;
  return ComplexSeries(std::move(v));
}

ComplexSeries ComplexSeries::variable(cplx c0, std::size_t order) {
  std::vector<cplx> v(order);
  v.at(0) = c0;
  if (order > 1) v[1] = 1;
  return ComplexSeries(std::move(v));
}

cplx ComplexSeries::evaluate(cplx t) const {
  cplx s{};
  for (std::size_t k = coeffs_.size(); k-- > 0;) s = s * t + coeffs_[k];
  if (lead_exponent_ != 0) s *= std::pow(t, lead_exponent_);
  return s;
}

cplx ComplexSeries::derivative(cplx t) const {
  // d/dt Σ c_k t^(k+e) = Σ (k+e) c_k t^(k+e-1)
  cplx s{};
  for (std::size_t k = coeffs_.size(); k-- > 0;) s = s * t + real(static_cast<int>(k) + lead_exponent_) * coeffs_[k];
  return s * std::pow(t, lead_exponent_ - 1);
}

real ComplexSeries::tail_magnitude(real h) const {
  const std::size_t n = coeffs_.size();
  real s = std::abs(coeffs_[n - 1]) * std::pow(h, static_cast<real>(n - 1));
  if (n >= 2) s += std::abs(coeffs_[n - 2]) * std::pow(h, static_cast<real>(n - 2));
  return s * std::pow(h, static_cast<real>(lead_exponent_));
}

ComplexSeries ComplexSeries::truncated(std::size_t order) const {
  order = std::min(order, coeffs_.size());
  return ComplexSeries(std::vector<cplx>(coeffs_.begin(), coeffs_.begin() + order), lead_exponent_);
}

ComplexSeries operator+(const ComplexSeries& a, const ComplexSeries& b) {
  if (a.lead_exponent() != b.lead_exponent()) throw std::invalid_argument("series_add: lead exponents differ");
  const std::size_t n = std::min(a.order(), b.order());
  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = a[k] + b[k];
  return ComplexSeries(std::move(c), a.lead_exponent());
}

ComplexSeries operator*(cplx s, const ComplexSeries& a) {
  std::vector<cplx> c(a.coeffs().begin(), a.coeffs().end());
  for (auto& z : c) z *= s;
  return ComplexSeries(std::move(c), a.lead_exponent());
}

ComplexSeries operator-(const ComplexSeries& a, const ComplexSeries& b) { return a + cplx{-1} * b; }

ComplexSeries operator*(const ComplexSeries& a, const ComplexSeries& b) {
  const std::size_t n = std::min(a.order(), b.order());
  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = conv(a.coeffs(), b.coeffs(), k, 0, k);
  return ComplexSeries(std::move(c), a.lead_exponent() + b.lead_exponent());
}

ComplexSeries operator/(const ComplexSeries& a, const ComplexSeries& b) {
  if (b[0] == cplx{}) throw SingularSeriesError("series_div: divisor has a vanishing constant term");
  const std::size_t n = std::min(a.order(), b.order());
  std::vector<cplx> q(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s = a[k];
    for (std::size_t m = 1; m <= k; ++m) s -= b[m] * q[k - m];
    q[k] = s / b[0];
  }
  return ComplexSeries(std::move(q), a.lead_exponent() - b.lead_exponent());
}

ComplexSeries series_add(const ComplexSeries& a, const ComplexSeries& b) { return a + b; }
ComplexSeries series_mul(const ComplexSeries& a, const ComplexSeries& b) { return a * b; }
ComplexSeries series_div(const ComplexSeries& a, const ComplexSeries& b) { return a / b; }

ComplexSeries series_root(const ComplexSeries& a, int p, cplx branch_hint) {
  if (p < 2) throw std::invalid_argument("series_root: p must be at least 2");
  if (a.lead_exponent() != 0) throw std::invalid_argument("series_root: Laurent input not supported");
  if (a[0] == cplx{}) throw BranchPointError("series_root: zero constant term");
  const std::size_t n = a.order();
  const real alpha = real(1) / p;
  std::vector<cplx> r(n);
  r[0] = nearest_root(a[0], p, branch_hint);
  // a r' = alpha a' r, matched at t^(k-1)
  for (std::size_t k = 1; k < n; ++k) {
    cplx s{};
    for (std::size_t j = 1; j <= k; ++j) s += (alpha * real(j) - real(k - j)) * a[j] * r[k - j];
    r[k] = s / (real(k) * a[0]);
  }
  return ComplexSeries(std::move(r));
}

real estimate_radius(std::span<const cplx> c) {
  const std::size_t n = c.size();
  const real inf = std::numeric_limits<real>::infinity();
  if (n < 2) return inf;

  auto collect = [&](std::size_t lo, std::vector<std::pair<real, real>>& pts) {
    pts.clear();
    real window_max = 0;
    for (std::size_t k = std::max<std::size_t>(lo, 1); k < n; ++k) window_max = std::max(window_max, std::abs(c[k]));
    if (window_max == 0) return;
    for (std::size_t k = std::max<std::size_t>(lo, 1); k < n; ++k) {
      const real m = std::abs(c[k]);
      if (m > window_max * 1e-12L) pts.emplace_back(real(k), std::log(m));
    }
  };

  std::vector<std::pair<real, real>> pts;
  collect(n - n / 4, pts);
  if (pts.empty()) return inf;
  if (pts.size() < 3) collect(n / 2, pts);
  if (pts.size() < 3) collect(1, pts);
  if (pts.size() == 1) return std::exp(-pts[0].second / pts[0].first);

  real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const real m = static_cast<real>(pts.size());
  const real slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return std::exp(-slope);
}

// ---------------------------------------------------------------------------

OdeParams OdeParams::inner(std::vector<cplx> anchors, std::vector<cplx> zeros) {
  if (anchors.empty() || zeros.size() + 1 != anchors.size())
    throw std::invalid_argument("inner ODE needs n anchors and n-1 zeros (with multiplicity)");
  OdeParams p;
  p.formulation = Formulation::inner;
  cplx num{1}, den{1};
  for (auto b : zeros) num *= -b;
  for (auto a : anchors) den *= -a;
  if (den == cplx{}) throw std::invalid_argument("inner ODE anchors must be nonzero");
  p.anchors = std::move(anchors);
  p.zeros = std::move(zeros);
  p.scale = num / den;
  return p;
}

OdeParams OdeParams::outer(std::vector<cplx> anchors, std::vector<cplx> zeros) {
  if (anchors.size() < 2 || zeros.size() + 2 != anchors.size())
    throw std::invalid_argument("outer ODE needs n >= 2 anchors and n-2 zeros (with multiplicity)");
  OdeParams p;
  p.formulation = Formulation::outer;
  p.anchors = std::move(anchors);
  p.zeros = std::move(zeros);
  p.scale = 1;
  return p;
}

cplx OdeParams::ratio(cplx y) const {
  cplx num = scale, den{1};
  for (auto a : anchors) num *= (y - a);
  for (auto b : zeros) den *= (y - b);
  return num / den;
}

real OdeParams::pole_distance(cplx y) const {
  real d = std::numeric_limits<real>::infinity();
  for (auto b : zeros) d = std::min(d, std::abs(y - b));
  return d;
}

ComplexSeries origin_jet(const OdeParams& p, cplx lead, std::size_t order) {
  if (order < 2) throw std::invalid_argument("origin_jet: order must be at least 2");
  if (lead == cplx{}) throw std::invalid_argument("origin_jet: lead coefficient must be nonzero");

  if (p.formulation == Formulation::inner) {
    // t z' = z L with L = sqrt(G(z)), L(0) = 1, so (k-1) z_k = Σ_{m=1}^{k-1} z_m L_{k-m}.
    std::vector<cplx> z(order), g(order), l(order);
    FactorChain num(p.anchors, 0, order), den(p.zeros, 0, order);
    z[1] = lead;
    auto advance = [&](std::size_t k) {
      num.compute(k, z);
      den.compute(k, z);
      cplx s = p.scale * num.product(k);
      for (std::size_t m = 1; m <= k; ++m) s -= den.product(m) * g[k - m];
      g[k] = s / den.product(0);
      if (k == 0) {
        l[0] = nearest_root(g[0], 2, cplx{1});
      } else {
        cplx q = g[k];
        for (std::size_t m = 1; m < k; ++m) q -= l[m] * l[k - m];
        l[k] = q / (real(2) * l[0]);
      }
    };
    advance(0);
    for (std::size_t k = 2; k < order; ++k) {
      advance(k - 1);
      z[k] = conv(z, l, k, 1, k - 1) / real(k - 1);
    }
    return ComplexSeries(std::move(z), 0);
  }

  // Outer: u = t y, (t u' - u)^2 = Π(u - a t)/Π(u - b t), t u' - u = -S, S(0) = lead.
  std::vector<cplx> u(order), g(order), s(order);
  FactorChain num(p.anchors, 1, order), den(p.zeros, 1, order);
  u[0] = lead;
  auto advance = [&](std::size_t k) {
    num.compute(k, u);
    den.compute(k, u);
    cplx q = num.product(k);
    for (std::size_t m = 1; m <= k; ++m) q -= den.product(m) * g[k - m];
    g[k] = q / den.product(0);
    if (k == 0) {
      s[0] = nearest_root(g[0], 2, lead);
    } else {
      cplx r = g[k];
      for (std::size_t m = 1; m < k; ++m) r -= s[m] * s[k - m];
      s[k] = r / (real(2) * s[0]);
    }
  };
  advance(0);
  for (std::size_t k = 1; k < order; ++k) {
    u[k] = 0;
    advance(k);
    u[k] = -s[k] / real(k);
    advance(k);
  }
  return ComplexSeries(std::move(u), -1);
}

ComplexSeries regular_jet(const OdeParams& p, real t0, cplx y0, cplx dy_hint, std::size_t order,
                          real pole_tolerance) {
  if (!(t0 > 0)) throw std::invalid_argument("regular_jet: t0 must be positive");
  if (order < 2) throw std::invalid_argument("regular_jet: order must be at least 2");
  if (p.pole_distance(y0) < pole_tolerance) throw NearPoleError("ray came within pole tolerance of a zero b_j");
  const bool inner = p.formulation == Formulation::inner;

  std::vector<cplx> y(order), g(order), s(order);
  FactorChain num(p.anchors, 0, order), den(p.zeros, 0, order);
  y[0] = y0;
  for (std::size_t k = 0; k + 1 < order; ++k) {
    num.compute(k, y);
    den.compute(k, y);
    cplx q = p.scale * num.product(k);
    for (std::size_t j = 1; j <= k; ++j) q -= den.product(j) * g[k - j];
    g[k] = q / den.product(0);
    if (k == 0) {
      s[0] = std::sqrt(g[0]);
      const cplx slope = (inner ? y0 : cplx{1}) * s[0] / t0;
      if (std::real(std::conj(dy_hint) * slope) < 0) s[0] = -s[0];
      if (s[0] == cplx{}) throw BranchPointError("regular_jet: ray hit an anchor (zero derivative)");
    } else {
      cplx r = g[k];
      for (std::size_t j = 1; j < k; ++j) r -= s[j] * s[k - j];
      s[k] = r / (real(2) * s[0]);
    }
    // (t0 + s) y' = M S, matched at s^k
    const cplx ms = inner ? conv(y, s, k, 0, k) : s[k];
    y[k + 1] = (ms - real(k) * y[k]) / (t0 * real(k + 1));
  }
  return ComplexSeries(std::move(y), 0);
}

ComplexSeries ode_step_series(const OdeParams& p, real t0, cplx z0, cplx dz_hint, std::size_t order) {
  if (t0 == 0) return origin_jet(p, dz_hint, order);
  return regular_jet(p, t0, z0, dz_hint, order);
}

}  // namespace ptc
