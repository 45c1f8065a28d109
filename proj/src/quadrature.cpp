#include "ptc/quadrature.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ptc {

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    real x = std::cos(pi * (static_cast<real>(i) + 0.75L) / (static_cast<real>(n) + 0.5L));
    real dp = 0;
    for (int it = 0; it < 100; ++it) {
      real p0 = 1, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const real p2 = ((2 * static_cast<real>(k) - 1) * x * p1 - (static_cast<real>(k) - 1) * p0) / static_cast<real>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<real>(n) * (x * p1 - p0) / (x * x - 1);
      const real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = q.weights[n - 1 - i] = 2 / ((1 - x * x) * dp * dp);
  }
  return q;
}

QuadratureRule composite_gauss(real a, real b, std::size_t panels, std::size_t n) {
  const auto base = gauss_legendre(n);
  QuadratureRule q;
  const real h = (b - a) / static_cast<real>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const real lo = a + h * static_cast<real>(p);
    for (std::size_t i = 0; i < n; ++i) {
      q.nodes.push_back(lo + h * (base.nodes[i] + 1) / 2);
      q.weights.push_back(h * base.weights[i] / 2);
    }
  }
  return q;
}

namespace {

// Kronrod 15-point nodes (positive half) and weights; odd entries are the Gauss 7 nodes.
const real xgk[8] = {0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
                     0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
                     0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
                     0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
const real wgk[8] = {0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
                     0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
                     0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
                     0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
const real wg[4] = {0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
                    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

// returns (Kronrod estimate, |Kronrod - Gauss|)
std::pair<real, real> gk15(const std::function<real(real)>& f, real a, real b) {
  const real c = (a + b) / 2, h = (b - a) / 2;
  const real fc = f(c);
  real rk = fc * wgk[7], rg = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const real x = h * xgk[j];
    const real s = f(c - x) + f(c + x);
    rk += wgk[j] * s;
    if (j % 2 == 1) rg += wg[j / 2] * s;
  }
  return {rk * h, std::abs((rk - rg) * h)};
}

struct Panel {
  real a, b, val, err;
  std::size_t depth;
  bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace

real integrate_adaptive(const std::function<real(real)>& f, real a, real b, real abs_tol, std::size_t max_depth) {
  if (a == b) return 0;
  const real eps = std::numeric_limits<real>::epsilon();
  // global bisection of the panel with the largest error estimate
  std::priority_queue<Panel> open;
  real settled = 0, total_err = 0;
  auto add = [&](real lo, real hi, std::size_t depth) {
    const auto [val, err] = gk15(f, lo, hi);
    if (err <= 64 * eps * std::abs(val)) {
      settled += val;
      return;
    }
    open.push({lo, hi, val, err, depth});
    total_err += err;
  };
  add(a, b, 0);
  while (!open.empty() && total_err > abs_tol) {
    const Panel p = open.top();
    open.pop();
    total_err -= p.err;
    if (p.depth >= max_depth) throw NoConvergenceError("integrate_adaptive: tolerance not reached");
    const real m = (p.a + p.b) / 2;
    add(p.a, m, p.depth + 1);
    add(m, p.b, p.depth + 1);
    if (total_err < 0) total_err = 0;
  }
  real sum = settled;
  while (!open.empty()) {
    sum += open.top().val;
    open.pop();
  }
  return sum;
}

}  // namespace ptc
