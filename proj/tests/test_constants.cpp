#include <cmath>
#include <vector>

#include "doctest.h"
#include "ptc/constants.hpp"
#include "ptc/quadrature.hpp"

using namespace ptc;

namespace {

// j0 by bisection on the standard library J0
real j0_by_bisection() {
  real lo = 2, hi = 3;
  for (int i = 0; i < 200; ++i) {
    const real mid = (lo + hi) / 2;
    if (std::cyl_bessel_jl(0.0L, mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

CoefficientMap plain_map(std::vector<cplx> coeffs) {
  CoefficientMap m;
  m.coeffs = std::move(coeffs);
  return m;
}

}  // namespace

TEST_CASE("quadrature rules") {
  const auto g = gauss_legendre(10);
  real s = 0;
  for (std::size_t i = 0; i < 10; ++i) s += g.weights[i] * std::pow(g.nodes[i], 18);
  CHECK(std::abs(s - 2.0L / 19) < 1e-17);
  const auto c = composite_gauss(0, pi, 8, 12);
  real t = 0;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) t += c.weights[i] * std::sin(c.nodes[i]);
  CHECK(std::abs(t - 2) < 1e-17);
  CHECK(std::abs(integrate_adaptive([](real x) { return std::sqrt(x); }, 0, 1, 1e-15L) - 2.0L / 3) < 1e-14);
  CHECK(integrate_adaptive([](real x) { return x; }, 1, 1) == 0);
  CHECK_THROWS_AS(integrate_adaptive([](real x) { return x < 0.3L ? 0.0L : 1.0L; }, 0, 1, 1e-30L, 3),
                  NoConvergenceError);
}

TEST_CASE("Bessel J0 and its first zero") {
  CHECK(std::abs(bessel_j0(0) - 1) < 1e-18);
  for (real x : {0.5L, 1.7L, 3.9L, 8.2L}) CHECK(std::abs(bessel_j0(x) - std::cyl_bessel_jl(0.0L, x)) < 1e-15);
  const real j0 = bessel_j0_zero();
  CHECK(std::abs(j0 - j0_by_bisection()) < 1e-12);
  CHECK(std::abs(j0 - 2.404825557695773L) < 1e-12);
  CHECK(std::abs(bessel_j0(j0)) < 1e-14);
}

TEST_CASE("delta_n") {
  CHECK(std::abs(delta_n(1) - 1) < 1e-12);
  const auto table = delta_table(60);
  REQUIRE(table.size() == 61);

  // independent midpoint rule with 10^6 nodes
  const real j0 = j0_by_bisection();
  const std::size_t nodes = 1000000;
  std::vector<real> num(51, 0);
  real den = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const real r = (static_cast<real>(i) + 0.5L) / nodes;
    const real w = std::pow(std::cyl_bessel_jl(0.0L, j0 * r), 2);
    den += w * r;
    real p = r * r * r;
    for (std::size_t n = 2; n <= 50; ++n, p *= r * r) num[n] += w * p;
  }
  real worst = 0;
  for (std::size_t n = 2; n <= 50; ++n) {
    const real ref = static_cast<real>(n * n) * num[n] / den;
    worst = std::max(worst, std::abs(ref - table[n]));
    CHECK(std::abs(table[n] - delta_n(n)) < 1e-15);
  }
  CHECK(worst < 1e-10);
  // δ_n ~ C/n, decreasing
  for (std::size_t n = 2; n <= 60; ++n) CHECK(table[n] < table[n - 1]);
  CHECK(std::abs(delta_n(1000) * 1000 - delta_n(2000) * 2000) < 1e-3);
}

TEST_CASE("lifetime and frequency on explicit coefficients") {
  const real j0 = bessel_j0_zero();
  CHECK(std::abs(lifetime_bound(plain_map({0, 1})) - 0.5L) < 1e-18);
  CHECK(std::abs(lifetime_bound(plain_map({0, 2})) - 2.0L) < 1e-18);
  CHECK(std::abs(frequency_bound(plain_map({0, 1})) - j0 * j0) < 1e-15);
  const std::vector<cplx> a{0, 1, 0, 0, 0.3L, 0, 0, -0.1L};
  std::vector<cplx> b;
  for (cplx c : a) b.push_back(c * 1.7L);
  CHECK(std::abs(frequency_bound(plain_map(b)) * 1.7L * 1.7L - frequency_bound(plain_map(a))) < 1e-15);
  CHECK(std::abs(lifetime_bound(plain_map(b)) - 1.7L * 1.7L * lifetime_bound(plain_map(a))) < 1e-15);
  // truncation drops the higher terms
  CHECK(std::abs(lifetime_bound(plain_map(a), 4) - 0.5L * (1 + 0.09L)) < 1e-18);
}

TEST_CASE("bound kinds") {
  for (auto k : {BoundKind::bloch_landau, BoundKind::lifetime, BoundKind::frequency})
    CHECK(bound_kind_from_string(to_string(k)) == k);
  CHECK(bound_kind_from_string("bloch") == BoundKind::bloch_landau);
  CHECK_THROWS_AS(bound_kind_from_string("radius"), std::invalid_argument);
}

TEST_CASE("coefficients of F at the frequency geometry") {
  const auto spec = build_domain(2.1282995811037759L, 5.10223601895443L);
  SUBCASE("corner walk closes") {
    const auto w = boundary_corners(spec);
    CHECK(w.closure < 1e-12);
    for (std::size_t i = 1; i < w.corners.size(); ++i) CHECK(w.corners[i].angle > w.corners[i - 1].angle);
  }
  SUBCASE("sparsity, area identity and Fourier agreement") {
    const auto map = coefficients_of_F(spec);
    bool sparse = true;
    for (std::size_t n = 0; n < map.coeffs.size(); ++n)
      if (n % 3 != 1 && map.coeffs[n] != cplx{}) sparse = false;
    CHECK(sparse);
    CHECK(map.coeffs[1].real() > 0);
    // a_1 = |G'(0)|^(1/3) with G(u) ~ R^3 u / (|ψ(-8) - ψ(1)| cap)
    const real R = spec.R();
    CHECK(std::abs(map.coeffs[1].real() - R / std::cbrt(psi_gap(R) * spec.capacity())) < 1e-15);
    CHECK(map.area_deviation() < 1e-6);
    const auto f = fourier_cross_check(spec, map);
    CHECK(f.max_difference < 1e-12);
    // F(0.5) from the series and from ray integration
    cplx s = 0, p = 1;
    for (std::size_t n = 0; n < map.coeffs.size(); ++n, p *= 0.5L) s += map.coeffs[n] * p;
    CHECK(std::abs(s - evaluate_F(spec, 0.5L)) < 1e-14);
  }
}
