#include <cmath>

#include "doctest.h"
#include "inradius_oracle.hpp"
#include "ptc/domains.hpp"
#include "ptc/series.hpp"

using namespace ptc;

TEST_CASE("Koebe function, psi and phi") {
  CHECK(std::abs(koebe(-1) - cplx(-0.25L)) < 1e-18);
  CHECK_THROWS_AS(koebe(1), PoleError);
  for (real R : {4.5L, 5.0L, 5.2L}) {
    const real R3 = R * R * R;
    CHECK(std::abs(psi(1, R) - cplx(-(R3 - 1) * (R3 - 1) / R3)) < 1e-12 * R3);
    CHECK(std::abs(psi(-8, R) - cplx((R3 + 8) * (R3 + 8) / (8 * R3))) < 1e-12 * R3);
    const real gap = ((R3 + 8) * (R3 + 8) + 8 * (R3 - 1) * (R3 - 1)) / (8 * R3);
    CHECK(std::abs(psi_gap(R) - gap) < 1e-12 * gap);
    CHECK(std::abs(std::abs(psi(-8, R) - psi(1, R)) - gap) < 1e-12 * gap);
    CHECK(std::abs(phi(1, R)) < 1e-15);
    CHECK(std::abs(phi(-8, R) - cplx(1)) < 1e-15);
    for (cplx z : {cplx(2, 1), cplx(-3, 0.5), cplx(0.3, -4)}) {
      const cplx w = phi(z, R);
      CHECK(std::abs(phi_inv(w, R) - z) < 1e-12);
      const real h = 1e-6L;
      const cplx fd = (phi_inv(w + h, R) - phi_inv(w - h, R)) / (2 * h);
      CHECK(std::abs(phi_inv_derivative(z, R) - fd) < 1e-6 * std::abs(fd));
    }
  }
  CHECK_THROWS_AS(psi(0, 5), PoleError);
}

TEST_CASE("tip geometry") {
  CHECK(std::abs(min_x() - (1 + std::sqrt(2 * std::sqrt(3.0L) - 3))) < 1e-18);
  CHECK(std::abs(min_x() - 1.68125004L) < 1e-8);
  for (real R : {5.0L, 5.1195152501L, 5.3L}) {
    const auto g = tip_geometry(2.1383799965243L, R);
    CHECK(std::abs(g.P1 - cplx(min_x(), 1)) < 1e-12);
    CHECK(std::abs(std::abs(g.P3) - (R - 1)) < 1e-12);
    CHECK(std::abs(g.P2.real() - 2.1383799965243L) < 1e-15);
    // tips lie in the fundamental sector
    CHECK(std::arg(g.w1) >= 0);
    CHECK(std::arg(g.w1) <= pi / 3 + 1e-12);
  }
  CHECK_THROWS_AS(tip_geometry(1.2L, 5.0L), InfeasibleGeometryError);
  CHECK(tip_reading_from_string(to_string(TipReading::c1_c2)) == TipReading::c1_c2);
}

TEST_CASE("cube-root symmetrization") {
  const std::size_t n = 8;
  auto series = [&](std::vector<cplx> c) {
    c.resize(n);
    return ComplexSeries(std::move(c));
  };
  const auto id = symmetrize_cube_root(series({0, 1}));
  CHECK(std::abs(id[1] - cplx(1)) < 1e-18);
  for (std::size_t k = 2; k < id.order(); ++k) CHECK(std::abs(id[k]) < 1e-18);

  const auto two = symmetrize_cube_root(series({0, 8}));
  CHECK(std::abs(two[1] - cplx(2)) < 1e-17);

  const real eps = 0.1L;
  const auto f = symmetrize_cube_root(series({0, 1, eps}));
  CHECK(std::abs(f[1] - cplx(1)) < 1e-18);
  CHECK(std::abs(f[4] - cplx(eps / 3)) < 1e-18);
  CHECK(std::abs(f[7] - cplx(-eps * eps / 9)) < 1e-18);
  for (std::size_t k = 0; k < f.order(); ++k)
    if (k % 3 != 1) CHECK(std::abs(f[k]) == 0);

  CHECK_THROWS_AS(symmetrize_cube_root(series({0, 0, 1})), std::invalid_argument);
  CHECK_THROWS_AS(symmetrize_cube_root(series({1, 1})), std::invalid_argument);
}

TEST_CASE("domain at the lifetime geometry passes the inradius check") {
  const auto spec = build_domain(2.174447128952L, 5.1836816989L);
  CHECK(spec.solution.converged);
  CHECK(spec.arcs.size() >= 2);
  const auto c = inradius_check(spec);
  CHECK(c.passed);
  CHECK(c.margin >= 0);
  CHECK(c.margin < 1e-6);
}

TEST_CASE("inradius check agrees with the grid oracle") {
  for (real R : {5.0L, 5.25L}) {
    const auto spec = build_domain(2.15L, R);
    const auto c = inradius_check(spec);
    const auto g = oracle::grid_inradius(spec);
    CAPTURE(R);
    if (c.passed)
      CHECK(g.radius <= 1 + 1e-3);
    else
      CHECK(g.radius > 1 + 1e-3);
    CHECK(c.passed == (R < 5.1L));
  }
}

TEST_CASE("boundary polylines are symmetric") {
  const auto spec = build_domain(2.1383799965243L, 5.0L);
  const auto lines = boundary_polylines(spec);
  CHECK(lines.size() == 6 + 6 * spec.arcs.size());
  for (const auto& l : lines)
    for (cplx w : l) CHECK(std::abs(w) <= spec.R() + 1e-9);
}
