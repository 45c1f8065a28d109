#include <cmath>
#include <vector>

#include "doctest.h"
#include "ptc/configurations.hpp"

using namespace ptc;

namespace {

const cplx omega = std::polar<real>(1, 2 * pi / 3);

const std::vector<std::vector<cplx>> three_point_suite = {
    {cplx(1, 0), cplx(0.3, 0.8)}, {cplx(1, 1), cplx(2, -0.5)}, {cplx(1, 0), cplx(2, 0.1)},
    {cplx(-1, 0.5), cplx(0.5, 1.5)}, {cplx(2, 0), cplx(-1, -1)}};

const std::vector<cplx> six_1{cplx(3, 0.5), cplx(2, 0.4), cplx(1, 0), cplx(2, -0.4), cplx(3, -0.5)};
const std::vector<cplx> six_2{cplx(3, 1.5), cplx(2.2, 1.5), cplx(1, 0), cplx(2.2, -1.5), cplx(3, -1.5)};

std::vector<cplx> conj_all(std::vector<cplx> v) {
  for (auto& z : v) z = std::conj(z);
  return v;
}

std::vector<cplx> scaled(std::vector<cplx> v, cplx s) {
  for (auto& z : v) z *= s;
  return v;
}

real max_b_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  real worst = 0;
  for (cplx z : a) {
    real d = 1e300;
    for (cplx w : b) d = std::min(d, std::abs(z - w));
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

TEST_CASE("segment capacity") {
  const auto s = solve_pt(PTProblem::make(ConfigId::outer_two, {-1, 1}));
  REQUIRE(s.converged);
  CHECK(std::abs(s.capacity() - 0.5L) < 1e-10);
  const auto t = solve_pt(PTProblem::make(ConfigId::outer_two, {cplx(0, 0), cplx(3, 4)}));
  REQUIRE(t.converged);
  CHECK(std::abs(t.capacity() - 1.25L) < 1e-10);
}

TEST_CASE("three radii: cap = 4^(-1/3) and b = 0") {
  const auto s = solve_pt(PTProblem::make(ConfigId::outer_three_sym, {1, omega, std::conj(omega)}));
  REQUIRE(s.converged);
  CHECK(std::abs(s.capacity() - std::pow(4.0L, -1.0L / 3)) < 1e-8);
  REQUIRE(s.map.b_points.size() == 1);
  CHECK(std::abs(s.map.b_points[0]) < 1e-8);
}

TEST_CASE("three-point suite with covariance") {
  for (const auto& anchors : three_point_suite) {
    CAPTURE(anchors[1].real());
    const auto s = solve_pt(PTProblem::make(ConfigId::three_point, anchors));
    REQUIRE(s.converged);
    CHECK(s.residual_norm <= 1e-12);
    CHECK(residuals(s.problem, s.unknowns).size() == 6);
    CHECK(angles_in_word_order(s.map));

    const auto c = solve_pt(PTProblem::make(ConfigId::three_point, conj_all(anchors)));
    REQUIRE(c.converged);
    CHECK(std::abs(c.map.lead - std::conj(s.map.lead)) < 1e-10);
    CHECK(max_b_distance(c.map.b_points, conj_all(s.map.b_points)) < 1e-10);

    const cplx k(0.6, -1.3);
    const auto r = solve_pt(PTProblem::make(ConfigId::three_point, scaled(anchors, k)));
    REQUIRE(r.converged);
    CHECK(std::abs(r.map.lead - k * s.map.lead) < 1e-10 * std::abs(k * s.map.lead));
    CHECK(max_b_distance(r.map.b_points, scaled(s.map.b_points, k)) < 1e-10);
  }
}

TEST_CASE("outer capacity scales with the anchors") {
  const std::vector<cplx> a{cplx(1, 0), cplx(-0.5, 1.2), cplx(-0.5, -1.2)};
  const auto s = solve_pt(PTProblem::make(ConfigId::outer_three_sym, a));
  REQUIRE(s.converged);
  const auto t = solve_pt(PTProblem::make(ConfigId::outer_three_sym, scaled(a, 2.5L)));
  REQUIRE(t.converged);
  CHECK(std::abs(t.capacity() - 2.5L * s.capacity()) < 1e-10);
  CHECK(max_b_distance(t.map.b_points, scaled(s.map.b_points, 2.5L)) < 1e-10);
}

TEST_CASE("unknown and residual dimensions") {
  CHECK(unknown_count(ConfigId::three_point) == 6);
  CHECK(unknown_count(ConfigId::six_sym_1) == 7);
  CHECK(unknown_count(ConfigId::six_sym_2) == 8);
}

TEST_CASE("six-point configuration 1") {
  const auto s = solve_pt(PTProblem::make(ConfigId::six_sym_1, six_1));
  REQUIRE(s.converged);
  CHECK(s.residual_norm <= 1e-12);
  CHECK(residuals(s.problem, s.unknowns).size() == 7);
  CHECK(angles_in_word_order(s.map));
  REQUIRE(s.map.b_points.size() == 2);
  for (cplx b : s.map.b_points) CHECK(std::abs(b.imag()) < 1e-12);

  SUBCASE("critical-orbit residuals vanish at the solution") {
    const Vec r = residuals_critical_orbit(s.problem, orbit_unknowns(s.unknowns));
    CHECK(r.size() == 3);
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("conjugate symmetric residuals") {
    // the boundary values of a symmetric solution are conjugate symmetric
    for (real g : {0.4L, 1.1L, 2.0L}) {
      const cplx u = s.evaluate(g), v = s.evaluate(two_pi - g);
      CHECK(std::abs(u - std::conj(v)) < 1e-10);
    }
  }
}

TEST_CASE("six-point configuration 2 has a Y-junction") {
  const auto s = solve_pt(PTProblem::make(ConfigId::six_sym_2, six_2));
  REQUIRE(s.converged);
  CHECK(s.residual_norm <= 1e-12);
  CHECK(residuals(s.problem, s.unknowns).size() == 8);
  CHECK(angles_in_word_order(s.map));
  int complex_b = 0;
  for (cplx b : s.map.b_points) {
    if (std::abs(b.imag()) > 1e-3) ++complex_b;
    for (cplx a : s.problem.anchors) CHECK(std::abs(a - b) > 1e-3);
  }
  CHECK(complex_b == 2);
}

TEST_CASE("wrong topology is reported") {
  CHECK_THROWS_AS(solve_pt(PTProblem::make(ConfigId::six_sym_1, six_2)), TopologyMismatchError);
}

TEST_CASE("orbit guard") {
  const std::vector<cplx> far{cplx(40, 2), cplx(30, 1), cplx(1, 0), cplx(30, -1), cplx(40, -2)};
  CHECK_THROWS_AS(check_orbit_guard(PTProblem::make(ConfigId::six_sym_1, far)), std::invalid_argument);
  CHECK_NOTHROW(check_orbit_guard(PTProblem::make(ConfigId::six_sym_1, six_1)));
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(PTProblem::make(ConfigId::three_point, {cplx(1, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(PTProblem::make(ConfigId::three_point, {cplx(0, 0), cplx(1, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(PTProblem::make(ConfigId::six_sym_1, {cplx(3, 0.5), cplx(2, 0.4), cplx(1, 0), cplx(2, -0.3),
                                                        cplx(3, -0.5)}),
                  std::invalid_argument);
  CHECK(config_from_string("three-point") == ConfigId::three_point);
  CHECK_THROWS_AS(config_from_string("four-point"), std::invalid_argument);
}

TEST_CASE("critical graph of the segment and the three radii") {
  const auto s = solve_pt(PTProblem::make(ConfigId::outer_two, {-1, 1}));
  const auto g = critical_graph(s);
  REQUIRE(g.size() == 1);
  real worst = 0;
  for (cplx z : g[0].points) worst = std::max(worst, std::abs(z.imag()));
  CHECK(worst < 1e-8);
  CHECK(std::abs(g[0].s.back() - pi) < 1e-4);

  const auto t = solve_pt(PTProblem::make(ConfigId::outer_three_sym, {1, omega, std::conj(omega)}));
  const auto h = critical_graph(t);
  CHECK(h.size() == 3);
}
