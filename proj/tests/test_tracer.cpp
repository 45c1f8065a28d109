#include <cmath>

#include "doctest.h"
#include "ptc/tracer.hpp"

using namespace ptc;

namespace {

const cplx omega = std::polar<real>(1, 2 * pi / 3);

// Outer map of the three-radii continuum: g(w)^3 = (w^{3/2} + w^{-3/2})^2 / 4.
cplx three_radii_map(cplx w) { return w * std::pow(1.0L + std::pow(w, -3), 2.0L / 3) / std::cbrt(4.0L); }

}  // namespace

TEST_CASE("outer two-point rays follow the Joukowski map") {
  real worst = 0;
  for (int j = 0; j < 64; ++j) {
    const real gamma = two_pi * (j + 0.5L) / 64;
    const cplx v = integrate_ray_outer({-1, 1}, {}, 0.5L, gamma);
    worst = std::max(worst, std::abs(v - cplx(std::cos(gamma))));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("outer three-radii rays") {
  const real cap = std::pow(4.0L, -1.0L / 3);
  std::vector<cplx> anchors{1, omega, std::conj(omega)};
  CHECK(std::abs(integrate_ray_outer(anchors, {0}, cap, 0) - cplx(1)) < 1e-8);
  for (real gamma : {0.3L, 1.2L, 2.5L, 4.0L}) {
    const cplx v = integrate_ray_outer(anchors, {0}, cap, gamma);
    CHECK(std::abs(v - three_radii_map(std::polar<real>(1, gamma))) < 1e-12);
    // interior points of the exterior domain
    const cplx w = integrate_ray_outer(anchors, {0}, cap, gamma, 0.7L);
    CHECK(std::abs(w - three_radii_map(std::polar<real>(1 / 0.7L, gamma))) < 1e-12);
  }
}

TEST_CASE("ray integration is conjugation equivariant and step-size stable") {
  std::vector<cplx> anchors{{1, 1}, {1, -1}, 3}, zeros{{1.5, 0.4}, {1.5, -0.4}};
  for (real gamma : {0.4L, 1.3L, 2.9L}) {
    const cplx a = integrate_ray_inner(anchors, {{1.2, 0}, {1.2, 0}}, 0.35L, gamma, 0.9L);
    const cplx b = integrate_ray_inner(anchors, {{1.2, 0}, {1.2, 0}}, 0.35L, two_pi - gamma, 0.9L);
    CHECK(std::abs(a - std::conj(b)) < 1e-12);

    const cplx o1 = integrate_ray_outer(anchors, {1.5}, 0.9L, gamma);
    const cplx o2 = integrate_ray_outer(anchors, {1.5}, 0.9L, -gamma);
    CHECK(std::abs(o1 - std::conj(o2)) < 1e-12);

    IntegratorOptions fine;
    fine.step_safety = 0.125L;
    const cplx c = integrate_ray_inner(anchors, {{1.2, 0}, {1.2, 0}}, 0.35L, gamma, 0.9L, fine);
    CHECK(std::abs(a - c) < 1e-12);
  }
  (void)zeros;
}

TEST_CASE("inner one-point rays recover the Koebe function") {
  for (real gamma : {0.0L, 1.0L, 2.0L, 3.0L}) {
    const cplx t = std::polar<real>(0.8L, gamma);
    const cplx v = integrate_ray_inner({-0.25L}, {}, 1, gamma, 0.8L);
    CHECK(std::abs(v - t / ((1.0L - t) * (1.0L - t))) < 1e-12 * std::abs(v));
  }
}

TEST_CASE("ray errors carry the ray angle") {
  IntegratorOptions o;
  o.max_steps = 2;
  try {
    integrate_ray_outer({-1, 1, 2}, {1.5}, 0.7L, 0.01L, 1, o);
    FAIL("expected an exception");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("gamma=") != std::string::npos);
  }
}

TEST_CASE("critical trajectory of the segment") {
  QuadraticDifferential q(OdeParams::outer({-1, 1}, {}));
  StopCondition stop;
  stop.target = cplx(-1);
  auto tr = trace_trajectory(q, 1, stop);
  CHECK(tr.stop_reason == StopReason::met_point);
  real worst = 0;
  for (auto z : tr.points) worst = std::max(worst, std::abs(std::imag(z)));
  CHECK(worst < 1e-9);
  CHECK(std::abs(tr.points.back() - cplx(-1)) < 1e-12);
  // Q-length of the segment equals the angular length of a half circle
  CHECK(std::abs(tr.s.back() - pi) < 1e-3);
  for (std::size_t i = 1; i < tr.points.size(); ++i) CHECK(std::abs(tr.points[i] - tr.points[i - 1]) <= 1e-2 + 1e-12);
}

TEST_CASE("critical trajectory of the three radii") {
  std::vector<cplx> anchors{1, omega, std::conj(omega)};
  QuadraticDifferential q(OdeParams::outer(anchors, {0}));
  StopCondition stop;
  stop.target = cplx(0);
  auto tr = trace_trajectory(q, 1, stop);
  CHECK(tr.stop_reason == StopReason::met_point);
  real worst = 0;
  for (auto z : tr.points) worst = std::max(worst, std::abs(std::imag(z)));
  CHECK(worst < 1e-9);
  CHECK(q.launch_directions(0).size() == 3);
  CHECK_THROWS_AS(trace_trajectory(q, 0, stop), AmbiguousStartError);

  TraceOptions o;
  o.direction = 0;
  StopCondition to_vertex;
  to_vertex.max_arc_length = 5;
  auto from_zero = trace_trajectory(q, 0, to_vertex, o);
  const real ang = std::arg(from_zero.points[10]);
  CHECK(std::abs(std::remainder(3 * ang, two_pi)) < 1e-6);
}

TEST_CASE("trajectories conjugate with the data") {
  std::vector<cplx> anchors{{1, 1}, {2, -0.5}, {-1, 0.3}}, zeros{{0.6, 0.2}};
  std::vector<cplx> canchors, czeros;
  for (auto a : anchors) canchors.push_back(std::conj(a));
  for (auto b : zeros) czeros.push_back(std::conj(b));
  QuadraticDifferential q(OdeParams::outer(anchors, zeros)), qc(OdeParams::outer(canchors, czeros));
  StopCondition stop;
  stop.max_arc_length = 0.8L;
  auto a = trace_trajectory(q, anchors[0], stop);
  auto b = trace_trajectory(qc, canchors[0], stop);
  REQUIRE(a.points.size() == b.points.size());
  real worst = 0;
  for (std::size_t i = 0; i < a.points.size(); ++i) worst = std::max(worst, std::abs(a.points[i] - std::conj(b.points[i])));
  CHECK(worst < 1e-12);
  // Q dz^2 stays real and positive along the polyline
  for (std::size_t i = 5; i < a.points.size(); i += 17) {
    const cplx t = a.tangents[i];
    const cplx v = q(a.points[i]) * t * t;
    CHECK(std::abs(std::arg(v)) < 1e-6);
  }
}

TEST_CASE("im-threshold stop lands on the level") {
  QuadraticDifferential q(OdeParams::outer({{0, 1}, {0, -1}}, {}));
  StopCondition stop;
  stop.im_level = 0.5L;
  auto tr = trace_trajectory(q, cplx(0, 1), stop);
  CHECK(tr.stop_reason == StopReason::im_threshold);
  CHECK(std::abs(std::imag(tr.points.back()) - 0.5L) < 1e-15);
  CHECK(std::abs(std::real(tr.points.back())) < 1e-9);
}
