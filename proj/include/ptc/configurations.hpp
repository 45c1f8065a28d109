#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptc/solver.hpp"
#include "ptc/tracer.hpp"

namespace ptc {

enum class ConfigId { three_point, six_sym_1, six_sym_2, outer_two, outer_three_sym, outer_six_sym };

const char* to_string(ConfigId c);
/// Accepts both "three_point" and "three-point" spellings.
ConfigId config_from_string(const std::string& s);

/// Anchor conventions (∞ is implicit for the inner formulation):
///   three_point      a1, a2
///   six_sym_1/2      a1..a5 with a3 real, a4 = conj(a2), a5 = conj(a1)
///   outer_two        a1, a2
///   outer_three_sym  a1, a2, a3 in counter-clockwise order around the continuum
///   outer_six_sym    a0..a5 with a0, a3 real, a4 = conj(a2), a5 = conj(a1);
///                    a0 is the anchor at angle 0
struct PTProblem {
  Formulation formulation = Formulation::inner;
  std::vector<cplx> anchors;
  bool symmetric = false;
  ConfigId config = ConfigId::three_point;
  /// Six-point topologies: 1 or 2.
  int topology = 1;

  static PTProblem make(ConfigId config, std::vector<cplx> anchors, int topology = 1);
};

/// The map data encoded by an unknown vector.
struct MapData {
  cplx lead;
  /// Distinct zeros b_j.
  std::vector<cplx> b_points;
  /// Zeros with multiplicity, as used by the ODE.
  std::vector<cplx> zeros;
  /// (name, angle) in the cyclic order of the configuration word.
  std::vector<std::pair<std::string, real>> angles;

  real angle(const std::string& name) const;
};

std::size_t unknown_count(ConfigId config, int topology = 1);
MapData decode(const PTProblem& problem, const Vec& x);
OdeParams ode_params(const PTProblem& problem, const MapData& m);

/// f(e^{iγ}) (inner) or g(e^{iγ}) (outer) for the map encoded by m.
cplx boundary_value(const PTProblem& problem, const MapData& m, real gamma, const IntegratorOptions& opts = {});

Vec residuals_3pt(const PTProblem& problem, const Vec& x, const IntegratorOptions& opts = {});
/// Used for six_sym_1/2 and for outer_six_sym (same equation lists).
Vec residuals_6pt_sym(const PTProblem& problem, int config, const Vec& x, const IntegratorOptions& opts = {});
Vec residuals_outer_two(const PTProblem& problem, const Vec& x, const IntegratorOptions& opts = {});
Vec residuals_outer_three(const PTProblem& problem, const Vec& x, const IntegratorOptions& opts = {});
/// Dispatches on problem.config.
Vec residuals(const PTProblem& problem, const Vec& x, const IntegratorOptions& opts = {});

struct OrbitOptions {
  TraceOptions trace;
  /// Validity guard: max(|a1|, |a2|) / |a3| must not exceed this.
  real max_anchor_ratio = 25;
  real probe_angle = 0.1L;

  OrbitOptions() { trace.step = 1e-4L; }
};

/// Alternative residuals for six_sym_1 from critical orbits; x = (f'(0), b1, b2).
Vec residuals_critical_orbit(const PTProblem& problem, const Vec& x, const IntegratorOptions& iopts = {},
                             const OrbitOptions& oopts = {});
/// Throws std::invalid_argument when the guard rejects the instance.
void check_orbit_guard(const PTProblem& problem, const OrbitOptions& oopts = {});
/// The critical-orbit unknowns (f'(0), b1, b2) of a six_sym_1 unknown vector.
Vec orbit_unknowns(const Vec& x);

struct PTSolution {
  PTProblem problem;
  MapData map;
  Vec unknowns;
  real residual_norm = 0;
  /// Residual max-norm re-evaluated at twice the series order.
  real verified_residual = 0;
  bool converged = false;
  SolveReport report;

  cplx evaluate(real gamma, const IntegratorOptions& opts = {}) const { return boundary_value(problem, map, gamma, opts); }
  /// Capacity for the outer formulation (|lead|).
  real capacity() const { return std::abs(map.lead); }
};

struct PTOptions {
  IntegratorOptions integrator;
  SolverOptions solver;
  std::size_t verify_order = 60;
  std::size_t continuation_steps = 8;
  /// Largest angular half-width of a seed spike.
  real seed_spike_width = 0.05L;
};

/// Seed for solve_pt. Returns a nearby problem and an approximate root of it;
/// the caller continues from there to the target. Six-point problems start
/// from short spikes on the slit (inner) or segment (outer) through the real
/// anchors, outer three-point problems from the fitted equilateral triangle,
/// and three-point problems from the outer problem of the inverted anchors.
std::pair<PTProblem, Vec> initial_seed(const PTProblem& problem, const PTOptions& opts = {});

/// Solves the problem from an explicit seed, or (no seed) by continuation
/// from initial_seed. For six-point problems with
/// topology == 0 configuration 1 is tried first, then configuration 2.
/// The anchors of a symmetric or three-point problem may be relabeled to match
/// the configuration word; the solution records the labeling used.
/// Throws TopologyMismatchError when the solved angles leave the word order,
/// or when an unseeded six-point solve fails and the other topology solves.
/// A failed solve returns the best iterate with converged == false.
PTSolution solve_pt(const PTProblem& problem, const std::optional<Vec>& seed = std::nullopt,
                    const PTOptions& opts = {});

/// Checks that the angle table follows the configuration word.
bool angles_in_word_order(const MapData& m);

/// The critical graph of Q(z) dz^2 for a solution, i.e. the continuum (outer)
/// or the slit system (inner): one trajectory per edge, traced from the zeros
/// of Q (from the anchors when there are none).
/// Inner edges running to ∞ are cut at |z| = escape_radius · max|a_i|.
std::vector<Trajectory> critical_graph(const PTSolution& s, const TraceOptions& opts = {}, real escape_radius = 20);

}  // namespace ptc
