#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ptc/types.hpp"

namespace ptc {

/// Half-open arc of the circle; positions and lengths are in turns, so the
/// whole circle has length 1.
struct CircleArc {
  real start = 0;
  real length = 0;
  real end() const { return start + length; }
};

struct IntervalPair {
  CircleArc first;
  CircleArc second;
};

struct NestedPartition {
  std::vector<IntervalPair> pairs;
  std::size_t marked_pair = 0;
};

enum class PartitionViolation { none, unequal_lengths, not_tiling, crossing, no_adjacent_pair };

const char* to_string(PartitionViolation v);

struct PartitionCheck {
  PartitionViolation violation = PartitionViolation::none;
  std::string detail;
  bool ok() const { return violation == PartitionViolation::none; }
};

/// Checks, in order: equal lengths within each pair, tiling of the circle,
/// absence of separating (crossing) pairs, adjacency of the marked pair.
/// The first failing check is reported.
PartitionCheck validate_partition(const NestedPartition& p, real tol = 1e-12L);

struct GraphEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  real length = 0;
};

/// Planar tree; the cyclic order of edges at a vertex is taken from the
/// vertex positions.
struct PTGraph {
  std::vector<cplx> vertices;
  std::vector<GraphEdge> edges;
  std::size_t marked_vertex = 0;
};

/// Throws std::invalid_argument describing the first violated invariant.
void validate_graph(const PTGraph& g, real tol = 1e-12L);

/// Boundary walk starting from the marked leaf: every edge is met twice and
/// contributes a pair of intervals with its length. The marked pair belongs
/// to the marked leaf's edge.
NestedPartition partition_from_graph(const PTGraph& g);

}  // namespace ptc
