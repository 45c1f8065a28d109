#include "ptc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ptc {

namespace {

real frac(real x) {
  x = std::fmod(x, real(1));
  return x < 0 ? x + 1 : x;
}

// Distance between two circle positions, in turns.
real cyc_dist(real a, real b) {
  const real d = frac(a - b);
  return std::min(d, 1 - d);
}

bool adjacent(const IntervalPair& p, real tol) {
  return cyc_dist(p.first.end(), p.second.start) <= tol || cyc_dist(p.second.end(), p.first.start) <= tol;
}

// Is x strictly inside the counter-clockwise arc from a to b?
bool inside_ccw(real a, real b, real x) { return frac(x - a) < frac(b - a) && frac(x - a) > 0; }

std::string pair_label(std::size_t i) { return "pair " + std::to_string(i); }

}  // namespace

const char* to_string(PartitionViolation v) {
  switch (v) {
    case PartitionViolation::none:
      return "ok";
    case PartitionViolation::unequal_lengths:
      return "unequal_lengths";
    case PartitionViolation::not_tiling:
      return "not_tiling";
    case PartitionViolation::crossing:
      return "crossing";
    case PartitionViolation::no_adjacent_pair:
      return "no_adjacent_pair";
  }
  return "unknown";
}

PartitionCheck validate_partition(const NestedPartition& p, real tol) {
  PartitionCheck res;
  auto fail = [&](PartitionViolation v, std::string d) {
    res.violation = v;
    res.detail = std::move(d);
    return res;
  };
  if (p.pairs.empty()) return fail(PartitionViolation::not_tiling, "no intervals");

  for (std::size_t i = 0; i < p.pairs.size(); ++i)
    if (std::abs(p.pairs[i].first.length - p.pairs[i].second.length) > tol)
      return fail(PartitionViolation::unequal_lengths, pair_label(i) + " has intervals of different length");

  std::vector<CircleArc> arcs;
  for (const auto& pr : p.pairs) {
    arcs.push_back(pr.first);
    arcs.push_back(pr.second);
  }
  real total = 0;
  for (auto& a : arcs) {
    if (!(a.length > tol)) return fail(PartitionViolation::not_tiling, "interval of non-positive length");
    a.start = frac(a.start);
    total += a.length;
  }
  std::sort(arcs.begin(), arcs.end(), [](const CircleArc& a, const CircleArc& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto& next = arcs[(i + 1) % arcs.size()];
    if (cyc_dist(arcs[i].end(), next.start) > tol) {
      std::ostringstream os;
      os << (frac(next.start - arcs[i].end()) < 0.5 ? "gap" : "overlap") << " after position "
         << static_cast<double>(frac(arcs[i].end()));
      return fail(PartitionViolation::not_tiling, os.str());
    }
  }
  if (std::abs(total - 1) > tol * static_cast<real>(arcs.size()))
    return fail(PartitionViolation::not_tiling, "intervals do not cover the circle exactly once");

  auto mid = [](const CircleArc& a) { return frac(a.start + a.length / 2); };
  for (std::size_t i = 0; i < p.pairs.size(); ++i) {
    const real a = mid(p.pairs[i].first), b = mid(p.pairs[i].second);
    for (std::size_t j = i + 1; j < p.pairs.size(); ++j) {
      const bool x = inside_ccw(a, b, mid(p.pairs[j].first));
      const bool y = inside_ccw(a, b, mid(p.pairs[j].second));
      if (x != y) return fail(PartitionViolation::crossing, pair_label(i) + " separates " + pair_label(j));
    }
  }

  if (std::none_of(p.pairs.begin(), p.pairs.end(), [&](const IntervalPair& pr) { return adjacent(pr, tol); }))
    return fail(PartitionViolation::no_adjacent_pair, "no pair of adjacent intervals");
  if (p.marked_pair >= p.pairs.size() || !adjacent(p.pairs[p.marked_pair], tol))
    return fail(PartitionViolation::no_adjacent_pair, "the marked pair is not adjacent");
  return res;
}

void validate_graph(const PTGraph& g, real tol) {
  const std::size_t n = g.vertices.size();
  if (n < 2) throw std::invalid_argument("PT-graph needs at least two vertices");
  if (g.edges.size() + 1 != n) throw std::invalid_argument("PT-graph is not a tree: |E| != |V| - 1");
  std::vector<std::size_t> degree(n, 0), parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  real total = 0;
  for (const auto& e : g.edges) {
    if (e.u >= n || e.v >= n || e.u == e.v) throw std::invalid_argument("PT-graph edge has invalid endpoints");
    if (!(e.length > 0)) throw std::invalid_argument("PT-graph edge lengths must be positive");
    ++degree[e.u];
    ++degree[e.v];
    const auto a = find(e.u), b = find(e.v);
    if (a == b) throw std::invalid_argument("PT-graph contains a cycle");
    parent[a] = b;
    total += e.length;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (degree[i] == 2) throw std::invalid_argument("PT-graph has a vertex of degree 2");
  if (std::abs(total - 0.5L) > tol) throw std::invalid_argument("PT-graph edge lengths must sum to 1/2");
  if (g.marked_vertex >= n || degree[g.marked_vertex] != 1)
    throw std::invalid_argument("PT-graph marked vertex must be a leaf");
}

NestedPartition partition_from_graph(const PTGraph& g) {
  validate_graph(g);
  const std::size_t n = g.vertices.size();
  // incident (neighbour, edge) lists in counter-clockwise order
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    adj[g.edges[k].u].push_back({g.edges[k].v, k});
    adj[g.edges[k].v].push_back({g.edges[k].u, k});
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto angle = [&](const std::pair<std::size_t, std::size_t>& nb) { return std::arg(g.vertices[nb.first] - g.vertices[v]); };
    std::sort(adj[v].begin(), adj[v].end(), [&](const auto& a, const auto& b) { return angle(a) < angle(b); });
  }

  std::vector<std::vector<CircleArc>> visits(g.edges.size());
  auto [at, edge] = adj[g.marked_vertex].front();
  real pos = 0;
  for (std::size_t step = 0; step < 2 * g.edges.size(); ++step) {
    const real len = g.edges[edge].length;
    visits[edge].push_back({pos, len});
    pos += len;
    const auto& nbs = adj[at];
    std::size_t i = 0;
    while (nbs[i].second != edge) ++i;
    const auto next = nbs[(i + 1) % nbs.size()];
    at = next.first;
    edge = next.second;
  }

  NestedPartition p;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    p.pairs.push_back({visits[k].at(0), visits[k].at(1)});
    if (g.edges[k].u == g.marked_vertex || g.edges[k].v == g.marked_vertex) p.marked_pair = k;
  }
  return p;
}

}  // namespace ptc
