#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "ptc/partition.hpp"

namespace ptc::gen {

/// slot -> index of the slot it is paired with
using Matching = std::vector<std::size_t>;

inline bool crosses(const Matching& m) {
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t c = 0; c < m.size(); ++c) {
      const std::size_t b = m[a], d = m[c];
      if (a < b && c < d && a < c && c < b && b < d) return true;
    }
  return false;
}

inline Matching random_noncrossing(std::mt19937_64& rng, std::size_t pairs) {
  // random Dyck word; each ')' closes the latest '('
  Matching m(2 * pairs);
  std::vector<std::size_t> stack;
  std::size_t opened = 0;
  for (std::size_t slot = 0; slot < 2 * pairs; ++slot) {
    const bool can_open = opened < pairs, can_close = !stack.empty();
    const bool open = can_open && (!can_close || std::bernoulli_distribution(0.5)(rng));
    if (open) {
      stack.push_back(slot);
      ++opened;
    } else {
      m[slot] = stack.back();
      m[stack.back()] = slot;
      stack.pop_back();
    }
  }
  return m;
}

inline Matching random_crossing(std::mt19937_64& rng, std::size_t pairs) {
  std::vector<std::size_t> slots(2 * pairs);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  Matching m(2 * pairs);
  do {
    std::shuffle(slots.begin(), slots.end(), rng);
    for (std::size_t k = 0; k < pairs; ++k) {
      m[slots[2 * k]] = slots[2 * k + 1];
      m[slots[2 * k + 1]] = slots[2 * k];
    }
  } while (!crosses(m));
  return m;
}

/// Lays the slots out counter-clockwise from `offset`. Slot i occupies
/// `length[i]` of an interval whose nominal width is `width[i]`.
inline NestedPartition layout(const Matching& m, const std::vector<real>& width, const std::vector<real>& length,
                              real offset) {
  std::vector<real> start(m.size());
  real pos = offset;
  for (std::size_t i = 0; i < m.size(); ++i) {
    start[i] = pos;
    pos += width[i];
  }
  NestedPartition p;
  std::vector<std::size_t> pair_of(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] < i) continue;
    pair_of[i] = pair_of[m[i]] = p.pairs.size();
    p.pairs.push_back({{start[i], length[i]}, {start[m[i]], length[m[i]]}});
  }
  // mark a pair of cyclically consecutive slots when there is one
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] == (i + 1) % m.size()) {
      p.marked_pair = pair_of[i];
      break;
    }
  return p;
}

/// Equal lengths within each pair, normalized to a total of 1.
inline std::vector<real> pair_widths(std::mt19937_64& rng, const Matching& m) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<real> w(m.size());
  real total = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] > i) {
      w[i] = w[m[i]] = u(rng);
      total += 2 * w[i];
    }
  for (auto& x : w) x /= total;
  return w;
}

struct Sample {
  NestedPartition partition;
  PartitionViolation expected = PartitionViolation::none;
};

inline Sample laminar(std::mt19937_64& rng) {
  const std::size_t pairs = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
  const auto m = random_noncrossing(rng, pairs);
  const auto w = pair_widths(rng, m);
  return {layout(m, w, w, std::uniform_real_distribution<double>(0, 1)(rng)), PartitionViolation::none};
}

/// One of the three violation classes, chosen by `kind` (0 crossing, 1 unequal, 2 gapped).
inline Sample violation(std::mt19937_64& rng, int kind) {
  const real offset = std::uniform_real_distribution<double>(0, 1)(rng);
  const std::size_t pairs = std::uniform_int_distribution<std::size_t>(2, 9)(rng);
  if (kind == 0) {
    const auto m = random_crossing(rng, pairs);
    const std::vector<real> w(m.size(), real(1) / static_cast<real>(m.size()));
    return {layout(m, w, w, offset), PartitionViolation::crossing};
  }
  const auto m = random_noncrossing(rng, pairs);
  auto w = pair_widths(rng, m);
  std::size_t a = std::uniform_int_distribution<std::size_t>(0, m.size() - 1)(rng);
  const real d = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
  if (kind == 1) {
    // the pair keeps its total width, so the circle stays tiled
    w[a] *= 1 + d;
    w[m[a]] *= 1 - d;
    return {layout(m, w, w, offset), PartitionViolation::unequal_lengths};
  }
  auto len = w;
  len[a] *= 1 - d;
  len[m[a]] *= 1 - d;
  return {layout(m, w, len, offset), PartitionViolation::not_tiling};
}

/// Random tree without degree-2 vertices, random vertex positions (any
/// positions define a rotation system) and edge lengths summing to 1/2.
inline PTGraph random_graph(std::mt19937_64& rng) {
  const std::size_t grow = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
  std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}};
  std::vector<std::size_t> degree{1, 1};
  for (std::size_t k = 0; k < grow; ++k) {
    const std::size_t at = std::uniform_int_distribution<std::size_t>(1, degree.size() - 1)(rng);
    edges.push_back({at, degree.size()});
    ++degree[at];
    degree.push_back(1);
  }
  for (std::size_t v = 0, n = degree.size(); v < n; ++v)
    if (degree[v] == 2) {
      edges.push_back({v, degree.size()});
      ++degree[v];
      degree.push_back(1);
    }
  std::uniform_real_distribution<double> u(-1, 1), len(0.1, 1);
  PTGraph g;
  for (std::size_t v = 0; v < degree.size(); ++v) g.vertices.push_back({u(rng), u(rng)});
  real total = 0;
  for (auto [a, b] : edges) {
    g.edges.push_back({a, b, len(rng)});
    total += g.edges.back().length;
  }
  for (auto& e : g.edges) e.length *= 0.5L / total;
  g.marked_vertex = 0;
  return g;
}

}  // namespace ptc::gen
