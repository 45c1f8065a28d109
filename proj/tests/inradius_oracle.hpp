#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ptc/domains.hpp"

namespace ptc::oracle {

struct Segment {
  cplx a, b;
};

inline real segment_distance(cplx p, const Segment& s) {
  const cplx d = s.b - s.a;
  const real len2 = std::norm(d);
  real t = len2 > 0 ? std::real((p - s.a) * std::conj(d)) / len2 : 0;
  t = std::clamp<real>(t, 0, 1);
  return std::abs(p - (s.a + t * d));
}

/// Boundary segments with vertices at least `spacing` apart (end points kept).
inline std::vector<Segment> boundary_segments(const DomainSpec& spec, real spacing) {
  std::vector<Segment> out;
  for (const auto& line : boundary_polylines(spec)) {
    cplx last = line.front();
    for (std::size_t i = 1; i < line.size(); ++i) {
      if (std::abs(line[i] - last) < spacing && i + 1 < line.size()) continue;
      out.push_back({last, line[i]});
      last = line[i];
    }
  }
  return out;
}

struct GridResult {
  /// Largest distance to the boundary over the grid points.
  real radius = 0;
  cplx center;
};

/// Brute-force inradius of D_{w1,w2,R}: distance from grid centers in the
/// sector 0 ≤ arg w ≤ π/3 to the slits, the arcs and the circle |w| = R.
/// A coarse pass locates candidates; every coarse cell within `slack` of the
/// best is resampled at `resolution`.
inline GridResult grid_inradius(const DomainSpec& spec, real resolution = 2e-3L, real coarse = 4e-2L,
                                real slack = 0.05L, real spacing = 1e-2L) {
  const auto segs = boundary_segments(spec, spacing);
  const real R = spec.R();
  const real sector = pi / 3;
  auto dist = [&](cplx c) {
    real d = R - std::abs(c);
    for (const auto& s : segs) {
      d = std::min(d, segment_distance(c, s));
      if (d <= 0) break;
    }
    return d;
  };
  auto inside = [&](cplx c) {
    const real a = std::arg(c);
    return std::abs(c) < R && a >= 0 && a <= sector;
  };

  struct Cell {
    cplx c;
    real d;
  };
  std::vector<Cell> cells;
  real best = 0;
  for (real x = 0; x <= R; x += coarse)
    for (real y = 0; y <= R * std::sin(sector); y += coarse) {
      const cplx c(x, y);
      if (!inside(c)) continue;
      const real d = dist(c);
      cells.push_back({c, d});
      best = std::max(best, d);
    }

  GridResult res;
  for (const auto& cell : cells) {
    if (cell.d < best - slack) continue;
    const int n = static_cast<int>(std::ceil(coarse / resolution));
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j) {
        const cplx c = cell.c + cplx(i * resolution, j * resolution);
        if (!inside(c)) continue;
        const real d = dist(c);
        if (d > res.radius) {
          res.radius = d;
          res.center = c;
        }
      }
  }
  return res;
}

}  // namespace ptc::oracle
