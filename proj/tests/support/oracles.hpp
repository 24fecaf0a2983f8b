// Copyright 2026 The APGM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef APGM_TESTS_ORACLES_HPP
#define APGM_TESTS_ORACLES_HPP

// Independent reference computations used to check the library. Nothing in
// here calls into the code paths it is used to verify.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

/// General mass function over bitmask subsets of an n-hypothesis frame.
using PowerSetMass = std::map<std::uint32_t, double>;

/// Dempster's rule over arbitrary focal sets by enumerating all pairs.
inline std::pair<PowerSetMass, double> dempster(const PowerSetMass& a, const PowerSetMass& b) {
  PowerSetMass joint;
  double conflict = 0.0;
  for (const auto& [sa, ma] : a) {
    for (const auto& [sb, mb] : b) {
      const std::uint32_t s = sa & sb;
      if (s == 0) {
        conflict += ma * mb;
      } else {
        joint[s] += ma * mb;
      }
    }
  }
  for (auto& [s, m] : joint) m /= (1.0 - conflict);
  return {joint, conflict};
}

inline double belief(const PowerSetMass& m, std::uint32_t set) {
  double sum = 0.0;
  for (const auto& [s, v] : m) {
    if ((s & ~set) == 0 && s != 0) sum += v;
  }
  return sum;
}

inline double plausibility(const PowerSetMass& m, std::uint32_t set) {
  double sum = 0.0;
  for (const auto& [s, v] : m) {
    if ((s & set) != 0) sum += v;
  }
  return sum;
}

/// Pignistic probability by the |A n B| / |B| weighting over all focal sets.
inline std::vector<double> pignistic(const PowerSetMass& m, std::size_t n) {
  std::vector<double> p(n, 0.0);
  for (const auto& [s, v] : m) {
    const int card = std::popcount(s);
    for (std::size_t h = 0; h < n; ++h) {
      if ((s >> h) & 1U) p[h] += v / card;
    }
  }
  return p;
}

/// Grid measurement model evaluated directly on a set of points that all
/// fall in one cell: 1 - prod over points of (1 - mu).
inline double direct_evidence(std::size_t points, double mu_hit) {
  double not_relevant = 1.0;
  for (std::size_t i = 0; i < points; ++i) not_relevant *= (1.0 - mu_hit);
  return 1.0 - not_relevant;
}

/// Length of the part of segment p0->p1 strictly inside the axis-aligned
/// box [lo, hi] (Liang-Barsky clipping).
inline double clipped_length(double x0, double y0, double x1, double y1, double lox,
                             double loy, double hix, double hiy) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {x0 - lox, hix - x0, y0 - loy, hiy - y0};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return 0.0;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  if (t1 <= t0) return 0.0;
  return (t1 - t0) * std::hypot(dx, dy);
}

/// Brute-force supercover on a unit lattice: every integer cell (i, j)
/// whose interior the segment crosses for a length above `eps`.
inline std::set<std::pair<std::int64_t, std::int64_t>> supercover(double x0, double y0, double x1,
                                                                   double y1, double eps = 1e-7) {
  std::set<std::pair<std::int64_t, std::int64_t>> cells;
  const auto ix0 = static_cast<std::int64_t>(std::floor(std::min(x0, x1))) - 1;
  const auto ix1 = static_cast<std::int64_t>(std::floor(std::max(x0, x1))) + 1;
  const auto iy0 = static_cast<std::int64_t>(std::floor(std::min(y0, y1))) - 1;
  const auto iy1 = static_cast<std::int64_t>(std::floor(std::max(y0, y1))) + 1;
  for (auto i = ix0; i <= ix1; ++i) {
    for (auto j = iy0; j <= iy1; ++j) {
      if (clipped_length(x0, y0, x1, y1, static_cast<double>(i), static_cast<double>(j),
                         static_cast<double>(i + 1), static_cast<double>(j + 1)) > eps) {
        cells.insert({i, j});
      }
    }
  }
  return cells;
}

/// Number of patches (edge e, datum 0) whose closed square lies within
/// `horizon` of `(vx, vy)`, by enumerating a bounding window of indices.
inline std::size_t patches_in_disc(double vx, double vy, double horizon, double e) {
  std::size_t count = 0;
  const auto lo_x = static_cast<std::int64_t>(std::floor((vx - horizon) / e)) - 1;
  const auto hi_x = static_cast<std::int64_t>(std::floor((vx + horizon) / e)) + 1;
  const auto lo_y = static_cast<std::int64_t>(std::floor((vy - horizon) / e)) - 1;
  const auto hi_y = static_cast<std::int64_t>(std::floor((vy + horizon) / e)) + 1;
  for (auto i = lo_x; i <= hi_x; ++i) {
    for (auto j = lo_y; j <= hi_y; ++j) {
      const double cx = std::clamp(vx, i * e, (i + 1) * e);
      const double cy = std::clamp(vy, j * e, (j + 1) * e);
      if (std::hypot(vx - cx, vy - cy) <= horizon + 1e-9) ++count;
    }
  }
  return count;
}

/// Dense sampling check: does any sample of the square [x0, x0+e]^2 lie
/// within `horizon` of the apex and within `half_fov` of `heading`?
inline bool square_meets_sector(double x0, double y0, double e, double ax, double ay,
                                double heading, double half_fov, double horizon,
                                int samples = 64) {
  for (int i = 0; i <= samples; ++i) {
    for (int j = 0; j <= samples; ++j) {
      const double px = x0 + e * i / samples - ax;
      const double py = y0 + e * j / samples - ay;
      const double d = std::hypot(px, py);
      if (d > horizon) continue;
      if (d < 1e-12) return true;
      double bearing = std::atan2(py, px) - heading;
      bearing = std::remainder(bearing, 2.0 * M_PI);
      if (std::abs(bearing) <= half_fov) return true;
    }
  }
  return false;
}

}  // namespace oracle

#endif  // APGM_TESTS_ORACLES_HPP
