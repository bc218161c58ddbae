// Copyright 2026 The maxent_nav Authors
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

// Independent brute-force reference implementations used by the tests and the acceptance run.
// None of them share code with the library beyond the basic grid and stack types.

#ifndef MAXENT_NAV_TESTS_ORACLES_HPP
#define MAXENT_NAV_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "maxent_nav/maxent_nav.hpp"

namespace oracle {

using maxent_nav::BinaryLayer;
using maxent_nav::Cell;
using maxent_nav::FeatureStack;
using maxent_nav::GridGeometry;

inline const std::vector<Cell>& king_moves() {
  static const std::vector<Cell> moves = [] {
    std::vector<Cell> m;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx != 0 || dy != 0) m.push_back({dx, dy});
      }
    }
    return m;
  }();
  return moves;
}

/// Per-cell nearest-source Manhattan distance by scanning every source; -1 with no sources.
inline std::vector<int> manhattan_scan(const BinaryLayer& layer) {
  const auto& g = layer.geometry();
  std::vector<int> out(g.cell_count(), -1);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      int best = -1;
      for (int sy = 0; sy < g.height; ++sy) {
        for (int sx = 0; sx < g.width; ++sx) {
          if (layer.at({sx, sy})) {
            const int d = std::abs(sx - x) + std::abs(sy - y);
            if (best < 0 || d < best) best = d;
          }
        }
      }
      out[static_cast<std::size_t>(y * g.width + x)] = best;
    }
  }
  return out;
}

/// Small MaxEnt problem: cell rewards, impassable mask, start, goal, at most `horizon` moves.
struct PathProblem {
  GridGeometry geometry;
  std::vector<double> reward;
  std::vector<std::uint8_t> blocked;
  Cell start;
  Cell goal;
  int horizon;

  [[nodiscard]] bool passable(const Cell& c) const {
    return c.x >= 0 && c.y >= 0 && c.x < geometry.width && c.y < geometry.height &&
           blocked[static_cast<std::size_t>(c.y * geometry.width + c.x)] == 0;
  }
  [[nodiscard]] double r(const Cell& c) const { return reward[static_cast<std::size_t>(c.y * geometry.width + c.x)]; }
};

/// Every walk from start that ends on its first arrival at the goal within the horizon.
/// Stops early (returns false) once more than `limit` walks have been found.
inline bool enumerate_paths(const PathProblem& p, std::vector<std::vector<Cell>>& out, std::size_t limit = 1000000) {
  out.clear();
  std::vector<Cell> path{p.start};
  bool ok = true;
  std::function<void()> dfs = [&] {
    if (!ok) return;
    const Cell c = path.back();
    if (c == p.goal) {
      out.push_back(path);
      if (out.size() > limit) ok = false;
      return;
    }
    if (static_cast<int>(path.size()) - 1 >= p.horizon) return;
    for (const auto& m : king_moves()) {
      const Cell n{c.x + m.x, c.y + m.y};
      if (p.passable(n)) {
        path.push_back(n);
        dfs();
        path.pop_back();
      }
    }
  };
  if (p.passable(p.start)) dfs();
  return ok;
}

inline long double path_reward(const PathProblem& p, const std::vector<Cell>& path) {
  long double s = 0;
  for (const auto& c : path) s += p.r(c);
  return s;
}

/// log of the sum over all admissible walks of exp(sum of visited rewards), computed by
/// repeated dense transfer-matrix products in long double. Same quantity as enumeration,
/// usable when there are far too many walks to list.
inline long double log_partition_walks(const PathProblem& p) {
  const int w = p.geometry.width;
  const int n = w * p.geometry.height;
  const auto idx = [&](const Cell& c) { return c.y * w + c.x; };
  const int goal = idx(p.goal);
  const auto neg_inf = -std::numeric_limits<long double>::infinity();
  if (idx(p.start) == goal) return static_cast<long double>(p.r(p.goal));
  std::vector<long double> m(static_cast<std::size_t>(n * n), 0.0L);
  for (int s = 0; s < n; ++s) {
    const Cell c{s % w, s / w};
    if (s == goal || !p.passable(c)) continue;
    for (const auto& mv : king_moves()) {
      const Cell t{c.x + mv.x, c.y + mv.y};
      if (p.passable(t)) m[static_cast<std::size_t>(s * n + idx(t))] = std::exp(static_cast<long double>(p.r(c)));
    }
  }
  std::vector<long double> row(static_cast<std::size_t>(n), 0.0L);
  row[static_cast<std::size_t>(idx(p.start))] = 1.0L;
  long double log_scale = 0.0L;
  long double total = neg_inf;
  for (int k = 1; k <= p.horizon; ++k) {
    std::vector<long double> next(static_cast<std::size_t>(n), 0.0L);
    for (int s = 0; s < n; ++s) {
      const long double v = row[static_cast<std::size_t>(s)];
      if (v == 0.0L) continue;
      for (int t = 0; t < n; ++t) next[static_cast<std::size_t>(t)] += v * m[static_cast<std::size_t>(s * n + t)];
    }
    const long double peak = *std::max_element(next.begin(), next.end());
    if (!(peak > 0.0L)) break;
    for (auto& v : next) v /= peak;
    log_scale += std::log(peak);
    const long double at_goal = next[static_cast<std::size_t>(goal)];
    if (at_goal > 0.0L) {
      const long double term = std::log(at_goal) + log_scale;
      total = total == neg_inf ? term : std::max(total, term) + std::log1p(std::exp(-std::abs(total - term)));
    }
    next[static_cast<std::size_t>(goal)] = 0.0L;
    row = std::move(next);
  }
  return total + static_cast<long double>(p.r(p.goal));
}

/// Enumeration-based log partition; requires the walk set to be listable.
inline long double log_partition_enumerated(const PathProblem& p) {
  std::vector<std::vector<Cell>> paths;
  enumerate_paths(p, paths);
  long double z = 0;
  for (const auto& path : paths) z += std::exp(path_reward(p, path));
  return std::log(z);
}

/// Expected feature counts sum_paths P(path) phi(path) by listing every walk.
inline std::vector<long double> expected_counts_enumerated(const PathProblem& p, const FeatureStack& stack,
                                                           const std::vector<std::vector<Cell>>& paths) {
  long double z = 0;
  for (const auto& path : paths) z += std::exp(path_reward(p, path));
  std::vector<long double> out(stack.dimension(), 0.0L);
  for (const auto& path : paths) {
    const long double w = std::exp(path_reward(p, path)) / z;
    for (const auto& c : path) {
      for (std::size_t k = 0; k < stack.dimension(); ++k) out[k] += w * stack.value(k, c);
    }
  }
  return out;
}

/// Shortest path cost by Bellman-Ford relaxation over king moves with cost step * entry(c).
inline double shortest_cost(const GridGeometry& g, const std::function<bool(const Cell&)>& passable,
                            const std::function<double(const Cell&)>& entry, const Cell& start, const Cell& goal) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(g.cell_count(), inf);
  const auto idx = [&](const Cell& c) { return static_cast<std::size_t>(c.y * g.width + c.x); };
  d[idx(start)] = 0.0;
  for (std::size_t round = 0; round < g.cell_count(); ++round) {
    bool changed = false;
    for (int y = 0; y < g.height; ++y) {
      for (int x = 0; x < g.width; ++x) {
        const Cell c{x, y};
        if (d[idx(c)] == inf) continue;
        for (const auto& m : king_moves()) {
          const Cell n{x + m.x, y + m.y};
          if (n.x < 0 || n.y < 0 || n.x >= g.width || n.y >= g.height || !passable(n)) continue;
          const double step = (m.x != 0 && m.y != 0) ? std::sqrt(2.0) : 1.0;
          const double nd = d[idx(c)] + step * entry(n);
          if (nd < d[idx(n)] - 1e-15) {
            d[idx(n)] = nd;
            changed = true;
          }
        }
      }
    }
    if (!changed) break;
  }
  return d[idx(goal)];
}

/// Directed MHD by definition.
inline double mhd(const std::vector<maxent_nav::Point2>& a, const std::vector<maxent_nav::Point2>& b) {
  double sum = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    sum += best;
  }
  return sum / static_cast<double>(a.size());
}

}  // namespace oracle

#endif  // MAXENT_NAV_TESTS_ORACLES_HPP
