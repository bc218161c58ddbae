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

#ifndef MAXENT_NAV_PLANNERS_HPP
#define MAXENT_NAV_PLANNERS_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "maxent_nav/feature_maps.hpp"
#include "maxent_nav/io.hpp"
#include "maxent_nav/irl.hpp"

namespace maxent_nav {

enum class Provenance { ground_truth, ioc, baseline, oracle };

constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ground_truth: return "gt";
    case Provenance::ioc: return "ioc";
    case Provenance::baseline: return "baseline";
    case Provenance::oracle: return "oracle";
  }
  return "unknown";
}

inline Provenance provenance_from_string(std::string_view s) {
  for (const auto p : {Provenance::ground_truth, Provenance::ioc, Provenance::baseline, Provenance::oracle}) {
    if (to_string(p) == s) {
      return p;
    }
  }
  throw Error(ErrorCode::parse_error, "unknown provenance '" + std::string(s) + "'");
}

/// World-coordinate polyline; timestamps are either empty or one per point.
struct Trajectory {
  std::vector<Point2> points;
  std::vector<double> timestamps;
  Provenance provenance = Provenance::oracle;

  [[nodiscard]] double length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
      total += distance(points[i - 1], points[i]);
    }
    return total;
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// A cell path with its accumulated search cost.
struct GridPath {
  std::vector<Cell> cells;
  double cost = 0.0;
};

/// Dijkstra over king moves. Moving into `c` along an offset of Euclidean length l costs
/// l * entry_cost(c). Ties in the open list are broken by lower row, then lower column.
inline GridPath shortest_grid_path(const GridGeometry& g, const std::function<bool(const Cell&)>& passable,
                                   const std::function<double(const Cell&)>& entry_cost, const Cell& start,
                                   const Cell& goal) {
  g.require_contains(start);
  g.require_contains(goal);
  if (!passable(start) || !passable(goal)) {
    throw Error(ErrorCode::impassable, "start or goal cell is impassable");
  }
  if (start == goal) {
    return {{start}, 0.0};
  }
  const auto n = g.cell_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> done(n, 0);
  using Entry = std::tuple<double, int, int>;  // cost, row, column
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[g.index(start)] = 0.0;
  open.emplace(0.0, start.y, start.x);
  while (!open.empty()) {
    const auto [d, y, x] = open.top();
    open.pop();
    const Cell c{x, y};
    const auto ci = g.index(c);
    if (done[ci] != 0) {
      continue;
    }
    done[ci] = 1;
    if (c == goal) {
      break;
    }
    for (const auto& m : kKingMoves) {
      const Cell nb{c.x + m.x, c.y + m.y};
      if (!g.contains(nb) || !passable(nb)) {
        continue;
      }
      const auto ni = g.index(nb);
      if (done[ni] != 0) {
        continue;
      }
      const double nd = d + step_length(m) * entry_cost(nb);
      if (nd < dist[ni]) {
        dist[ni] = nd;
        parent[ni] = static_cast<std::int64_t>(ci);
        open.emplace(nd, nb.y, nb.x);
      }
    }
  }
  const auto gi = g.index(goal);
  if (dist[gi] == kInf) {
    throw Error(ErrorCode::unreachable, "goal is unreachable from start");
  }
  GridPath path;
  path.cost = dist[gi];
  for (auto i = static_cast<std::int64_t>(gi); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    path.cells.push_back(g.cell_at(static_cast<std::size_t>(i)));
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

/// Polyline through cell centers.
inline Trajectory to_trajectory(const GridGeometry& g, std::span<const Cell> cells, Provenance provenance) {
  Trajectory t;
  t.provenance = provenance;
  t.points.reserve(cells.size());
  for (const auto& c : cells) {
    t.points.push_back(g.center_of(c));
  }
  return t;
}

inline constexpr double kIocEpsilon = 1e-6;

/// Maximum-reward path: cell entry cost (R_max - R(c) + eps), scaled by the step length.
inline GridPath plan_ioc_path(const RewardMap& reward, const Cell& start, const Cell& goal) {
  const auto& g = reward.geometry;
  double r_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < reward.values.size(); ++i) {
    if (reward.blocked.empty() || reward.blocked[i] == 0) {
      r_max = std::max(r_max, reward.values[i]);
    }
  }
  return shortest_grid_path(
      g, [&](const Cell& c) { return !reward.is_blocked(c); },
      [&](const Cell& c) { return r_max - reward.at(c) + kIocEpsilon; }, start, goal);
}

inline Trajectory plan_ioc(const RewardMap& reward, const Cell& start, const Cell& goal) {
  return to_trajectory(reward.geometry, plan_ioc_path(reward, start, goal).cells, Provenance::ioc);
}

struct BaselineParams {
  double w_obs = 50.0;
  double w_unknown = 10.0;
  int inflation_radius_cells = 2;
  double hard_threshold = 0.97;
};

/// Cells that are hard obstacles or within the inflation radius (Euclidean, in cells) of one.
inline std::vector<std::uint8_t> inflated_obstacles(const OpacityLayer& opacity, const BaselineParams& params) {
  const auto& g = opacity.geometry();
  std::vector<std::uint8_t> out(g.cell_count(), 0);
  const int r = std::max(0, params.inflation_radius_cells);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const Cell c{x, y};
      if (opacity.is_unknown(c) || opacity.opacity(c) < params.hard_threshold) {
        continue;
      }
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const Cell nb{x + dx, y + dy};
          if (dx * dx + dy * dy <= r * r && g.contains(nb)) {
            out[g.index(nb)] = 1;
          }
        }
      }
    }
  }
  return out;
}

/// Obstacle-only cost planner; terrain layers are never consulted.
inline GridPath plan_baseline_path(const OpacityLayer& opacity, const Cell& start, const Cell& goal,
                                   const BaselineParams& params = {}) {
  const auto& g = opacity.geometry();
  const auto hard = inflated_obstacles(opacity, params);
  return shortest_grid_path(
      g, [&](const Cell& c) { return hard[g.index(c)] == 0; },
      [&](const Cell& c) {
        return 1.0 + params.w_obs * opacity.opacity(c) + params.w_unknown * (opacity.is_unknown(c) ? 1.0 : 0.0);
      },
      start, goal);
}

inline Trajectory plan_baseline(const OpacityLayer& opacity, const Cell& start, const Cell& goal,
                                const BaselineParams& params = {}) {
  return to_trajectory(opacity.geometry(), plan_baseline_path(opacity, start, goal, params).cells,
                       Provenance::baseline);
}

/// Arc-length resampling every `step` meters; the last point is always kept.
inline Trajectory densify(const Trajectory& traj, double step) {
  if (!(step > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "resample step must be positive");
  }
  if (traj.points.size() <= 1) {
    return traj;
  }
  const bool timed = traj.timestamps.size() == traj.points.size();
  std::vector<double> s(traj.points.size(), 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    s[i] = s[i - 1] + distance(traj.points[i - 1], traj.points[i]);
  }
  const double total = s.back();
  Trajectory out;
  out.provenance = traj.provenance;
  if (total == 0.0) {
    out.points.push_back(traj.points.front());
    if (timed) {
      out.timestamps.push_back(traj.timestamps.front());
    }
    return out;
  }
  const double tol = 1e-9 * std::max(1.0, total);
  std::size_t seg = 0;
  for (std::size_t k = 0;; ++k) {
    const double at = static_cast<double>(k) * step;
    if (at >= total - tol) {
      break;
    }
    while (seg + 2 < s.size() && s[seg + 1] <= at) {
      ++seg;
    }
    const double len = s[seg + 1] - s[seg];
    const double f = len > 0.0 ? (at - s[seg]) / len : 0.0;
    const auto& a = traj.points[seg];
    const auto& b = traj.points[seg + 1];
    out.points.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
    if (timed) {
      out.timestamps.push_back(traj.timestamps[seg] + f * (traj.timestamps[seg + 1] - traj.timestamps[seg]));
    }
  }
  out.points.push_back(traj.points.back());
  if (timed) {
    out.timestamps.push_back(traj.timestamps.back());
  }
  return out;
}

/// "t_s,x_m,y_m" rows. Without recorded timestamps t is the arc length at 1 m/s.
inline std::string trajectory_to_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t_s,x_m,y_m\n";
  const bool timed = traj.timestamps.size() == traj.points.size();
  double arc = 0.0;
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    if (i > 0) {
      arc += distance(traj.points[i - 1], traj.points[i]);
    }
    out << format_double(timed ? traj.timestamps[i] : arc) << ',' << format_double(traj.points[i].x) << ','
        << format_double(traj.points[i].y) << '\n';
  }
  return out.str();
}

inline Trajectory trajectory_from_csv(std::string_view text, Provenance provenance = Provenance::ground_truth) {
  Trajectory t;
  t.provenance = provenance;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (header) {
      header = false;
      if (line.rfind("t_s", 0) == 0) {
        continue;
      }
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw Error(ErrorCode::parse_error, "trajectory row '" + line + "' needs three columns");
    }
    const std::string_view row(line);
    t.timestamps.push_back(parse_double(row.substr(0, c1), "trajectory"));
    t.points.push_back({parse_double(row.substr(c1 + 1, c2 - c1 - 1), "trajectory"),
                        parse_double(row.substr(c2 + 1), "trajectory")});
  }
  if (t.points.empty()) {
    throw Error(ErrorCode::parse_error, "trajectory file has no points");
  }
  return t;
}

inline void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  write_text_file(path, trajectory_to_csv(traj));
}

inline Trajectory load_trajectory(const std::filesystem::path& path, Provenance provenance = Provenance::ground_truth) {
  return trajectory_from_csv(read_text_file(path), provenance);
}

}  // namespace maxent_nav

#endif  // MAXENT_NAV_PLANNERS_HPP
