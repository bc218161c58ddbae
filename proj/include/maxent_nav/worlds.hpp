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

#ifndef MAXENT_NAV_WORLDS_HPP
#define MAXENT_NAV_WORLDS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "maxent_nav/scenario.hpp"

/**
 * \file
 * \brief Seeded procedural sites: a T-junction road world, a village street and a road world
 * with avoidance zones placed on the carriageway.
 */

namespace maxent_nav {

namespace detail {

/// Piecewise-linear interpolation of y over x for a polyline sorted by x.
inline double polyline_y_at(const std::vector<Point2>& pts, double x) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (x <= pts[i].x || i + 1 == pts.size()) {
      const double t = (x - pts[i - 1].x) / (pts[i].x - pts[i - 1].x);
      return pts[i - 1].y + t * (pts[i].y - pts[i - 1].y);
    }
  }
  return pts.front().y;
}

/// Same for a polyline sorted by y.
inline double polyline_x_at(const std::vector<Point2>& pts, double y) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (y <= pts[i].y || i + 1 == pts.size()) {
      const double t = (y - pts[i - 1].y) / (pts[i].y - pts[i - 1].y);
      return pts[i - 1].x + t * (pts[i].x - pts[i - 1].x);
    }
  }
  return pts.front().x;
}

class WorldRng {
 public:
  explicit WorldRng(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }

 private:
  std::mt19937_64 rng_;
};

inline double building_clearance(const Building& b, const std::vector<Road>& roads) {
  double best = std::numeric_limits<double>::infinity();
  for (double x = b.min_x; x <= b.max_x + 1e-9; x += 0.5) {
    for (double y = b.min_y; y <= b.max_y + 1e-9; y += 0.5) {
      for (const auto& r : roads) {
        best = std::min(best, distance_to_polyline({x, y}, r.points) - 0.5 * r.width_m);
      }
    }
  }
  return best;
}

inline bool buildings_overlap(const Building& a, const Building& b, double gap) {
  return a.min_x - gap < b.max_x && b.min_x - gap < a.max_x && a.min_y - gap < b.max_y && b.min_y - gap < a.max_y;
}

/// Scatters up to `count` off-road buildings with at least `clearance` meters to every road.
inline void scatter_buildings(ScenarioSpec& spec, WorldRng& u, int count, double clearance) {
  const double w = spec.geometry.width * spec.geometry.resolution;
  const double h = spec.geometry.height * spec.geometry.resolution;
  for (int attempt = 0; attempt < 80 && static_cast<int>(spec.buildings.size()) < count; ++attempt) {
    const double bw = u(4.0, 9.0);
    const double bh = u(4.0, 9.0);
    const double x0 = u(2.0, w - 2.0 - bw);
    const double y0 = u(2.0, h - 2.0 - bh);
    const Building b{x0, y0, x0 + bw, y0 + bh};
    if (building_clearance(b, spec.roads) < clearance) {
      continue;
    }
    if (std::any_of(spec.buildings.begin(), spec.buildings.end(),
                    [&](const Building& o) { return buildings_overlap(b, o, 2.0); })) {
      continue;
    }
    spec.buildings.push_back(b);
  }
}

}  // namespace detail

/// T-junction: an east-west road with a kink and a branch running north. The evaluation site
/// turns from the west arm into the branch; training pairs cover the other arms.
inline ScenarioSpec road_world(std::uint64_t seed, Behavior behavior = Behavior::edge_of_road) {
  detail::WorldRng u(seed);
  ScenarioSpec spec;
  spec.seed = seed;
  spec.geometry = {200, 120, 0.5, 0.0, 0.0};
  spec.behavior = behavior;
  const double W = 100.0;
  const double H = 60.0;
  const double yc = u(24.0, 32.0);
  const double a = u(-3.0, 3.0);
  const double b = u(-3.0, 3.0);
  const Road main{{{-1.0, yc + a}, {50.0, yc}, {W + 1.0, yc + b}}, u(5.0, 7.0)};
  const double xb = u(42.0, 58.0);
  const double yj = detail::polyline_y_at(main.points, xb);
  const Road branch{{{xb, yj}, {xb + u(-4.0, 4.0), H + 1.0}}, u(4.5, 6.0)};
  spec.roads = {main, branch};
  detail::scatter_buildings(spec, u, 5, 3.0);

  const auto on_main = [&](double x) { return Point2{x, detail::polyline_y_at(main.points, x)}; };
  const auto on_branch = [&](double y) { return Point2{detail::polyline_x_at(branch.points, y), y}; };
  spec.sites = {{"W-N", on_main(6.0), on_branch(54.0)}};
  const std::vector<Site> pool{
      {"E", on_main(xb + 12.0), on_main(std::min(xb + 44.0, 96.0))},
      {"E-N", on_main(xb + 20.0), on_branch(yj + 18.0)},
      {"N", on_branch(yj + 6.0), on_branch(std::min(yj + 34.0, 58.0))},
      {"E-rev", on_main(std::min(xb + 46.0, 96.0)), on_main(xb + 14.0)},
      {"W", on_main(xb - 10.0), on_main(std::max(xb - 42.0, 3.0))},
      {"N-E", on_branch(std::min(yj + 24.0, 57.0)), on_main(xb + 16.0)},
  };
  const auto n = static_cast<std::size_t>(4 + seed % 3);
  spec.training_pairs.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
  return spec;
}

/// A straight street lined on both sides by set-back buildings with gaps between them.
inline ScenarioSpec village_world(std::uint64_t seed, Behavior behavior = Behavior::covert) {
  detail::WorldRng u(seed);
  ScenarioSpec spec;
  spec.seed = seed;
  spec.geometry = {200, 120, 0.5, 0.0, 0.0};
  spec.behavior = behavior;
  const double yc = u(28.0, 32.0);
  const double width = u(4.5, 5.5);
  spec.roads = {{{{-1.0, yc}, {101.0, yc}}, width}};
  for (const int side : {1, -1}) {
    const double setback = u(3.5, 5.0);
    const double depth = u(5.0, 8.0);
    double x = u(6.0, 10.0);
    while (true) {
      const double bw = u(6.0, 10.0);
      if (x + bw > 94.0) {
        break;
      }
      const double near = yc + side * (0.5 * width + setback);
      const double far = near + side * depth;
      spec.buildings.push_back({x, std::min(near, far), x + bw, std::max(near, far)});
      x += bw + u(3.0, 5.0);
    }
  }
  const auto at = [&](double x) { return Point2{x, yc}; };
  spec.sites = {{"P-Q", at(4.0), at(96.0)}};
  spec.training_pairs = {
      {"A", at(10.0), at(40.0)}, {"B", at(88.0), at(58.0)}, {"C", at(30.0), at(62.0)}, {"D", at(72.0), at(45.0)}};
  return spec;
}

/// Straight T-junction with avoidance zones on the carriageway. The zone on the east arm is
/// centered on the road and wide enough to close it; the west zone sits on one edge.
inline ScenarioSpec zod_world(std::uint64_t seed) {
  detail::WorldRng u(seed);
  ScenarioSpec spec;
  spec.seed = seed;
  spec.geometry = {200, 120, 0.5, 0.0, 0.0};
  spec.behavior = Behavior::zod_avoidance;
  const double yc = u(26.0, 32.0);
  const double slope = u(-0.03, 0.03);
  const Road main{{{-1.0, yc - 51.0 * slope}, {101.0, yc + 51.0 * slope}}, u(4.0, 4.6)};
  const double xb = u(35.0, 50.0);
  const double yj = detail::polyline_y_at(main.points, xb);
  const Road branch{{{xb, yj}, {xb + u(-3.0, 3.0), 61.0}}, u(4.0, 4.6)};
  spec.roads = {main, branch};
  detail::scatter_buildings(spec, u, 4, 3.0);

  const auto on_main = [&](double x) { return Point2{x, detail::polyline_y_at(main.points, x)}; };
  const auto on_branch = [&](double y) { return Point2{detail::polyline_x_at(branch.points, y), y}; };
  const double x1 = u(xb + 22.0, xb + 34.0);
  const double r1 = u.pick(std::vector<double>{2.5, 3.0});
  const double x2 = u(12.0, xb - 14.0);
  const double side = u(-1.0, 1.0) < 0.0 ? -1.0 : 1.0;
  const double y3 = yj + u(12.0, 20.0);
  const double r3 = u.pick(std::vector<double>{2.0, 2.5, 3.0});
  const Point2 c2 = on_main(x2);
  const Point2 c3 = on_branch(y3);
  spec.zods = {{on_main(x1).x, on_main(x1).y, r1}, {c2.x, c2.y + side * 0.5 * main.width_m, 2.0}, {c3.x, c3.y, r3}};

  spec.sites = {{"E", on_main(xb + 10.0), on_main(97.0)},
                {"N", on_branch(yj + 5.0), on_branch(58.0)},
                {"W", on_main(3.0), on_main(xb - 6.0)}};
  const auto clamp_x = [](double x) { return std::clamp(x, 2.0, 98.0); };
  const auto clamp_y = [&](double y) { return std::clamp(y, yj + 4.0, 58.0); };
  int k = 0;
  const auto add = [&](Point2 from, Point2 to) {
    spec.training_pairs.push_back({"z" + std::to_string(++k), from, to});
  };
  for (const double x : {x1, x2}) {
    add(on_main(clamp_x(x - u(10.0, 16.0))), on_main(clamp_x(x + u(10.0, 16.0))));
    add(on_main(clamp_x(x + u(10.0, 16.0))), on_main(clamp_x(x - u(10.0, 16.0))));
    add(on_main(clamp_x(x - u(14.0, 20.0))), on_main(clamp_x(x + u(6.0, 10.0))));
    add(on_main(clamp_x(x + u(14.0, 20.0))), on_main(clamp_x(x - u(6.0, 10.0))));
  }
  add(on_branch(clamp_y(y3 - u(10.0, 16.0))), on_branch(clamp_y(y3 + u(10.0, 16.0))));
  add(on_branch(clamp_y(y3 + u(10.0, 16.0))), on_branch(clamp_y(y3 - u(10.0, 16.0))));
  add(on_main(xb + 14.0), on_branch(clamp_y(yj + 7.0)));
  add(on_branch(clamp_y(yj + 7.0)), on_main(xb - 12.0));
  return spec;
}

/// Preset lookup for the command line: "road", "village" or "zod".
inline ScenarioSpec preset_world(std::string_view name, std::uint64_t seed) {
  if (name == "road") return road_world(seed);
  if (name == "village") return village_world(seed);
  if (name == "zod") return zod_world(seed);
  throw Error(ErrorCode::invalid_argument, "unknown preset '" + std::string(name) + "'");
}

}  // namespace maxent_nav

#endif  // MAXENT_NAV_WORLDS_HPP
