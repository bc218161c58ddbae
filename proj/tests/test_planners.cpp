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

#include <gtest/gtest.h>

#include <random>

#include "maxent_nav/planners.hpp"
#include "oracles.hpp"

namespace {

using namespace maxent_nav;

RewardMap random_reward(std::mt19937_64& rng, const GridGeometry& g, double blocked_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RewardMap r{g, std::vector<double>(g.cell_count()), std::vector<std::uint8_t>(g.cell_count(), 0)};
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    r.values[i] = -4.0 * u(rng);
    r.blocked[i] = u(rng) < blocked_fraction ? 1 : 0;
  }
  return r;
}

double path_cost(const RewardMap& r, const std::vector<Cell>& cells) {
  double rmax = -1e300;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (!r.blocked[i]) rmax = std::max(rmax, r.values[i]);
  }
  double cost = 0.0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const Cell d{cells[i].x - cells[i - 1].x, cells[i].y - cells[i - 1].y};
    cost += (d.x != 0 && d.y != 0 ? std::sqrt(2.0) : 1.0) * (rmax - r.at(cells[i]) + kIocEpsilon);
  }
  return cost;
}

TEST(IocPlanner, OptimalAgainstBellmanFord) {
  std::mt19937_64 rng(31);
  const GridGeometry g{10, 10, 0.5};
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto r = random_reward(rng, g, 0.2);
    const Cell s{0, 0};
    const Cell t{9, 9 - trial % 10};
    if (r.is_blocked(s) || r.is_blocked(t)) continue;
    double rmax = -1e300;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      if (!r.blocked[i]) rmax = std::max(rmax, r.values[i]);
    }
    const double best = oracle::shortest_cost(
        g, [&](const Cell& c) { return !r.is_blocked(c); },
        [&](const Cell& c) { return rmax - r.at(c) + kIocEpsilon; }, s, t);
    if (!std::isfinite(best)) {
      EXPECT_THROW(plan_ioc_path(r, s, t), Error);
      continue;
    }
    const auto path = plan_ioc_path(r, s, t);
    EXPECT_NEAR(path.cost, best, 1e-9);
    EXPECT_NEAR(path_cost(r, path.cells), best, 1e-9);
    EXPECT_EQ(path.cells.front(), s);
    EXPECT_EQ(path.cells.back(), t);
    for (std::size_t i = 1; i < path.cells.size(); ++i) EXPECT_TRUE(are_adjacent(path.cells[i - 1], path.cells[i]));
    for (const auto& c : path.cells) EXPECT_FALSE(r.is_blocked(c));
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(IocPlanner, InvariantToRewardShift) {
  std::mt19937_64 rng(37);
  const GridGeometry g{12, 9, 0.5};
  for (int trial = 0; trial < 10; ++trial) {
    auto r = random_reward(rng, g, 0.0);
    // Dyadic rewards keep the shifted sums exact, so tie-breaking cannot change.
    for (auto& v : r.values) v = std::round(v * 8.0) / 8.0;
    auto shifted = r;
    for (auto& v : shifted.values) v += 3.5;
    EXPECT_EQ(plan_ioc_path(r, {0, 4}, {11, 2}).cells, plan_ioc_path(shifted, {0, 4}, {11, 2}).cells);
  }
}

TEST(IocPlanner, FollowsHighRewardCorridor) {
  const GridGeometry g{9, 5, 0.5};
  RewardMap r{g, std::vector<double>(g.cell_count(), -5.0), {}};
  for (int x = 0; x < 9; ++x) r.values[g.index({x, 4})] = -0.1;
  for (int y = 0; y < 5; ++y) r.values[g.index({0, y})] = r.values[g.index({8, y})] = -0.1;
  const auto path = plan_ioc_path(r, {0, 0}, {8, 0});
  for (const auto& c : path.cells) EXPECT_DOUBLE_EQ(r.at(c), -0.1);
}

TEST(IocPlanner, UnreachableAndImpassable) {
  const GridGeometry g{5, 3, 0.5};
  RewardMap r{g, std::vector<double>(15, 0.0), std::vector<std::uint8_t>(15, 0)};
  for (int y = 0; y < 3; ++y) r.blocked[g.index({2, y})] = 1;
  try {
    plan_ioc_path(r, {0, 0}, {4, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unreachable);
  }
  try {
    plan_ioc_path(r, {0, 0}, {2, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::impassable);
  }
  EXPECT_EQ(plan_ioc_path(r, {1, 1}, {1, 1}).cells.size(), 1u);
}

TEST(Baseline, IgnoresTerrainAndTakesStraightLine) {
  const GridGeometry g{20, 7, 0.5};
  const auto opacity = OpacityLayer(g, std::vector<double>(g.cell_count(), 0.0));
  const auto path = plan_baseline_path(opacity, {0, 3}, {19, 3});
  ASSERT_EQ(path.cells.size(), 20u);
  for (const auto& c : path.cells) EXPECT_EQ(c.y, 3);
  EXPECT_DOUBLE_EQ(path.cost, 19.0);
}

TEST(Baseline, KeepsInflationClearance) {
  const GridGeometry g{21, 15, 0.5};
  std::vector<double> op(g.cell_count(), 0.0);
  for (int y = 0; y <= 9; ++y) op[g.index({10, y})] = 1.0;
  const OpacityLayer opacity(g, op);
  BaselineParams params;
  const auto hard = inflated_obstacles(opacity, params);
  const auto path = plan_baseline_path(opacity, {2, 2}, {18, 2}, params);
  int deepest = 0;
  for (const auto& c : path.cells) {
    EXPECT_EQ(hard[g.index(c)], 0);
    deepest = std::max(deepest, c.y);
  }
  EXPECT_GE(deepest, 12);
  // Inflation is a Euclidean disk in cells.
  EXPECT_EQ(hard[g.index({12, 9})], 1);
  EXPECT_EQ(hard[g.index({12, 11})], 0);
  EXPECT_EQ(hard[g.index({10, 11})], 1);
}

TEST(Baseline, UnknownCellsCostExtra) {
  const GridGeometry g{9, 9, 0.5};
  std::vector<std::uint8_t> unknown(g.cell_count(), 0);
  for (int y = 0; y < 7; ++y) {
    for (int x = 3; x <= 5; ++x) unknown[g.index({x, y})] = 1;
  }
  const OpacityLayer opacity(g, std::vector<double>(g.cell_count(), 0.0), unknown);
  const auto path = plan_baseline_path(opacity, {0, 1}, {8, 1});
  for (const auto& c : path.cells) EXPECT_FALSE(opacity.is_unknown(c));
  // Without the unknown penalty the straight line is taken.
  BaselineParams cheap;
  cheap.w_unknown = 0.0;
  EXPECT_EQ(plan_baseline_path(opacity, {0, 1}, {8, 1}, cheap).cells.size(), 9u);
}

TEST(Baseline, MatchesBellmanFordCost) {
  std::mt19937_64 rng(41);
  const GridGeometry g{12, 10, 0.5};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> op(g.cell_count());
    for (auto& v : op) v = u(rng) < 0.05 ? 1.0 : 0.3 * u(rng);
    const OpacityLayer opacity(g, op);
    BaselineParams params;
    params.inflation_radius_cells = 1;
    const auto hard = inflated_obstacles(opacity, params);
    const Cell s{0, 0};
    const Cell t{11, 9};
    if (hard[g.index(s)] || hard[g.index(t)]) continue;
    const double best = oracle::shortest_cost(
        g, [&](const Cell& c) { return hard[g.index(c)] == 0; },
        [&](const Cell& c) { return 1.0 + params.w_obs * opacity.opacity(c); }, s, t);
    if (!std::isfinite(best)) continue;
    EXPECT_NEAR(plan_baseline_path(opacity, s, t, params).cost, best, 1e-9);
  }
}

TEST(Densify, SpacingAndEndpoints) {
  Trajectory t;
  t.points = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.6}};
  const auto d = densify(t, 0.25);
  ASSERT_EQ(d.points.size(), 8u);
  EXPECT_EQ(d.points.front(), (Point2{0.0, 0.0}));
  EXPECT_EQ(d.points.back(), (Point2{1.0, 0.6}));
  EXPECT_NEAR(d.points[4].x, 1.0, 1e-12);
  EXPECT_NEAR(d.points[5].y, 0.25, 1e-12);
  for (std::size_t i = 1; i + 1 < d.points.size(); ++i) {
    EXPECT_LE(distance(d.points[i - 1], d.points[i]), 0.25 + 1e-12);
  }
  EXPECT_NEAR(d.length(), t.length(), 1e-12);
  EXPECT_THROW(densify(t, 0.0), Error);
}

TEST(Densify, DegenerateInputs) {
  Trajectory single;
  single.points = {{2.0, 3.0}};
  EXPECT_EQ(densify(single, 0.5).points, single.points);
  Trajectory still;
  still.points = {{1.0, 1.0}, {1.0, 1.0}};
  EXPECT_EQ(densify(still, 0.5).points.size(), 1u);
}

TEST(Densify, InterpolatesTimestamps) {
  Trajectory t;
  t.points = {{0.0, 0.0}, {2.0, 0.0}};
  t.timestamps = {10.0, 14.0};
  const auto d = densify(t, 0.5);
  ASSERT_EQ(d.timestamps.size(), d.points.size());
  EXPECT_DOUBLE_EQ(d.timestamps[1], 11.0);
  EXPECT_DOUBLE_EQ(d.timestamps.back(), 14.0);
}

TEST(TrajectoryCsv, RoundTrip) {
  Trajectory t;
  t.points = {{0.25, 0.75}, {0.75, 1.25}, {1.25, 1.25}};
  const auto text = trajectory_to_csv(t);
  EXPECT_EQ(text.substr(0, 12), "t_s,x_m,y_m\n");
  const auto back = trajectory_from_csv(text, Provenance::ioc);
  EXPECT_EQ(back.points, t.points);
  EXPECT_EQ(back.provenance, Provenance::ioc);
  EXPECT_DOUBLE_EQ(back.timestamps.back(), std::sqrt(0.5) + 0.5);
  EXPECT_EQ(trajectory_to_csv(back), text);
  EXPECT_THROW(trajectory_from_csv("t_s,x_m,y_m\n1,2\n"), Error);
  EXPECT_THROW(trajectory_from_csv("t_s,x_m,y_m\n"), Error);
  EXPECT_THROW(trajectory_from_csv("0,a,1\n"), Error);
}

TEST(TrajectoryCsv, CellCentersAndProvenance) {
  const GridGeometry g{4, 4, 0.5};
  const std::vector<Cell> cells{{0, 0}, {1, 1}};
  const auto t = to_trajectory(g, cells, Provenance::baseline);
  EXPECT_EQ(t.points, (std::vector<Point2>{{0.25, 0.25}, {0.75, 0.75}}));
  EXPECT_EQ(t.provenance, Provenance::baseline);
  for (const auto p : {Provenance::ground_truth, Provenance::ioc, Provenance::baseline, Provenance::oracle}) {
    EXPECT_EQ(provenance_from_string(to_string(p)), p);
  }
}

}  // namespace
