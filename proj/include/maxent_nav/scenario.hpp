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

#ifndef MAXENT_NAV_SCENARIO_HPP
#define MAXENT_NAV_SCENARIO_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "maxent_nav/environment.hpp"
#include "maxent_nav/evaluation.hpp"
#include "maxent_nav/irl.hpp"
#include "maxent_nav/planners.hpp"

/**
 * \file
 * \brief Synthetic sites, scripted demonstrators and the four-trial evaluation protocol.
 */

namespace maxent_nav {

enum class Behavior { edge_of_road, covert, zod_avoidance };

constexpr std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::edge_of_road: return "edge-of-road";
    case Behavior::covert: return "covert";
    case Behavior::zod_avoidance: return "zod-avoidance";
  }
  return "unknown";
}

inline Behavior behavior_from_string(std::string_view s) {
  for (const auto b : {Behavior::edge_of_road, Behavior::covert, Behavior::zod_avoidance}) {
    if (to_string(b) == s) {
      return b;
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown behavior '" + std::string(s) + "'");
}

struct Road {
  std::vector<Point2> points;
  double width_m = 5.0;
};

struct Building {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  [[nodiscard]] bool contains(const Point2& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

/// A waypoint pair (i, g).
struct Site {
  std::string name;
  Point2 i;
  Point2 g;
};

struct ScenarioSpec {
  std::uint64_t seed = 0;
  GridGeometry geometry{200, 120, 0.5, 0.0, 0.0};
  std::vector<Road> roads;
  std::vector<Building> buildings;
  std::vector<Zod> zods;
  /// Evaluation waypoint pairs.
  std::vector<Site> sites;
  /// Waypoint pairs for oracle training demonstrations.
  std::vector<Site> training_pairs;
  Behavior behavior = Behavior::edge_of_road;
  double label_noise = 0.0;
  /// Trials per site: 4 by default; 1 or 2 reproduce the shortened experiments.
  int trials = 4;
};

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * vx, a.y + t * vy});
}

inline double distance_to_polyline(const Point2& p, const std::vector<Point2>& pts) {
  if (pts.size() == 1) {
    return distance(p, pts.front());
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    best = std::min(best, point_segment_distance(p, pts[i - 1], pts[i]));
  }
  return best;
}

inline Cell waypoint_cell(const GridGeometry& g, const Point2& p, std::string_view what) {
  const Cell c = g.cell_of(p);
  if (!g.contains(c)) {
    throw Error(ErrorCode::out_of_bounds, std::string(what) + " lies outside the grid");
  }
  return c;
}

inline void validate_spec(const ScenarioSpec& spec) {
  spec.geometry.validate();
  if (!(spec.label_noise >= 0.0 && spec.label_noise < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "label noise must lie in [0, 1)");
  }
  if (spec.trials < 1 || spec.trials > 4) {
    throw Error(ErrorCode::invalid_argument, "trials must be between 1 and 4");
  }
  for (const auto& r : spec.roads) {
    if (r.points.empty() || !(r.width_m > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "roads need points and a positive width");
    }
  }
  for (const auto& z : spec.zods) {
    if (!(z.radius_m > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "zone radius must be positive");
    }
  }
  const auto check = [&](const Site& s) {
    for (const auto& p : {s.i, s.g}) {
      waypoint_cell(spec.geometry, p, "waypoint of " + s.name);
      for (const auto& b : spec.buildings) {
        if (b.contains(spec.geometry.center_of(spec.geometry.cell_of(p)))) {
          throw Error(ErrorCode::invalid_argument, "waypoint of " + s.name + " lies inside a building");
        }
      }
    }
  };
  std::for_each(spec.sites.begin(), spec.sites.end(), check);
  std::for_each(spec.training_pairs.begin(), spec.training_pairs.end(), check);
}

/// Rasterizes roads, buildings and zones; grass fills the rest. Label noise swaps road and
/// grass labels of non-building cells independently, drawn in row-major order from `seed`.
inline Environment generate_environment(const ScenarioSpec& spec) {
  validate_spec(spec);
  const auto& g = spec.geometry;
  const auto n = g.cell_count();
  std::vector<std::uint8_t> obstacle(n, 0);
  std::vector<std::uint8_t> road(n, 0);
  std::vector<std::uint8_t> grass(n, 0);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const Cell c{x, y};
      const auto i = g.index(c);
      const Point2 p = g.center_of(c);
      if (std::any_of(spec.buildings.begin(), spec.buildings.end(), [&](const Building& b) { return b.contains(p); })) {
        obstacle[i] = 1;
        continue;
      }
      const bool on_road = std::any_of(spec.roads.begin(), spec.roads.end(), [&](const Road& r) {
        return distance_to_polyline(p, r.points) <= 0.5 * r.width_m;
      });
      (on_road ? road : grass)[i] = 1;
    }
  }
  if (spec.label_noise > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const bool flip = u(rng) < spec.label_noise;
      if (flip && obstacle[i] == 0) {
        std::swap(road[i], grass[i]);
      }
    }
  }
  std::array<BinaryLayer, 4> layers{BinaryLayer(LayerKind::obstacle, g, obstacle), BinaryLayer(LayerKind::road, g, road),
                                    BinaryLayer(LayerKind::grass, g, grass), rasterize_zods(g, spec.zods)};
  auto opacity = OpacityLayer::from_obstacles(layers[0]);
  return {g, spec.seed, spec.zods, std::move(layers), std::move(opacity)};
}

/// Road cells with a grass cell among their 8 neighbors.
inline std::vector<std::uint8_t> road_edge_mask(const Environment& env) {
  const auto& g = env.geometry();
  const auto& road = env.layer(LayerKind::road);
  const auto& grass = env.layer(LayerKind::grass);
  std::vector<std::uint8_t> out(g.cell_count(), 0);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const Cell c{x, y};
      if (!road.at(c)) {
        continue;
      }
      for (const auto& m : kKingMoves) {
        const Cell nb{x + m.x, y + m.y};
        if (g.contains(nb) && grass.at(nb)) {
          out[g.index(c)] = 1;
          break;
        }
      }
    }
  }
  return out;
}

/// Hand-written cell entry costs for the scripted demonstrators; nullopt marks impassable.
class OracleCost {
 public:
  OracleCost(const Environment& env, Behavior behavior)
      : env_(env), behavior_(behavior), edge_(road_edge_mask(env)) {
    if (behavior_ == Behavior::covert) {
      obstacle_blur_ = blur_layer(env.layer(LayerKind::obstacle), 5);
    }
  }

  [[nodiscard]] std::optional<double> operator()(const Cell& c) const {
    const auto i = env_.geometry().index(c);
    if (env_.layer(LayerKind::obstacle).at(c)) {
      return std::nullopt;
    }
    switch (behavior_) {
      case Behavior::covert:
        return 1.0 + 4.0 * (1.0 - obstacle_blur_[i]);
      case Behavior::zod_avoidance:
        if (env_.layer(LayerKind::avoidance).at(c)) {
          return std::nullopt;
        }
        return terrain_cost(c, i, 3.0);
      case Behavior::edge_of_road:
        return terrain_cost(c, i, 8.0);
    }
    return std::nullopt;
  }

 private:
  [[nodiscard]] double terrain_cost(const Cell& c, std::size_t i, double grass_cost) const {
    if (env_.layer(LayerKind::road).at(c)) {
      return edge_[i] != 0 ? 0.5 : 1.0;
    }
    return grass_cost;
  }

  const Environment& env_;
  Behavior behavior_;
  std::vector<std::uint8_t> edge_;
  std::vector<double> obstacle_blur_;
};

/// Shortest path under the behavior's handcrafted cost.
inline GridPath oracle_path(const Environment& env, Behavior behavior, const Cell& i, const Cell& g) {
  const OracleCost cost(env, behavior);
  return shortest_grid_path(
      env.geometry(), [&](const Cell& c) { return cost(c).has_value(); }, [&](const Cell& c) { return *cost(c); }, i,
      g);
}

inline Demonstration oracle_demonstrate(const Environment& env, Behavior behavior, const Cell& i, const Cell& g,
                                        std::shared_ptr<const FeatureStack> stack, std::string id) {
  auto path = oracle_path(env, behavior, i, g);
  return {std::move(id), std::move(path.cells), std::move(stack), DemoSource::oracle};
}

/// Oracle demonstrations for every training pair of `spec`, sharing one stack.
inline std::vector<Demonstration> oracle_training_set(const ScenarioSpec& spec, const Environment& env,
                                                      const FeatureSchema& schema, std::string_view id_prefix = "demo") {
  auto stack = std::make_shared<const FeatureStack>(env.stack(schema));
  std::vector<Demonstration> demos;
  for (const auto& pair : spec.training_pairs) {
    demos.push_back(oracle_demonstrate(env, spec.behavior, waypoint_cell(env.geometry(), pair.i, pair.name),
                                       waypoint_cell(env.geometry(), pair.g, pair.name), stack,
                                       std::string(id_prefix) + "-" + pair.name));
  }
  return demos;
}

enum class TrialRole { ground_truth, ioc, baseline };

constexpr std::string_view to_string(TrialRole r) {
  switch (r) {
    case TrialRole::ground_truth: return "gt";
    case TrialRole::ioc: return "ioc";
    case TrialRole::baseline: return "baseline";
  }
  return "unknown";
}

struct LegPlan {
  TrialRole role;
  /// true: i -> g, false: g -> i.
  bool forward;
};

struct TrialSpec {
  int index;
  std::array<LegPlan, 3> legs;
};

/// Trial 1: GT (i,g), IOC (g,i), baseline (i,g). Trial 2 continues from g with every
/// direction reversed. Trials 3 and 4 repeat 1 and 2 with baseline run before IOC.
inline std::vector<TrialSpec> trial_plan(int trials = 4) {
  using R = TrialRole;
  const std::vector<TrialSpec> all{
      {1, {{{R::ground_truth, true}, {R::ioc, false}, {R::baseline, true}}}},
      {2, {{{R::ground_truth, false}, {R::ioc, true}, {R::baseline, false}}}},
      {3, {{{R::ground_truth, true}, {R::baseline, false}, {R::ioc, true}}}},
      {4, {{{R::ground_truth, false}, {R::baseline, true}, {R::ioc, false}}}},
  };
  if (trials < 1 || trials > 4) {
    throw Error(ErrorCode::invalid_argument, "trials must be between 1 and 4");
  }
  return {all.begin(), all.begin() + trials};
}

struct LegRecord {
  TrialRole role = TrialRole::ground_truth;
  bool forward = true;
  std::optional<Trajectory> trajectory;
  std::string error;
};

struct TrialRecord {
  int index = 0;
  std::vector<LegRecord> legs;
  std::optional<double> mhd_ioc;
  std::optional<double> mhd_baseline;

  [[nodiscard]] const LegRecord* leg(TrialRole role) const {
    for (const auto& l : legs) {
      if (l.role == role) {
        return &l;
      }
    }
    return nullptr;
  }
};

struct SiteReport {
  std::string site;
  std::vector<TrialRecord> trials;
};

struct TrialReport {
  double resample_step_m = 0.25;
  std::vector<SiteReport> sites;

  [[nodiscard]] std::vector<TrialMetric> metrics() const {
    std::vector<TrialMetric> out;
    for (const auto& s : sites) {
      for (const auto& t : s.trials) {
        if (t.mhd_baseline) out.push_back({s.site, "baseline", t.index, *t.mhd_baseline});
        if (t.mhd_ioc) out.push_back({s.site, "ioc", t.index, *t.mhd_ioc});
      }
    }
    return out;
  }

  [[nodiscard]] double mean_mhd(std::string_view planner) const {
    double sum = 0.0;
    int n = 0;
    for (const auto& m : metrics()) {
      if (m.planner == planner) {
        sum += m.mhd_m;
        ++n;
      }
    }
    if (n == 0) {
      throw Error(ErrorCode::no_trials, "no " + std::string(planner) + " trials in report");
    }
    return sum / n;
  }
};

struct TrialOptions {
  double resample_step_m = 0.25;
  BaselineParams baseline{};
  /// Overrides the spec's trial count when positive.
  int trials = 0;
};

/// Runs the trial protocol at every site: GT from the behavior oracle, IOC from the model's
/// reward map, baseline from the opacity grid. Planners see the full maps. A failed leg is
/// recorded and the remaining legs and trials still run.
inline TrialReport run_trials(const ScenarioSpec& spec, const Environment& env, const BehaviorModel& model,
                              const TrialOptions& options = {}) {
  model.validate();
  const auto stack = env.stack(model.schema);
  const auto reward = reward_map(model, stack);
  const auto& g = env.geometry();
  TrialReport report;
  report.resample_step_m = options.resample_step_m;
  const auto plan = trial_plan(options.trials > 0 ? options.trials : spec.trials);
  for (const auto& site : spec.sites) {
    const Cell ci = waypoint_cell(g, site.i, site.name);
    const Cell cg = waypoint_cell(g, site.g, site.name);
    SiteReport sr{site.name, {}};
    for (const auto& trial : plan) {
      TrialRecord rec{trial.index, {}, std::nullopt, std::nullopt};
      for (const auto& leg : trial.legs) {
        const Cell from = leg.forward ? ci : cg;
        const Cell to = leg.forward ? cg : ci;
        LegRecord lr{leg.role, leg.forward, std::nullopt, {}};
        try {
          Trajectory t;
          switch (leg.role) {
            case TrialRole::ground_truth:
              t = to_trajectory(g, oracle_path(env, spec.behavior, from, to).cells, Provenance::ground_truth);
              break;
            case TrialRole::ioc:
              t = plan_ioc(reward, from, to);
              break;
            case TrialRole::baseline:
              t = plan_baseline(env.opacity(), from, to, options.baseline);
              break;
          }
          lr.trajectory = densify(t, options.resample_step_m);
        } catch (const Error& e) {
          lr.error = e.what();
        }
        rec.legs.push_back(std::move(lr));
      }
      const auto* gt = rec.leg(TrialRole::ground_truth);
      if (gt != nullptr && gt->trajectory) {
        if (const auto* l = rec.leg(TrialRole::ioc); l != nullptr && l->trajectory) {
          rec.mhd_ioc = mhd(*l->trajectory, *gt->trajectory);
        }
        if (const auto* l = rec.leg(TrialRole::baseline); l != nullptr && l->trajectory) {
          rec.mhd_baseline = mhd(*l->trajectory, *gt->trajectory);
        }
      }
      sr.trials.push_back(std::move(rec));
    }
    report.sites.push_back(std::move(sr));
  }
  return report;
}

inline TrialReport run_trials(const ScenarioSpec& spec, const BehaviorModel& model, const TrialOptions& options = {}) {
  return run_trials(spec, generate_environment(spec), model, options);
}

inline std::vector<MhdResult> summarize(std::span<const TrialReport> reports) {
  std::vector<TrialMetric> metrics;
  for (const auto& r : reports) {
    const auto m = r.metrics();
    metrics.insert(metrics.end(), m.begin(), m.end());
  }
  return summarize(std::span<const TrialMetric>(metrics));
}

inline std::string leg_file_name(const std::string& site, int trial, TrialRole role) {
  return site + "_t" + std::to_string(trial) + "_" + std::string(to_string(role)) + ".csv";
}

/// Writes manifest.json, metrics.csv, table.txt and trajectories/<site>_t<k>_<role>.csv.
inline void write_report(const TrialReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "trajectories");
  Json sites = Json::array();
  for (const auto& s : report.sites) {
    Json trials = Json::array();
    for (const auto& t : s.trials) {
      Json legs = Json::array();
      for (const auto& l : t.legs) {
        Json jl{{"role", to_string(l.role)}, {"direction", l.forward ? "i->g" : "g->i"}};
        if (l.trajectory) {
          const auto file = leg_file_name(s.site, t.index, l.role);
          save_trajectory(*l.trajectory, dir / "trajectories" / file);
          jl["file"] = "trajectories/" + file;
        } else {
          jl["error"] = l.error;
        }
        legs.push_back(std::move(jl));
      }
      Json jt{{"trial", t.index}, {"legs", std::move(legs)}};
      if (t.mhd_ioc) jt["mhd_ioc_m"] = *t.mhd_ioc;
      if (t.mhd_baseline) jt["mhd_baseline_m"] = *t.mhd_baseline;
      trials.push_back(std::move(jt));
    }
    sites.push_back({{"site", s.site}, {"trials", std::move(trials)}});
  }
  write_text_file(dir / "manifest.json",
                  dump_json({{"format", "maxent_nav.report/1"}, {"resample_step_m", report.resample_step_m},
                             {"sites", std::move(sites)}}));
  const auto metrics = report.metrics();
  write_text_file(dir / "metrics.csv", metrics_csv(metrics));
  if (!metrics.empty()) {
    write_text_file(dir / "table.txt", format_table(summarize(std::span<const TrialMetric>(metrics))));
  }
}

inline std::vector<TrialMetric> load_report_metrics(const std::filesystem::path& dir) {
  return metrics_from_csv(read_text_file(dir / "metrics.csv"));
}

inline Json point_to_json(const Point2& p) { return Json::array({p.x, p.y}); }

inline Point2 point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::parse_error, "points are [x, y] arrays");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json sites_to_json(const std::vector<Site>& sites) {
  Json arr = Json::array();
  for (const auto& s : sites) {
    arr.push_back({{"name", s.name}, {"i", point_to_json(s.i)}, {"g", point_to_json(s.g)}});
  }
  return arr;
}

inline std::vector<Site> sites_from_json(const Json& j) {
  std::vector<Site> out;
  for (const auto& s : j) {
    out.push_back({s.at("name").get<std::string>(), point_from_json(s.at("i")), point_from_json(s.at("g"))});
  }
  return out;
}

inline Json spec_to_json(const ScenarioSpec& spec) {
  Json roads = Json::array();
  for (const auto& r : spec.roads) {
    Json pts = Json::array();
    for (const auto& p : r.points) {
      pts.push_back(point_to_json(p));
    }
    roads.push_back({{"points", std::move(pts)}, {"width_m", r.width_m}});
  }
  Json buildings = Json::array();
  for (const auto& b : spec.buildings) {
    buildings.push_back({{"min_x_m", b.min_x}, {"min_y_m", b.min_y}, {"max_x_m", b.max_x}, {"max_y_m", b.max_y}});
  }
  return Json{{"format", "maxent_nav.scenario/1"},
              {"seed", spec.seed},
              {"geometry", geometry_to_json(spec.geometry)},
              {"roads", std::move(roads)},
              {"buildings", std::move(buildings)},
              {"zods", zods_to_json(spec.zods)},
              {"sites", sites_to_json(spec.sites)},
              {"training_pairs", sites_to_json(spec.training_pairs)},
              {"behavior", to_string(spec.behavior)},
              {"label_noise", spec.label_noise},
              {"trials", spec.trials}};
}

inline ScenarioSpec spec_from_json(const Json& j) {
  try {
    ScenarioSpec spec;
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.geometry = geometry_from_json(j.at("geometry"));
    for (const auto& r : j.value("roads", Json::array())) {
      Road road;
      for (const auto& p : r.at("points")) {
        road.points.push_back(point_from_json(p));
      }
      road.width_m = r.at("width_m").get<double>();
      spec.roads.push_back(std::move(road));
    }
    for (const auto& b : j.value("buildings", Json::array())) {
      spec.buildings.push_back({b.at("min_x_m").get<double>(), b.at("min_y_m").get<double>(),
                                b.at("max_x_m").get<double>(), b.at("max_y_m").get<double>()});
    }
    spec.zods = zods_from_json(j.value("zods", Json::array()));
    spec.sites = sites_from_json(j.value("sites", Json::array()));
    spec.training_pairs = sites_from_json(j.value("training_pairs", Json::array()));
    spec.behavior = behavior_from_string(j.value("behavior", std::string("edge-of-road")));
    spec.label_noise = j.value("label_noise", 0.0);
    spec.trials = j.value("trials", 4);
    validate_spec(spec);
    return spec;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("scenario: ") + e.what());
  }
}

inline ScenarioSpec load_spec(const std::filesystem::path& path) { return spec_from_json(read_json_file(path)); }

inline void save_spec(const ScenarioSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, dump_json(spec_to_json(spec)));
}

}  // namespace maxent_nav

#endif  // MAXENT_NAV_SCENARIO_HPP
