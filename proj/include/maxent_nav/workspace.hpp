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

#ifndef MAXENT_NAV_WORKSPACE_HPP
#define MAXENT_NAV_WORKSPACE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maxent_nav/environment.hpp"
#include "maxent_nav/irl.hpp"
#include "maxent_nav/model.hpp"
#include "maxent_nav/planners.hpp"

/**
 * \file
 * \brief On-disk workspace: environments, demonstrations, models, trajectories and the
 * training event log, keyed by stable sequential ids.
 */

namespace maxent_nav {

/// A demonstration as captured: the cell path plus the environment snapshot it was recorded
/// against. Feature stacks are rebuilt from the snapshot for whatever schema is trained.
struct StoredDemo {
  std::string id;
  std::string env_id;
  std::shared_ptr<const Environment> environment;
  std::vector<Cell> path;
  DemoSource source = DemoSource::file;

  [[nodiscard]] Demonstration bind(std::shared_ptr<const FeatureStack> stack) const {
    return {id, path, std::move(stack), source};
  }
  [[nodiscard]] Demonstration bind(const FeatureSchema& schema) const {
    return bind(std::make_shared<const FeatureStack>(environment->stack(schema)));
  }
};

inline Json cells_to_json(std::span<const Cell> cells) {
  Json arr = Json::array();
  for (const auto& c : cells) {
    arr.push_back(Json::array({c.x, c.y}));
  }
  return arr;
}

inline std::vector<Cell> cells_from_json(const Json& j) {
  std::vector<Cell> out;
  for (const auto& c : j) {
    if (!c.is_array() || c.size() != 2) {
      throw Error(ErrorCode::parse_error, "cells are [x, y] arrays");
    }
    out.push_back({c[0].get<int>(), c[1].get<int>()});
  }
  return out;
}

inline Json demo_to_json(const StoredDemo& d) {
  return Json{{"format", "maxent_nav.demo/1"},
              {"id", d.id},
              {"env_id", d.env_id},
              {"source", to_string(d.source)},
              {"path", cells_to_json(d.path)},
              {"environment", environment_to_json(*d.environment)}};
}

inline StoredDemo demo_from_json(const Json& j) {
  try {
    if (j.value("format", std::string()) != "maxent_nav.demo/1") {
      throw Error(ErrorCode::parse_error, "not a demonstration file");
    }
    StoredDemo d;
    d.id = j.at("id").get<std::string>();
    d.env_id = j.value("env_id", std::string());
    d.source = demo_source_from_string(j.value("source", std::string("file")));
    d.path = cells_from_json(j.at("path"));
    d.environment = std::make_shared<const Environment>(environment_from_json(j.at("environment")));
    validate_path(d.environment->stack(FeatureSchema::from_radii({})), d.path);
    return d;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("demonstration: ") + e.what());
  }
}

inline void save_demo(const StoredDemo& d, const std::filesystem::path& path) {
  write_text_file(path, dump_json(demo_to_json(d)));
}

inline StoredDemo load_demo(const std::filesystem::path& path) { return demo_from_json(read_json_file(path)); }

/// Snaps a world polyline to grid cells: densify finer than half a cell, map every point to
/// its cell and drop repeats. The result is 8-connected by construction.
inline std::vector<Cell> rasterize_polyline(const GridGeometry& g, std::span<const Point2> points, double step_m = 0.0) {
  if (points.size() < 2) {
    throw Error(ErrorCode::malformed_polyline, "polyline needs at least two points");
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::malformed_polyline, "polyline has non-finite coordinates");
    }
  }
  const double limit = 0.45 * g.resolution;
  const double step = step_m > 0.0 ? std::min(step_m, limit) : limit;
  const auto dense = densify(Trajectory{{points.begin(), points.end()}, {}, Provenance::ground_truth}, step);
  std::vector<Cell> cells;
  for (const auto& p : dense.points) {
    const Cell c = g.cell_of(p);
    if (!g.contains(c)) {
      throw Error(ErrorCode::malformed_polyline, "polyline leaves the grid");
    }
    if (cells.empty() || !(cells.back() == c)) {
      if (!cells.empty() && !are_adjacent(cells.back(), c)) {
        throw Error(ErrorCode::malformed_polyline, "polyline rasterizes to a disconnected path");
      }
      cells.push_back(c);
    }
  }
  if (cells.size() < 2) {
    throw Error(ErrorCode::malformed_polyline, "polyline stays inside one cell");
  }
  return cells;
}

inline Json trajectory_to_json(const Trajectory& t, std::string_view id) {
  Json pts = Json::array();
  for (const auto& p : t.points) {
    pts.push_back(Json::array({p.x, p.y}));
  }
  return Json{{"format", "maxent_nav.trajectory/1"},
              {"id", id},
              {"provenance", to_string(t.provenance)},
              {"points", std::move(pts)},
              {"timestamps", t.timestamps}};
}

inline Trajectory trajectory_from_json(const Json& j) {
  try {
    Trajectory t;
    t.provenance = provenance_from_string(j.value("provenance", std::string("gt")));
    for (const auto& p : j.at("points")) {
      t.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    t.timestamps = j.value("timestamps", std::vector<double>{});
    return t;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("trajectory: ") + e.what());
  }
}

class Workspace {
 public:
  static constexpr const char* kRootVariable = "MAXENT_NAV_WORKSPACE";

  /// `MAXENT_NAV_WORKSPACE` when set, else `fallback`.
  static std::filesystem::path resolve_root(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv(kRootVariable); env != nullptr && *env != '\0') {
      return env;
    }
    return fallback;
  }

  explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {
    for (const char* dir : {"environments", "demos", "models", "trajectories", "reports"}) {
      std::filesystem::create_directories(root_ / dir);
    }
    for (const auto& id : scan("environments", ".json")) {
      environments_[id] = std::make_shared<const Environment>(load_environment(file("environments", id, ".json")));
    }
    for (const auto& id : scan("demos", ".json")) {
      demos_[id] = std::make_shared<const StoredDemo>(load_demo(file("demos", id, ".json")));
    }
    for (const auto& id : scan("models", ".json")) {
      models_[id] = std::make_shared<const BehaviorModel>(load_model(file("models", id, ".json")));
    }
    for (const auto& id : scan("trajectories", ".json")) {
      trajectories_[id] =
          std::make_shared<const Trajectory>(trajectory_from_json(read_json_file(file("trajectories", id, ".json"))));
    }
    if (std::filesystem::exists(events_path())) {
      const auto text = read_text_file(events_path());
      std::size_t pos = 0;
      while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        const auto line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        if (!line.empty()) {
          events_.push_back(line);
        }
        pos = end == std::string::npos ? text.size() : end + 1;
      }
    }
  }

  [[nodiscard]] const std::filesystem::path& root() const { return root_; }

  std::string add_environment(Environment env) {
    std::lock_guard lock(mutex_);
    const auto id = next_id("env", environments_);
    save_environment(env, file("environments", id, ".json"));
    environments_[id] = std::make_shared<const Environment>(std::move(env));
    return id;
  }

  /// Publishes a new snapshot; holders of the previous one keep a consistent copy.
  void update_environment(const std::string& id, Environment env) {
    std::lock_guard lock(mutex_);
    find(environments_, id, "environment");
    save_environment(env, file("environments", id, ".json"));
    environments_[id] = std::make_shared<const Environment>(std::move(env));
  }

  [[nodiscard]] std::shared_ptr<const Environment> environment(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return find(environments_, id, "environment");
  }

  [[nodiscard]] std::vector<std::string> environment_ids() const { return ids(environments_); }

  /// Records `path` against the environment's current snapshot.
  std::string add_demo(const std::string& env_id, std::vector<Cell> path, DemoSource source) {
    std::lock_guard lock(mutex_);
    auto env = find(environments_, env_id, "environment");
    validate_path(env->stack(FeatureSchema::from_radii({})), path);
    const auto id = next_id("demo", demos_);
    auto d = std::make_shared<const StoredDemo>(StoredDemo{id, env_id, std::move(env), std::move(path), source});
    save_demo(*d, file("demos", id, ".json"));
    demos_[id] = std::move(d);
    return id;
  }

  /// Imports a demonstration file under a fresh id.
  std::string import_demo(StoredDemo demo) {
    std::lock_guard lock(mutex_);
    demo.id = next_id("demo", demos_);
    save_demo(demo, file("demos", demo.id, ".json"));
    const auto id = demo.id;
    demos_[id] = std::make_shared<const StoredDemo>(std::move(demo));
    return id;
  }

  [[nodiscard]] std::shared_ptr<const StoredDemo> demo(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return find(demos_, id, "demonstration");
  }

  [[nodiscard]] std::vector<std::string> demo_ids() const { return ids(demos_); }

  /// Models trained on the demonstration keep listing it.
  void remove_demo(const std::string& id) {
    std::lock_guard lock(mutex_);
    find(demos_, id, "demonstration");
    std::filesystem::remove(file("demos", id, ".json"));
    demos_.erase(id);
  }

  std::string add_model(BehaviorModel model) {
    std::lock_guard lock(mutex_);
    model.validate();
    const auto id = next_id("model", models_);
    save_model(model, file("models", id, ".json"));
    models_[id] = std::make_shared<const BehaviorModel>(std::move(model));
    return id;
  }

  /// Claims an id for a model that a job will publish later.
  std::string reserve_model_id() {
    std::lock_guard lock(mutex_);
    const auto id = next_id("model", models_);
    reserved_.push_back(id);
    return id;
  }

  /// Writes the file, then swaps the in-memory pointer: readers see old or new weights, never
  /// a mix.
  void publish_model(const std::string& id, BehaviorModel model) {
    std::lock_guard lock(mutex_);
    model.validate();
    save_model(model, file("models", id, ".json"));
    models_[id] = std::make_shared<const BehaviorModel>(std::move(model));
    std::erase(reserved_, id);
  }

  [[nodiscard]] std::shared_ptr<const BehaviorModel> model(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return find(models_, id, "model");
  }

  [[nodiscard]] bool has_model(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return models_.count(id) != 0;
  }

  [[nodiscard]] std::vector<std::string> model_ids() const { return ids(models_); }

  std::string add_trajectory(Trajectory t) {
    std::lock_guard lock(mutex_);
    const auto id = next_id("traj", trajectories_);
    write_text_file(file("trajectories", id, ".json"), dump_json(trajectory_to_json(t, id)));
    trajectories_[id] = std::make_shared<const Trajectory>(std::move(t));
    return id;
  }

  [[nodiscard]] std::shared_ptr<const Trajectory> trajectory(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return find(trajectories_, id, "trajectory");
  }

  [[nodiscard]] std::vector<std::string> trajectory_ids() const { return ids(trajectories_); }

  [[nodiscard]] std::filesystem::path report_dir(const std::string& name) const { return root_ / "reports" / name; }

  /// Appends one JSON record to events.log and returns its line offset.
  std::size_t append_event(const Json& record) {
    std::lock_guard lock(mutex_);
    auto line = record.dump();
    std::ofstream out(events_path(), std::ios::app | std::ios::binary);
    out << line << '\n';
    if (!out) {
      throw Error(ErrorCode::io_error, "cannot append to " + events_path().string());
    }
    events_.push_back(std::move(line));
    return events_.size() - 1;
  }

  /// Event lines from `offset` on.
  [[nodiscard]] std::vector<std::string> events(std::size_t offset) const {
    std::lock_guard lock(mutex_);
    if (offset >= events_.size()) {
      return {};
    }
    return {events_.begin() + static_cast<std::ptrdiff_t>(offset), events_.end()};
  }

  [[nodiscard]] std::size_t event_count() const {
    std::lock_guard lock(mutex_);
    return events_.size();
  }

 private:
  [[nodiscard]] std::filesystem::path events_path() const { return root_ / "events.log"; }

  [[nodiscard]] std::filesystem::path file(const char* dir, const std::string& id, const char* ext) const {
    return root_ / dir / (id + ext);
  }

  [[nodiscard]] std::vector<std::string> scan(const char* dir, const char* ext) const {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(root_ / dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ext) {
        out.push_back(entry.path().stem().string());
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  template <class Map>
  std::string next_id(const char* prefix, const Map& existing) {
    const std::string p = std::string(prefix) + "-";
    auto& counter = counters_[prefix];
    const auto bump = [&](const std::string& id) {
      if (id.rfind(p, 0) == 0) {
        try {
          counter = std::max(counter, std::stoi(id.substr(p.size())));
        } catch (const std::exception&) {
        }
      }
    };
    for (const auto& [id, _] : existing) {
      bump(id);
    }
    for (const auto& id : reserved_) {
      bump(id);
    }
    ++counter;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d", counter);
    return p + buf;
  }

  template <class Map>
  static typename Map::mapped_type find(const Map& m, const std::string& id, const char* what) {
    const auto it = m.find(id);
    if (it == m.end()) {
      throw Error(ErrorCode::not_found, std::string(what) + " '" + id + "' does not exist");
    }
    return it->second;
  }

  template <class Map>
  std::vector<std::string> ids(const Map& m) const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : m) {
      out.push_back(id);
    }
    return out;
  }

  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Environment>> environments_;
  std::map<std::string, std::shared_ptr<const StoredDemo>> demos_;
  std::map<std::string, std::shared_ptr<const BehaviorModel>> models_;
  std::map<std::string, std::shared_ptr<const Trajectory>> trajectories_;
  std::vector<std::string> reserved_;
  std::map<std::string, int> counters_;
  std::vector<std::string> events_;
};

}  // namespace maxent_nav

#endif  // MAXENT_NAV_WORKSPACE_HPP
