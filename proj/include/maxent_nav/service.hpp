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

#ifndef MAXENT_NAV_SERVICE_HPP
#define MAXENT_NAV_SERVICE_HPP

#include <httplib.h>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maxent_nav/evaluation.hpp"
#include "maxent_nav/jobs.hpp"
#include "maxent_nav/planners.hpp"
#include "maxent_nav/scenario.hpp"
#include "maxent_nav/workspace.hpp"

/**
 * \file
 * \brief JSON-over-HTTP front end for a workspace. Routes live under /api; errors are
 * {"error": {"code", "message"}} with the status from http_status().
 */

namespace maxent_nav {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::busy: return 409;
    case ErrorCode::schema_mismatch:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::malformed_polyline:
    case ErrorCode::invalid_demonstration:
    case ErrorCode::impassable:
    case ErrorCode::unreachable:
    case ErrorCode::no_demonstrations:
      return 422;
    case ErrorCode::io_error: return 500;
    default: return 400;
  }
}

/// Row-major matrix with its geometry: {"geometry", "rows", "cols", "order", "values"}.
template <class T>
Json matrix_json(const GridGeometry& g, std::string_view name, std::span<const T> values) {
  return Json{{"layer", name},
              {"geometry", geometry_to_json(g)},
              {"rows", g.height},
              {"cols", g.width},
              {"order", "row-major"},
              {"values", std::vector<T>(values.begin(), values.end())}};
}

inline Json points_to_json(std::span<const Point2> pts) {
  Json arr = Json::array();
  for (const auto& p : pts) {
    arr.push_back(Json::array({p.x, p.y}));
  }
  return arr;
}

inline std::vector<Point2> points_from_json(const Json& j) {
  if (!j.is_array()) {
    throw Error(ErrorCode::malformed_polyline, "polyline must be an array of [x, y] points");
  }
  std::vector<Point2> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::malformed_polyline, "polyline points must be [x, y] numbers");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

class Service {
 public:
  explicit Service(std::filesystem::path root) : workspace_(std::move(root)), jobs_(workspace_) { routes(); }

  ~Service() { stop(); }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  [[nodiscard]] Workspace& workspace() { return workspace_; }
  [[nodiscard]] JobManager& jobs() { return jobs_; }
  [[nodiscard]] httplib::Server& server() { return server_; }

  /// Binds to a free port and returns it; call listen_after_bind() to serve.
  int bind_any_port(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  void stop() {
    if (server_.is_running()) {
      server_.stop();
    }
  }

 private:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static void reply(httplib::Response& res, const Json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static Json body_json(const httplib::Request& req) {
    auto j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::parse_error, "request body is not valid JSON");
    }
    return j;
  }

  static Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        reply(res, {{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}}, http_status(e.code()));
      } catch (const Json::exception& e) {
        reply(res, {{"error", {{"code", "parse_error"}, {"message", e.what()}}}}, 400);
      } catch (const std::exception& e) {
        reply(res, {{"error", {{"code", "internal"}, {"message", e.what()}}}}, 500);
      }
    };
  }

  void get(const std::string& pattern, Handler h) { server_.Get(pattern, guarded(std::move(h))); }
  void post(const std::string& pattern, Handler h) { server_.Post(pattern, guarded(std::move(h))); }
  void put(const std::string& pattern, Handler h) { server_.Put(pattern, guarded(std::move(h))); }
  void del(const std::string& pattern, Handler h) { server_.Delete(pattern, guarded(std::move(h))); }

  static Json env_summary(const std::string& id, const Environment& env) {
    return {{"id", id}, {"geometry", geometry_to_json(env.geometry())}, {"zods", zods_to_json(env.zods())}};
  }

  static Json model_summary(const std::string& id, const BehaviorModel& m) {
    return {{"id", id},
            {"schema", schema_to_json(m.schema)},
            {"demo_ids", m.meta.demo_ids},
            {"init", to_string(m.meta.init)},
            {"stop_reason", to_string(m.meta.stop_reason)},
            {"iterations", m.meta.iterations}};
  }

  std::string add_demo_trajectory(const Environment& env, const std::vector<Cell>& cells) {
    return workspace_.add_trajectory(to_trajectory(env.geometry(), cells, Provenance::ground_truth));
  }

  void routes() {
    get("/api/health", [](const httplib::Request&, httplib::Response& res) { reply(res, {{"status", "ok"}}); });

    // Environments and layers.
    get("/api/environments", [this](const httplib::Request&, httplib::Response& res) {
      Json arr = Json::array();
      for (const auto& id : workspace_.environment_ids()) {
        arr.push_back(env_summary(id, *workspace_.environment(id)));
      }
      reply(res, {{"environments", std::move(arr)}});
    });
    post("/api/environments", [this](const httplib::Request& req, httplib::Response& res) {
      const auto j = body_json(req);
      const auto format = j.value("format", std::string());
      Environment env = format == "maxent_nav.environment/1" ? environment_from_json(j)
                                                              : generate_environment(spec_from_json(j));
      const auto id = workspace_.add_environment(std::move(env));
      reply(res, env_summary(id, *workspace_.environment(id)), 201);
    });
    get(R"(/api/environments/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      reply(res, environment_to_json(*workspace_.environment(req.matches[1])));
    });
    get(R"(/api/environments/([^/]+)/layers/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto env = workspace_.environment(req.matches[1]);
      const std::string name = req.matches[2];
      const auto& g = env->geometry();
      if (name == "opacity") {
        reply(res, matrix_json(g, name, env->opacity().values()));
        return;
      }
      const auto d = name.find(':') == std::string::npos ? FeatureDescriptor::raw(layer_kind_from_string(name))
                                                           : FeatureDescriptor::parse(name);
      if (d.bias) {
        throw Error(ErrorCode::invalid_argument, "the bias plane is not a layer");
      }
      const auto& layer = env->layer(d.kind);
      if (d.radius == 0) {
        std::vector<int> v(layer.cells().begin(), layer.cells().end());
        reply(res, matrix_json(g, name, std::span<const int>(v)));
      } else {
        const auto v = blur_layer(layer, d.radius);
        reply(res, matrix_json(g, name, std::span<const double>(v)));
      }
    });
    get(R"(/api/environments/([^/]+)/reward)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto env = workspace_.environment(req.matches[1]);
      if (!req.has_param("model")) {
        throw Error(ErrorCode::invalid_argument, "query parameter 'model' is required");
      }
      const auto model = workspace_.model(req.get_param_value("model"));
      const auto reward = reward_map(*model, env->stack(model->schema));
      Json values = Json::array();
      for (std::size_t i = 0; i < reward.values.size(); ++i) {
        values.push_back(reward.blocked[i] != 0 ? Json(nullptr) : Json(reward.values[i]));
      }
      auto out = matrix_json(env->geometry(), "reward", std::span<const double>());
      out["values"] = std::move(values);
      out["model_id"] = req.get_param_value("model");
      reply(res, out);
    });
    put(R"(/api/environments/([^/]+)/zods)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const auto j = body_json(req);
      const auto env = workspace_.environment(id);
      workspace_.update_environment(id, env->with_zods(zods_from_json(j.at("zods"))));
      reply(res, env_summary(id, *workspace_.environment(id)));
    });
    post(R"(/api/environments/([^/]+)/zods)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const auto added = zods_from_json(Json::array({body_json(req)}));
      const auto env = workspace_.environment(id);
      auto zods = env->zods();
      zods.insert(zods.end(), added.begin(), added.end());
      workspace_.update_environment(id, env->with_zods(std::move(zods)));
      reply(res, env_summary(id, *workspace_.environment(id)), 201);
    });

    // Demonstrations.
    post(R"(/api/environments/([^/]+)/demos)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string env_id = req.matches[1];
      const auto j = body_json(req);
      if (!j.contains("polyline")) {
        throw Error(ErrorCode::malformed_polyline, "body needs a 'polyline'");
      }
      const auto env = workspace_.environment(env_id);
      const auto pts = points_from_json(j["polyline"]);
      auto cells = rasterize_polyline(env->geometry(), pts, j.value("step_m", 0.0));
      const auto source = demo_source_from_string(j.value("source", std::string("human-ui")));
      const auto id = workspace_.add_demo(env_id, cells, source);
      const auto traj = add_demo_trajectory(*env, cells);
      reply(res, {{"id", id}, {"env_id", env_id}, {"cells", cells_to_json(cells)}, {"trajectory_id", traj}}, 201);
    });
    get("/api/demos", [this](const httplib::Request&, httplib::Response& res) {
      Json arr = Json::array();
      for (const auto& id : workspace_.demo_ids()) {
        const auto d = workspace_.demo(id);
        arr.push_back({{"id", id}, {"env_id", d->env_id}, {"source", to_string(d->source)}, {"length", d->path.size()}});
      }
      reply(res, {{"demos", std::move(arr)}});
    });
    get(R"(/api/demos/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto d = workspace_.demo(req.matches[1]);
      reply(res, {{"id", d->id}, {"env_id", d->env_id}, {"source", to_string(d->source)}, {"path", cells_to_json(d->path)}});
    });
    del(R"(/api/demos/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      workspace_.remove_demo(req.matches[1]);
      reply(res, {{"deleted", std::string(req.matches[1])}});
    });

    // Models and training jobs.
    get("/api/models", [this](const httplib::Request&, httplib::Response& res) {
      Json arr = Json::array();
      for (const auto& id : workspace_.model_ids()) {
        arr.push_back(model_summary(id, *workspace_.model(id)));
      }
      reply(res, {{"models", std::move(arr)}});
    });
    get(R"(/api/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto j = model_to_json(*workspace_.model(req.matches[1]));
      j["id"] = std::string(req.matches[1]);
      reply(res, j);
    });
    post("/api/models", [this](const httplib::Request& req, httplib::Response& res) {
      const auto id = workspace_.add_model(model_from_json(body_json(req)));
      reply(res, model_summary(id, *workspace_.model(id)), 201);
    });
    post("/api/jobs", [this](const httplib::Request& req, httplib::Response& res) {
      const auto j = body_json(req);
      JobRequest r;
      r.model_id = j.value("model_id", std::string());
      r.schema = j.value("schema", std::string("standard"));
      r.demo_ids = j.value("demo_ids", std::vector<std::string>{});
      if (j.contains("init")) {
        r.init = j["init"].get<std::string>() == "random" ? InitMode::random : InitMode::warm;
      }
      r.seed = j.value("seed", std::uint64_t{0});
      r.budget_s = j.value("budget_s", 30.0);
      r.max_iterations = j.value("max_iterations", 500);
      r.gradient_tolerance = j.value("gradient_tolerance", 1e-4);
      reply(res, job_to_json(jobs_.submit(r)), 202);
    });
    get("/api/jobs", [this](const httplib::Request&, httplib::Response& res) {
      Json arr = Json::array();
      for (const auto& s : jobs_.list()) {
        arr.push_back(job_to_json(s));
      }
      reply(res, {{"jobs", std::move(arr)}});
    });
    get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) { reply(res, job_to_json(jobs_.status(req.matches[1]))); });
    post(R"(/api/jobs/([^/]+)/cancel)", [this](const httplib::Request& req, httplib::Response& res) {
      reply(res, job_to_json(jobs_.cancel(req.matches[1])));
    });

    // Line-delimited event records from ?offset=N, optionally filtered by ?job=ID.
    get("/api/events", [this](const httplib::Request& req, httplib::Response& res) {
      std::size_t offset = 0;
      if (req.has_param("offset")) {
        offset = static_cast<std::size_t>(parse_double(req.get_param_value("offset"), "offset"));
      }
      const std::string job = req.has_param("job") ? req.get_param_value("job") : std::string();
      const auto lines = workspace_.events(offset);
      std::string body;
      for (const auto& line : lines) {
        if (!job.empty() && Json::parse(line).value("job", std::string()) != job) {
          continue;
        }
        body += line;
        body += '\n';
      }
      res.set_header("X-Next-Offset", std::to_string(offset + lines.size()));
      res.set_content(body, "application/x-ndjson");
    });

    // Planning and trajectories.
    post("/api/plans", [this](const httplib::Request& req, httplib::Response& res) {
      const auto j = body_json(req);
      const auto env = workspace_.environment(j.at("env_id").get<std::string>());
      const auto planner = j.value("planner", std::string("ioc"));
      const auto& g = env->geometry();
      const Cell from = waypoint_cell(g, point_from_json(j.at("from")), "from");
      const Cell to = waypoint_cell(g, point_from_json(j.at("to")), "to");
      GridPath path;
      Provenance provenance = Provenance::ioc;
      if (planner == "ioc") {
        if (!j.contains("model_id")) {
          throw Error(ErrorCode::invalid_argument, "ioc plans need a 'model_id'");
        }
        const auto model = workspace_.model(j["model_id"].get<std::string>());
        // An explicit schema for the stack is checked against the model's.
        const auto schema = j.contains("schema") ? FeatureSchema::from_name(j["schema"].get<std::string>()) : model->schema;
        path = plan_ioc_path(reward_map(*model, env->stack(schema)), from, to);
      } else if (planner == "baseline") {
        path = plan_baseline_path(env->opacity(), from, to);
        provenance = Provenance::baseline;
      } else {
        throw Error(ErrorCode::invalid_argument, "planner must be 'ioc' or 'baseline'");
      }
      auto traj = to_trajectory(g, path.cells, provenance);
      Json out{{"planner", planner},
               {"cells", cells_to_json(path.cells)},
               {"points", points_to_json(traj.points)},
               {"cost", path.cost}};
      out["trajectory_id"] = workspace_.add_trajectory(std::move(traj));
      reply(res, out, 201);
    });
    get("/api/trajectories", [this](const httplib::Request&, httplib::Response& res) { reply(res, {{"trajectories", workspace_.trajectory_ids()}}); });
    get(R"(/api/trajectories/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      reply(res, trajectory_to_json(*workspace_.trajectory(req.matches[1]), std::string(req.matches[1])));
    });
    // Directed MHD from a to b after resampling both at ?step (default 0.25 m).
    get("/api/mhd", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("a") || !req.has_param("b")) {
        throw Error(ErrorCode::invalid_argument, "query parameters 'a' and 'b' are required");
      }
      const double step = req.has_param("step") ? parse_double(req.get_param_value("step"), "step") : 0.25;
      const auto a = densify(*workspace_.trajectory(req.get_param_value("a")), step);
      const auto b = densify(*workspace_.trajectory(req.get_param_value("b")), step);
      reply(res, {{"a", req.get_param_value("a")},
                  {"b", req.get_param_value("b")},
                  {"resample_step_m", step},
                  {"mhd_m", mhd(a, b)},
                  {"reverse_mhd_m", mhd(b, a)},
                  {"symmetric_mhd_m", mhd_symmetric(a, b)}});
    });
  }

  Workspace workspace_;
  JobManager jobs_;
  httplib::Server server_;
};

}  // namespace maxent_nav

#endif  // MAXENT_NAV_SERVICE_HPP
