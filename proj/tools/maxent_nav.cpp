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

// Command-line front end: environment generation, oracle demonstrations, training, planning,
// trials, metric tables and the HTTP service.

#include <CLI11.hpp>

#include <csignal>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "maxent_nav/maxent_nav.hpp"
#include "maxent_nav/service.hpp"
#include "maxent_nav/workspace.hpp"

namespace {

using namespace maxent_nav;

Point2 parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw Error(ErrorCode::parse_error, "points are written x,y (meters)");
  }
  return {parse_double(text.substr(0, comma), "x"), parse_double(text.substr(comma + 1), "y")};
}

InitMode parse_init(const std::string& text, std::optional<BehaviorModel>& warm_from) {
  if (text == "random") {
    return InitMode::random;
  }
  if (text.rfind("warm:", 0) == 0) {
    warm_from = load_model(text.substr(5));
    return InitMode::warm;
  }
  throw Error(ErrorCode::invalid_argument, "--init takes 'random' or 'warm:<model file>'");
}

struct Options {
  std::string spec, preset, out, spec_out, env, oracle, from, to, schema = "standard", init = "random", model;
  std::string report, workspace = "workspace", host = "127.0.0.1", plan_schema, id;
  std::vector<std::string> demos;
  std::uint64_t seed = 0;
  double budget_s = 0.0;
  int max_iters = 500;
  double tolerance = 1e-4;
  double step = 0.25;
  int trials = 0;
  int port = 8080;
  bool baseline = false;
  bool csv = false;
};

int gen_env(const Options& o) {
  ScenarioSpec spec = o.spec.empty() ? preset_world(o.preset.empty() ? "road" : o.preset, o.seed) : load_spec(o.spec);
  if (!o.spec_out.empty()) {
    save_spec(spec, o.spec_out);
  }
  const auto env = generate_environment(spec);
  save_environment(env, o.out);
  std::cout << "wrote " << o.out << " (" << env.geometry().width << "x" << env.geometry().height << ")\n";
  return 0;
}

int demo(const Options& o) {
  auto env = std::make_shared<const Environment>(load_environment(o.env));
  const auto& g = env->geometry();
  auto path = oracle_path(*env, behavior_from_string(o.oracle), waypoint_cell(g, parse_point(o.from), "--from"),
                          waypoint_cell(g, parse_point(o.to), "--to"));
  StoredDemo d{o.id.empty() ? std::filesystem::path(o.out).stem().string() : o.id, "", env, std::move(path.cells),
               DemoSource::oracle};
  save_demo(d, o.out);
  std::cout << "wrote " << o.out << " (" << d.path.size() << " cells)\n";
  return 0;
}

int train_cmd(const Options& o) {
  std::optional<BehaviorModel> warm_from;
  const InitMode mode = parse_init(o.init, warm_from);
  const FeatureSchema schema = warm_from ? warm_from->schema : FeatureSchema::from_name(o.schema);
  std::vector<Demonstration> demos;
  std::map<const Environment*, std::shared_ptr<const FeatureStack>> stacks;
  std::vector<StoredDemo> stored;
  for (const auto& f : o.demos) {
    stored.push_back(load_demo(f));
  }
  for (const auto& d : stored) {
    auto& stack = stacks[d.environment.get()];
    if (!stack) {
      stack = std::make_shared<const FeatureStack>(d.environment->stack(schema));
    }
    demos.push_back(d.bind(stack));
  }
  if (!o.spec.empty()) {
    const auto spec = load_spec(o.spec);
    const auto more = oracle_training_set(spec, generate_environment(spec), schema);
    demos.insert(demos.end(), more.begin(), more.end());
  }
  TrainBudget budget;
  budget.max_iterations = o.max_iters;
  budget.gradient_tolerance = o.tolerance;
  if (o.budget_s > 0.0) {
    budget.wall_clock_s = o.budget_s;
  }
  const TrainInit init = mode == InitMode::warm ? TrainInit::warm(*warm_from) : TrainInit::random(o.seed);
  auto model = train(demos, schema, init, budget);
  if (warm_from) {
    // Retraining keeps the full list of demonstrations the weights have seen.
    auto ids = warm_from->meta.demo_ids;
    for (const auto& id : model.meta.demo_ids) {
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        ids.push_back(id);
      }
    }
    model.meta.demo_ids = std::move(ids);
  }
  save_model(model, o.out);
  std::cout << "wrote " << o.out << ": " << model.meta.iterations << " iterations, "
            << to_string(model.meta.stop_reason) << ", |grad| " << model.meta.final_gradient_norm << ", "
            << model.meta.wall_clock_s << " s\n";
  return 0;
}

int plan(const Options& o) {
  const auto env = load_environment(o.env);
  const auto& g = env.geometry();
  const Cell from = waypoint_cell(g, parse_point(o.from), "--from");
  const Cell to = waypoint_cell(g, parse_point(o.to), "--to");
  Trajectory t;
  if (o.baseline) {
    t = plan_baseline(env.opacity(), from, to);
  } else {
    if (o.model.empty()) {
      throw Error(ErrorCode::invalid_argument, "--model is required unless --baseline is given");
    }
    const auto model = load_model(o.model);
    const auto schema = o.plan_schema.empty() ? model.schema : FeatureSchema::from_name(o.plan_schema);
    t = plan_ioc(reward_map(model, env.stack(schema)), from, to);
  }
  if (o.out.empty()) {
    std::cout << trajectory_to_csv(t);
  } else {
    save_trajectory(t, o.out);
    std::cout << "wrote " << o.out << " (" << t.points.size() << " points, " << t.length() << " m)\n";
  }
  return 0;
}

int trial(const Options& o) {
  const auto spec = load_spec(o.spec);
  const auto model = load_model(o.model);
  TrialOptions options;
  options.resample_step_m = o.step;
  options.trials = o.trials;
  const auto report = run_trials(spec, model, options);
  write_report(report, o.out);
  for (const auto& s : report.sites) {
    for (const auto& t : s.trials) {
      for (const auto& l : t.legs) {
        if (!l.error.empty()) {
          std::cerr << "warning: " << s.site << " trial " << t.index << " " << to_string(l.role) << ": " << l.error
                    << "\n";
        }
      }
    }
  }
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

int eval(const Options& o) {
  const auto metrics = load_report_metrics(o.report);
  if (o.csv) {
    std::cout << metrics_csv(metrics);
  } else {
    std::cout << format_table(summarize(std::span<const TrialMetric>(metrics)));
  }
  return 0;
}

Service* g_service = nullptr;

int serve(const Options& o) {
  Service service(Workspace::resolve_root(o.workspace));
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service != nullptr) g_service->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service != nullptr) g_service->stop();
  });
  std::cout << "serving " << service.workspace().root().string() << " on " << o.host << ":" << o.port << std::endl;
  if (!service.listen(o.host, o.port)) {
    throw Error(ErrorCode::io_error, "cannot listen on " + o.host + ":" + std::to_string(o.port));
  }
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MaxEnt IRL navigation workbench"};
  app.require_subcommand(1);
  Options o;

  auto* c_gen = app.add_subcommand("gen-env", "Rasterize a scenario spec (or a preset world) into an environment");
  c_gen->add_option("--spec", o.spec, "Scenario spec JSON");
  c_gen->add_option("--preset", o.preset, "Preset world: road, village or zod")->excludes("--spec");
  c_gen->add_option("--seed", o.seed, "Preset seed");
  c_gen->add_option("--spec-out", o.spec_out, "Also write the scenario spec");
  c_gen->add_option("--out", o.out, "Environment file")->required();

  auto* c_demo = app.add_subcommand("demo", "Record a scripted demonstration");
  c_demo->add_option("--env", o.env)->required();
  c_demo->add_option("--oracle", o.oracle, "edge-of-road, covert or zod-avoidance")->required();
  c_demo->add_option("--from", o.from, "Start x,y in meters")->required();
  c_demo->add_option("--to", o.to, "Goal x,y in meters")->required();
  c_demo->add_option("--id", o.id, "Demonstration id (default: output file stem)");
  c_demo->add_option("--out", o.out)->required();

  auto* c_train = app.add_subcommand("train", "Fit reward weights to demonstrations");
  c_train->add_option("--demos", o.demos, "Demonstration files");
  c_train->add_option("--spec", o.spec, "Also demonstrate every training pair of this spec");
  c_train->add_option("--schema", o.schema, "standard, edge, covert or zod");
  c_train->add_option("--init", o.init, "random or warm:<model file>");
  c_train->add_option("--seed", o.seed, "Seed for random initialization");
  c_train->add_option("--budget-s", o.budget_s, "Wall-clock budget in seconds");
  c_train->add_option("--max-iters", o.max_iters);
  c_train->add_option("--tolerance", o.tolerance, "Stop when the max-norm gradient drops below this");
  c_train->add_option("--out", o.out)->required();

  auto* c_plan = app.add_subcommand("plan", "Plan with the learned reward or the baseline");
  c_plan->add_option("--env", o.env)->required();
  c_plan->add_option("--model", o.model);
  c_plan->add_option("--schema", o.plan_schema, "Feature schema for the environment stack (default: model's)");
  c_plan->add_option("--from", o.from)->required();
  c_plan->add_option("--to", o.to)->required();
  c_plan->add_flag("--baseline", o.baseline);
  c_plan->add_option("--out", o.out, "Trajectory CSV (default: stdout)");

  auto* c_trial = app.add_subcommand("trial", "Run the trial protocol at every site of a spec");
  c_trial->add_option("--spec", o.spec)->required();
  c_trial->add_option("--model", o.model)->required();
  c_trial->add_option("--step", o.step, "Resample step in meters");
  c_trial->add_option("--trials", o.trials, "Trials per site (1-4, default from spec)");
  c_trial->add_option("--out", o.out, "Report directory")->required();

  auto* c_eval = app.add_subcommand("eval", "Summarize a trial report");
  c_eval->add_option("--report", o.report)->required();
  c_eval->add_flag("--csv", o.csv, "Per-trial CSV instead of the table");

  auto* c_serve = app.add_subcommand("serve", "Serve a workspace over HTTP");
  c_serve->add_option("--workspace", o.workspace, "Workspace root (MAXENT_NAV_WORKSPACE overrides)");
  c_serve->add_option("--host", o.host);
  c_serve->add_option("--port", o.port);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (*c_gen) return gen_env(o);
    if (*c_demo) return demo(o);
    if (*c_train) return train_cmd(o);
    if (*c_plan) return plan(o);
    if (*c_trial) return trial(o);
    if (*c_eval) return eval(o);
    if (*c_serve) return serve(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
