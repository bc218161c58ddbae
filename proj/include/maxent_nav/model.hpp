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

#ifndef MAXENT_NAV_MODEL_HPP
#define MAXENT_NAV_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "maxent_nav/feature_maps.hpp"
#include "maxent_nav/io.hpp"

namespace maxent_nav {

enum class InitMode { random, warm };
enum class StopReason { converged, max_iterations, time_budget, cancelled };

constexpr std::string_view to_string(InitMode m) { return m == InitMode::random ? "random" : "warm"; }

constexpr std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::time_budget: return "time_budget";
    case StopReason::cancelled: return "cancelled";
  }
  return "unknown";
}

inline StopReason stop_reason_from_string(std::string_view s) {
  for (const auto r : {StopReason::converged, StopReason::max_iterations, StopReason::time_budget,
                       StopReason::cancelled}) {
    if (to_string(r) == s) {
      return r;
    }
  }
  throw Error(ErrorCode::parse_error, "unknown stop reason '" + std::string(s) + "'");
}

struct TrainingMeta {
  std::vector<std::string> demo_ids;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  double log_likelihood = 0.0;
  /// Not serialized: model files must be reproducible byte for byte.
  double wall_clock_s = 0.0;
  InitMode init = InitMode::random;
  std::uint64_t seed = 0;
  StopReason stop_reason = StopReason::max_iterations;
};

/// Linear reward weights over a feature schema: R(s) = theta . phi(s).
struct BehaviorModel {
  std::vector<double> theta;
  FeatureSchema schema;
  TrainingMeta meta;

  void validate() const {
    if (theta.size() != schema.dimension()) {
      throw Error(ErrorCode::dimension_mismatch, "model has " + std::to_string(theta.size()) +
                                                     " weights for a schema of dimension " +
                                                     std::to_string(schema.dimension()));
    }
    for (const double w : theta) {
      if (!std::isfinite(w)) {
        throw Error(ErrorCode::invalid_argument, "model weights must be finite");
      }
    }
  }
};

inline Json schema_to_json(const FeatureSchema& schema) {
  Json arr = Json::array();
  for (const auto& d : schema.descriptors()) {
    arr.push_back(d.name());
  }
  return arr;
}

inline FeatureSchema schema_from_json(const Json& j) {
  std::vector<FeatureDescriptor> d;
  for (const auto& item : j) {
    d.push_back(FeatureDescriptor::parse(item.get<std::string>()));
  }
  return FeatureSchema(std::move(d));
}

inline Json model_to_json(const BehaviorModel& model) {
  model.validate();
  const auto& m = model.meta;
  return Json{{"format", "maxent_nav.model/1"},
              {"schema", schema_to_json(model.schema)},
              {"theta", model.theta},
              {"training",
               {{"demo_ids", m.demo_ids},
                {"iterations", m.iterations},
                {"final_gradient_norm", m.final_gradient_norm},
                {"log_likelihood", m.log_likelihood},
                {"init", to_string(m.init)},
                {"seed", m.seed},
                {"stop_reason", to_string(m.stop_reason)}}}};
}

inline BehaviorModel model_from_json(const Json& j) {
  try {
    BehaviorModel model;
    model.schema = schema_from_json(j.at("schema"));
    model.theta = j.at("theta").get<std::vector<double>>();
    if (j.contains("training")) {
      const auto& t = j.at("training");
      model.meta.demo_ids = t.value("demo_ids", std::vector<std::string>{});
      model.meta.iterations = t.value("iterations", 0);
      model.meta.final_gradient_norm = t.value("final_gradient_norm", 0.0);
      model.meta.log_likelihood = t.value("log_likelihood", 0.0);
      model.meta.init = t.value("init", std::string("random")) == "warm" ? InitMode::warm : InitMode::random;
      model.meta.seed = t.value("seed", std::uint64_t{0});
      model.meta.stop_reason = stop_reason_from_string(t.value("stop_reason", std::string("max_iterations")));
    }
    model.validate();
    return model;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("model: ") + e.what());
  }
}

inline std::string serialize_model(const BehaviorModel& model) { return dump_json(model_to_json(model)); }

inline void save_model(const BehaviorModel& model, const std::filesystem::path& path) {
  write_text_file(path, serialize_model(model));
}

inline BehaviorModel load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

}  // namespace maxent_nav

#endif  // MAXENT_NAV_MODEL_HPP
