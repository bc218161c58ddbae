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

#include <stop_token>

#include "maxent_nav/irl.hpp"
#include "maxent_nav/planners.hpp"

namespace {

using namespace maxent_nav;

/// A U-shaped road between (1,1) and (14,1) on a grass field; the straight line is grass.
struct Corridor {
  GridGeometry g{16, 10, 0.5};
  std::vector<std::uint8_t> road = std::vector<std::uint8_t>(g.cell_count(), 0);
  std::shared_ptr<const FeatureStack> stack;
  std::vector<Cell> demo_path;

  Corridor() {
    for (int y = 1; y <= 7; ++y) road[g.index({1, y})] = road[g.index({14, y})] = 1;
    for (int x = 1; x <= 14; ++x) road[g.index({x, 7})] = 1;
    std::vector<std::uint8_t> grass(g.cell_count());
    for (std::size_t i = 0; i < grass.size(); ++i) grass[i] = road[i] ? 0 : 1;
    const std::vector<BinaryLayer> layers{BinaryLayer(LayerKind::road, g, road), BinaryLayer(LayerKind::grass, g, grass)};
    stack = std::make_shared<const FeatureStack>(build_stack(layers, schema()));
    for (int y = 1; y < 7; ++y) demo_path.push_back({1, y});
    for (int x = 1; x < 14; ++x) demo_path.push_back({x, 7});
    for (int y = 7; y >= 1; --y) demo_path.push_back({14, y});
  }

  static FeatureSchema schema() {
    return FeatureSchema::from_radii({{LayerKind::road, {2}}, {LayerKind::grass, {2}}});
  }

  [[nodiscard]] std::vector<Demonstration> demos() const {
    std::vector<Cell> reversed(demo_path.rbegin(), demo_path.rend());
    return {Demonstration("forward", demo_path, stack), Demonstration("reverse", reversed, stack)};
  }
};

TEST(Train, ColdStartIsSeededUniform) {
  const Corridor c;
  const auto demos = c.demos();
  TrainBudget budget;
  budget.max_iterations = 0;
  const auto model = train(demos, Corridor::schema(), TrainInit::random(42), budget);
  EXPECT_EQ(model.theta, random_weights(Corridor::schema().dimension(), 42));
  for (const double w : model.theta) {
    EXPECT_GE(w, -5.0);
    EXPECT_LE(w, 5.0);
  }
  EXPECT_EQ(model.meta.stop_reason, StopReason::max_iterations);
  EXPECT_EQ(model.meta.demo_ids, (std::vector<std::string>{"forward", "reverse"}));
  EXPECT_NE(random_weights(5, 1), random_weights(5, 2));
}

TEST(Train, ZeroWallClockKeepsWarmWeights) {
  const Corridor c;
  const auto demos = c.demos();
  BehaviorModel prior;
  prior.schema = Corridor::schema();
  prior.theta = {0.5, -0.5, 0.1, -0.1, -1.0};
  prior.meta.seed = 3;
  TrainBudget budget;
  budget.wall_clock_s = 0.0;
  const auto model = train(demos, prior.schema, TrainInit::warm(prior), budget);
  EXPECT_EQ(model.theta, prior.theta);
  EXPECT_EQ(model.meta.stop_reason, StopReason::time_budget);
  EXPECT_EQ(model.meta.init, InitMode::warm);
  EXPECT_EQ(model.meta.iterations, 0);
}

TEST(Train, CancellationStopsBetweenIterations) {
  const Corridor c;
  const auto demos = c.demos();
  std::stop_source source;
  std::vector<int> seen;
  const auto model = train(demos, Corridor::schema(), TrainInit::random(1), {}, {}, source.get_token(),
                           [&](const TrainProgress& p) {
                             seen.push_back(p.iteration);
                             if (p.iteration == 3) source.request_stop();
                           });
  EXPECT_EQ(model.meta.stop_reason, StopReason::cancelled);
  EXPECT_EQ(model.meta.iterations, 3);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
}

TEST(Train, AcceptedLikelihoodNeverDecreases) {
  const Corridor c;
  const auto demos = c.demos();
  std::vector<TrainProgress> log;
  TrainBudget budget;
  budget.max_iterations = 60;
  const auto model = train(demos, Corridor::schema(), TrainInit::random(9), budget, {}, {},
                           [&](const TrainProgress& p) { log.push_back(p); });
  ASSERT_EQ(log.size(), 60u);
  for (std::size_t i = 1; i < log.size(); ++i) {
    EXPECT_GE(log[i].log_likelihood, log[i - 1].log_likelihood);
    EXPECT_GE(log[i].elapsed_s, log[i - 1].elapsed_s);
  }
  EXPECT_DOUBLE_EQ(model.meta.log_likelihood, log.back().log_likelihood);
}

TEST(Train, RecoversPlantedCorridor) {
  const Corridor c;
  const auto demos = c.demos();
  TrainBudget budget;
  budget.max_iterations = 150;
  const auto model = train(demos, Corridor::schema(), TrainInit::random(4), budget);
  const auto reward = reward_map(model, *c.stack);
  const auto path = plan_ioc_path(reward, {1, 1}, {14, 1});
  int on_road = 0;
  for (const auto& cell : path.cells) on_road += c.road[c.g.index(cell)];
  EXPECT_GE(static_cast<double>(on_road) / static_cast<double>(path.cells.size()), 0.9);
  EXPECT_GT(model.meta.log_likelihood, train(demos, Corridor::schema(), TrainInit::random(4), {0}).meta.log_likelihood);
}

TEST(Train, IsDeterministic) {
  const Corridor c;
  const auto demos = c.demos();
  TrainBudget budget;
  budget.max_iterations = 20;
  const auto a = train(demos, Corridor::schema(), TrainInit::random(5), budget);
  const auto b = train(demos, Corridor::schema(), TrainInit::random(5), budget);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.meta.iterations, b.meta.iterations);
}

TEST(Train, Errors) {
  const Corridor c;
  const auto demos = c.demos();
  const auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  EXPECT_EQ(code([&] { train(std::span<const Demonstration>{}, Corridor::schema(), TrainInit::random(1)); }),
            ErrorCode::no_demonstrations);
  EXPECT_EQ(code([&] { train(demos, FeatureSchema::from_radii({{LayerKind::road, {3}}, {LayerKind::grass, {2}}}),
                             TrainInit::random(1)); }),
            ErrorCode::schema_mismatch);
  BehaviorModel other;
  other.schema = FeatureSchema::standard();
  other.theta.assign(other.schema.dimension(), 0.0);
  EXPECT_EQ(code([&] { train(demos, Corridor::schema(), TrainInit::warm(other)); }), ErrorCode::schema_mismatch);

  // Mixed schemas across demonstrations.
  const std::vector<BinaryLayer> layers{BinaryLayer(LayerKind::road, c.g, c.road)};
  const auto other_stack = std::make_shared<const FeatureStack>(
      build_stack(layers, FeatureSchema::from_radii({{LayerKind::road, {1}}, {LayerKind::grass, {2}}})));
  const std::vector<Demonstration> mixed{demos[0], Demonstration("x", c.demo_path, other_stack)};
  EXPECT_EQ(code([&] { train(mixed, Corridor::schema(), TrainInit::random(1)); }), ErrorCode::schema_mismatch);
}

TEST(Model, JsonRoundTripIsByteIdentical) {
  const Corridor c;
  const auto demos = c.demos();
  TrainBudget budget;
  budget.max_iterations = 5;
  const auto model = train(demos, Corridor::schema(), TrainInit::random(2), budget);
  const auto text = serialize_model(model);
  EXPECT_EQ(serialize_model(model_from_json(parse_json(text, "model"))), text);
  EXPECT_EQ(model_from_json(parse_json(text, "model")).theta, model.theta);
}

}  // namespace
