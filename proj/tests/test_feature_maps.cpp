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

#include "maxent_nav/feature_maps.hpp"
#include "oracles.hpp"

namespace {

using namespace maxent_nav;

BinaryLayer single_source(LayerKind kind = LayerKind::road) {
  const GridGeometry g{5, 5, 0.5};
  std::vector<std::uint8_t> v(25, 0);
  v[g.index({2, 2})] = 1;
  return {kind, g, v};
}

BinaryLayer random_layer(std::mt19937_64& rng, LayerKind kind, int w, int h, double p) {
  const GridGeometry g{w, h, 0.5};
  std::bernoulli_distribution b(p);
  std::vector<std::uint8_t> v(g.cell_count());
  for (auto& x : v) x = b(rng) ? 1 : 0;
  return {kind, g, v};
}

TEST(Blur, EmptyLayerGivesZeros) {
  const auto layer = BinaryLayer::zeros(LayerKind::grass, {8, 8, 0.5});
  for (const double v : blur_layer(layer, 3)) EXPECT_EQ(v, 0.0);
}

TEST(Blur, SingleSourceKernelValues) {
  const auto layer = single_source();
  const auto out = blur_layer(layer, 2);
  const auto& g = layer.geometry();
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      const int m = std::abs(x - 2) + std::abs(y - 2);
      const double expected = m == 0 ? 1.0 : m == 1 ? 2.0 / 3.0 : m == 2 ? 1.0 / 3.0 : 0.0;
      EXPECT_NEAR(out[g.index({x, y})], expected, 1e-15) << x << "," << y;
    }
  }
}

TEST(Blur, SourcesStayOneForEveryRadius) {
  std::mt19937_64 rng(3);
  const auto layer = random_layer(rng, LayerKind::road, 9, 7, 0.2);
  for (int r = 1; r <= 6; ++r) {
    const auto out = blur_layer(layer, r);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (layer.cells()[i]) EXPECT_EQ(out[i], 1.0);
    }
  }
}

TEST(Blur, RejectsRadiusZero) { EXPECT_THROW(blur_layer(single_source(), 0), Error); }

TEST(Blur, MatchesBruteForceScanOnRandomLayers) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto layer = random_layer(rng, LayerKind::grass, 12, 12, trial % 5 == 0 ? 0.0 : 0.03 * (trial % 7 + 1));
    const auto dist = oracle::manhattan_scan(layer);
    for (const int r : {1, 2, 3, 5, 9}) {
      const auto out = blur_layer(layer, r);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double expected = dist[i] < 0 ? 0.0 : std::max(0.0, 1.0 - dist[i] / static_cast<double>(r + 1));
        ASSERT_EQ(out[i], expected) << "trial " << trial << " r " << r << " cell " << i;
      }
    }
  }
}

TEST(Blur, SupportGrowsWithRadius) {
  std::mt19937_64 rng(5);
  const auto layer = random_layer(rng, LayerKind::obstacle, 15, 10, 0.04);
  for (int r1 = 1; r1 < 6; ++r1) {
    const auto a = blur_layer(layer, r1);
    const auto b = blur_layer(layer, r1 + 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] > 0.0) EXPECT_GT(b[i], 0.0);
    }
  }
}

TEST(Blur, TranslationEquivariantInInterior) {
  const GridGeometry g{20, 20, 0.5};
  std::vector<std::uint8_t> a(g.cell_count(), 0);
  std::vector<std::uint8_t> b(g.cell_count(), 0);
  for (const Cell c : {Cell{6, 6}, Cell{8, 9}, Cell{10, 7}}) {
    a[g.index(c)] = 1;
    b[g.index({c.x + 3, c.y + 2})] = 1;
  }
  const auto ba = blur_layer({LayerKind::road, g, a}, 3);
  const auto bb = blur_layer({LayerKind::road, g, b}, 3);
  for (int y = 2; y < 16; ++y) {
    for (int x = 2; x < 15; ++x) {
      EXPECT_EQ(ba[g.index({x, y})], bb[g.index({x + 3, y + 2})]);
    }
  }
}

TEST(Schema, StandardHas21Features) {
  const auto s = FeatureSchema::standard();
  EXPECT_EQ(s.dimension(), 21u);
  EXPECT_TRUE(s.descriptors().back().bias);
  EXPECT_EQ(s.descriptors().front().name(), "obstacle:0");
}

TEST(Schema, BlurRadiiPresets) {
  // Blurred radii per behavior; each kind also contributes its raw plane, plus the bias.
  const auto edge = FeatureSchema::edge_of_road();
  EXPECT_EQ(edge.dimension(), 10u);
  std::vector<std::string> names;
  for (const auto& d : edge.descriptors()) names.push_back(d.name());
  EXPECT_EQ(names, (std::vector<std::string>{"obstacle:0", "road:0", "grass:0", "obstacle:4", "road:3", "road:6",
                                             "grass:3", "grass:6", "grass:9", "bias"}));
  EXPECT_EQ(FeatureSchema::covert().dimension(), 10u);
  EXPECT_EQ(FeatureSchema::zod_avoidance(), FeatureSchema::standard());
  EXPECT_EQ(FeatureSchema::from_name("edge"), edge);
  EXPECT_THROW(FeatureSchema::from_name("fast"), Error);
}

TEST(Schema, RejectsDuplicatesAndMisplacedBias) {
  EXPECT_THROW(FeatureSchema({FeatureDescriptor::raw(LayerKind::road), FeatureDescriptor::raw(LayerKind::road),
                              FeatureDescriptor::bias_term()}),
               Error);
  EXPECT_THROW(FeatureSchema({FeatureDescriptor::bias_term(), FeatureDescriptor::raw(LayerKind::road)}), Error);
}

TEST(Schema, DescriptorNamesRoundTrip) {
  const auto schema = FeatureSchema::standard();
  for (const auto& d : schema.descriptors()) {
    EXPECT_EQ(FeatureDescriptor::parse(d.name()), d);
  }
  EXPECT_THROW(FeatureDescriptor::parse("road"), Error);
  EXPECT_THROW(FeatureDescriptor::parse("mud:2"), Error);
}

TEST(Stack, MissingAvoidanceIsZero) {
  const GridGeometry g{6, 6, 0.5};
  std::mt19937_64 rng(2);
  auto road = random_layer(rng, LayerKind::road, 6, 6, 0.3);
  std::vector<std::uint8_t> grass(g.cell_count());
  for (std::size_t i = 0; i < grass.size(); ++i) grass[i] = road.cells()[i] ? 0 : 1;
  const std::vector<BinaryLayer> layers{BinaryLayer::zeros(LayerKind::obstacle, g), road,
                                        BinaryLayer(LayerKind::grass, g, grass)};
  const auto stack = build_stack(layers, FeatureSchema::standard());
  ASSERT_EQ(stack.dimension(), 21u);
  const auto& desc = stack.schema().descriptors();
  for (std::size_t k = 0; k < desc.size(); ++k) {
    if (!desc[k].bias && desc[k].kind == LayerKind::avoidance) {
      for (const double v : stack.plane(k)) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(Stack, EdgeSchemaHasTenPlanes) {
  const auto stack = build_stack(std::vector<BinaryLayer>{single_source()}, FeatureSchema::edge_of_road());
  EXPECT_EQ(stack.dimension(), 10u);
}

TEST(Stack, GeometryMismatchIsRejected) {
  const std::vector<BinaryLayer> layers{BinaryLayer::zeros(LayerKind::road, {5, 5, 0.5}),
                                        BinaryLayer::zeros(LayerKind::grass, {6, 5, 0.5})};
  try {
    build_stack(layers, FeatureSchema::standard());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::geometry_mismatch);
  }
}

TEST(Stack, PlanesFollowSchemaAndInvariants) {
  std::mt19937_64 rng(9);
  const auto obstacle = random_layer(rng, LayerKind::obstacle, 10, 8, 0.1);
  const auto road = random_layer(rng, LayerKind::road, 10, 8, 0.3);
  const std::vector<BinaryLayer> layers{obstacle, road};
  const auto schema = FeatureSchema::standard();
  const auto stack = build_stack(layers, schema);
  const auto& desc = schema.descriptors();
  for (std::size_t k = 0; k < desc.size(); ++k) {
    const auto plane = stack.plane(k);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      EXPECT_GE(plane[i], 0.0);
      EXPECT_LE(plane[i], 1.0);
    }
    if (desc[k].bias) {
      for (const double v : plane) EXPECT_EQ(v, 1.0);
    } else if (desc[k].kind == LayerKind::road) {
      const auto expected = desc[k].radius == 0 ? std::vector<double>(road.cells().begin(), road.cells().end())
                                                : blur_layer(road, desc[k].radius);
      EXPECT_EQ(std::vector<double>(plane.begin(), plane.end()), expected);
    }
  }
  for (std::size_t i = 0; i < obstacle.cells().size(); ++i) {
    EXPECT_EQ(stack.blocked()[i], obstacle.cells()[i]);
  }
}

TEST(Stack, FeatureVector) {
  const auto layer = single_source();
  const FeatureSchema schema({FeatureDescriptor::raw(LayerKind::road), FeatureDescriptor::blurred(LayerKind::road, 2),
                              FeatureDescriptor::bias_term()});
  const auto stack = build_stack(std::vector<BinaryLayer>{layer}, schema);
  EXPECT_EQ(stack.feature_vector({2, 2}), (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(stack.feature_vector({0, 0}), (std::vector<double>{0.0, 0.0, 1.0}));
  try {
    (void)stack.feature_vector({-1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_bounds);
  }
  EXPECT_THROW(build_stack(std::vector<BinaryLayer>{}, FeatureSchema::standard()), Error);
}

TEST(Layers, TerrainMustBeDisjoint) {
  const GridGeometry g{3, 3, 0.5};
  std::vector<std::uint8_t> a(9, 0);
  a[4] = 1;
  EXPECT_THROW(require_disjoint_terrain({LayerKind::road, g, a}, {LayerKind::grass, g, a}), Error);
  EXPECT_THROW(BinaryLayer(LayerKind::road, g, std::vector<std::uint8_t>(9, 2)), Error);
}

TEST(Layers, OpacityClampsAndMarksUnknown) {
  const GridGeometry g{2, 2, 0.5};
  const OpacityLayer o(g, {-0.5, 0.5, 1.5, 0.2}, {0, 0, 0, 1});
  EXPECT_EQ(o.opacity({0, 0}), 0.0);
  EXPECT_EQ(o.opacity({0, 1}), 1.0);
  EXPECT_TRUE(o.is_unknown({1, 1}));
  EXPECT_EQ(o.opacity({1, 1}), 0.0);
}

}  // namespace
