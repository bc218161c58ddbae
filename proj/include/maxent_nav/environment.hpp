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

#ifndef MAXENT_NAV_ENVIRONMENT_HPP
#define MAXENT_NAV_ENVIRONMENT_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "maxent_nav/feature_maps.hpp"
#include "maxent_nav/io.hpp"

namespace maxent_nav {

/// Zone of danger: a disk of a priori avoidance intel.
struct Zod {
  double center_x_m = 0.0;
  double center_y_m = 0.0;
  double radius_m = 0.0;

  friend bool operator==(const Zod&, const Zod&) = default;
};

/// Cells whose centers lie within any zone's radius.
inline BinaryLayer rasterize_zods(const GridGeometry& g, const std::vector<Zod>& zods) {
  std::vector<std::uint8_t> cells(g.cell_count(), 0);
  for (const auto& z : zods) {
    if (!(z.radius_m > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "zone radius must be positive");
    }
    const Cell lo = g.cell_of({z.center_x_m - z.radius_m, z.center_y_m - z.radius_m});
    const Cell hi = g.cell_of({z.center_x_m + z.radius_m, z.center_y_m + z.radius_m});
    for (int y = std::max(0, lo.y); y <= std::min(g.height - 1, hi.y); ++y) {
      for (int x = std::max(0, lo.x); x <= std::min(g.width - 1, hi.x); ++x) {
        const Point2 c = g.center_of({x, y});
        const double dx = c.x - z.center_x_m;
        const double dy = c.y - z.center_y_m;
        if (dx * dx + dy * dy <= z.radius_m * z.radius_m) {
          cells[g.index({x, y})] = 1;
        }
      }
    }
  }
  return {LayerKind::avoidance, g, std::move(cells)};
}

/// A mapped site: the four raw binary layers, the baseline planner's opacity grid and the
/// zone list the avoidance layer was rasterized from. Derived planes are never stored.
class Environment {
 public:
  Environment(GridGeometry geometry, std::uint64_t seed, std::vector<Zod> zods, std::array<BinaryLayer, 4> layers,
              OpacityLayer opacity)
      : geometry_(geometry), seed_(seed), zods_(std::move(zods)), layers_(std::move(layers)), opacity_(std::move(opacity)) {
    geometry_.validate();
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (layers_[i].kind() != kLayerKinds[i]) {
        throw Error(ErrorCode::invalid_argument, "environment layers must be ordered obstacle, road, grass, avoidance");
      }
      if (!(layers_[i].geometry() == geometry_)) {
        throw Error(ErrorCode::geometry_mismatch, "layer geometry differs from environment geometry");
      }
    }
    if (!(opacity_.geometry() == geometry_)) {
      throw Error(ErrorCode::geometry_mismatch, "opacity geometry differs from environment geometry");
    }
    require_disjoint_terrain(layer(LayerKind::road), layer(LayerKind::grass));
  }

  [[nodiscard]] const GridGeometry& geometry() const { return geometry_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] const std::vector<Zod>& zods() const { return zods_; }
  [[nodiscard]] const std::array<BinaryLayer, 4>& layers() const { return layers_; }
  [[nodiscard]] const BinaryLayer& layer(LayerKind kind) const { return layers_[static_cast<std::size_t>(kind)]; }
  [[nodiscard]] const OpacityLayer& opacity() const { return opacity_; }

  [[nodiscard]] bool is_blocked(const Cell& c) const { return layer(LayerKind::obstacle).at(c); }

  [[nodiscard]] FeatureStack stack(const FeatureSchema& schema) const { return build_stack(layers_, schema); }

  /// Copy with a new zone list and the avoidance layer regenerated from it.
  [[nodiscard]] Environment with_zods(std::vector<Zod> zods) const {
    auto layers = layers_;
    layers[static_cast<std::size_t>(LayerKind::avoidance)] = rasterize_zods(geometry_, zods);
    return {geometry_, seed_, std::move(zods), std::move(layers), opacity_};
  }

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  GridGeometry geometry_;
  std::uint64_t seed_;
  std::vector<Zod> zods_;
  std::array<BinaryLayer, 4> layers_;
  OpacityLayer opacity_;
};

inline Json geometry_to_json(const GridGeometry& g) {
  return Json{{"width", g.width},
              {"height", g.height},
              {"resolution_m", g.resolution},
              {"origin_x_m", g.origin_x},
              {"origin_y_m", g.origin_y}};
}

inline GridGeometry geometry_from_json(const Json& j) {
  try {
    GridGeometry g{j.at("width").get<int>(), j.at("height").get<int>(), j.at("resolution_m").get<double>(),
                   j.value("origin_x_m", 0.0), j.value("origin_y_m", 0.0)};
    g.validate();
    return g;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("geometry: ") + e.what());
  }
}

inline Json zods_to_json(const std::vector<Zod>& zods) {
  Json arr = Json::array();
  for (const auto& z : zods) {
    arr.push_back({{"center_x_m", z.center_x_m}, {"center_y_m", z.center_y_m}, {"radius_m", z.radius_m}});
  }
  return arr;
}

inline std::vector<Zod> zods_from_json(const Json& j) {
  std::vector<Zod> out;
  try {
    for (const auto& z : j) {
      Zod zod{z.at("center_x_m").get<double>(), z.at("center_y_m").get<double>(), z.at("radius_m").get<double>()};
      if (!(zod.radius_m > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "zone radius must be positive");
      }
      out.push_back(zod);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("zods: ") + e.what());
  }
  return out;
}

inline Json environment_to_json(const Environment& env) {
  Json layers = Json::object();
  for (const auto& layer : env.layers()) {
    layers[std::string(to_string(layer.kind()))] =
        rle::encode(std::vector<std::uint8_t>(layer.cells().begin(), layer.cells().end()));
  }
  const auto& op = env.opacity();
  return Json{{"format", "maxent_nav.environment/1"},
              {"geometry", geometry_to_json(env.geometry())},
              {"seed", env.seed()},
              {"zods", zods_to_json(env.zods())},
              {"layers", std::move(layers)},
              {"opacity", rle::encode(std::vector<double>(op.values().begin(), op.values().end()))},
              {"unknown", rle::encode(std::vector<std::uint8_t>(op.unknown().begin(), op.unknown().end()))}};
}

inline Environment environment_from_json(const Json& j) {
  try {
    const auto geometry = geometry_from_json(j.at("geometry"));
    const auto n = geometry.cell_count();
    const auto& jl = j.at("layers");
    const auto layer = [&](LayerKind kind) {
      const std::string name(to_string(kind));
      if (!jl.contains(name)) {
        return BinaryLayer::zeros(kind, geometry);
      }
      return BinaryLayer(kind, geometry, rle::decode_binary(jl.at(name).get<std::string>(), n, name));
    };
    std::array<BinaryLayer, 4> layers{layer(LayerKind::obstacle), layer(LayerKind::road), layer(LayerKind::grass),
                                      layer(LayerKind::avoidance)};
    const auto zods = zods_from_json(j.value("zods", Json::array()));
    auto opacity = j.contains("opacity")
                       ? OpacityLayer(geometry, rle::decode_values(j.at("opacity").get<std::string>(), n, "opacity"),
                                      j.contains("unknown")
                                          ? rle::decode_binary(j.at("unknown").get<std::string>(), n, "unknown")
                                          : std::vector<std::uint8_t>{})
                       : OpacityLayer::from_obstacles(layers[0]);
    return {geometry, j.value("seed", std::uint64_t{0}), zods, std::move(layers), std::move(opacity)};
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("environment: ") + e.what());
  }
}

inline void save_environment(const Environment& env, const std::filesystem::path& path) {
  write_text_file(path, dump_json(environment_to_json(env)));
}

inline Environment load_environment(const std::filesystem::path& path) {
  return environment_from_json(read_json_file(path));
}

}  // namespace maxent_nav

#endif  // MAXENT_NAV_ENVIRONMENT_HPP
