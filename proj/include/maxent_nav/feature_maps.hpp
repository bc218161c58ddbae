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

#ifndef MAXENT_NAV_FEATURE_MAPS_HPP
#define MAXENT_NAV_FEATURE_MAPS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maxent_nav/error.hpp"
#include "maxent_nav/grid.hpp"

/**
 * \file
 * \brief Binary occupancy layers, Manhattan-blurred feature planes and feature stacks.
 *
 * A FeatureStack holds one plane per FeatureSchema descriptor. Raw planes copy a
 * BinaryLayer; blurred planes encode proximity to the layer's positive cells with the
 * triangular kernel max(0, 1 - m / (r + 1)), m being the Manhattan cell distance to the
 * nearest positive cell. The last plane is always the bias (identically 1).
 */

namespace maxent_nav {

enum class LayerKind : std::uint8_t { obstacle, road, grass, avoidance };

inline constexpr std::array<LayerKind, 4> kLayerKinds{LayerKind::obstacle, LayerKind::road, LayerKind::grass,
                                                      LayerKind::avoidance};

constexpr std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::obstacle: return "obstacle";
    case LayerKind::road: return "road";
    case LayerKind::grass: return "grass";
    case LayerKind::avoidance: return "avoidance";
  }
  return "unknown";
}

inline LayerKind layer_kind_from_string(std::string_view name) {
  for (const auto kind : kLayerKinds) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw Error(ErrorCode::parse_error, "unknown layer kind '" + std::string(name) + "'");
}

/// A width x height field of {0,1} values describing presence of one feature.
class BinaryLayer {
 public:
  BinaryLayer(LayerKind kind, GridGeometry geometry, std::vector<std::uint8_t> cells)
      : kind_(kind), geometry_(geometry), cells_(std::move(cells)) {
    geometry_.validate();
    if (cells_.size() != geometry_.cell_count()) {
      throw Error(ErrorCode::dimension_mismatch, "layer has " + std::to_string(cells_.size()) + " cells, geometry needs " +
                                                     std::to_string(geometry_.cell_count()));
    }
    if (std::any_of(cells_.begin(), cells_.end(), [](std::uint8_t v) { return v > 1; })) {
      throw Error(ErrorCode::invalid_argument, "binary layer values must be 0 or 1");
    }
  }

  static BinaryLayer zeros(LayerKind kind, const GridGeometry& geometry) {
    return {kind, geometry, std::vector<std::uint8_t>(geometry.cell_count(), 0)};
  }

  [[nodiscard]] LayerKind kind() const { return kind_; }
  [[nodiscard]] const GridGeometry& geometry() const { return geometry_; }
  [[nodiscard]] std::span<const std::uint8_t> cells() const { return cells_; }
  [[nodiscard]] bool at(const Cell& c) const { return cells_[geometry_.index(c)] != 0; }
  [[nodiscard]] bool empty() const {
    return std::none_of(cells_.begin(), cells_.end(), [](std::uint8_t v) { return v != 0; });
  }

  friend bool operator==(const BinaryLayer&, const BinaryLayer&) = default;

 private:
  LayerKind kind_;
  GridGeometry geometry_;
  std::vector<std::uint8_t> cells_;
};

/// Unthresholded obstacle evidence used by the baseline planner.
class OpacityLayer {
 public:
  OpacityLayer(GridGeometry geometry, std::vector<double> values, std::vector<std::uint8_t> unknown = {})
      : geometry_(geometry), values_(std::move(values)), unknown_(std::move(unknown)) {
    geometry_.validate();
    if (unknown_.empty()) {
      unknown_.assign(geometry_.cell_count(), 0);
    }
    if (values_.size() != geometry_.cell_count() || unknown_.size() != geometry_.cell_count()) {
      throw Error(ErrorCode::dimension_mismatch, "opacity layer size does not match geometry");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      double& v = values_[i];
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::invalid_argument, "opacity values must be finite");
      }
      v = std::clamp(v, 0.0, 1.0);
      unknown_[i] = unknown_[i] != 0 ? 1 : 0;
      if (unknown_[i] != 0) {
        v = 0.0;
      }
    }
  }

  static OpacityLayer from_obstacles(const BinaryLayer& obstacle) {
    std::vector<double> values(obstacle.cells().begin(), obstacle.cells().end());
    return {obstacle.geometry(), std::move(values)};
  }

  [[nodiscard]] const GridGeometry& geometry() const { return geometry_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<const std::uint8_t> unknown() const { return unknown_; }
  [[nodiscard]] double opacity(const Cell& c) const { return values_[geometry_.index(c)]; }
  [[nodiscard]] bool is_unknown(const Cell& c) const { return unknown_[geometry_.index(c)] != 0; }

  friend bool operator==(const OpacityLayer&, const OpacityLayer&) = default;

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
  std::vector<std::uint8_t> unknown_;
};

/// One feature plane: a layer kind at a blur radius (0 = raw), or the bias.
struct FeatureDescriptor {
  LayerKind kind = LayerKind::obstacle;
  int radius = 0;
  bool bias = false;

  static FeatureDescriptor raw(LayerKind k) { return {k, 0, false}; }
  static FeatureDescriptor blurred(LayerKind k, int r) { return {k, r, false}; }
  static FeatureDescriptor bias_term() { return {LayerKind::obstacle, 0, true}; }

  friend bool operator==(const FeatureDescriptor& a, const FeatureDescriptor& b) {
    return a.bias == b.bias && (a.bias || (a.kind == b.kind && a.radius == b.radius));
  }

  /// "road:3", "grass:0", or "bias".
  [[nodiscard]] std::string name() const {
    return bias ? std::string("bias") : std::string(to_string(kind)) + ":" + std::to_string(radius);
  }

  static FeatureDescriptor parse(std::string_view text) {
    if (text == "bias") {
      return bias_term();
    }
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::parse_error, "feature descriptor '" + std::string(text) + "' lacks ':radius'");
    }
    const auto kind = layer_kind_from_string(text.substr(0, colon));
    int radius = 0;
    try {
      std::size_t used = 0;
      const std::string digits(text.substr(colon + 1));
      radius = std::stoi(digits, &used);
      if (used != digits.size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, "bad radius in feature descriptor '" + std::string(text) + "'");
    }
    if (radius < 0) {
      throw Error(ErrorCode::parse_error, "negative radius in feature descriptor '" + std::string(text) + "'");
    }
    return {kind, radius, false};
  }
};

/// Ordered feature descriptors fixing the meaning of each weight. The bias is always last.
class FeatureSchema {
 public:
  FeatureSchema() : FeatureSchema(std::vector<FeatureDescriptor>{FeatureDescriptor::bias_term()}) {}

  explicit FeatureSchema(std::vector<FeatureDescriptor> descriptors) : descriptors_(std::move(descriptors)) {
    if (descriptors_.empty() || !descriptors_.back().bias) {
      throw Error(ErrorCode::invalid_argument, "feature schema must end with the bias descriptor");
    }
    for (std::size_t i = 0; i < descriptors_.size(); ++i) {
      if (descriptors_[i].bias && i + 1 != descriptors_.size()) {
        throw Error(ErrorCode::invalid_argument, "bias descriptor must be last");
      }
      if (!descriptors_[i].bias && descriptors_[i].radius < 0) {
        throw Error(ErrorCode::invalid_argument, "blur radius must be non-negative");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (descriptors_[i] == descriptors_[j]) {
          throw Error(ErrorCode::invalid_argument, "duplicate feature descriptor " + descriptors_[i].name());
        }
      }
    }
  }

  /// Raw planes of the listed kinds followed by each kind's blurred radii, then bias.
  static FeatureSchema from_radii(const std::vector<std::pair<LayerKind, std::vector<int>>>& radii) {
    std::vector<FeatureDescriptor> d;
    for (const auto& [kind, _] : radii) {
      d.push_back(FeatureDescriptor::raw(kind));
    }
    for (const auto& [kind, rs] : radii) {
      for (const int r : rs) {
        d.push_back(FeatureDescriptor::blurred(kind, r));
      }
    }
    d.push_back(FeatureDescriptor::bias_term());
    return FeatureSchema(std::move(d));
  }

  /// Raw + radii {1,2,3,4} for obstacle, road, grass and avoidance, + bias (D = 21).
  static FeatureSchema standard() {
    const std::vector<int> r{1, 2, 3, 4};
    return from_radii({{LayerKind::obstacle, r}, {LayerKind::road, r}, {LayerKind::grass, r}, {LayerKind::avoidance, r}});
  }

  /// Edge-of-road behavior set: obstacle {4}, road {3,6}, grass {3,6,9} (D = 10).
  static FeatureSchema edge_of_road() {
    return from_radii({{LayerKind::obstacle, {4}}, {LayerKind::road, {3, 6}}, {LayerKind::grass, {3, 6, 9}}});
  }

  /// Covert behavior set: radii {5,10} on obstacle, road and grass (D = 10).
  static FeatureSchema covert() {
    return from_radii({{LayerKind::obstacle, {5, 10}}, {LayerKind::road, {5, 10}}, {LayerKind::grass, {5, 10}}});
  }

  /// The zone-avoidance behavior shares the standardized set.
  static FeatureSchema zod_avoidance() { return standard(); }

  /// Accepts the CLI names: standard, edge, covert, zod.
  static FeatureSchema from_name(std::string_view name) {
    if (name == "standard") return standard();
    if (name == "edge" || name == "edge-of-road") return edge_of_road();
    if (name == "covert") return covert();
    if (name == "zod" || name == "zod-avoidance") return zod_avoidance();
    throw Error(ErrorCode::invalid_argument, "unknown schema '" + std::string(name) + "'");
  }

  [[nodiscard]] std::size_t dimension() const { return descriptors_.size(); }
  [[nodiscard]] const std::vector<FeatureDescriptor>& descriptors() const { return descriptors_; }
  [[nodiscard]] const FeatureDescriptor& operator[](std::size_t i) const { return descriptors_[i]; }

  [[nodiscard]] std::optional<std::size_t> find(const FeatureDescriptor& d) const {
    for (std::size_t i = 0; i < descriptors_.size(); ++i) {
      if (descriptors_[i] == d) {
        return i;
      }
    }
    return std::nullopt;
  }

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<FeatureDescriptor> descriptors_;
};

inline constexpr int kNoSource = std::numeric_limits<int>::max();

/// Exact multi-source Manhattan distance (in cells) to the nearest nonzero cell, via the
/// two-pass L1 sweep. Cells of a layer with no sources hold kNoSource.
inline std::vector<int> manhattan_distance_transform(const GridGeometry& g, std::span<const std::uint8_t> cells) {
  const int w = g.width;
  const int h = g.height;
  std::vector<int> d(cells.size(), kNoSource);
  const auto relax = [](int& target, int neighbor) {
    if (neighbor != kNoSource && neighbor + 1 < target) {
      target = neighbor + 1;
    }
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int& v = d[static_cast<std::size_t>(y * w + x)];
      if (cells[static_cast<std::size_t>(y * w + x)] != 0) {
        v = 0;
        continue;
      }
      if (x > 0) relax(v, d[static_cast<std::size_t>(y * w + x - 1)]);
      if (y > 0) relax(v, d[static_cast<std::size_t>((y - 1) * w + x)]);
    }
  }
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      int& v = d[static_cast<std::size_t>(y * w + x)];
      if (x + 1 < w) relax(v, d[static_cast<std::size_t>(y * w + x + 1)]);
      if (y + 1 < h) relax(v, d[static_cast<std::size_t>((y + 1) * w + x)]);
    }
  }
  return d;
}

inline double blur_value(int manhattan, int radius) {
  if (manhattan == kNoSource) {
    return 0.0;
  }
  return std::max(0.0, 1.0 - static_cast<double>(manhattan) / static_cast<double>(radius + 1));
}

/// Blurred plane of `layer`: 1 on sources, falling linearly to 0 beyond `radius` cells.
inline std::vector<double> blur_layer(const BinaryLayer& layer, int radius) {
  if (radius < 1) {
    throw Error(ErrorCode::invalid_argument, "blur radius must be >= 1");
  }
  const auto dist = manhattan_distance_transform(layer.geometry(), layer.cells());
  std::vector<double> out(dist.size());
  std::transform(dist.begin(), dist.end(), out.begin(), [radius](int m) { return blur_value(m, radius); });
  return out;
}

/// Per-cell feature vectors phi(s), stored plane by plane in schema order, plus the
/// hard-obstacle mask the planners and the MDP treat as impassable.
class FeatureStack {
 public:
  /// Assembles a stack from precomputed planes; `blocked` may be empty (nothing blocked).
  FeatureStack(FeatureSchema schema, GridGeometry geometry, std::vector<std::vector<double>> planes,
               std::vector<std::uint8_t> blocked = {})
      : schema_(std::move(schema)), geometry_(geometry), planes_(std::move(planes)), blocked_(std::move(blocked)) {
    geometry_.validate();
    const auto n = geometry_.cell_count();
    if (planes_.size() != schema_.dimension()) {
      throw Error(ErrorCode::dimension_mismatch, "stack has " + std::to_string(planes_.size()) +
                                                     " planes, schema expects " + std::to_string(schema_.dimension()));
    }
    for (std::size_t k = 0; k < planes_.size(); ++k) {
      if (planes_[k].size() != n) {
        throw Error(ErrorCode::dimension_mismatch, "plane " + schema_[k].name() + " has wrong size");
      }
      for (const double v : planes_[k]) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw Error(ErrorCode::invalid_argument, "plane " + schema_[k].name() + " has a value outside [0,1]");
        }
      }
    }
    if (std::any_of(planes_.back().begin(), planes_.back().end(), [](double v) { return v != 1.0; })) {
      throw Error(ErrorCode::invalid_argument, "bias plane must be identically 1");
    }
    if (blocked_.empty()) {
      blocked_.assign(n, 0);
    } else if (blocked_.size() != n) {
      throw Error(ErrorCode::dimension_mismatch, "blocked mask size does not match geometry");
    }
  }

  [[nodiscard]] const FeatureSchema& schema() const { return schema_; }
  [[nodiscard]] const GridGeometry& geometry() const { return geometry_; }
  [[nodiscard]] std::size_t dimension() const { return planes_.size(); }
  [[nodiscard]] std::span<const double> plane(std::size_t k) const { return planes_[k]; }
  [[nodiscard]] std::span<const std::uint8_t> blocked() const { return blocked_; }
  [[nodiscard]] bool is_blocked(const Cell& c) const { return blocked_[geometry_.index(c)] != 0; }

  [[nodiscard]] double value(std::size_t k, const Cell& c) const { return planes_[k][geometry_.index(c)]; }

  [[nodiscard]] std::vector<double> feature_vector(const Cell& c) const {
    geometry_.require_contains(c);
    const auto i = geometry_.index(c);
    std::vector<double> phi(planes_.size());
    for (std::size_t k = 0; k < planes_.size(); ++k) {
      phi[k] = planes_[k][i];
    }
    return phi;
  }

 private:
  FeatureSchema schema_;
  GridGeometry geometry_;
  std::vector<std::vector<double>> planes_;
  std::vector<std::uint8_t> blocked_;
};

inline void require_disjoint_terrain(const BinaryLayer& road, const BinaryLayer& grass) {
  const auto r = road.cells();
  const auto g = grass.cells();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] != 0 && g[i] != 0) {
      throw Error(ErrorCode::invalid_argument, "road and grass layers overlap at cell index " + std::to_string(i));
    }
  }
}

/// Builds the stack for `schema` over `layers`. Kinds absent from `layers` read as all-zero;
/// the obstacle layer, when present, supplies the blocked mask.
inline FeatureStack build_stack(std::span<const BinaryLayer> layers, const FeatureSchema& schema) {
  if (layers.empty()) {
    throw Error(ErrorCode::invalid_argument, "build_stack needs at least one layer");
  }
  const GridGeometry geometry = layers.front().geometry();
  std::map<LayerKind, const BinaryLayer*> by_kind;
  for (const auto& layer : layers) {
    if (!(layer.geometry() == geometry)) {
      throw Error(ErrorCode::geometry_mismatch, "layer " + std::string(to_string(layer.kind())) +
                                                    " does not share the stack geometry");
    }
    if (!by_kind.emplace(layer.kind(), &layer).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate layer " + std::string(to_string(layer.kind())));
    }
  }
  if (by_kind.contains(LayerKind::road) && by_kind.contains(LayerKind::grass)) {
    require_disjoint_terrain(*by_kind.at(LayerKind::road), *by_kind.at(LayerKind::grass));
  }

  const auto n = geometry.cell_count();
  std::map<LayerKind, std::vector<int>> distances;
  const auto distance_of = [&](LayerKind kind) -> const std::vector<int>& {
    auto it = distances.find(kind);
    if (it == distances.end()) {
      const auto src = by_kind.find(kind);
      std::vector<int> d = src == by_kind.end() ? std::vector<int>(n, kNoSource)
                                                : manhattan_distance_transform(geometry, src->second->cells());
      it = distances.emplace(kind, std::move(d)).first;
    }
    return it->second;
  };

  std::vector<std::vector<double>> planes;
  planes.reserve(schema.dimension());
  for (const auto& d : schema.descriptors()) {
    if (d.bias) {
      planes.emplace_back(n, 1.0);
      continue;
    }
    const auto src = by_kind.find(d.kind);
    if (d.radius == 0) {
      if (src == by_kind.end()) {
        planes.emplace_back(n, 0.0);
      } else {
        planes.emplace_back(src->second->cells().begin(), src->second->cells().end());
      }
      continue;
    }
    const auto& dist = distance_of(d.kind);
    std::vector<double> plane(n);
    std::transform(dist.begin(), dist.end(), plane.begin(), [r = d.radius](int m) { return blur_value(m, r); });
    planes.push_back(std::move(plane));
  }

  std::vector<std::uint8_t> blocked(n, 0);
  if (const auto obs = by_kind.find(LayerKind::obstacle); obs != by_kind.end()) {
    blocked.assign(obs->second->cells().begin(), obs->second->cells().end());
  }
  return {schema, geometry, std::move(planes), std::move(blocked)};
}

}  // namespace maxent_nav

#endif  // MAXENT_NAV_FEATURE_MAPS_HPP
