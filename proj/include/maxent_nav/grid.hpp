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

#ifndef MAXENT_NAV_GRID_HPP
#define MAXENT_NAV_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "maxent_nav/error.hpp"

/**
 * \file
 * \brief Cell coordinates, world points and axis-aligned grid geometry.
 */

namespace maxent_nav {

/// Integer cell coordinates; x is the column, y is the row.
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
  friend constexpr auto operator<=>(const Cell& a, const Cell& b) {
    // Row-major ordering: lower row first, then lower column.
    if (auto c = a.y <=> b.y; c != 0) {
      return c;
    }
    return a.x <=> b.x;
  }
};

/// A point in world coordinates, meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// The 8 king-move offsets, in the fixed order every search in the library expands them.
inline constexpr std::array<Cell, 8> kKingMoves{{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

inline constexpr double kSqrt2 = 1.4142135623730950488;

/// Euclidean length, in cells, of a king move.
constexpr double step_length(const Cell& offset) { return (offset.x != 0 && offset.y != 0) ? kSqrt2 : 1.0; }

constexpr bool are_adjacent(const Cell& a, const Cell& b) {
  const int dx = a.x - b.x;
  const int dy = a.y - b.y;
  return (dx != 0 || dy != 0) && dx >= -1 && dx <= 1 && dy >= -1 && dy <= 1;
}

/// Axis-aligned grid: `width` x `height` square cells of side `resolution` meters, whose
/// (0,0) cell has its lower corner at (`origin_x`, `origin_y`).
struct GridGeometry {
  int width = 0;
  int height = 0;
  double resolution = 0.5;
  double origin_x = 0.0;
  double origin_y = 0.0;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

  void validate() const {
    if (width < 2 || height < 2) {
      throw Error(ErrorCode::invalid_argument,
                  "grid must be at least 2x2, got " + std::to_string(width) + "x" + std::to_string(height));
    }
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
      throw Error(ErrorCode::invalid_argument, "grid resolution must be positive");
    }
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
      throw Error(ErrorCode::invalid_argument, "grid origin must be finite");
    }
  }

  [[nodiscard]] std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  [[nodiscard]] bool contains(const Cell& c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }

  [[nodiscard]] std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x);
  }

  [[nodiscard]] Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width)),
            static_cast<int>(index / static_cast<std::size_t>(width))};
  }

  void require_contains(const Cell& c) const {
    if (!contains(c)) {
      throw Error(ErrorCode::out_of_bounds, "cell (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                                                ") outside " + std::to_string(width) + "x" + std::to_string(height) +
                                                " grid");
    }
  }

  [[nodiscard]] Point2 center_of(const Cell& c) const {
    return {origin_x + (c.x + 0.5) * resolution, origin_y + (c.y + 0.5) * resolution};
  }

  /// Cell containing the world point; may be out of bounds.
  [[nodiscard]] Cell cell_of(const Point2& p) const {
    return {static_cast<int>(std::floor((p.x - origin_x) / resolution)),
            static_cast<int>(std::floor((p.y - origin_y) / resolution))};
  }
};

}  // namespace maxent_nav

#endif  // MAXENT_NAV_GRID_HPP
