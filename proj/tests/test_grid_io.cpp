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

#include <filesystem>

#include "maxent_nav/grid.hpp"
#include "maxent_nav/io.hpp"

namespace {

using namespace maxent_nav;

TEST(GridGeometry, IndexAndCellRoundTrip) {
  const GridGeometry g{7, 5, 0.5, 10.0, -2.0};
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    EXPECT_EQ(g.index(g.cell_at(i)), i);
  }
  EXPECT_EQ(g.index({3, 2}), 2u * 7u + 3u);
}

TEST(GridGeometry, CenterAndCellOf) {
  const GridGeometry g{4, 4, 0.5, 1.0, 2.0};
  const auto p = g.center_of({2, 1});
  EXPECT_DOUBLE_EQ(p.x, 1.0 + 1.25);
  EXPECT_DOUBLE_EQ(p.y, 2.0 + 0.75);
  EXPECT_EQ(g.cell_of(p), (Cell{2, 1}));
  EXPECT_EQ(g.cell_of({0.99, 2.0}), (Cell{-1, 0}));
  EXPECT_FALSE(g.contains(g.cell_of({0.99, 2.0})));
}

TEST(GridGeometry, ValidateRejectsDegenerateGrids) {
  EXPECT_THROW((GridGeometry{1, 5, 0.5}.validate()), Error);
  EXPECT_THROW((GridGeometry{5, 5, 0.0}.validate()), Error);
  EXPECT_NO_THROW((GridGeometry{2, 2, 0.5}.validate()));
}

TEST(GridGeometry, RequireContainsThrowsOutOfBounds) {
  const GridGeometry g{3, 3, 1.0};
  try {
    g.require_contains({-1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_bounds);
  }
}

TEST(Moves, KingMovesAndStepLengths) {
  EXPECT_EQ(kKingMoves.size(), 8u);
  for (const auto& m : kKingMoves) {
    EXPECT_TRUE(are_adjacent({0, 0}, m));
    EXPECT_DOUBLE_EQ(step_length(m), (m.x != 0 && m.y != 0) ? std::sqrt(2.0) : 1.0);
  }
  EXPECT_FALSE(are_adjacent({0, 0}, {0, 0}));
  EXPECT_FALSE(are_adjacent({0, 0}, {2, 1}));
}

TEST(Rle, RoundTripAndFormat) {
  const std::vector<std::uint8_t> v{0, 0, 0, 1, 1, 0};
  EXPECT_EQ(rle::encode(v), "0x3 1x2 0x1");
  EXPECT_EQ(rle::decode_binary(rle::encode(v), v.size(), "t"), v);
  const std::vector<double> d{0.25, 0.25, 1.0};
  EXPECT_EQ(rle::decode_values(rle::encode(d), 3, "t"), d);
}

TEST(Rle, RejectsWrongLengthAndGarbage) {
  EXPECT_THROW(rle::decode_binary("0x3", 4, "t"), Error);
  EXPECT_THROW(rle::decode_binary("0y3", 3, "t"), Error);
  EXPECT_THROW(rle::decode_binary("2x3", 3, "t"), Error);
}

TEST(Numbers, ShortestRoundTrip) {
  for (const double v : {0.1, 1.0 / 3.0, -5.0, 1e-300, 123456.789}) {
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
  EXPECT_THROW(parse_double("1.5abc", "v"), Error);
}

TEST(Files, AtomicWriteAndRead) {
  const auto dir = std::filesystem::temp_directory_path() / "maxent_nav_grid_io";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "a.txt", "hello\n");
  EXPECT_EQ(read_text_file(dir / "a.txt"), "hello\n");
  write_text_file(dir / "a.txt", "bye\n");
  EXPECT_EQ(read_text_file(dir / "a.txt"), "bye\n");
  EXPECT_THROW(read_text_file(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Files, JsonParseErrorsAreTyped) {
  try {
    parse_json("{nope", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
  }
}

}  // namespace
