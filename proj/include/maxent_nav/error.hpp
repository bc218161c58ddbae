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

#ifndef MAXENT_NAV_ERROR_HPP
#define MAXENT_NAV_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace maxent_nav {

/// Machine-readable failure category carried by every maxent_nav::Error.
enum class ErrorCode {
  invalid_argument,
  geometry_mismatch,
  out_of_bounds,
  dimension_mismatch,
  schema_mismatch,
  impassable,
  unreachable,
  no_demonstrations,
  invalid_demonstration,
  malformed_polyline,
  parse_error,
  io_error,
  not_found,
  busy,
  no_trials,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::geometry_mismatch: return "geometry_mismatch";
    case ErrorCode::out_of_bounds: return "out_of_bounds";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::schema_mismatch: return "schema_mismatch";
    case ErrorCode::impassable: return "impassable";
    case ErrorCode::unreachable: return "unreachable";
    case ErrorCode::no_demonstrations: return "no_demonstrations";
    case ErrorCode::invalid_demonstration: return "invalid_demonstration";
    case ErrorCode::malformed_polyline: return "malformed_polyline";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::busy: return "busy";
    case ErrorCode::no_trials: return "no_trials";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace maxent_nav

#endif  // MAXENT_NAV_ERROR_HPP
