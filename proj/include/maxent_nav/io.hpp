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

#ifndef MAXENT_NAV_IO_HPP
#define MAXENT_NAV_IO_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "maxent_nav/error.hpp"

namespace maxent_nav {

using Json = nlohmann::json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Writes through a temporary sibling and renames, so readers never see a partial file.
inline void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw Error(ErrorCode::io_error, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::io_error, "cannot rename " + tmp.string() + ": " + ec.message());
  }
}

inline Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string(what) + ": " + e.what());
  }
}

inline Json read_json_file(const std::filesystem::path& path) { return parse_json(read_text_file(path), path.string()); }

/// Pretty-printed JSON with sorted keys and a trailing newline; identical values give identical bytes.
inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::parse_error, "bad number '" + std::string(text) + "' in " + std::string(what));
  }
  return v;
}

namespace rle {

/// Row-major run-length text: space-separated "value x count" pairs, e.g. "0x120 1x5".
template <class T>
std::string encode(const std::vector<T>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i + 1;
    while (j < values.size() && values[j] == values[i]) {
      ++j;
    }
    if (!out.empty()) {
      out += ' ';
    }
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(static_cast<double>(values[i]));
    } else {
      out += std::to_string(static_cast<long long>(values[i]));
    }
    out += 'x';
    out += std::to_string(j - i);
    i = j;
  }
  return out;
}

inline std::vector<double> decode_values(std::string_view text, std::size_t expected, std::string_view what) {
  std::vector<double> out;
  out.reserve(expected);
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') {
      ++pos;
    }
    if (pos >= text.size()) {
      break;
    }
    auto end = text.find(' ', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    const auto token = text.substr(pos, end - pos);
    const auto x = token.rfind('x');
    if (x == std::string_view::npos || x == 0 || x + 1 == token.size()) {
      throw Error(ErrorCode::parse_error, "bad run '" + std::string(token) + "' in " + std::string(what));
    }
    const double value = parse_double(token.substr(0, x), what);
    std::size_t count = 0;
    const auto cnt = token.substr(x + 1);
    const auto res = std::from_chars(cnt.data(), cnt.data() + cnt.size(), count);
    if (res.ec != std::errc() || res.ptr != cnt.data() + cnt.size() || count == 0) {
      throw Error(ErrorCode::parse_error, "bad run length '" + std::string(token) + "' in " + std::string(what));
    }
    if (out.size() + count > expected) {
      throw Error(ErrorCode::parse_error, std::string(what) + " has more cells than the geometry");
    }
    out.insert(out.end(), count, value);
    pos = end;
  }
  if (out.size() != expected) {
    throw Error(ErrorCode::parse_error, std::string(what) + " has " + std::to_string(out.size()) + " cells, expected " +
                                            std::to_string(expected));
  }
  return out;
}

inline std::vector<std::uint8_t> decode_binary(std::string_view text, std::size_t expected, std::string_view what) {
  const auto values = decode_values(text, expected, what);
  std::vector<std::uint8_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0 && values[i] != 1.0) {
      throw Error(ErrorCode::parse_error, std::string(what) + " must contain only 0 and 1");
    }
    out[i] = values[i] != 0.0 ? 1 : 0;
  }
  return out;
}

}  // namespace rle
}  // namespace maxent_nav

#endif  // MAXENT_NAV_IO_HPP
