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

#ifndef MAXENT_NAV_IRL_HPP
#define MAXENT_NAV_IRL_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stop_token>
#include <string>
#include <utility>
#include <vector>

#include "maxent_nav/feature_maps.hpp"
#include "maxent_nav/model.hpp"

/**
 * \file
 * \brief Maximum-entropy reward learning over an 8-connected grid MDP.
 *
 * Paths run from a start cell to an absorbing goal within a finite horizon of moves, and
 * P(path) is proportional to exp(sum of theta . phi(s) over the visited cells). The
 * backward pass computes, for every remaining-move budget r, the log-partition V_r(s) over
 * goal-reaching paths; the induced time-indexed policy drives a forward pass whose
 * accumulated visitation D_s yields the expected feature counts. The likelihood gradient is
 * the empirical minus the expected counts.
 */

namespace maxent_nav {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Per-cell scalar reward over an environment.
struct RewardMap {
  GridGeometry geometry;
  std::vector<double> values;
  std::vector<std::uint8_t> blocked;

  [[nodiscard]] double at(const Cell& c) const { return values[geometry.index(c)]; }
  [[nodiscard]] bool is_blocked(const Cell& c) const { return !blocked.empty() && blocked[geometry.index(c)] != 0; }
};

inline RewardMap reward_map(std::span<const double> theta, const FeatureStack& stack) {
  if (theta.size() != stack.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "weights have dimension " + std::to_string(theta.size()) +
                                                   ", feature stack has " + std::to_string(stack.dimension()));
  }
  const auto n = stack.geometry().cell_count();
  std::vector<double> values(n, 0.0);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double w = theta[k];
    if (!std::isfinite(w)) {
      throw Error(ErrorCode::invalid_argument, "weights must be finite");
    }
    if (w == 0.0) {
      continue;
    }
    const auto plane = stack.plane(k);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] += w * plane[i];
    }
  }
  return {stack.geometry(), std::move(values), std::vector<std::uint8_t>(stack.blocked().begin(), stack.blocked().end())};
}

inline RewardMap reward_map(const BehaviorModel& model, const FeatureStack& stack) {
  model.validate();
  if (model.theta.size() == stack.dimension() && !(model.schema == stack.schema())) {
    throw Error(ErrorCode::schema_mismatch, "model and feature stack use different schemas");
  }
  return reward_map(model.theta, stack);
}

enum class DemoSource { oracle, human_ui, file };

constexpr std::string_view to_string(DemoSource s) {
  switch (s) {
    case DemoSource::oracle: return "oracle";
    case DemoSource::human_ui: return "human-ui";
    case DemoSource::file: return "file";
  }
  return "unknown";
}

inline DemoSource demo_source_from_string(std::string_view s) {
  if (s == "oracle") return DemoSource::oracle;
  if (s == "human-ui") return DemoSource::human_ui;
  if (s == "file") return DemoSource::file;
  throw Error(ErrorCode::parse_error, "unknown demonstration source '" + std::string(s) + "'");
}

/// Checks that `path` is a legal path for the MDP: in bounds, 8-adjacent steps, no blocked
/// cells, and the goal (last cell) visited only at the end.
inline void validate_path(const FeatureStack& stack, std::span<const Cell> path, std::size_t min_length = 2) {
  if (path.size() < min_length) {
    throw Error(ErrorCode::invalid_demonstration, "path needs at least " + std::to_string(min_length) + " cells");
  }
  const auto& g = stack.geometry();
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!g.contains(path[i])) {
      throw Error(ErrorCode::invalid_demonstration, "path cell " + std::to_string(i) + " is out of bounds");
    }
    if (stack.is_blocked(path[i])) {
      throw Error(ErrorCode::invalid_demonstration, "path crosses an obstacle at cell " + std::to_string(i));
    }
    if (i > 0 && !are_adjacent(path[i - 1], path[i])) {
      throw Error(ErrorCode::invalid_demonstration,
                  "cells " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not 8-adjacent");
    }
    if (i + 1 < path.size() && path[i] == path.back()) {
      throw Error(ErrorCode::invalid_demonstration, "path reaches its goal before the end");
    }
  }
}

/// A demonstrated path and the feature stack it was driven over.
class Demonstration {
 public:
  Demonstration(std::string id, std::vector<Cell> path, std::shared_ptr<const FeatureStack> stack,
                DemoSource source = DemoSource::file)
      : id_(std::move(id)), path_(std::move(path)), stack_(std::move(stack)), source_(source) {
    if (!stack_) {
      throw Error(ErrorCode::invalid_argument, "demonstration needs a feature stack");
    }
    validate_path(*stack_, path_);
  }

  [[nodiscard]] const std::string& id() const { return id_; }
  [[nodiscard]] const std::vector<Cell>& path() const { return path_; }
  [[nodiscard]] const Cell& start() const { return path_.front(); }
  [[nodiscard]] const Cell& goal() const { return path_.back(); }
  [[nodiscard]] const FeatureStack& stack() const { return *stack_; }
  [[nodiscard]] const std::shared_ptr<const FeatureStack>& shared_stack() const { return stack_; }
  [[nodiscard]] DemoSource source() const { return source_; }

 private:
  std::string id_;
  std::vector<Cell> path_;
  std::shared_ptr<const FeatureStack> stack_;
  DemoSource source_;
};

/// Sum of phi(s) over the visited cells (a path of length L has bias count L).
inline std::vector<double> feature_counts(const FeatureStack& stack, std::span<const Cell> path) {
  std::vector<double> counts(stack.dimension(), 0.0);
  for (const auto& c : path) {
    stack.geometry().require_contains(c);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      counts[k] += stack.value(k, c);
    }
  }
  return counts;
}

inline std::vector<double> feature_counts(const Demonstration& demo) { return feature_counts(demo.stack(), demo.path()); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

/// Sum over the visited cells of theta . phi(s).
inline double path_reward(const Demonstration& demo, std::span<const double> theta) {
  if (theta.size() != demo.stack().dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "weights have dimension " + std::to_string(theta.size()) +
                                                   ", demonstration stack has " +
                                                   std::to_string(demo.stack().dimension()));
  }
  const auto counts = feature_counts(demo);
  return dot(theta, counts);
}

/// Axis-aligned sub-rectangle of a grid.
struct Window {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  static Window full(const GridGeometry& g) { return {0, 0, g.width, g.height}; }

  /// Bounding box of `cells` grown by `margin`, clipped to `g`.
  static Window around(const GridGeometry& g, std::span<const Cell> cells, int margin) {
    int x_lo = g.width;
    int y_lo = g.height;
    int x_hi = -1;
    int y_hi = -1;
    for (const auto& c : cells) {
      x_lo = std::min(x_lo, c.x);
      y_lo = std::min(y_lo, c.y);
      x_hi = std::max(x_hi, c.x);
      y_hi = std::max(y_hi, c.y);
    }
    x_lo = std::max(0, x_lo - margin);
    y_lo = std::max(0, y_lo - margin);
    x_hi = std::min(g.width - 1, x_hi + margin);
    y_hi = std::min(g.height - 1, y_hi + margin);
    return {x_lo, y_lo, x_hi - x_lo + 1, y_hi - y_lo + 1};
  }

  /// Smallest window holding every cell that lies on some path of at most `horizon` king
  /// moves from `a` to `b`.
  static Window reachable(const GridGeometry& g, const Cell& a, const Cell& b, int horizon) {
    const auto lo = [&](int p, int q) {
      const int v = p + q - horizon;
      return std::max(0, v >= 0 ? (v + 1) / 2 : -(-v / 2));
    };
    const auto hi = [&](int p, int q, int limit) { return std::min(limit - 1, (p + q + horizon) / 2); };
    const int x_lo = lo(a.x, b.x);
    const int y_lo = lo(a.y, b.y);
    return {x_lo, y_lo, hi(a.x, b.x, g.width) - x_lo + 1, hi(a.y, b.y, g.height) - y_lo + 1};
  }

  [[nodiscard]] bool contains(const Cell& c) const {
    return c.x >= x0 && c.y >= y0 && c.x < x0 + width && c.y < y0 + height;
  }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

  friend bool operator==(const Window&, const Window&) = default;
};

/// Deterministic 8-connected grid MDP with an absorbing goal and a finite horizon of moves.
/// States are the cells of `window`; moves leaving the window or entering blocked cells are
/// not available. The discount is fixed at 1 (the finite horizon bounds path length).
class GridMdp {
 public:
  GridMdp(GridGeometry geometry, std::vector<std::uint8_t> blocked, Cell goal, int horizon,
          std::optional<Window> window = std::nullopt)
      : geometry_(geometry), window_(window.value_or(Window::full(geometry))), blocked_(std::move(blocked)),
        goal_(goal), horizon_(horizon) {
    geometry_.validate();
    if (blocked_.empty()) {
      blocked_.assign(geometry_.cell_count(), 0);
    }
    if (blocked_.size() != geometry_.cell_count()) {
      throw Error(ErrorCode::dimension_mismatch, "blocked mask size does not match geometry");
    }
    if (window_.width < 1 || window_.height < 1 || window_.x0 < 0 || window_.y0 < 0 ||
        window_.x0 + window_.width > geometry_.width || window_.y0 + window_.height > geometry_.height) {
      throw Error(ErrorCode::invalid_argument, "MDP window must lie inside the grid");
    }
    geometry_.require_contains(goal_);
    if (!window_.contains(goal_)) {
      throw Error(ErrorCode::out_of_bounds, "goal lies outside the MDP window");
    }
    if (horizon_ < 1) {
      throw Error(ErrorCode::invalid_argument, "horizon must be at least one move");
    }
    build_successors();
  }

  /// Blocked cells taken from the stack; default horizon 2 * (width + height).
  static GridMdp for_stack(const FeatureStack& stack, Cell goal, std::optional<int> horizon = std::nullopt,
                           std::optional<Window> window = std::nullopt) {
    const auto& g = stack.geometry();
    return {g, std::vector<std::uint8_t>(stack.blocked().begin(), stack.blocked().end()), goal,
            horizon.value_or(default_horizon(g)), window};
  }

  static int default_horizon(const GridGeometry& g) { return 2 * (g.width + g.height); }

  [[nodiscard]] const GridGeometry& geometry() const { return geometry_; }
  [[nodiscard]] const Window& window() const { return window_; }
  [[nodiscard]] const Cell& goal() const { return goal_; }
  [[nodiscard]] int horizon() const { return horizon_; }
  [[nodiscard]] static constexpr double discount() { return 1.0; }
  [[nodiscard]] std::size_t state_count() const { return window_.size(); }

  [[nodiscard]] bool contains(const Cell& c) const { return window_.contains(c); }
  [[nodiscard]] std::size_t state_of(const Cell& c) const {
    return static_cast<std::size_t>(c.y - window_.y0) * static_cast<std::size_t>(window_.width) +
           static_cast<std::size_t>(c.x - window_.x0);
  }
  [[nodiscard]] Cell cell_of(std::size_t s) const {
    return {window_.x0 + static_cast<int>(s % static_cast<std::size_t>(window_.width)),
            window_.y0 + static_cast<int>(s / static_cast<std::size_t>(window_.width))};
  }
  [[nodiscard]] std::size_t grid_index(std::size_t s) const { return geometry_.index(cell_of(s)); }
  [[nodiscard]] bool passable(const Cell& c) const { return contains(c) && blocked_[geometry_.index(c)] == 0; }
  [[nodiscard]] std::size_t goal_state() const { return state_of(goal_); }

  /// Successor states of `s`; empty for the goal and for blocked cells.
  [[nodiscard]] std::span<const std::uint32_t> successors(std::size_t s) const {
    return {targets_.data() + offsets_[s], targets_.data() + offsets_[s + 1]};
  }

 private:
  void build_successors() {
    const auto n = state_count();
    offsets_.assign(n + 1, 0);
    targets_.clear();
    targets_.reserve(n * 8);
    const auto goal_s = goal_state();
    for (std::size_t s = 0; s < n; ++s) {
      offsets_[s] = static_cast<std::uint32_t>(targets_.size());
      const Cell c = cell_of(s);
      if (s == goal_s || !passable(c)) {
        continue;
      }
      for (const auto& m : kKingMoves) {
        const Cell nb{c.x + m.x, c.y + m.y};
        if (passable(nb)) {
          targets_.push_back(static_cast<std::uint32_t>(state_of(nb)));
        }
      }
    }
    offsets_[n] = static_cast<std::uint32_t>(targets_.size());
  }

  GridGeometry geometry_;
  Window window_;
  std::vector<std::uint8_t> blocked_;
  Cell goal_;
  int horizon_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> targets_;
};

struct ActionProbability {
  Cell target;
  double probability = 0.0;
};

/// Output of the soft backward pass: log-partition tables V_r for every remaining-move budget
/// r in [0, horizon], and the time-indexed policy they induce.
class SoftPolicy {
 public:
  SoftPolicy(GridMdp mdp, std::vector<double> rewards, std::vector<std::vector<double>> log_values)
      : mdp_(std::move(mdp)), rewards_(std::move(rewards)), log_values_(std::move(log_values)) {}

  [[nodiscard]] const GridMdp& mdp() const { return mdp_; }
  [[nodiscard]] int horizon() const { return mdp_.horizon(); }

  /// Log of the summed exp-reward (goal reward excluded) of goal-reaching paths from `c`
  /// using at most `remaining` moves; -inf when none exists.
  [[nodiscard]] double log_value(const Cell& c, int remaining) const {
    return log_values_.at(static_cast<std::size_t>(remaining))[mdp_.state_of(c)];
  }
  [[nodiscard]] double log_value(const Cell& c) const { return log_value(c, horizon()); }

  /// log Z over goal-reaching paths from `start`, goal reward included.
  [[nodiscard]] double log_partition(const Cell& start, int remaining) const {
    return log_value(start, remaining) + rewards_[mdp_.goal_state()];
  }

  [[nodiscard]] double reward(std::size_t s) const { return rewards_[s]; }
  [[nodiscard]] std::span<const double> log_values(int remaining) const {
    return log_values_[static_cast<std::size_t>(remaining)];
  }

  /// pi_r(a | s) proportional to exp(R(s) + V_{r-1}(succ(s, a))). Empty for the goal, for
  /// unreachable states, and when `remaining` is 0.
  [[nodiscard]] std::vector<ActionProbability> policy(const Cell& c, int remaining) const {
    std::vector<ActionProbability> out;
    if (!mdp_.contains(c) || remaining < 1 || remaining > horizon()) {
      return out;
    }
    const auto s = mdp_.state_of(c);
    const double v = log_values_[static_cast<std::size_t>(remaining)][s];
    if (s == mdp_.goal_state() || v == kNegInf) {
      return out;
    }
    const auto& next = log_values_[static_cast<std::size_t>(remaining - 1)];
    for (const auto t : mdp_.successors(s)) {
      if (next[t] == kNegInf) {
        continue;
      }
      out.push_back({mdp_.cell_of(t), std::exp(rewards_[s] + next[t] - v)});
    }
    return out;
  }

  /// The policy with the full horizon available.
  [[nodiscard]] std::vector<ActionProbability> policy(const Cell& c) const { return policy(c, horizon()); }

 private:
  GridMdp mdp_;
  std::vector<double> rewards_;
  std::vector<std::vector<double>> log_values_;
};

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (const double x : xs) {
    m = std::max(m, x);
  }
  if (m == kNegInf) {
    return kNegInf;
  }
  double s = 0.0;
  for (const double x : xs) {
    s += std::exp(x - m);
  }
  return m + std::log(s);
}

/// Soft value iteration in the log domain with a per-state max shift.
inline SoftPolicy soft_backward(const GridMdp& mdp, const RewardMap& reward) {
  if (!(reward.geometry == mdp.geometry())) {
    throw Error(ErrorCode::geometry_mismatch, "reward map and MDP geometries differ");
  }
  if (!mdp.passable(mdp.goal())) {
    throw Error(ErrorCode::impassable, "goal cell is impassable");
  }
  const auto n = mdp.state_count();
  std::vector<double> rewards(n);
  for (std::size_t s = 0; s < n; ++s) {
    rewards[s] = reward.values[mdp.grid_index(s)];
    if (!std::isfinite(rewards[s])) {
      throw Error(ErrorCode::invalid_argument, "reward map must be finite");
    }
  }
  const auto goal = mdp.goal_state();
  const auto horizon = static_cast<std::size_t>(mdp.horizon());
  std::vector<std::vector<double>> v(horizon + 1, std::vector<double>(n, kNegInf));
  v[0][goal] = 0.0;
  std::array<double, 8> terms{};
  for (std::size_t r = 1; r <= horizon; ++r) {
    const auto& prev = v[r - 1];
    auto& cur = v[r];
    for (std::size_t s = 0; s < n; ++s) {
      if (s == goal) {
        cur[s] = 0.0;
        continue;
      }
      const auto succ = mdp.successors(s);
      std::size_t m = 0;
      for (const auto t : succ) {
        terms[m++] = prev[t];
      }
      const double lse = log_sum_exp(std::span<const double>(terms.data(), m));
      cur[s] = lse == kNegInf ? kNegInf : rewards[s] + lse;
    }
  }
  return {mdp, std::move(rewards), std::move(v)};
}

/// Expected visitation D_s accumulated over `steps` time slices of the forward pass.
struct VisitationField {
  Window window;
  std::vector<double> counts;
  /// Unabsorbed plus absorbed probability after each time slice.
  std::vector<double> mass;
  double absorbed = 0.0;

  [[nodiscard]] double at(const Cell& c) const {
    if (!window.contains(c)) {
      return 0.0;
    }
    return counts[static_cast<std::size_t>(c.y - window.y0) * static_cast<std::size_t>(window.width) +
                  static_cast<std::size_t>(c.x - window.x0)];
  }
};

/// Forward pass: D^0 is a delta at `start`; at time t the policy with horizon - t moves
/// remaining moves the mass; mass reaching the goal is absorbed and counted there once.
inline VisitationField expected_visitation(const SoftPolicy& policy, const Cell& start, int steps) {
  const auto& mdp = policy.mdp();
  if (!mdp.passable(start)) {
    throw Error(ErrorCode::impassable, "start cell is impassable or outside the MDP window");
  }
  if (steps < 1 || steps - 1 > mdp.horizon()) {
    throw Error(ErrorCode::invalid_argument, "forward steps must lie in [1, horizon + 1]");
  }
  const auto n = mdp.state_count();
  const auto goal = mdp.goal_state();
  VisitationField field{mdp.window(), std::vector<double>(n, 0.0), {}, 0.0};
  std::vector<double> cur(n, 0.0);
  std::vector<double> next(n, 0.0);
  const auto s0 = mdp.state_of(start);
  if (s0 == goal) {
    field.counts[goal] = 1.0;
    field.absorbed = 1.0;
    field.mass.assign(static_cast<std::size_t>(steps), 1.0);
    return field;
  }
  cur[s0] = 1.0;
  for (int t = 0; t < steps; ++t) {
    double live = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      field.counts[s] += cur[s];
      live += cur[s];
    }
    field.mass.push_back(live + field.absorbed);
    if (t + 1 == steps) {
      break;
    }
    const int remaining = mdp.horizon() - t;
    const auto& vr = policy.log_values(remaining);
    const auto& vn = policy.log_values(remaining - 1);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (cur[s] == 0.0 || vr[s] == kNegInf) {
        continue;
      }
      const double base = policy.reward(s) - vr[s];
      for (const auto t2 : mdp.successors(s)) {
        if (vn[t2] == kNegInf) {
          continue;
        }
        const double flow = cur[s] * std::exp(base + vn[t2]);
        if (t2 == goal) {
          field.absorbed += flow;
          field.counts[goal] += flow;
        } else {
          next[t2] += flow;
        }
      }
    }
    std::swap(cur, next);
  }
  return field;
}

/// Sum over states of D_s phi(s).
inline std::vector<double> expected_feature_counts(const VisitationField& field, const FeatureStack& stack) {
  std::vector<double> out(stack.dimension(), 0.0);
  const auto& g = stack.geometry();
  const auto& w = field.window;
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      const double d = field.counts[static_cast<std::size_t>(y) * static_cast<std::size_t>(w.width) +
                                    static_cast<std::size_t>(x)];
      if (d == 0.0) {
        continue;
      }
      const auto i = g.index({w.x0 + x, w.y0 + y});
      for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += d * stack.plane(k)[i];
      }
    }
  }
  return out;
}

/// How the per-demonstration MDP is sized.
struct GradientOptions {
  /// Forward slices T = multiplier * |path|, i.e. T - 1 moves of horizon.
  int horizon_multiplier = 2;
  /// When positive, the horizon in moves (overrides the multiplier).
  int horizon_override = 0;
  /// Restrict the MDP to the path's bounding box grown by this many cells. Negative keeps every
  /// cell that a horizon-length path could visit, which is exact.
  int window_margin = -1;
  /// Use the long-double linear-domain recursion, falling back to the log domain when it
  /// under- or overflows. When false the log-domain passes are always used.
  bool fast_kernel = true;
};

struct GradientResult {
  std::vector<double> gradient;
  /// Mean over demonstrations of theta . phi_path - log Z.
  double log_likelihood = 0.0;
};

namespace detail {

struct DemoEvaluation {
  std::vector<double> expected_counts;
  double log_partition = 0.0;
};

/// Precomputed MDP and empirical counts for one demonstration.
class DemoProblem {
 public:
  DemoProblem(const Demonstration& demo, const GradientOptions& options)
      : stack_(demo.shared_stack()),
        start_(demo.start()),
        empirical_(feature_counts(demo)),
        mdp_(make_mdp(demo, options)),
        fast_(options.fast_kernel) {}

  [[nodiscard]] const std::vector<double>& empirical() const { return empirical_; }
  [[nodiscard]] const GridMdp& mdp() const { return mdp_; }
  [[nodiscard]] const FeatureStack& stack() const { return *stack_; }

  [[nodiscard]] DemoEvaluation evaluate(std::span<const double> theta) const {
    const auto rewards = window_rewards(theta);
    if (fast_) {
      if (auto fast = evaluate_linear(rewards)) {
        return *std::move(fast);
      }
    }
    return evaluate_log(theta);
  }

  [[nodiscard]] DemoEvaluation evaluate_log(std::span<const double> theta) const {
    const auto reward = reward_map(theta, *stack_);
    const auto policy = soft_backward(mdp_, reward);
    const auto field = expected_visitation(policy, start_, mdp_.horizon() + 1);
    return {expected_feature_counts(field, *stack_), policy.log_partition(start_, mdp_.horizon())};
  }

  /// Linear-domain recursion Z_r(s) = e^{R(s)} sum Z_{r-1}(succ), renormalized every sweep.
  /// Returns nullopt when the dynamic range exceeds long double.
  [[nodiscard]] std::optional<DemoEvaluation> evaluate_linear(const std::vector<double>& rewards) const {
    using Real = long double;
    const auto n = mdp_.state_count();
    const auto goal = mdp_.goal_state();
    const auto start = mdp_.state_of(start_);
    const auto horizon = static_cast<std::size_t>(mdp_.horizon());
    std::vector<Real> expr(n);
    for (std::size_t s = 0; s < n; ++s) {
      expr[s] = std::exp(static_cast<Real>(rewards[s]));
    }
    auto& z = z_scratch_;
    z.assign((horizon + 1) * n, Real{0});
    std::vector<Real> scale(horizon + 1, Real{1});
    long double log_c = 0.0L;
    z[goal] = 1;
    const Cell goal_cell = mdp_.goal();
    const Cell start_cell = start_;
    for (std::size_t r = 1; r <= horizon; ++r) {
      const Real* prev = z.data() + (r - 1) * n;
      Real* cur = z.data() + r * n;
      Real peak = 0;
      for_box(goal_cell, static_cast<int>(r), [&](std::size_t s) {
        if (s == goal) {
          cur[s] = std::exp(-log_c);
        } else {
          Real acc = 0;
          for (const auto t : mdp_.successors(s)) {
            acc += prev[t];
          }
          cur[s] = expr[s] * acc;
        }
        peak = std::max(peak, cur[s]);
      });
      if (!(peak > 0) || !std::isfinite(peak)) {
        return std::nullopt;
      }
      for_box(goal_cell, static_cast<int>(r), [&](std::size_t s) { cur[s] /= peak; });
      scale[r] = peak;
      log_c += std::log(peak);
    }
    const Real z_start = z[horizon * n + start];
    if (!(z_start > 0)) {
      return std::nullopt;
    }
    DemoEvaluation out;
    out.log_partition = static_cast<double>(std::log(z_start) + log_c) + rewards[goal];

    std::vector<double> counts(n, 0.0);
    if (start == goal) {
      counts[goal] = 1.0;
    } else {
      std::vector<double> cur(n, 0.0);
      std::vector<double> next(n, 0.0);
      cur[start] = 1.0;
      double absorbed = 0.0;
      for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t r = horizon - t;
        const Real* zr = z.data() + r * n;
        const Real* zn = z.data() + (r - 1) * n;
        for_box(start_cell, static_cast<int>(t) + 1, [&](std::size_t s) { next[s] = 0.0; });
        bool ok = true;
        for_box(start_cell, static_cast<int>(t), [&](std::size_t s) {
          const double d = cur[s];
          if (d == 0.0) {
            return;
          }
          counts[s] += d;
          if (!(zr[s] > 0)) {
            ok = false;
            return;
          }
          const Real factor = static_cast<Real>(d) * expr[s] / (zr[s] * scale[r]);
          for (const auto t2 : mdp_.successors(s)) {
            const double flow = static_cast<double>(factor * zn[t2]);
            if (t2 == goal) {
              absorbed += flow;
            } else {
              next[t2] += flow;
            }
          }
        });
        if (!ok) {
          return std::nullopt;
        }
        std::swap(cur, next);
      }
      for (std::size_t s = 0; s < n; ++s) {
        counts[s] += cur[s];
      }
      counts[goal] += absorbed;
      if (!(std::abs(absorbed - 1.0) < 1e-9)) {
        return std::nullopt;
      }
    }

    out.expected_counts.assign(stack_->dimension(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (counts[s] == 0.0) {
        continue;
      }
      const auto i = mdp_.grid_index(s);
      for (std::size_t k = 0; k < out.expected_counts.size(); ++k) {
        out.expected_counts[k] += counts[s] * stack_->plane(k)[i];
      }
    }
    return out;
  }

 private:
  /// Cells farther than the horizon allows (start to cell to goal, in king moves) are masked
  /// out; no admissible path touches them, so the likelihood is unchanged.
  static GridMdp make_mdp(const Demonstration& demo, const GradientOptions& options) {
    const auto& stack = demo.stack();
    const auto& g = stack.geometry();
    const int horizon = horizon_for(demo, options);
    const Cell a = demo.start();
    const Cell b = demo.goal();
    const Window window = options.window_margin < 0 ? Window::reachable(g, a, b, horizon)
                                                    : Window::around(g, demo.path(), options.window_margin);
    std::vector<std::uint8_t> blocked(stack.blocked().begin(), stack.blocked().end());
    const auto cheb = [](const Cell& p, const Cell& q) { return std::max(std::abs(p.x - q.x), std::abs(p.y - q.y)); };
    for (int y = window.y0; y < window.y0 + window.height; ++y) {
      for (int x = window.x0; x < window.x0 + window.width; ++x) {
        const Cell c{x, y};
        if (cheb(a, c) + cheb(c, b) > horizon) {
          blocked[g.index(c)] = 1;
        }
      }
    }
    return {g, std::move(blocked), b, horizon, window};
  }

  static int horizon_for(const Demonstration& demo, const GradientOptions& options) {
    const int length = static_cast<int>(demo.path().size());
    if (options.horizon_override > 0) {
      if (options.horizon_override < length - 1) {
        throw Error(ErrorCode::invalid_argument, "horizon shorter than demonstration " + demo.id());
      }
      return options.horizon_override;
    }
    if (options.horizon_multiplier < 1) {
      throw Error(ErrorCode::invalid_argument, "horizon multiplier must be >= 1");
    }
    return std::max(1, options.horizon_multiplier * length - 1);
  }

  /// Visits the window states within `radius` king moves of `center`.
  template <class Fn>
  void for_box(const Cell& center, int radius, Fn&& fn) const {
    const auto& w = mdp_.window();
    const int x_lo = std::max(w.x0, center.x - radius);
    const int x_hi = std::min(w.x0 + w.width - 1, center.x + radius);
    const int y_lo = std::max(w.y0, center.y - radius);
    const int y_hi = std::min(w.y0 + w.height - 1, center.y + radius);
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        fn(mdp_.state_of({x, y}));
      }
    }
  }

  [[nodiscard]] std::vector<double> window_rewards(std::span<const double> theta) const {
    const auto n = mdp_.state_count();
    std::vector<double> r(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const auto i = mdp_.grid_index(s);
      double acc = 0.0;
      for (std::size_t k = 0; k < theta.size(); ++k) {
        acc += theta[k] * stack_->plane(k)[i];
      }
      r[s] = acc;
    }
    return r;
  }

  std::shared_ptr<const FeatureStack> stack_;
  Cell start_;
  std::vector<double> empirical_;
  GridMdp mdp_;
  bool fast_;
  // Reused across evaluations; a DemoProblem is not shared between threads.
  mutable std::vector<long double> z_scratch_;
};

inline void check_demos(std::span<const Demonstration> demos, std::size_t dimension) {
  if (demos.empty()) {
    throw Error(ErrorCode::no_demonstrations, "at least one demonstration is required");
  }
  const auto& schema = demos.front().stack().schema();
  for (const auto& d : demos) {
    if (d.stack().dimension() != dimension) {
      throw Error(ErrorCode::dimension_mismatch, "demonstration " + d.id() + " has " +
                                                     std::to_string(d.stack().dimension()) + " features, expected " +
                                                     std::to_string(dimension));
    }
    if (!(d.stack().schema() == schema)) {
      throw Error(ErrorCode::schema_mismatch, "demonstration " + d.id() + " uses a different feature schema");
    }
  }
}

inline GradientResult combine(const std::vector<DemoProblem>& problems, std::span<const double> theta) {
  GradientResult out{std::vector<double>(theta.size(), 0.0), 0.0};
  const double inv = 1.0 / static_cast<double>(problems.size());
  for (const auto& p : problems) {
    const auto eval = p.evaluate(theta);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      out.gradient[k] += inv * (p.empirical()[k] - eval.expected_counts[k]);
    }
    out.log_likelihood += inv * (dot(theta, p.empirical()) - eval.log_partition);
  }
  return out;
}

}  // namespace detail

/// Mean over demonstrations of (empirical - expected feature counts), each demonstration
/// evaluated on its own stack, start, goal and horizon.
inline GradientResult likelihood_gradient(std::span<const Demonstration> demos, std::span<const double> theta,
                                          const GradientOptions& options = {}) {
  detail::check_demos(demos, theta.size());
  std::vector<detail::DemoProblem> problems;
  problems.reserve(demos.size());
  for (const auto& d : demos) {
    problems.emplace_back(d, options);
  }
  return detail::combine(problems, theta);
}

struct TrainInit {
  InitMode mode = InitMode::random;
  std::uint64_t seed = 0;
  std::vector<double> theta;
  FeatureSchema schema;

  static TrainInit random(std::uint64_t seed) { return {InitMode::random, seed, {}, {}}; }
  static TrainInit warm(const BehaviorModel& model) { return {InitMode::warm, model.meta.seed, model.theta, model.schema}; }
};

struct TrainBudget {
  int max_iterations = 500;
  double wall_clock_s = std::numeric_limits<double>::infinity();
  double gradient_tolerance = 1e-4;
};

struct TrainOptions {
  GradientOptions gradient{};
  double learning_rate = 0.1;
  double decay = 0.99;
  /// Divide the ascent direction by the mean demonstration length so the step size does not
  /// scale with path length.
  bool normalize_by_length = false;
  /// After an accepted step `backoff` grows by this factor, up to 1. 1 never recovers.
  double backoff_recovery = 1.25;
};

struct TrainProgress {
  int iteration = 0;
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;
  double elapsed_s = 0.0;
  bool accepted = false;
};

using ProgressObserver = std::function<void(const TrainProgress&)>;

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

/// Uniform weights in [-5, 5].
inline std::vector<double> random_weights(std::size_t dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  std::vector<double> theta(dimension);
  for (auto& w : theta) {
    w = dist(rng);
  }
  return theta;
}

/// Decayed gradient ascent on the mean log-likelihood: step k proposes
/// theta + eta_0 * decay^k * backoff * grad; a proposal that lowers the likelihood is rejected
/// and halves `backoff`, an accepted one lets it recover. Stops on gradient tolerance
/// (inf-norm), iteration cap, wall-clock budget (checked before each evaluation) or cancellation, whichever comes first.
inline BehaviorModel train(std::span<const Demonstration> demos, const FeatureSchema& schema, const TrainInit& init,
                           const TrainBudget& budget = {}, const TrainOptions& options = {},
                           std::stop_token stop = {}, const ProgressObserver& observer = {}) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  detail::check_demos(demos, schema.dimension());
  if (!(demos.front().stack().schema() == schema)) {
    throw Error(ErrorCode::schema_mismatch, "demonstrations were built for a different schema");
  }
  BehaviorModel model;
  model.schema = schema;
  model.meta.init = init.mode;
  model.meta.seed = init.seed;
  for (const auto& d : demos) {
    model.meta.demo_ids.push_back(d.id());
  }
  if (init.mode == InitMode::warm) {
    if (init.theta.size() != schema.dimension() || !(init.schema == schema)) {
      throw Error(ErrorCode::schema_mismatch, "warm-start weights do not match the training schema");
    }
    model.theta = init.theta;
  } else {
    model.theta = random_weights(schema.dimension(), init.seed);
  }

  std::vector<detail::DemoProblem> problems;
  problems.reserve(demos.size());
  double mean_length = 0.0;
  for (const auto& d : demos) {
    problems.emplace_back(d, options.gradient);
    mean_length += static_cast<double>(d.path().size()) / static_cast<double>(demos.size());
  }
  const double direction_scale = options.normalize_by_length ? 1.0 / mean_length : 1.0;

  auto current = detail::combine(problems, model.theta);
  double backoff = 1.0;
  int k = 0;
  StopReason reason = StopReason::max_iterations;
  while (true) {
    if (max_abs(current.gradient) < budget.gradient_tolerance) {
      reason = StopReason::converged;
      break;
    }
    if (k >= budget.max_iterations) {
      reason = StopReason::max_iterations;
      break;
    }
    if (elapsed() >= budget.wall_clock_s) {
      reason = StopReason::time_budget;
      break;
    }
    if (stop.stop_requested()) {
      reason = StopReason::cancelled;
      break;
    }
    const double eta = options.learning_rate * std::pow(options.decay, k) * backoff * direction_scale;
    std::vector<double> candidate = model.theta;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      candidate[i] += eta * current.gradient[i];
    }
    auto proposal = detail::combine(problems, candidate);
    ++k;
    const bool accepted = proposal.log_likelihood >= current.log_likelihood;
    if (accepted) {
      model.theta = std::move(candidate);
      current = std::move(proposal);
      backoff = std::min(1.0, backoff * options.backoff_recovery);
    } else {
      backoff *= 0.5;
    }
    if (observer) {
      observer({k, max_abs(current.gradient), current.log_likelihood, elapsed(), accepted});
    }
  }
  model.meta.iterations = k;
  model.meta.final_gradient_norm = max_abs(current.gradient);
  model.meta.log_likelihood = current.log_likelihood;
  model.meta.stop_reason = reason;
  model.meta.wall_clock_s = elapsed();
  return model;
}

}  // namespace maxent_nav

#endif  // MAXENT_NAV_IRL_HPP
