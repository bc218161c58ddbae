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

#ifndef MAXENT_NAV_EVALUATION_HPP
#define MAXENT_NAV_EVALUATION_HPP

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "maxent_nav/planners.hpp"

namespace maxent_nav {

/// Modified Hausdorff distance h(A, B): mean over points of `a` of the distance to the
/// nearest point of `b`. Directed; `b` is the reference (ground truth).
inline double mhd(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::invalid_argument, "modified Hausdorff distance needs non-empty trajectories");
  }
  double sum = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      best = std::min(best, dx * dx + dy * dy);
    }
    sum += std::sqrt(best);
  }
  return sum / static_cast<double>(a.size());
}

inline double mhd(const Trajectory& a, const Trajectory& ground_truth) { return mhd(a.points, ground_truth.points); }

/// max(h(A,B), h(B,A)), the symmetric form.
inline double mhd_symmetric(const Trajectory& a, const Trajectory& b) { return std::max(mhd(a, b), mhd(b, a)); }

/// Translates `traj` so its first point coincides with `surveyed_start`.
inline Trajectory realign_start(const Trajectory& traj, const Point2& surveyed_start) {
  if (traj.points.empty()) {
    return traj;
  }
  Trajectory out = traj;
  const double dx = surveyed_start.x - traj.points.front().x;
  const double dy = surveyed_start.y - traj.points.front().y;
  for (auto& p : out.points) {
    p.x += dx;
    p.y += dy;
  }
  return out;
}

/// One MHD measurement: a planner's trajectory against ground truth in one trial.
struct TrialMetric {
  std::string site;
  std::string planner;
  int trial = 0;
  double mhd_m = 0.0;
};

struct MhdResult {
  std::string site;
  std::string planner;
  std::vector<double> per_trial;
  /// Absent for single-trial sites.
  std::optional<double> mean;
  std::optional<double> median;
  double best = 0.0;
  /// Lowest mean at the site (lowest best when the site has one trial).
  bool highlighted = false;
};

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Groups metrics by (site, planner) in first-seen order.
inline std::vector<MhdResult> summarize(std::span<const TrialMetric> metrics) {
  if (metrics.empty()) {
    throw Error(ErrorCode::no_trials, "no trials to summarize");
  }
  std::vector<MhdResult> out;
  for (const auto& m : metrics) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const MhdResult& r) { return r.site == m.site && r.planner == m.planner; });
    if (it == out.end()) {
      out.push_back({m.site, m.planner, {}, std::nullopt, std::nullopt, 0.0, false});
      it = std::prev(out.end());
    }
    it->per_trial.push_back(m.mhd_m);
  }
  for (auto& r : out) {
    r.best = *std::min_element(r.per_trial.begin(), r.per_trial.end());
    if (r.per_trial.size() > 1) {
      double s = 0.0;
      for (const double v : r.per_trial) {
        s += v;
      }
      r.mean = s / static_cast<double>(r.per_trial.size());
      r.median = median_of(r.per_trial);
    }
  }
  std::map<std::string, std::vector<MhdResult*>> by_site;
  for (auto& r : out) {
    by_site[r.site].push_back(&r);
  }
  for (auto& [site, rows] : by_site) {
    const auto score = [](const MhdResult* r) { return r->mean.value_or(r->best); };
    const auto lowest = *std::min_element(rows.begin(), rows.end(),
                                          [&](const MhdResult* a, const MhdResult* b) { return score(a) < score(b); });
    lowest->highlighted = true;
  }
  return out;
}

inline std::string format_metric(std::optional<double> v) {
  if (!v) {
    return "--";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *v);
  return buf;
}

/// Comma-separated rows: site, planner, trial, mhd_m.
inline std::string metrics_csv(std::span<const TrialMetric> metrics) {
  std::ostringstream out;
  out << "site,planner,trial,mhd_m\n";
  for (const auto& m : metrics) {
    out << m.site << ',' << m.planner << ',' << m.trial << ',' << format_double(m.mhd_m) << '\n';
  }
  return out.str();
}

inline std::vector<TrialMetric> metrics_from_csv(std::string_view text) {
  std::vector<TrialMetric> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) {
      cols.push_back(col);
    }
    if (cols.size() != 4) {
      throw Error(ErrorCode::parse_error, "metric row '" + line + "' needs four columns");
    }
    out.push_back({cols[0], cols[1], std::stoi(cols[2]), parse_double(cols[3], "metrics")});
  }
  return out;
}

/// Site rows with Mean/Median/Best per planner; '*' marks the lowest-mean planner.
inline std::string format_table(std::span<const MhdResult> results) {
  std::vector<std::string> planners;
  std::vector<std::string> sites;
  for (const auto& r : results) {
    if (std::find(planners.begin(), planners.end(), r.planner) == planners.end()) planners.push_back(r.planner);
    if (std::find(sites.begin(), sites.end(), r.site) == sites.end()) sites.push_back(r.site);
  }
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-12s", "site");
  out << buf;
  for (const auto& p : planners) {
    std::snprintf(buf, sizeof(buf), " | %-30s", p.c_str());
    out << buf;
  }
  out << '\n';
  std::snprintf(buf, sizeof(buf), "%-12s", "");
  out << buf;
  for (std::size_t i = 0; i < planners.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " | %-9s %-9s %-10s", "mean", "median", "best");
    out << buf;
  }
  out << '\n';
  for (const auto& site : sites) {
    std::snprintf(buf, sizeof(buf), "%-12s", site.c_str());
    out << buf;
    for (const auto& p : planners) {
      const auto it = std::find_if(results.begin(), results.end(),
                                   [&](const MhdResult& r) { return r.site == site && r.planner == p; });
      if (it == results.end()) {
        std::snprintf(buf, sizeof(buf), " | %-30s", "--");
      } else {
        const std::string mean = format_metric(it->mean) + (it->highlighted ? "*" : "");
        std::snprintf(buf, sizeof(buf), " | %-9s %-9s %-10s", mean.c_str(), format_metric(it->median).c_str(),
                      format_metric(it->best).c_str());
      }
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace maxent_nav

#endif  // MAXENT_NAV_EVALUATION_HPP
