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

#ifndef MAXENT_NAV_JOBS_HPP
#define MAXENT_NAV_JOBS_HPP

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "maxent_nav/irl.hpp"
#include "maxent_nav/model.hpp"
#include "maxent_nav/workspace.hpp"

/**
 * \file
 * \brief Background retraining jobs with one writer per model.
 */

namespace maxent_nav {

enum class JobStatus { queued, running, done, cancelled, failed };

constexpr std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::queued: return "queued";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::cancelled: return "cancelled";
    case JobStatus::failed: return "failed";
  }
  return "unknown";
}

constexpr bool is_terminal(JobStatus s) {
  return s == JobStatus::done || s == JobStatus::cancelled || s == JobStatus::failed;
}

struct JobRequest {
  /// Existing model to retrain; empty creates a new model.
  std::string model_id;
  /// Schema name for new models ("standard", "edge", "covert", "zod").
  std::string schema = "standard";
  /// Demonstrations added on top of the ones the model was trained on.
  std::vector<std::string> demo_ids;
  /// Defaults to warm for an existing model, random for a new one.
  std::optional<InitMode> init;
  std::uint64_t seed = 0;
  double budget_s = 30.0;
  int max_iterations = 500;
  double gradient_tolerance = 1e-4;
};

struct JobSnapshot {
  std::string id;
  std::string model_id;
  InitMode init = InitMode::warm;
  double budget_s = 0.0;
  JobStatus status = JobStatus::queued;
  int iteration = 0;
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;
  double elapsed_s = 0.0;
  std::vector<std::string> demo_ids;
  std::string error;
};

inline Json job_to_json(const JobSnapshot& j) {
  Json out{{"id", j.id},
           {"model_id", j.model_id},
           {"init", to_string(j.init)},
           {"budget_s", j.budget_s},
           {"status", to_string(j.status)},
           {"progress",
            {{"iteration", j.iteration},
             {"gradient_norm", j.gradient_norm},
             {"log_likelihood", j.log_likelihood},
             {"elapsed_s", j.elapsed_s}}},
           {"demo_ids", j.demo_ids}};
  if (!j.error.empty()) {
    out["error"] = j.error;
  }
  return out;
}

class JobManager {
 public:
  explicit JobManager(Workspace& workspace) : workspace_(workspace) {
    // Job ids continue after the ones already in the event log.
    for (const auto& line : workspace_.events(0)) {
      const auto record = Json::parse(line, nullptr, false);
      if (record.is_object() && record.contains("job")) {
        const auto id = record["job"].get<std::string>();
        if (id.rfind("job-", 0) == 0) {
          counter_ = std::max(counter_, std::atoi(id.c_str() + 4));
        }
      }
    }
  }

  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  ~JobManager() {
    std::vector<std::shared_ptr<Job>> jobs;
    {
      std::lock_guard lock(mutex_);
      for (auto& [_, j] : jobs_) {
        jobs.push_back(j);
      }
    }
    for (auto& j : jobs) {
      j->thread.request_stop();
      if (j->thread.joinable()) {
        j->thread.join();
      }
    }
  }

  /// Validates the request and starts training in the background. Throws not_found for
  /// unknown models or demos, busy when the model already has an active job.
  JobSnapshot submit(const JobRequest& request) {
    std::shared_ptr<const BehaviorModel> base;
    FeatureSchema schema = FeatureSchema::standard();
    if (!request.model_id.empty()) {
      base = workspace_.model(request.model_id);
      schema = base->schema;
    } else {
      schema = FeatureSchema::from_name(request.schema);
    }
    const InitMode init = request.init.value_or(base ? InitMode::warm : InitMode::random);
    if (init == InitMode::warm && !base) {
      throw Error(ErrorCode::invalid_argument, "warm start needs an existing model");
    }
    if (!(request.budget_s > 0.0) || request.max_iterations < 1) {
      throw Error(ErrorCode::invalid_argument, "budget and iteration cap must be positive");
    }
    std::vector<std::string> ids = base ? base->meta.demo_ids : std::vector<std::string>{};
    for (const auto& id : request.demo_ids) {
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        ids.push_back(id);
      }
    }
    std::vector<std::shared_ptr<const StoredDemo>> demos;
    for (const auto& id : ids) {
      demos.push_back(workspace_.demo(id));
    }
    if (demos.empty()) {
      throw Error(ErrorCode::no_demonstrations, "training needs at least one demonstration");
    }

    std::unique_lock lock(mutex_);
    if (!request.model_id.empty()) {
      for (const auto& [_, j] : jobs_) {
        if (j->snapshot.model_id == request.model_id && !is_terminal(j->snapshot.status)) {
          throw Error(ErrorCode::busy, "model '" + request.model_id + "' already has an active job");
        }
      }
    }
    auto job = std::make_shared<Job>();
    job->snapshot.id = "job-" + std::to_string(++counter_);
    job->snapshot.model_id = request.model_id.empty() ? workspace_.reserve_model_id() : request.model_id;
    job->snapshot.init = init;
    job->snapshot.budget_s = request.budget_s;
    job->snapshot.demo_ids = ids;
    jobs_[job->snapshot.id] = job;
    const auto snapshot = job->snapshot;
    lock.unlock();
    log_event(snapshot, "queued");

    TrainInit train_init = base && init == InitMode::warm ? TrainInit::warm(*base) : TrainInit::random(request.seed);
    train_init.mode = init;
    TrainBudget budget{request.max_iterations, request.budget_s, request.gradient_tolerance};
    job->thread = std::jthread([this, job, demos = std::move(demos), schema, train_init, budget](std::stop_token st) {
      run(*job, demos, schema, train_init, budget, st);
    });
    return snapshot;
  }

  /// Requests cancellation; the model keeps the weights it had before the job.
  JobSnapshot cancel(const std::string& id) {
    auto job = find(id);
    job->thread.request_stop();
    return status(id);
  }

  [[nodiscard]] JobSnapshot status(const std::string& id) const {
    auto job = find(id);
    std::lock_guard lock(mutex_);
    return job->snapshot;
  }

  [[nodiscard]] std::vector<JobSnapshot> list() const {
    std::lock_guard lock(mutex_);
    std::vector<JobSnapshot> out;
    for (const auto& [_, j] : jobs_) {
      out.push_back(j->snapshot);
    }
    return out;
  }

  /// Blocks until the job reaches a terminal state.
  JobSnapshot wait(const std::string& id) {
    auto job = find(id);
    std::unique_lock lock(mutex_);
    changed_.wait(lock, [&] { return job->settled; });
    return job->snapshot;
  }

 private:
  struct Job {
    JobSnapshot snapshot;
    bool settled = false;
    std::jthread thread;
  };

  std::shared_ptr<Job> find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) {
      throw Error(ErrorCode::not_found, "job '" + id + "' does not exist");
    }
    return it->second;
  }

  void log_event(const JobSnapshot& s, std::string_view event, const std::optional<TrainProgress>& p = std::nullopt) {
    Json record{{"job", s.id}, {"model", s.model_id}, {"event", event}};
    if (p) {
      record["iteration"] = p->iteration;
      record["gradient_norm"] = p->gradient_norm;
      record["log_likelihood"] = p->log_likelihood;
      record["elapsed_s"] = p->elapsed_s;
      record["accepted"] = p->accepted;
    }
    if (!s.error.empty()) {
      record["error"] = s.error;
    }
    workspace_.append_event(record);
  }

  void set_status(Job& job, JobStatus status, std::string error = {}) {
    JobSnapshot snapshot;
    {
      std::lock_guard lock(mutex_);
      if (is_terminal(job.snapshot.status)) {
        return;
      }
      job.snapshot.status = status;
      job.snapshot.error = std::move(error);
      snapshot = job.snapshot;
    }
    // wait() returns only once the terminal event is in the log.
    log_event(snapshot, to_string(status));
    if (is_terminal(status)) {
      std::lock_guard lock(mutex_);
      job.settled = true;
    }
    changed_.notify_all();
  }

  void run(Job& job, const std::vector<std::shared_ptr<const StoredDemo>>& stored, const FeatureSchema& schema,
           const TrainInit& init, const TrainBudget& budget, std::stop_token st) {
    set_status(job, JobStatus::running);
    try {
      std::map<const Environment*, std::shared_ptr<const FeatureStack>> stacks;
      std::vector<Demonstration> demos;
      for (const auto& d : stored) {
        auto& stack = stacks[d->environment.get()];
        if (!stack) {
          stack = std::make_shared<const FeatureStack>(d->environment->stack(schema));
        }
        demos.push_back(d->bind(stack));
      }
      auto model = train(demos, schema, init, budget, {}, st, [&](const TrainProgress& p) {
        JobSnapshot snapshot;
        {
          std::lock_guard lock(mutex_);
          job.snapshot.iteration = p.iteration;
          job.snapshot.gradient_norm = p.gradient_norm;
          job.snapshot.log_likelihood = p.log_likelihood;
          job.snapshot.elapsed_s = p.elapsed_s;
          snapshot = job.snapshot;
        }
        log_event(snapshot, "progress", p);
      });
      if (model.meta.stop_reason == StopReason::cancelled) {
        set_status(job, JobStatus::cancelled);
        return;
      }
      workspace_.publish_model(job.snapshot.model_id, std::move(model));
      set_status(job, JobStatus::done);
    } catch (const std::exception& e) {
      set_status(job, JobStatus::failed, e.what());
    }
  }

  Workspace& workspace_;
  mutable std::mutex mutex_;
  std::condition_variable changed_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  int counter_ = 0;
};

}  // namespace maxent_nav

#endif  // MAXENT_NAV_JOBS_HPP
