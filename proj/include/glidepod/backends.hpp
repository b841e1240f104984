/*
 * Copyright 2026 The Glidepod Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glidepod/model.hpp"

// Container backend abstraction and two simulated implementations: a
// Kubernetes-like scheduler with nodes, priorities and preemption, and a
// Lancium-like batch service with aggregate capacity and a foreign state
// vocabulary behind the same interface.
namespace glidepod::backends {

using model::SimTime;

enum class PodState { Queued, Starting, Running, Terminating, Succeeded, Failed, Preempted };

const char* to_string(PodState s);
bool is_terminal(PodState s);
// The allowed pod state machine. Queued pods fail only on submission
// rejection; terminal states are absorbing.
bool transition_allowed(PodState from, PodState to);

struct PodRecord {
  std::string pod_id;
  model::PodSpec spec;
  PodState unified_state = PodState::Queued;
  std::optional<std::string> node_id;
  SimTime submit_time = 0;
  std::optional<SimTime> start_time;  // set once Running is reached
  std::optional<SimTime> end_time;    // set iff terminal
};

using LabelSelector = std::map<std::string, std::string>;

class BackendError : public std::runtime_error {
 public:
  explicit BackendError(const std::string& what) : std::runtime_error(what) {}
};

// Transient condition: the caller should retry at its next tick.
class UnreachableError : public BackendError {
 public:
  explicit UnreachableError(const std::string& what) : BackendError(what) {}
};

// The full surface the provisioner gets. Deliberately has no
// delete/kill/scale-down operation; pods terminate themselves.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // All pods whose labels satisfy every equality in the selector,
  // ordered by pod_id.
  virtual std::vector<PodRecord> list_pods(const LabelSelector& selector) const = 0;
  // Creates `count` pods in Queued. Atomic: on error no pod is created.
  virtual std::vector<std::string> submit_pods(const model::PodSpec& spec,
                                               std::int64_t count) = 0;
};

struct Transition {
  SimTime time = 0;
  std::string pod_id;
  PodState from = PodState::Queued;
  PodState to = PodState::Queued;
  std::string detail;
};

// Simulation-side extension: the event engine advances these; the
// provisioner never sees this interface.
class SimBackend : public Backend {
 public:
  // Advances internal scheduling at `now`; returns the transitions made.
  virtual std::vector<Transition> step(SimTime now) = 0;
  // Self-termination hook used by workers that hit their idle or
  // lifetime limit. The pod must currently be Running.
  virtual void request_termination(const std::string& pod_id, SimTime now) = 0;
  // Next instant at which step() would make progress on its own.
  virtual std::optional<SimTime> next_wakeup() const = 0;

  void set_unreachable(bool u) { unreachable_ = u; }
  bool unreachable() const { return unreachable_; }

  const std::vector<Transition>& transition_log() const { return log_; }
  std::int64_t total_submitted() const { return total_submitted_; }
  // Live = not in a terminal state.
  virtual std::int64_t live_pod_count() const = 0;

 protected:
  void check_reachable() const {
    if (unreachable_) throw UnreachableError("backend unreachable");
  }
  void record(SimTime time, const std::string& pod_id, PodState from, PodState to,
              std::string detail = "");
  static void validate_common(const model::PodSpec& spec, std::int64_t count);

  std::vector<Transition> log_;
  std::int64_t total_submitted_ = 0;
  bool unreachable_ = false;
};

struct NodeSpec {
  std::string node_id;
  model::ResourceShape capacity;
  std::map<std::string, std::string> labels;
};

struct PriorityClassInfo {
  int value = 1000;
  bool preemptable = false;
};
using PriorityTable = std::map<std::string, PriorityClassInfo>;

// Pods without a priority class get this value and are not preemptable.
inline constexpr int kDefaultPriority = 1000;

// Built-in class table: opportunistic2 is the lowest priority of all
// defined classes and marks its pods preemptable (backfill).
PriorityTable default_priority_table();

// Kubernetes-like simulated backend: named nodes with per-dimension
// capacity and labels, priority-ordered binding, preemption of lower
// priority preemptable pods, affinity terms (negated terms require the
// label to differ or be absent).
class SimKube final : public SimBackend {
 public:
  SimKube(std::vector<NodeSpec> nodes, SimTime start_latency_s,
          PriorityTable table = default_priority_table());

  std::string name() const override { return "simkube"; }
  std::vector<PodRecord> list_pods(const LabelSelector& selector) const override;
  std::vector<std::string> submit_pods(const model::PodSpec& spec,
                                       std::int64_t count) override;
  std::vector<Transition> step(SimTime now) override;
  void request_termination(const std::string& pod_id, SimTime now) override;
  std::optional<SimTime> next_wakeup() const override;
  std::int64_t live_pod_count() const override;

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  model::ResourceShape node_usage(const std::string& node_id) const;

 private:
  struct Pod {
    PodRecord rec;
    int priority = kDefaultPriority;
    bool preemptable = false;
    std::optional<SimTime> running_due;
  };

  bool affinity_ok(const model::PodSpec& spec, const NodeSpec& node) const;
  bool try_bind(Pod& pod, SimTime now);
  bool try_bind_with_preemption(Pod& pod, SimTime now);
  void free_node(Pod& pod);

  std::vector<NodeSpec> nodes_;  // sorted by node_id
  std::map<std::string, model::ResourceShape> used_;
  std::map<std::string, Pod> pods_;  // by pod_id
  SimTime start_latency_;
  PriorityTable table_;
  std::int64_t next_id_ = 1;
};

// Lancium-like job phases. Submission is two-phase: a record is created,
// then submitted.
enum class LanciumPhase { Created, Submitted, Queued, Running, Finished, Error };
const char* to_string(LanciumPhase p);

struct LanciumJobRecord {
  std::string lancium_id;
  LanciumPhase phase = LanciumPhase::Created;
  model::PodSpec payload;
  SimTime submit_time = 0;
  bool allocated = false;            // holds aggregate capacity
  std::optional<SimTime> allocated_at;
  std::optional<SimTime> running_due;
  std::optional<SimTime> start_time;
  std::optional<SimTime> end_time;
  std::vector<LanciumPhase> phase_history;
};

// created/submitted/queued map to Queued (Starting once capacity is
// allocated and the start latency is pending), running to Running,
// finished to Succeeded, error to Failed.
PodState unified_state(const LanciumJobRecord& rec);

// Batch-service simulated backend: one aggregate capacity, first-fit in
// submission order, no nodes, no preemption. Affinity terms and priority
// classes are accepted but ignored, with a warning recorded.
class SimLancium final : public SimBackend {
 public:
  SimLancium(model::ResourceShape capacity, SimTime start_latency_s);

  std::string name() const override { return "simlancium"; }
  std::vector<PodRecord> list_pods(const LabelSelector& selector) const override;
  std::vector<std::string> submit_pods(const model::PodSpec& spec,
                                       std::int64_t count) override;
  std::vector<Transition> step(SimTime now) override;
  void request_termination(const std::string& pod_id, SimTime now) override;
  std::optional<SimTime> next_wakeup() const override;
  std::int64_t live_pod_count() const override;

  const std::vector<LanciumJobRecord>& records() const { return records_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const model::ResourceShape& usage() const { return used_; }
  const model::ResourceShape& capacity() const { return capacity_; }

 private:
  PodRecord to_pod_record(const LanciumJobRecord& rec) const;
  LanciumJobRecord& find(const std::string& id);

  model::ResourceShape capacity_;
  model::ResourceShape used_;
  std::vector<LanciumJobRecord> records_;  // submission order == id order
  SimTime start_latency_;
  std::vector<std::string> warnings_;
  std::int64_t next_id_ = 1;
};

}  // namespace glidepod::backends
