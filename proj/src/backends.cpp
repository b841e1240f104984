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

#include "glidepod/backends.hpp"

#include <algorithm>
#include <cstdio>

namespace glidepod::backends {

const char* to_string(PodState s) {
  switch (s) {
    case PodState::Queued: return "Queued";
    case PodState::Starting: return "Starting";
    case PodState::Running: return "Running";
    case PodState::Terminating: return "Terminating";
    case PodState::Succeeded: return "Succeeded";
    case PodState::Failed: return "Failed";
    case PodState::Preempted: return "Preempted";
  }
  return "?";
}

bool is_terminal(PodState s) {
  return s == PodState::Succeeded || s == PodState::Failed || s == PodState::Preempted;
}

bool transition_allowed(PodState from, PodState to) {
  switch (from) {
    case PodState::Queued:
      return to == PodState::Starting || to == PodState::Failed;
    case PodState::Starting:
      return to == PodState::Running || to == PodState::Failed;
    case PodState::Running:
      return to == PodState::Terminating || to == PodState::Preempted ||
             to == PodState::Succeeded || to == PodState::Failed;
    case PodState::Terminating:
      return to == PodState::Succeeded || to == PodState::Failed;
    default:
      return false;  // terminal states absorb
  }
}

void SimBackend::record(SimTime time, const std::string& pod_id, PodState from,
                        PodState to, std::string detail) {
  if (!transition_allowed(from, to))
    throw std::logic_error(std::string("illegal pod transition ") + to_string(from) +
                           " -> " + to_string(to) + " for " + pod_id);
  log_.push_back(Transition{time, pod_id, from, to, std::move(detail)});
}

void SimBackend::validate_common(const model::PodSpec& spec, std::int64_t count) {
  if (count < 1) throw BackendError("submit_pods: count must be >= 1");
  if (spec.resources.cpus < 1) throw BackendError("pod spec invalid: zero cpus");
  if (spec.resources.memory_mib < 1) throw BackendError("pod spec invalid: zero memory");
  if (spec.resources.gpus < 0) throw BackendError("pod spec invalid: negative gpus");
  if (spec.max_idle_s <= 0 || spec.max_lifetime_s <= spec.max_idle_s)
    throw BackendError("pod spec invalid: lifetime limits must satisfy "
                       "max_lifetime_s > max_idle_s > 0");
}

PriorityTable default_priority_table() {
  return PriorityTable{{"opportunistic2", PriorityClassInfo{10, true}}};
}

namespace {

bool selector_matches(const LabelSelector& selector,
                      const std::map<std::string, std::string>& labels) {
  for (const auto& [k, v] : selector) {
    auto it = labels.find(k);
    if (it == labels.end() || it->second != v) return false;
  }
  return true;
}

std::string format_id(const char* prefix, std::int64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%06lld", prefix, static_cast<long long>(n));
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- SimKube

SimKube::SimKube(std::vector<NodeSpec> nodes, SimTime start_latency_s,
                 PriorityTable table)
    : nodes_(std::move(nodes)), start_latency_(start_latency_s), table_(std::move(table)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return a.node_id < b.node_id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].node_id.empty()) throw BackendError("node_id must be non-empty");
    if (i && nodes_[i].node_id == nodes_[i - 1].node_id)
      throw BackendError("duplicate node_id " + nodes_[i].node_id);
    used_[nodes_[i].node_id] = {};
  }
  if (start_latency_ < 0) throw BackendError("start latency must be >= 0");
}

std::vector<PodRecord> SimKube::list_pods(const LabelSelector& selector) const {
  check_reachable();
  std::vector<PodRecord> out;
  for (const auto& [id, pod] : pods_)
    if (selector_matches(selector, pod.rec.spec.labels)) out.push_back(pod.rec);
  return out;
}

std::vector<std::string> SimKube::submit_pods(const model::PodSpec& spec,
                                              std::int64_t count) {
  check_reachable();
  validate_common(spec, count);
  if (spec.priority_class && !table_.count(*spec.priority_class))
    throw BackendError("pod spec invalid: unknown priority class '" +
                       *spec.priority_class + "'");
  std::vector<std::string> ids;
  for (std::int64_t i = 0; i < count; ++i) {
    Pod pod;
    pod.rec.pod_id = format_id("pod", next_id_++);
    pod.rec.spec = spec;
    pod.rec.unified_state = PodState::Queued;
    pod.rec.submit_time = 0;
    if (spec.priority_class) {
      const PriorityClassInfo& info = table_.at(*spec.priority_class);
      pod.priority = info.value;
      pod.preemptable = info.preemptable;
    }
    ids.push_back(pod.rec.pod_id);
    pods_.emplace(pod.rec.pod_id, std::move(pod));
    ++total_submitted_;
  }
  return ids;
}

bool SimKube::affinity_ok(const model::PodSpec& spec, const NodeSpec& node) const {
  for (const model::AffinityTerm& term : spec.affinity_terms) {
    auto it = node.labels.find(term.label_key);
    bool equal = it != node.labels.end() && it->second == term.label_value;
    if (term.negated ? equal : !equal) return false;
  }
  return true;
}

void SimKube::free_node(Pod& pod) {
  if (pod.rec.node_id) {
    used_[*pod.rec.node_id] -= pod.rec.spec.resources;
    pod.rec.node_id.reset();
  }
}

bool SimKube::try_bind(Pod& pod, SimTime now) {
  for (const NodeSpec& node : nodes_) {
    if (!affinity_ok(pod.rec.spec, node)) continue;
    if (!used_[node.node_id].fits(pod.rec.spec.resources, node.capacity)) continue;
    used_[node.node_id] += pod.rec.spec.resources;
    pod.rec.node_id = node.node_id;
    record(now, pod.rec.pod_id, PodState::Queued, PodState::Starting,
           "bound to " + node.node_id);
    pod.rec.unified_state = PodState::Starting;
    pod.running_due = now + start_latency_;
    return true;
  }
  return false;
}

bool SimKube::try_bind_with_preemption(Pod& pod, SimTime now) {
  const model::ResourceShape& req = pod.rec.spec.resources;
  for (const NodeSpec& node : nodes_) {
    if (!affinity_ok(pod.rec.spec, node)) continue;

    // Eviction candidates: running, preemptable, strictly lower priority.
    std::vector<Pod*> cands;
    for (auto& [id, other] : pods_)
      if (other.rec.unified_state == PodState::Running && other.rec.node_id &&
          *other.rec.node_id == node.node_id && other.preemptable &&
          other.priority < pod.priority)
        cands.push_back(&other);
    if (cands.empty()) continue;
    std::sort(cands.begin(), cands.end(), [](const Pod* a, const Pod* b) {
      if (a->priority != b->priority) return a->priority < b->priority;
      if (a->rec.start_time != b->rec.start_time) return a->rec.start_time < b->rec.start_time;
      return a->rec.pod_id < b->rec.pod_id;
    });

    model::ResourceShape free = node.capacity;
    free -= used_[node.node_id];
    auto sufficient = [&](const std::vector<Pod*>& set) {
      model::ResourceShape total = free;
      for (const Pod* p : set) total += p->rec.spec.resources;
      return req.cpus <= total.cpus && req.memory_mib <= total.memory_mib &&
             req.gpus <= total.gpus;
    };

    // Minimal-count eviction set; candidates are few at desk scale, so
    // enumerate subsets by size. Falls back to greedy beyond 20.
    std::vector<Pod*> chosen;
    if (cands.size() > 20) {
      for (Pod* p : cands) {
        chosen.push_back(p);
        if (sufficient(chosen)) break;
      }
      if (!sufficient(chosen)) chosen.clear();
    } else {
      std::size_t n = cands.size();
      for (std::size_t k = 1; k <= n && chosen.empty(); ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        for (;;) {
          std::vector<Pod*> set;
          for (std::size_t i : idx) set.push_back(cands[i]);
          if (sufficient(set)) {
            chosen = set;
            break;
          }
          // next combination
          std::size_t i = k;
          while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
          if (i == 0) break;
          ++idx[i - 1];
          for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
      }
    }
    if (chosen.empty()) continue;

    for (Pod* victim : chosen) {
      free_node(*victim);
      record(now, victim->rec.pod_id, PodState::Running, PodState::Preempted,
             "evicted for " + pod.rec.pod_id);
      victim->rec.unified_state = PodState::Preempted;
      victim->rec.end_time = now;
    }
    used_[node.node_id] += req;
    pod.rec.node_id = node.node_id;
    record(now, pod.rec.pod_id, PodState::Queued, PodState::Starting,
           "bound to " + node.node_id + " after preemption");
    pod.rec.unified_state = PodState::Starting;
    pod.running_due = now + start_latency_;
    return true;
  }
  return false;
}

std::vector<Transition> SimKube::step(SimTime now) {
  std::size_t mark = log_.size();

  // Terminating pods finish and release their node.
  for (auto& [id, pod] : pods_) {
    if (pod.rec.unified_state == PodState::Terminating) {
      free_node(pod);
      record(now, id, PodState::Terminating, PodState::Succeeded);
      pod.rec.unified_state = PodState::Succeeded;
      pod.rec.end_time = now;
    }
  }

  // Starting pods whose latency elapsed begin running.
  for (auto& [id, pod] : pods_) {
    if (pod.rec.unified_state == PodState::Starting && pod.running_due &&
        *pod.running_due <= now) {
      record(now, id, PodState::Starting, PodState::Running);
      pod.rec.unified_state = PodState::Running;
      pod.rec.start_time = now;
      pod.running_due.reset();
    }
  }

  // Bind queued pods, highest priority first, FIFO within a priority.
  std::vector<Pod*> queued;
  for (auto& [id, pod] : pods_)
    if (pod.rec.unified_state == PodState::Queued) queued.push_back(&pod);
  std::sort(queued.begin(), queued.end(), [](const Pod* a, const Pod* b) {
    if (a->priority != b->priority) return a->priority > b->priority;
    if (a->rec.submit_time != b->rec.submit_time)
      return a->rec.submit_time < b->rec.submit_time;
    return a->rec.pod_id < b->rec.pod_id;
  });
  bool progress = true;
  while (progress) {
    progress = false;
    for (Pod* pod : queued) {
      if (pod->rec.unified_state != PodState::Queued) continue;
      if (try_bind(*pod, now) || try_bind_with_preemption(*pod, now)) progress = true;
    }
  }

  return {log_.begin() + static_cast<std::ptrdiff_t>(mark), log_.end()};
}

void SimKube::request_termination(const std::string& pod_id, SimTime now) {
  auto it = pods_.find(pod_id);
  if (it == pods_.end()) throw std::logic_error("request_termination: no pod " + pod_id);
  Pod& pod = it->second;
  if (pod.rec.unified_state != PodState::Running)
    throw std::logic_error("request_termination: pod " + pod_id + " is not Running");
  record(now, pod_id, PodState::Running, PodState::Terminating, "self-termination");
  pod.rec.unified_state = PodState::Terminating;
}

std::optional<SimTime> SimKube::next_wakeup() const {
  std::optional<SimTime> due;
  for (const auto& [id, pod] : pods_) {
    if (pod.rec.unified_state == PodState::Starting && pod.running_due)
      if (!due || *pod.running_due < *due) due = pod.running_due;
    if (pod.rec.unified_state == PodState::Terminating) return log_.empty() ? due : std::optional<SimTime>(log_.back().time);
  }
  return due;
}

std::int64_t SimKube::live_pod_count() const {
  std::int64_t n = 0;
  for (const auto& [id, pod] : pods_)
    if (!is_terminal(pod.rec.unified_state)) ++n;
  return n;
}

model::ResourceShape SimKube::node_usage(const std::string& node_id) const {
  auto it = used_.find(node_id);
  if (it == used_.end()) throw BackendError("no node " + node_id);
  return it->second;
}

// ------------------------------------------------------------ SimLancium

const char* to_string(LanciumPhase p) {
  switch (p) {
    case LanciumPhase::Created: return "created";
    case LanciumPhase::Submitted: return "submitted";
    case LanciumPhase::Queued: return "queued";
    case LanciumPhase::Running: return "running";
    case LanciumPhase::Finished: return "finished";
    case LanciumPhase::Error: return "error";
  }
  return "?";
}

PodState unified_state(const LanciumJobRecord& rec) {
  switch (rec.phase) {
    case LanciumPhase::Created:
    case LanciumPhase::Submitted:
      return PodState::Queued;
    case LanciumPhase::Queued:
      return rec.allocated ? PodState::Starting : PodState::Queued;
    case LanciumPhase::Running:
      return PodState::Running;
    case LanciumPhase::Finished:
      return PodState::Succeeded;
    case LanciumPhase::Error:
      return PodState::Failed;
  }
  return PodState::Failed;
}

SimLancium::SimLancium(model::ResourceShape capacity, SimTime start_latency_s)
    : capacity_(capacity), start_latency_(start_latency_s) {
  if (capacity_.cpus < 1) throw BackendError("aggregate capacity needs cpus >= 1");
  if (start_latency_ < 0) throw BackendError("start latency must be >= 0");
}

PodRecord SimLancium::to_pod_record(const LanciumJobRecord& rec) const {
  PodRecord out;
  out.pod_id = rec.lancium_id;
  out.spec = rec.payload;
  out.unified_state = unified_state(rec);
  out.submit_time = rec.submit_time;
  out.start_time = rec.start_time;
  out.end_time = rec.end_time;
  return out;
}

LanciumJobRecord& SimLancium::find(const std::string& id) {
  for (auto& rec : records_)
    if (rec.lancium_id == id) return rec;
  throw std::logic_error("no lancium record " + id);
}

std::vector<PodRecord> SimLancium::list_pods(const LabelSelector& selector) const {
  check_reachable();
  std::vector<PodRecord> out;
  for (const auto& rec : records_)
    if (selector_matches(selector, rec.payload.labels)) out.push_back(to_pod_record(rec));
  return out;  // records_ is in id order already
}

std::vector<std::string> SimLancium::submit_pods(const model::PodSpec& spec,
                                                 std::int64_t count) {
  check_reachable();
  validate_common(spec, count);
  if (spec.priority_class)
    warnings_.push_back("priority class '" + *spec.priority_class +
                        "' not supported, ignored");
  if (!spec.affinity_terms.empty())
    warnings_.push_back("affinity terms not supported, ignored");
  std::vector<std::string> ids;
  for (std::int64_t i = 0; i < count; ++i) {
    LanciumJobRecord rec;
    rec.lancium_id = format_id("lj", next_id_++);
    rec.payload = spec;
    rec.phase = LanciumPhase::Created;
    rec.phase_history.push_back(LanciumPhase::Created);
    // Second protocol phase: submit the created record.
    rec.phase = LanciumPhase::Submitted;
    rec.phase_history.push_back(LanciumPhase::Submitted);
    ids.push_back(rec.lancium_id);
    records_.push_back(std::move(rec));
    ++total_submitted_;
  }
  return ids;
}

std::vector<Transition> SimLancium::step(SimTime now) {
  std::size_t mark = log_.size();

  // Admission: submitted records enter the service queue.
  for (auto& rec : records_) {
    if (rec.phase == LanciumPhase::Submitted) {
      rec.phase = LanciumPhase::Queued;
      rec.phase_history.push_back(LanciumPhase::Queued);
      // unified state unchanged (still Queued)
    }
  }

  // Allocated records whose start latency elapsed begin running.
  for (auto& rec : records_) {
    if (rec.phase == LanciumPhase::Queued && rec.allocated && rec.running_due &&
        *rec.running_due <= now) {
      record(now, rec.lancium_id, PodState::Starting, PodState::Running);
      rec.phase = LanciumPhase::Running;
      rec.phase_history.push_back(LanciumPhase::Running);
      rec.start_time = now;
      rec.running_due.reset();
    }
  }

  // First-fit allocation in submission order against aggregate capacity.
  for (auto& rec : records_) {
    if (rec.phase != LanciumPhase::Queued || rec.allocated) continue;
    if (!used_.fits(rec.payload.resources, capacity_)) continue;
    used_ += rec.payload.resources;
    rec.allocated = true;
    rec.allocated_at = now;
    rec.running_due = now + start_latency_;
    record(now, rec.lancium_id, PodState::Queued, PodState::Starting, "allocated");
  }

  return {log_.begin() + static_cast<std::ptrdiff_t>(mark), log_.end()};
}

void SimLancium::request_termination(const std::string& pod_id, SimTime now) {
  LanciumJobRecord& rec = find(pod_id);
  if (rec.phase != LanciumPhase::Running)
    throw std::logic_error("request_termination: record " + pod_id + " is not running");
  record(now, pod_id, PodState::Running, PodState::Terminating, "self-termination");
  record(now, pod_id, PodState::Terminating, PodState::Succeeded);
  rec.phase = LanciumPhase::Finished;
  rec.phase_history.push_back(LanciumPhase::Finished);
  rec.end_time = now;
  rec.allocated = false;
  used_ -= rec.payload.resources;
}

std::optional<SimTime> SimLancium::next_wakeup() const {
  std::optional<SimTime> due;
  for (const auto& rec : records_) {
    if (rec.phase == LanciumPhase::Queued && rec.allocated && rec.running_due)
      if (!due || *rec.running_due < *due) due = rec.running_due;
    // Freshly submitted records need one step for admission+allocation.
    if (rec.phase == LanciumPhase::Submitted && !due) due = rec.submit_time;
  }
  return due;
}

std::int64_t SimLancium::live_pod_count() const {
  std::int64_t n = 0;
  for (const auto& rec : records_)
    if (!is_terminal(unified_state(rec))) ++n;
  return n;
}

}  // namespace glidepod::backends
