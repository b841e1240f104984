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
#include <string_view>
#include <vector>

#include "glidepod/expr.hpp"
#include "glidepod/ini.hpp"

// Job, cluster, pod-spec and configuration data model: how idle jobs are
// grouped by their resource shape and turned into pod submissions.
namespace glidepod::model {

using SimTime = std::int64_t;  // virtual seconds

class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

enum class JobState { Idle, Running, Completed };
const char* to_string(JobState state);

// Conventional JobStatus encoding used in query constraints.
inline constexpr std::int64_t kJobStatusIdle = 1;
inline constexpr std::int64_t kJobStatusRunning = 2;
inline constexpr std::int64_t kJobStatusCompleted = 4;
std::int64_t job_status_code(JobState state);

// Well-known attribute and label names.
inline constexpr const char* kAttrRequestCpus = "RequestCpus";
inline constexpr const char* kAttrRequestMemory = "RequestMemory";
inline constexpr const char* kAttrRequestGpus = "RequestGpus";
inline constexpr const char* kAttrProvisionerId = "ProvisionerId";
inline constexpr const char* kAttrSite = "GLIDEIN_Site";
inline constexpr const char* kLabelProvisionerId = "provisioner_id";
inline constexpr const char* kLabelClusterHash = "cluster_hash";

struct JobAd {
  std::string job_id;
  expr::AttrBag attrs;
  JobState state = JobState::Idle;
  SimTime submit_time = 0;

  std::int64_t request_cpus() const;
  std::int64_t request_memory() const;
  std::int64_t request_gpus() const;  // absent reads as 0

  // Resource-request invariants; throws ModelError on violation.
  void validate() const;
};

// Ordered projection of a job's attributes onto the configured key
// attributes; absence appears as the undefined value.
class ClusterKey {
 public:
  using Entry = std::pair<std::string, expr::Value>;

  ClusterKey() = default;
  explicit ClusterKey(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  const std::vector<Entry>& entries() const { return entries_; }
  expr::Value value_of(std::string_view attr) const;

  // Canonical "name=value,..." form, also the tie-break sort key.
  std::string render() const;
  // Stable 64-bit FNV-1a digest of the canonical form, hex encoded.
  // Equal keys hash identically across process runs.
  std::string hash() const;

  bool operator==(const ClusterKey& other) const;
  bool operator!=(const ClusterKey& other) const { return !(*this == other); }
  bool operator<(const ClusterKey& other) const { return render() < other.render(); }

 private:
  std::vector<Entry> entries_;
};

struct JobCluster {
  ClusterKey key;
  std::vector<std::string> job_ids;

  std::int64_t idle_count() const { return static_cast<std::int64_t>(job_ids.size()); }
};

ClusterKey cluster_key(const JobAd& job, const std::vector<std::string>& key_attrs);

// Partitions idle jobs by cluster key. Output is ordered by descending
// idle count, ties by the lexicographic key rendering. Throws ModelError
// if a non-idle job is passed.
std::vector<JobCluster> cluster_jobs(const std::vector<JobAd>& jobs,
                                     const std::vector<std::string>& key_attrs);

struct ResourceShape {
  std::int64_t cpus = 0;
  std::int64_t memory_mib = 0;
  std::int64_t gpus = 0;

  bool operator==(const ResourceShape&) const = default;
  ResourceShape& operator+=(const ResourceShape& o);
  ResourceShape& operator-=(const ResourceShape& o);
  // this + extra fits under capacity in every dimension
  bool fits(const ResourceShape& extra, const ResourceShape& capacity) const;
};

struct AffinityTerm {
  std::string label_key;
  std::string label_value;
  bool negated = false;  // schedule only where label != value (or absent)

  bool operator==(const AffinityTerm&) const = default;
};

// Parses one node_affinity_dict entry of the form `key:value` with an
// optional leading `^` marking negation.
AffinityTerm parse_affinity_entry(std::string_view entry);

struct PodSpec {
  ClusterKey cluster_key;
  ResourceShape resources;
  std::string image_ref;
  std::optional<std::string> priority_class;  // absent = no priority field
  std::vector<AffinityTerm> affinity_terms;
  std::map<std::string, std::string> labels;  // provisioner_id, cluster_hash
  expr::AttrBag injected_attrs;               // worker must advertise these
  std::string secret_ref;                     // opaque auth token name
  SimTime max_lifetime_s = 0;
  SimTime max_idle_s = 0;
};

struct ProvisionerConfig {
  // [provisioner]
  SimTime poll_interval_s = 60;
  std::vector<std::string> cluster_key_attrs{kAttrRequestCpus, kAttrRequestMemory,
                                             kAttrRequestGpus};
  std::int64_t max_submit_pods_per_cluster = 100;
  SimTime max_lifetime_s = 86400;
  SimTime max_idle_s = 1200;
  std::string backend_name = "simkube";
  std::string provisioner_id = "prov-1";
  std::string secret_ref = "pool-token";
  std::string site;  // advertised GLIDEIN_Site; empty = none

  // [HTCondor]
  std::string additional_requirements;  // raw text, "" = always true
  expr::ExprNode requirements = expr::always_true();

  // [k8s]
  std::vector<std::string> node_affinity_dict;  // raw entries
  std::optional<std::string> priority_class;
  std::string image_ref = "pilot-worker:latest";

  // [pool]
  std::string pool_expected_secret = "pool-token";

  // Invariant checks beyond per-key parsing; throws ConfigError.
  void validate() const;
};

bool operator==(const ProvisionerConfig& a, const ProvisionerConfig& b);

// Parses and validates the INI-style admin configuration. Sections
// [HTCondor], [k8s], [provisioner], [pool]; unknown keys are rejected.
ProvisionerConfig parse_config(std::string_view text);

// Canonical dump; parse_config(render_config(c)) == c.
std::string render_config(const ProvisionerConfig& config);

// Builds the pod spec submitted for one job cluster: resources sized from
// the key (undefined GPUs read as 0), cluster-key attributes injected for
// advertisement, affinity terms parsed from the raw config entries.
PodSpec pod_spec_for(const JobCluster& cluster, const ProvisionerConfig& config);

// Scalar typing used by scenario attribute templates and CLI assignments:
// integers, reals, booleans and `undefined` by shape, quoted or bare strings
// otherwise.
expr::Value parse_scalar(std::string_view text);

}  // namespace glidepod::model
