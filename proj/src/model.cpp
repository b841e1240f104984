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

#include "glidepod/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>

namespace glidepod::model {

const char* to_string(JobState state) {
  switch (state) {
    case JobState::Idle: return "idle";
    case JobState::Running: return "running";
    case JobState::Completed: return "completed";
  }
  return "?";
}

std::int64_t job_status_code(JobState state) {
  switch (state) {
    case JobState::Idle: return kJobStatusIdle;
    case JobState::Running: return kJobStatusRunning;
    case JobState::Completed: return kJobStatusCompleted;
  }
  return 0;
}

// ----------------------------------------------------------------- JobAd

namespace {

std::int64_t integer_attr(const expr::AttrBag& attrs, const char* name,
                          std::int64_t absent) {
  expr::Value v = attrs.get(name);
  if (v.is_undefined()) return absent;
  if (v.kind() != expr::ValueKind::Integer)
    throw ModelError(std::string(name) + " must be an integer");
  return v.as_integer();
}

}  // namespace

std::int64_t JobAd::request_cpus() const {
  return integer_attr(attrs, kAttrRequestCpus, -1);
}

std::int64_t JobAd::request_memory() const {
  return integer_attr(attrs, kAttrRequestMemory, -1);
}

std::int64_t JobAd::request_gpus() const {
  return integer_attr(attrs, kAttrRequestGpus, 0);
}

void JobAd::validate() const {
  if (job_id.empty()) throw ModelError("job_id must be non-empty");
  if (request_cpus() < 1) throw ModelError(job_id + ": RequestCpus must be >= 1");
  if (request_memory() < 1) throw ModelError(job_id + ": RequestMemory must be >= 1");
  if (request_gpus() < 0) throw ModelError(job_id + ": RequestGpus must be >= 0");
}

// ------------------------------------------------------------ ClusterKey

expr::Value ClusterKey::value_of(std::string_view attr) const {
  std::string folded = expr::fold_case(attr);
  for (const Entry& e : entries_)
    if (expr::fold_case(e.first) == folded) return e.second;
  return expr::Value::undefined();
}

std::string ClusterKey::render() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out.push_back(',');
    out += entries_[i].first;
    out.push_back('=');
    out += entries_[i].second.render();
  }
  return out;
}

std::string ClusterKey::hash() const {
  // FNV-1a 64 over the canonical rendering.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : render()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

bool ClusterKey::operator==(const ClusterKey& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first != other.entries_[i].first) return false;
    if (!(entries_[i].second == other.entries_[i].second)) return false;
  }
  return true;
}

ClusterKey cluster_key(const JobAd& job, const std::vector<std::string>& key_attrs) {
  if (key_attrs.empty()) throw ModelError("cluster key attribute list is empty");
  std::vector<ClusterKey::Entry> entries;
  entries.reserve(key_attrs.size());
  for (const std::string& attr : key_attrs)
    entries.emplace_back(attr, job.attrs.get(attr));
  return ClusterKey(std::move(entries));
}

std::vector<JobCluster> cluster_jobs(const std::vector<JobAd>& jobs,
                                     const std::vector<std::string>& key_attrs) {
  std::map<ClusterKey, std::vector<std::string>> groups;
  for (const JobAd& job : jobs) {
    if (job.state != JobState::Idle)
      throw ModelError("cluster_jobs: job " + job.job_id + " is not idle");
    groups[cluster_key(job, key_attrs)].push_back(job.job_id);
  }
  std::vector<JobCluster> out;
  out.reserve(groups.size());
  for (auto& [key, ids] : groups) out.push_back(JobCluster{key, std::move(ids)});
  std::stable_sort(out.begin(), out.end(), [](const JobCluster& a, const JobCluster& b) {
    if (a.idle_count() != b.idle_count()) return a.idle_count() > b.idle_count();
    return a.key.render() < b.key.render();
  });
  return out;
}

// --------------------------------------------------------- ResourceShape

ResourceShape& ResourceShape::operator+=(const ResourceShape& o) {
  cpus += o.cpus;
  memory_mib += o.memory_mib;
  gpus += o.gpus;
  return *this;
}

ResourceShape& ResourceShape::operator-=(const ResourceShape& o) {
  cpus -= o.cpus;
  memory_mib -= o.memory_mib;
  gpus -= o.gpus;
  return *this;
}

bool ResourceShape::fits(const ResourceShape& extra, const ResourceShape& capacity) const {
  return cpus + extra.cpus <= capacity.cpus &&
         memory_mib + extra.memory_mib <= capacity.memory_mib &&
         gpus + extra.gpus <= capacity.gpus;
}

AffinityTerm parse_affinity_entry(std::string_view entry) {
  AffinityTerm term;
  if (!entry.empty() && entry.front() == '^') {
    term.negated = true;
    entry.remove_prefix(1);
  }
  std::size_t colon = entry.find(':');
  if (colon == std::string_view::npos || colon == 0)
    throw ModelError("malformed affinity entry '" + std::string(entry) +
                     "', expected [^]key:value");
  term.label_key = std::string(entry.substr(0, colon));
  term.label_value = std::string(entry.substr(colon + 1));
  return term;
}

// ------------------------------------------------------------ scalars

expr::Value parse_scalar(std::string_view text) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      if (text[i] == '\\' && i + 2 < text.size()) ++i;
      out.push_back(text[i]);
    }
    return expr::Value::string(out);
  }
  std::string folded = expr::fold_case(text);
  if (folded == "true") return expr::Value::boolean(true);
  if (folded == "false") return expr::Value::boolean(false);
  if (folded == "undefined") return expr::Value::undefined();

  if (!text.empty()) {
    std::int64_t i = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), i);
    if (res.ec == std::errc() && res.ptr == text.data() + text.size())
      return expr::Value::integer(i);
    char* end = nullptr;
    std::string owned(text);
    double d = std::strtod(owned.c_str(), &end);
    if (end == owned.c_str() + owned.size() &&
        owned.find_first_of("0123456789") != std::string::npos &&
        owned.find_first_not_of("+-.0123456789eE") == std::string::npos)
      return expr::Value::real(d);
  }
  return expr::Value::string(std::string(text));
}

// ---------------------------------------------------------------- config

namespace {

std::int64_t parse_int_value(const ini::Entry& e) {
  std::int64_t v = 0;
  auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size())
    throw ConfigError(e.line, "key '" + e.key + "': expected an integer, got '" +
                                  e.value + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t t = s.find_last_not_of(" \t");
    s = (b == std::string::npos) ? "" : s.substr(b, t - b + 1);
  }
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

}  // namespace

void ProvisionerConfig::validate() const {
  if (poll_interval_s <= 0) throw ConfigError(0, "poll_interval_s must be > 0");
  if (max_submit_pods_per_cluster < 1)
    throw ConfigError(0, "max_submit_pods_per_cluster must be >= 1");
  if (max_idle_s <= 0) throw ConfigError(0, "max_idle_s must be > 0");
  if (max_lifetime_s <= max_idle_s)
    throw ConfigError(0, "max_lifetime_s must exceed max_idle_s");
  if (cluster_key_attrs.empty())
    throw ConfigError(0, "cluster_key_attrs must name at least one attribute");
  if (backend_name != "simkube" && backend_name != "simlancium")
    throw ConfigError(0, "backend_name must be simkube or simlancium");
  if (provisioner_id.empty()) throw ConfigError(0, "provisioner_id must be non-empty");
  for (const std::string& entry : node_affinity_dict) {
    try {
      parse_affinity_entry(entry);
    } catch (const ModelError& e) {
      throw ConfigError(0, e.what());
    }
  }
}

ProvisionerConfig parse_config(std::string_view text) {
  ProvisionerConfig cfg;
  auto sections = ini::parse(text);

  for (const ini::Section& section : sections) {
    for (const ini::Entry& e : section.entries) {
      if (section.name == "HTCondor") {
        if (e.key == "additional_requirements") {
          cfg.additional_requirements = e.value;
        } else {
          throw ConfigError(e.line, "unknown key '" + e.key + "' in [HTCondor]");
        }
      } else if (section.name == "k8s") {
        if (e.key == "node_affinity_dict") {
          cfg.node_affinity_dict = split_csv(e.value);
          for (const std::string& entry : cfg.node_affinity_dict) {
            try {
              parse_affinity_entry(entry);
            } catch (const ModelError& err) {
              throw ConfigError(e.line, err.what());
            }
          }
        } else if (e.key == "priority_class") {
          cfg.priority_class = e.value;
        } else if (e.key == "image_ref") {
          cfg.image_ref = e.value;
        } else {
          throw ConfigError(e.line, "unknown key '" + e.key + "' in [k8s]");
        }
      } else if (section.name == "provisioner") {
        if (e.key == "poll_interval_s") {
          cfg.poll_interval_s = parse_int_value(e);
          if (cfg.poll_interval_s <= 0)
            throw ConfigError(e.line, "poll_interval_s must be > 0");
        } else if (e.key == "cluster_key_attrs") {
          cfg.cluster_key_attrs = split_csv(e.value);
          if (cfg.cluster_key_attrs.empty())
            throw ConfigError(e.line, "cluster_key_attrs must be non-empty");
        } else if (e.key == "max_submit_pods_per_cluster") {
          cfg.max_submit_pods_per_cluster = parse_int_value(e);
          if (cfg.max_submit_pods_per_cluster < 1)
            throw ConfigError(e.line, "max_submit_pods_per_cluster must be >= 1");
        } else if (e.key == "max_lifetime_s") {
          cfg.max_lifetime_s = parse_int_value(e);
        } else if (e.key == "max_idle_s") {
          cfg.max_idle_s = parse_int_value(e);
        } else if (e.key == "backend_name") {
          cfg.backend_name = e.value;
        } else if (e.key == "provisioner_id") {
          cfg.provisioner_id = e.value;
        } else if (e.key == "secret_ref") {
          cfg.secret_ref = e.value;
        } else if (e.key == "site") {
          cfg.site = e.value;
        } else {
          throw ConfigError(e.line, "unknown key '" + e.key + "' in [provisioner]");
        }
      } else if (section.name == "pool") {
        if (e.key == "expected_secret") {
          cfg.pool_expected_secret = e.value;
        } else {
          throw ConfigError(e.line, "unknown key '" + e.key + "' in [pool]");
        }
      } else {
        throw ConfigError(section.line, "unknown section [" + section.name + "]");
      }
    }
  }

  if (!cfg.additional_requirements.empty()) {
    try {
      cfg.requirements = expr::parse(cfg.additional_requirements);
    } catch (const expr::ParseError& e) {
      int line = 0;
      for (const ini::Section& s : sections)
        if (s.name == "HTCondor")
          if (const ini::Entry* entry = s.find("additional_requirements"))
            line = entry->line;
      throw ConfigError(line, std::string("additional_requirements: ") + e.what());
    }
  } else {
    cfg.requirements = expr::always_true();
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    if (e.line() != 0) throw;
    // Re-anchor cross-key violations to the most relevant entry.
    int line = 0;
    for (const ini::Section& s : sections)
      for (const ini::Entry& entry : s.entries)
        if (entry.key == "max_idle_s" || entry.key == "max_lifetime_s")
          line = std::max(line, entry.line);
    throw ConfigError(line, e.message());
  }
  return cfg;
}

std::string render_config(const ProvisionerConfig& cfg) {
  std::ostringstream out;
  out << "[HTCondor]\n";
  if (!cfg.additional_requirements.empty())
    out << "additional_requirements=" << expr::render(cfg.requirements) << "\n";
  out << "\n[k8s]\n";
  if (!cfg.node_affinity_dict.empty()) {
    out << "node_affinity_dict=";
    for (std::size_t i = 0; i < cfg.node_affinity_dict.size(); ++i) {
      if (i) out << ",";
      out << cfg.node_affinity_dict[i];
    }
    out << "\n";
  }
  if (cfg.priority_class) out << "priority_class=" << *cfg.priority_class << "\n";
  out << "image_ref=" << cfg.image_ref << "\n";
  out << "\n[provisioner]\n";
  out << "poll_interval_s=" << cfg.poll_interval_s << "\n";
  out << "cluster_key_attrs=";
  for (std::size_t i = 0; i < cfg.cluster_key_attrs.size(); ++i) {
    if (i) out << ",";
    out << cfg.cluster_key_attrs[i];
  }
  out << "\n";
  out << "max_submit_pods_per_cluster=" << cfg.max_submit_pods_per_cluster << "\n";
  out << "max_lifetime_s=" << cfg.max_lifetime_s << "\n";
  out << "max_idle_s=" << cfg.max_idle_s << "\n";
  out << "backend_name=" << cfg.backend_name << "\n";
  out << "provisioner_id=" << cfg.provisioner_id << "\n";
  out << "secret_ref=" << cfg.secret_ref << "\n";
  if (!cfg.site.empty()) out << "site=" << cfg.site << "\n";
  out << "\n[pool]\n";
  out << "expected_secret=" << cfg.pool_expected_secret << "\n";
  return out.str();
}

bool operator==(const ProvisionerConfig& a, const ProvisionerConfig& b) {
  return a.poll_interval_s == b.poll_interval_s &&
         a.cluster_key_attrs == b.cluster_key_attrs &&
         a.max_submit_pods_per_cluster == b.max_submit_pods_per_cluster &&
         a.max_lifetime_s == b.max_lifetime_s && a.max_idle_s == b.max_idle_s &&
         a.backend_name == b.backend_name && a.provisioner_id == b.provisioner_id &&
         a.secret_ref == b.secret_ref && a.site == b.site &&
         expr::structurally_equal(a.requirements, b.requirements) &&
         a.node_affinity_dict == b.node_affinity_dict &&
         a.priority_class == b.priority_class && a.image_ref == b.image_ref &&
         a.pool_expected_secret == b.pool_expected_secret;
}

PodSpec pod_spec_for(const JobCluster& cluster, const ProvisionerConfig& cfg) {
  const ClusterKey& key = cluster.key;

  auto sized = [&](const char* attr) -> std::int64_t {
    expr::Value v = key.value_of(attr);
    if (v.kind() != expr::ValueKind::Integer || v.as_integer() < 1)
      throw ModelError(std::string("cluster key lacks a usable ") + attr +
                       " (cannot size a pod): key=" + key.render());
    return v.as_integer();
  };

  PodSpec spec;
  spec.cluster_key = key;
  spec.resources.cpus = sized(kAttrRequestCpus);
  spec.resources.memory_mib = sized(kAttrRequestMemory);
  expr::Value gpus = key.value_of(kAttrRequestGpus);
  spec.resources.gpus =
      gpus.kind() == expr::ValueKind::Integer ? gpus.as_integer() : 0;

  spec.image_ref = cfg.image_ref;
  spec.priority_class = cfg.priority_class;
  for (const std::string& entry : cfg.node_affinity_dict)
    spec.affinity_terms.push_back(parse_affinity_entry(entry));
  spec.labels[kLabelProvisionerId] = cfg.provisioner_id;
  spec.labels[kLabelClusterHash] = key.hash();
  for (const auto& [name, value] : key.entries()) spec.injected_attrs.set(name, value);
  spec.injected_attrs.set(kAttrProvisionerId, expr::Value::string(cfg.provisioner_id));
  if (!cfg.site.empty())
    spec.injected_attrs.set(kAttrSite, expr::Value::string(cfg.site));
  spec.secret_ref = cfg.secret_ref;
  spec.max_lifetime_s = cfg.max_lifetime_s;
  spec.max_idle_s = cfg.max_idle_s;
  return spec;
}

}  // namespace glidepod::model
