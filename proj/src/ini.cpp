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

#include "glidepod/ini.hpp"

namespace glidepod::ini {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::pair<std::string_view, int>> physical_lines(std::string_view text) {
  std::vector<std::pair<std::string_view, int>> lines;
  int number = 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line, number++);
      start = i + 1;
    }
  }
  // Drop a trailing empty line produced by a final newline.
  if (!lines.empty() && lines.back().first.empty()) lines.pop_back();
  return lines;
}

}  // namespace

const Entry* Section::find(std::string_view key) const {
  for (const Entry& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

std::vector<Section> parse(std::string_view text) {
  std::vector<Section> sections;
  auto lines = physical_lines(text);

  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto [line, number] = lines[i];
    std::string_view stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';')
      continue;

    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw ConfigError(number, "malformed section header");
      std::string_view name = trim(stripped.substr(1, stripped.size() - 2));
      if (name.empty()) throw ConfigError(number, "empty section name");
      sections.push_back(Section{std::string(name), number, {}});
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(number, "expected key=value");
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(number, "empty key");
    if (sections.empty())
      throw ConfigError(number, "key '" + key + "' outside any section");

    // Assemble the value, folding backslash line continuations.
    std::string value(line.substr(eq + 1));
    while (!value.empty() && value.back() == '\\') {
      value.pop_back();
      if (i + 1 >= lines.size())
        throw ConfigError(number, "line continuation at end of file");
      ++i;
      value += std::string(lines[i].first);
    }
    Section& section = sections.back();
    for (const Entry& e : section.entries)
      if (e.key == key)
        throw ConfigError(number, "duplicate key '" + key + "' in section [" +
                                      section.name + "]");
    section.entries.push_back(Entry{std::move(key), std::string(trim(value)), number});
  }
  return sections;
}

}  // namespace glidepod::ini
