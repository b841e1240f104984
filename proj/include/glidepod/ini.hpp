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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace glidepod {

// Error in a configuration or scenario file, anchored to a 1-based line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line),
        message_(message) {}

  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

namespace ini {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;  // case-sensitive
  int line = 0;
  std::vector<Entry> entries;

  const Entry* find(std::string_view key) const;
};

// INI dialect shared by config and scenario files: `[section]` headers,
// `key=value` entries, `#`/`;` comment lines, and a trailing backslash
// that continues a value onto the next line (backslash and line break
// removed). Repeated section names are preserved in order.
std::vector<Section> parse(std::string_view text);

}  // namespace ini
}  // namespace glidepod
