// Copyright 2026 The cnat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cnat::data {

/// Flat key=value file with [section] headers and '#' comments. Keys are
/// addressed as "section.key" (or bare "key" before the first section).
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Section names in file order (a repeated header is listed once).
  const std::vector<std::string>& sections() const { return sections_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::vector<std::string> sections_;
  std::map<std::string, std::string> values_;
};

}  // namespace cnat::data
