/**
 * Copyright 2026 The ttaforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Flat "key = value" run configuration. Blank lines and '#' comments are
// ignored; unknown or repeated keys are errors.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ttaforge/adapt.hpp"

namespace ttaforge {

struct ParsedConfig {
  AdaptationConfig config;
  /// Keys present in the source, in order of appearance.
  std::vector<std::string> keys;
  bool has(std::string_view key) const;
};

ParsedConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ParsedConfig load_config(const std::filesystem::path& path);

/// Every key with its value; parse_config(render_config(c)).config == c.
std::string render_config(const AdaptationConfig& config);

/// All accepted keys.
const std::vector<std::string>& config_keys();

}  // namespace ttaforge
