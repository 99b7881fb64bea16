/*
 * Copyright 2026 The icu-gaze Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Sectioned key = value configuration files for the pipeline and for
// synthetic scenarios. Unknown sections or keys are parse errors; omitted
// keys keep their defaults.

#include "icugaze/pipeline.hpp"
#include "icugaze/synthetic.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace icugaze::io {

// Throws ParseError for malformed text, unknown keys or unparsable values,
// ValidationError when the result fails PipelineConfig::validate().
PipelineConfig parse_config(std::string_view text);
std::string format_config(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

// Starts from Scenario::replicated_lab(). Vectors are written "x y z",
// event lists "start-end, start-end" in seconds. Extra planes live in
// sections named plane0, plane1, ...
Scenario parse_scenario(std::string_view text);
std::string format_scenario(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace icugaze::io
