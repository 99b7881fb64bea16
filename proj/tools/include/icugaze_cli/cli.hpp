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

// Command-line front end. Exit codes: 0 success, 1 usage, 2 parse error,
// 3 validation error, 4 runtime failure.

namespace icugaze::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kValidation = 3, kRuntime = 4 };

// Log verbosity comes from ICUGAZE_LOG_LEVEL (trace, debug, info, warn,
// error, critical, off).
int run_cli(int argc, const char* const* argv);

}  // namespace icugaze::cli
