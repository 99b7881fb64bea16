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

#include "icugaze/errors.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace icugaze::io {

// File I/O failures (missing input, unwritable output).
class IoError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// Writes to a sibling temporary file and renames it over the target on
// commit(). An uncommitted file is removed on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target, bool binary = false);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  const std::filesystem::path& target() const { return target_; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Shortest text that parses back to the same double.
std::string format_double(double v);
// Throws ParseError naming `what` when `text` is not a complete number.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);
unsigned long long parse_uint(std::string_view text, std::string_view what);

std::string_view trim(std::string_view s);

}  // namespace icugaze::io
