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

#include <stdexcept>
#include <string>

namespace icugaze {

// Every failure raised by the engine derives from Error. The CLI maps the
// three families (parse, validation, runtime) onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RuntimeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// geometry-core
class FrameMismatch : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class NoPath : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class Extrapolation : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// camera-model
class BehindCamera : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// head-pose
class OutOfRange : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class Degenerate : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class NoConvergence : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class ConsensusFailure : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// evaluation
class EmptyTrial : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooFewSamples : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptySet : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// synthetic-oracle
class InvalidScenario : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace icugaze
