/*
 * Copyright 2026 The genlevel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GENLEVEL_CORE_ERROR_HPP_
#define GENLEVEL_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace genlevel {

enum class ErrorCode {
  kInvalidArgument = 1,
  kIo,
  kParse,
  kValidation,
  kKeyNotFound,
  kNumeric,
  kState,
};

// Base of every exception thrown by the core library. The code is what the
// C API reports; the message is kept verbatim for gl_last_error().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& m) : Error(ErrorCode::kInvalidArgument, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::kIo, m) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& m) : Error(ErrorCode::kParse, m) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error(ErrorCode::kValidation, m) {}
};

class KeyNotFound : public Error {
 public:
  explicit KeyNotFound(const std::string& key)
      : Error(ErrorCode::kKeyNotFound, "KeyNotFound(" + key + ")"), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& m) : Error(ErrorCode::kNumeric, m) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& m) : Error(ErrorCode::kState, m) {}
};

// Warnings (unknown semantic types, fallback decisions) go through a single
// process-wide sink. Defaults to stderr.
using WarningSink = void (*)(const std::string& message);
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace genlevel

#endif  // GENLEVEL_CORE_ERROR_HPP_
