/*
 * Copyright 2026 The vmwatt Authors.
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

#ifndef VMWATT_ERROR_HPP_
#define VMWATT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace vmwatt {

enum class ErrorKind {
  kConfig,              // invalid parameters or configuration file content
  kParse,               // malformed input file; message carries the location
  kSchema,              // feature names / header ordering mismatch
  kData,                // non-finite or otherwise unusable values
  kShape,               // vector length mismatch
  kNotFound,            // input path does not exist
  kUnsupportedVersion,  // model file version we cannot read
  kJoin,                // no overlap between two logs
  kUndefinedMetric,     // e.g. R^2 of a constant target
  kBoundViolation,      // thinning bound exceeded
  kTiming,              // non-positive time delta
  kCollection,          // counter source unreadable at runtime
  kIo,                  // write failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for an error: 2 for bad input data or configuration,
// 3 for failures that happen while running against live sources and sinks.
int exit_code_for(ErrorKind kind);

}  // namespace vmwatt

#endif  // VMWATT_ERROR_HPP_
