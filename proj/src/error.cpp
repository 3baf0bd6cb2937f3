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

#include "vmwatt/error.hpp"

namespace vmwatt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kNotFound: return "file not found";
    case ErrorKind::kUnsupportedVersion: return "unsupported version";
    case ErrorKind::kJoin: return "join error";
    case ErrorKind::kUndefinedMetric: return "undefined metric";
    case ErrorKind::kBoundViolation: return "bound violation";
    case ErrorKind::kTiming: return "timing error";
    case ErrorKind::kCollection: return "collection error";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTiming:
    case ErrorKind::kCollection:
    case ErrorKind::kIo:
      return 3;
    default:
      return 2;
  }
}

}  // namespace vmwatt
