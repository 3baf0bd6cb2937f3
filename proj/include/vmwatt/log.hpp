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

#ifndef VMWATT_LOG_HPP_
#define VMWATT_LOG_HPP_

#include <string_view>

namespace vmwatt {

// Diagnostics go to stderr unless the CLI was started with --quiet.
void set_quiet(bool quiet);
bool is_quiet();
void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace vmwatt

#endif  // VMWATT_LOG_HPP_
