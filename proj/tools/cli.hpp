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

#ifndef VMWATT_TOOLS_CLI_HPP_
#define VMWATT_TOOLS_CLI_HPP_

#include <atomic>
#include <iosfwd>

namespace vmwatt::cli {

// Exit codes: 0 success, 1 usage error, 2 data or configuration error,
// 3 runtime failure.
int dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

// Raised by the signal handlers in main; sampling loops stop at the next tick.
std::atomic<bool>& stop_flag();

}  // namespace vmwatt::cli

#endif  // VMWATT_TOOLS_CLI_HPP_
