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

#ifndef VMWATT_REPLAY_HPP_
#define VMWATT_REPLAY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vmwatt/clock.hpp"
#include "vmwatt/workload.hpp"

namespace vmwatt {

struct ReplayOptions {
  bool dry_run = false;  // no requests, no sleeping
  double timeout_seconds = 10;
};

struct EventReport {
  std::size_t index = 0;
  double arrival_time = 0;
  std::string path;
  std::uint64_t requested = 0;
  std::uint64_t concurrency = 0;
  std::uint64_t completed = 0;  // 2xx/3xx responses
  std::uint64_t http_errors = 0;
  std::uint64_t network_errors = 0;
  std::vector<std::string> errors;  // distinct messages
};

struct ReplayReport {
  std::vector<EventReport> events;
};

// Events run one after another, each starting at the schedule start plus
// its arrival time or immediately when running late. Within an event at
// most `concurrency` requests are in flight.
ReplayReport replay_web(const WorkloadSchedule& schedule,
                        const std::string& base_url, Clock& clock,
                        const ReplayOptions& options = {});

std::string replay_report_to_json(const ReplayReport& report);

}  // namespace vmwatt

#endif  // VMWATT_REPLAY_HPP_
