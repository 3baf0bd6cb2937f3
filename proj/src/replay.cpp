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

#include "vmwatt/replay.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "vmwatt/error.hpp"

namespace vmwatt {
namespace {

void add_error(EventReport& report, const std::string& message) {
  if (std::find(report.errors.begin(), report.errors.end(), message) ==
      report.errors.end()) {
    report.errors.push_back(message);
  }
}

void run_event(const std::string& base_url, const ReplayOptions& options,
               EventReport& report) {
  std::atomic<std::uint64_t> next{0};
  std::mutex mutex;
  auto worker = [&] {
    httplib::Client client(base_url);
    client.set_connection_timeout(std::chrono::duration<double>(options.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(options.timeout_seconds));
    while (next++ < report.requested) {
      auto res = client.Get(report.path);
      std::lock_guard<std::mutex> lock(mutex);
      if (!res) {
        ++report.network_errors;
        add_error(report, httplib::to_string(res.error()));
      } else if (res->status >= 200 && res->status < 400) {
        ++report.completed;
      } else {
        ++report.http_errors;
        add_error(report, "HTTP " + std::to_string(res->status));
      }
    }
  };

  const auto n_workers = std::min(report.concurrency, report.requested);
  if (n_workers <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> workers;
  for (std::uint64_t i = 0; i < n_workers; ++i) workers.emplace_back(worker);
}

}  // namespace

ReplayReport replay_web(const WorkloadSchedule& schedule,
                        const std::string& base_url, Clock& clock,
                        const ReplayOptions& options) {
  if (schedule.kind != WorkloadSchedule::Kind::kWeb) {
    throw Error(ErrorKind::kConfig, "replay needs a web schedule");
  }
  check_schedule(schedule);

  ReplayReport report;
  const EpochSeconds start = clock.now();
  for (std::size_t i = 0; i < schedule.web_events.size(); ++i) {
    const auto& e = schedule.web_events[i];
    EventReport r;
    r.index = i;
    r.arrival_time = e.arrival_time;
    r.path = schedule.paths.path(e.endpoint);
    r.requested = e.n_requests;
    r.concurrency = e.concurrency;
    if (!options.dry_run) {
      clock.sleep_until(start + e.arrival_time);
      run_event(base_url, options, r);
    }
    report.events.push_back(std::move(r));
  }
  return report;
}

std::string replay_report_to_json(const ReplayReport& report) {
  auto events = nlohmann::ordered_json::array();
  std::uint64_t completed = 0;
  std::uint64_t failed = 0;
  for (const auto& e : report.events) {
    completed += e.completed;
    failed += e.http_errors + e.network_errors;
    events.push_back(nlohmann::ordered_json{{"index", e.index},
                                            {"arrival_time", e.arrival_time},
                                            {"path", e.path},
                                            {"requested", e.requested},
                                            {"concurrency", e.concurrency},
                                            {"completed", e.completed},
                                            {"http_errors", e.http_errors},
                                            {"network_errors", e.network_errors},
                                            {"errors", e.errors}});
  }
  nlohmann::ordered_json j{{"n_events", report.events.size()},
                           {"completed", completed},
                           {"failed", failed},
                           {"events", std::move(events)}};
  return j.dump(2) + "\n";
}

}  // namespace vmwatt
