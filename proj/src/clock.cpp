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

#include "vmwatt/clock.hpp"

#include <chrono>
#include <thread>

namespace vmwatt {

EpochSeconds SystemClock::now() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_until(EpochSeconds deadline) {
  using namespace std::chrono;
  auto wait = deadline - now();
  if (wait > 0) std::this_thread::sleep_for(duration<double>(wait));
}

EpochSeconds ManualClock::now() {
  if (!injected_.empty()) {
    auto reading = injected_.front();
    injected_.pop_front();
    return reading;
  }
  return current_;
}

void ManualClock::sleep_until(EpochSeconds deadline) {
  if (deadline > current_) current_ = deadline;
  if (on_advance_) on_advance_(current_);
}

}  // namespace vmwatt
