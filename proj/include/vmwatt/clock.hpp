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

#ifndef VMWATT_CLOCK_HPP_
#define VMWATT_CLOCK_HPP_

#include <deque>
#include <functional>

#include "vmwatt/types.hpp"

namespace vmwatt {

// Time source for the sampling loops. Tests drive a ManualClock so a one
// hour collection finishes instantly.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual EpochSeconds now() = 0;
  virtual void sleep_until(EpochSeconds deadline) = 0;
};

class SystemClock final : public Clock {
 public:
  EpochSeconds now() override;
  void sleep_until(EpochSeconds deadline) override;
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(EpochSeconds start) : current_(start) {}

  EpochSeconds now() override;
  void sleep_until(EpochSeconds deadline) override;

  // Called after every advance with the new time; lets tests mutate fake
  // counter files between ticks.
  void set_on_advance(std::function<void(EpochSeconds)> hook) {
    on_advance_ = std::move(hook);
  }

  // The next now() calls return these readings once each, in order, before
  // falling back to the simulated time. Used to fake clock jumps.
  void inject_reading(EpochSeconds reading) { injected_.push_back(reading); }

 private:
  EpochSeconds current_;
  std::deque<EpochSeconds> injected_;
  std::function<void(EpochSeconds)> on_advance_;
};

}  // namespace vmwatt

#endif  // VMWATT_CLOCK_HPP_
