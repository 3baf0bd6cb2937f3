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

#ifndef VMWATT_INFERENCE_HPP_
#define VMWATT_INFERENCE_HPP_

#include <atomic>
#include <iosfwd>

#include "vmwatt/clock.hpp"
#include "vmwatt/gbrt.hpp"
#include "vmwatt/metrics.hpp"

namespace vmwatt {

struct InferenceSession {
  const GbrModel* model = nullptr;
  MetricsSource* source = nullptr;
  double interval = 1.0;
  std::ostream* sink = nullptr;
  const std::atomic<bool>* stop = nullptr;
};

// Writes `timestamp,watts_estimate` rows, one per tick, for
// floor(duration / interval) ticks or until the source runs dry. Estimates
// are clamped at 0 W. Returns the number of rows written.
std::size_t infer_live(const InferenceSession& session, double duration,
                       Clock& clock);

}  // namespace vmwatt

#endif  // VMWATT_INFERENCE_HPP_
