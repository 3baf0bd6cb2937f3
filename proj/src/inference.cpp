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

#include "vmwatt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "vmwatt/csv.hpp"
#include "vmwatt/error.hpp"

namespace vmwatt {

std::size_t infer_live(const InferenceSession& session, double duration,
                       Clock& clock) {
  if (!session.model || !session.source || !session.sink) {
    throw Error(ErrorKind::kConfig, "inference session is incomplete");
  }
  if (session.model->feature_names != default_feature_names()) {
    std::string names;
    for (const auto& n : session.model->feature_names) {
      names += (names.empty() ? "" : ",") + n;
    }
    throw Error(ErrorKind::kSchema, "model features [" + names +
                                        "] do not match the collector order");
  }
  if (!(session.interval >= 1.0)) {
    throw Error(ErrorKind::kConfig, "inference interval must be >= 1 s");
  }
  if (!(duration >= 0)) throw Error(ErrorKind::kConfig, "duration must be >= 0");

  auto& out = *session.sink;
  out << "timestamp,watts_estimate\n";
  const auto ticks =
      static_cast<std::size_t>(std::floor(duration / session.interval + 1e-9));
  const EpochSeconds start = std::ceil(clock.now());
  EpochSeconds last = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (std::size_t k = 0; k < ticks; ++k) {
    if (session.stop && session.stop->load()) break;
    clock.sleep_until(start + static_cast<double>(k) * session.interval);
    auto sample = session.source->read_sample(std::round(clock.now()));
    if (!sample) break;
    if (sample->timestamp <= last) continue;
    last = sample->timestamp;
    const double watts = std::max(0.0, session.model->predict(sample->values));
    out << csv::format_number(sample->timestamp) << ','
        << csv::format_number(watts) << '\n';
    if (!out.flush()) {
      throw Error(ErrorKind::kIo, "estimate write failed after " +
                                      std::to_string(count) + " rows");
    }
    ++count;
  }
  return count;
}

}  // namespace vmwatt
