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

#ifndef VMWATT_TYPES_HPP_
#define VMWATT_TYPES_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vmwatt {

inline constexpr std::size_t kFeatureCount = 6;

// Column order shared by the metrics log, datasets and models.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "cpu.total", "mem.used", "disk.read", "disk.write", "net.rx", "net.tx"};

enum Feature : std::size_t {
  kCpuTotal = 0,
  kMemUsed = 1,
  kDiskRead = 2,
  kDiskWrite = 3,
  kNetRx = 4,
  kNetTx = 5,
};

using FeatureVector = std::array<double, kFeatureCount>;

std::vector<std::string> default_feature_names();

// Seconds since the unix epoch. Collectors write whole seconds; readers
// accept fractional values so offset logs can still be joined.
using EpochSeconds = double;

// Annotations carried in the trailing comment column of metric/power rows.
enum SampleFlag : std::uint32_t {
  kFlagNone = 0,
  kFlagBaseline = 1u << 0,      // first sample, rates have no prior counter
  kFlagCounterReset = 1u << 1,  // a raw counter went backwards
  kFlagImplausible = 1u << 2,   // power above the plausibility ceiling
};

std::string flags_to_comment(std::uint32_t flags);
std::uint32_t flags_from_comment(std::string_view comment);

struct MetricsSample {
  EpochSeconds timestamp = 0;
  FeatureVector values{};  // ordered as kFeatureNames
  std::uint32_t flags = kFlagNone;

  double cpu_total() const { return values[kCpuTotal]; }
  double mem_used() const { return values[kMemUsed]; }

  bool operator==(const MetricsSample&) const = default;
};

struct PowerSample {
  EpochSeconds timestamp = 0;
  double watts = 0;
  long pid = 0;  // informational, not persisted in the CSV
  std::uint32_t flags = kFlagNone;

  bool operator==(const PowerSample& other) const {
    return timestamp == other.timestamp && watts == other.watts &&
           flags == other.flags;
  }
};

}  // namespace vmwatt

#endif  // VMWATT_TYPES_HPP_
