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

#ifndef VMWATT_DATASET_HPP_
#define VMWATT_DATASET_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vmwatt/types.hpp"

namespace vmwatt {

inline constexpr std::string_view kDatasetHeader =
    "cpu.total,mem.used,disk.read,disk.write,net.rx,net.tx,watts";

struct JoinOptions {
  double tolerance = 0.5;
  // Baseline / counter-reset metrics rows and implausible power rows are
  // excluded unless this is set.
  bool keep_flagged = false;
};

// What one join did; kept with the dataset so collection glitches stay
// visible after training.
struct JoinSummary {
  std::string metrics_source;
  std::string power_source;
  double tolerance = 0.5;
  bool keep_flagged = false;
  std::size_t matched = 0;
  std::size_t unmatched_metrics = 0;
  std::size_t unmatched_power = 0;
  std::size_t excluded_flagged = 0;

  bool operator==(const JoinSummary&) const = default;
};

struct Provenance {
  std::vector<std::string> sources;
  std::vector<JoinSummary> joins;

  bool operator==(const Provenance&) const = default;
};

struct TrainingDataset {
  std::vector<std::string> feature_names = default_feature_names();
  std::vector<FeatureVector> features;
  std::vector<double> targets;  // watts
  Provenance provenance;

  std::size_t size() const { return targets.size(); }
  bool empty() const { return targets.empty(); }
  void add_row(const FeatureVector& x, double watts) {
    features.push_back(x);
    targets.push_back(watts);
  }
};

// Nearest-timestamp join. Each power row is consumed at most once; among
// competing metrics rows the closer one wins, then the earlier one.
TrainingDataset join(std::span<const MetricsSample> metrics,
                     std::span<const PowerSample> power,
                     const JoinOptions& options = {},
                     std::string metrics_source = "metrics",
                     std::string power_source = "power");

TrainingDataset merge_datasets(std::span<const TrainingDataset> datasets);

void write_dataset_csv(std::ostream& out, const TrainingDataset& dataset);
TrainingDataset read_dataset_csv(std::istream& in,
                                 const std::string& source_name);

// Writes `path` plus a `<path>.provenance.json` sidecar.
void save_dataset(const std::filesystem::path& path,
                  const TrainingDataset& dataset);
TrainingDataset load_dataset(const std::filesystem::path& path);

std::filesystem::path provenance_path(const std::filesystem::path& path);

}  // namespace vmwatt

#endif  // VMWATT_DATASET_HPP_
