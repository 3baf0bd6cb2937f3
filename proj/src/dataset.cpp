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

#include "vmwatt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "vmwatt/csv.hpp"
#include "vmwatt/error.hpp"

namespace vmwatt {
namespace {

struct Candidate {
  double distance;
  std::size_t metrics_index;
  std::size_t power_index;
};

template <typename Sample>
void require_sorted(std::span<const Sample> rows, const std::string& name) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].timestamp > rows[i - 1].timestamp)) {
      throw Error(ErrorKind::kParse, name + ": row " + std::to_string(i + 1) +
                                         " breaks ascending timestamp order");
    }
  }
}

std::string time_range(double first, double last) {
  return "[" + csv::format_number(first) + ", " + csv::format_number(last) +
         "]";
}

}  // namespace

// Found by ADL from nlohmann::json, so they live in vmwatt proper.
void to_json(nlohmann::json& j, const JoinSummary& s) {
  j = nlohmann::json{{"metrics", s.metrics_source},
                     {"power", s.power_source},
                     {"tolerance", s.tolerance},
                     {"keep_flagged", s.keep_flagged},
                     {"matched", s.matched},
                     {"unmatched_metrics", s.unmatched_metrics},
                     {"unmatched_power", s.unmatched_power},
                     {"excluded_flagged", s.excluded_flagged}};
}

void from_json(const nlohmann::json& j, JoinSummary& s) {
  j.at("metrics").get_to(s.metrics_source);
  j.at("power").get_to(s.power_source);
  j.at("tolerance").get_to(s.tolerance);
  j.at("keep_flagged").get_to(s.keep_flagged);
  j.at("matched").get_to(s.matched);
  j.at("unmatched_metrics").get_to(s.unmatched_metrics);
  j.at("unmatched_power").get_to(s.unmatched_power);
  j.at("excluded_flagged").get_to(s.excluded_flagged);
}

TrainingDataset join(std::span<const MetricsSample> metrics,
                     std::span<const PowerSample> power,
                     const JoinOptions& options, std::string metrics_source,
                     std::string power_source) {
  if (!(options.tolerance >= 0)) {
    throw Error(ErrorKind::kConfig, "join tolerance must be >= 0");
  }
  if (metrics.empty() || power.empty()) {
    throw Error(ErrorKind::kJoin,
                std::string(metrics.empty() ? metrics_source : power_source) +
                    " is empty; nothing to join");
  }
  require_sorted(metrics, metrics_source);
  require_sorted(power, power_source);

  JoinSummary summary;
  summary.metrics_source = metrics_source;
  summary.power_source = power_source;
  summary.tolerance = options.tolerance;
  summary.keep_flagged = options.keep_flagged;

  std::vector<std::size_t> metrics_rows;
  std::vector<std::size_t> power_rows;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (!options.keep_flagged && metrics[i].flags != kFlagNone) {
      ++summary.excluded_flagged;
    } else {
      metrics_rows.push_back(i);
    }
  }
  for (std::size_t j = 0; j < power.size(); ++j) {
    if (!options.keep_flagged && (power[j].flags & kFlagImplausible)) {
      ++summary.excluded_flagged;
    } else {
      power_rows.push_back(j);
    }
  }

  // Both sides are sorted, so each metrics row only looks at the power rows
  // inside its tolerance window.
  std::vector<Candidate> candidates;
  std::size_t window_start = 0;
  for (std::size_t mi = 0; mi < metrics_rows.size(); ++mi) {
    const double t = metrics[metrics_rows[mi]].timestamp;
    while (window_start < power_rows.size() &&
           power[power_rows[window_start]].timestamp < t - options.tolerance) {
      ++window_start;
    }
    for (std::size_t pj = window_start; pj < power_rows.size(); ++pj) {
      const double distance = std::abs(power[power_rows[pj]].timestamp - t);
      if (power[power_rows[pj]].timestamp > t + options.tolerance) break;
      if (distance <= options.tolerance) {
        candidates.push_back({distance, mi, pj});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(a.distance, a.metrics_index, a.power_index) <
                     std::tie(b.distance, b.metrics_index, b.power_index);
            });

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match(metrics_rows.size(), kNone);
  std::vector<bool> power_used(power_rows.size(), false);
  for (const auto& c : candidates) {
    if (match[c.metrics_index] != kNone || power_used[c.power_index]) continue;
    match[c.metrics_index] = c.power_index;
    power_used[c.power_index] = true;
  }

  TrainingDataset dataset;
  for (std::size_t mi = 0; mi < metrics_rows.size(); ++mi) {
    if (match[mi] == kNone) continue;
    dataset.add_row(metrics[metrics_rows[mi]].values,
                    power[power_rows[match[mi]]].watts);
  }
  summary.matched = dataset.size();
  summary.unmatched_metrics = metrics_rows.size() - summary.matched;
  summary.unmatched_power = power_rows.size() - summary.matched;

  if (dataset.empty()) {
    throw Error(ErrorKind::kJoin,
                "no rows matched within " +
                    csv::format_number(options.tolerance) + " s: " +
                    metrics_source + " spans " +
                    time_range(metrics.front().timestamp,
                               metrics.back().timestamp) +
                    ", " + power_source + " spans " +
                    time_range(power.front().timestamp, power.back().timestamp));
  }

  dataset.provenance.sources = {std::move(metrics_source),
                                std::move(power_source)};
  dataset.provenance.joins.push_back(std::move(summary));
  return dataset;
}

TrainingDataset merge_datasets(std::span<const TrainingDataset> datasets) {
  TrainingDataset merged;
  if (datasets.empty()) return merged;
  merged.feature_names = datasets.front().feature_names;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const auto& ds = datasets[i];
    if (ds.feature_names != merged.feature_names) {
      throw Error(ErrorKind::kSchema, "dataset " + std::to_string(i + 1) +
                                          " has a different feature order");
    }
    merged.features.insert(merged.features.end(), ds.features.begin(),
                           ds.features.end());
    merged.targets.insert(merged.targets.end(), ds.targets.begin(),
                          ds.targets.end());
    merged.provenance.sources.insert(merged.provenance.sources.end(),
                                     ds.provenance.sources.begin(),
                                     ds.provenance.sources.end());
    merged.provenance.joins.insert(merged.provenance.joins.end(),
                                   ds.provenance.joins.begin(),
                                   ds.provenance.joins.end());
  }
  return merged;
}

void write_dataset_csv(std::ostream& out, const TrainingDataset& dataset) {
  for (const auto& name : dataset.feature_names) out << name << ',';
  out << "watts\n";
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    for (double v : dataset.features[r]) out << csv::format_number(v) << ',';
    out << csv::format_number(dataset.targets[r]) << '\n';
  }
}

TrainingDataset read_dataset_csv(std::istream& in,
                                 const std::string& source_name) {
  std::string line;
  if (!csv::read_line(in, line)) {
    throw Error(ErrorKind::kParse, source_name + ":1: empty dataset file");
  }
  auto header = csv::split(line);
  TrainingDataset dataset;
  dataset.feature_names.clear();
  {
    // Any ordering of the six features is readable; merge and inference
    // then reject orderings that do not agree.
    bool ok = header.size() == kFeatureCount + 1 && header.back() == "watts";
    for (std::size_t i = 0; ok && i < kFeatureCount; ++i) {
      dataset.feature_names.emplace_back(header[i]);
      ok = std::find(kFeatureNames.begin(), kFeatureNames.end(), header[i]) !=
           kFeatureNames.end();
    }
    auto sorted = dataset.feature_names;
    std::sort(sorted.begin(), sorted.end());
    ok = ok && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    if (!ok) {
      throw Error(ErrorKind::kParse, csv::location(source_name, 1) +
                                         ": expected header '" +
                                         std::string(kDatasetHeader) + "'");
    }
  }

  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = csv::location(source_name, line_no);
    auto fields = csv::split(line);
    if (fields.size() != kFeatureCount + 1) {
      throw Error(ErrorKind::kParse, where + ": expected 7 fields, got " +
                                         std::to_string(fields.size()));
    }
    FeatureVector x;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      x[i] = csv::parse_number(fields[i], where);
    }
    const double watts = csv::parse_number(fields[kFeatureCount], where);
    if (watts < 0) throw Error(ErrorKind::kParse, where + ": negative watts");
    dataset.add_row(x, watts);
  }
  dataset.provenance.sources = {source_name};
  return dataset;
}

std::filesystem::path provenance_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".provenance.json";
  return p;
}

void save_dataset(const std::filesystem::path& path,
                  const TrainingDataset& dataset) {
  {
    auto out = csv::open_output(path);
    write_dataset_csv(out, dataset);
    if (!out.flush()) throw Error(ErrorKind::kIo, "write failed: " + path.string());
  }
  nlohmann::json prov{{"sources", dataset.provenance.sources},
                      {"joins", dataset.provenance.joins},
                      {"rows", dataset.size()}};
  auto out = csv::open_output(provenance_path(path));
  out << prov.dump(2) << '\n';
  if (!out.flush()) {
    throw Error(ErrorKind::kIo,
                "write failed: " + provenance_path(path).string());
  }
}

TrainingDataset load_dataset(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  auto dataset = read_dataset_csv(in, path.string());
  const auto sidecar = provenance_path(path);
  std::error_code ec;
  if (std::filesystem::exists(sidecar, ec)) {
    std::ifstream prov_in(sidecar);
    try {
      auto prov = nlohmann::json::parse(prov_in);
      dataset.provenance.sources =
          prov.at("sources").get<std::vector<std::string>>();
      dataset.provenance.joins =
          prov.at("joins").get<std::vector<JoinSummary>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParse, sidecar.string() + ": " + e.what());
    }
  }
  return dataset;
}

}  // namespace vmwatt
