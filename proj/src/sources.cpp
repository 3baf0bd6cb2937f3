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

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "vmwatt/csv.hpp"
#include "vmwatt/error.hpp"
#include "vmwatt/metrics.hpp"
#include "vmwatt/power.hpp"
#include "vmwatt/synthetic.hpp"

namespace vmwatt {
namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, path.string() + ": at byte " +
                                       std::to_string(e.byte) + ": " + e.what());
  }
}

std::pair<std::string_view, std::string_view> split_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return {spec, {}};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::filesystem::path require_path(std::string_view kind, std::string_view arg) {
  if (arg.empty()) {
    throw Error(ErrorKind::kConfig, std::string(kind) + " needs a path: " +
                                        std::string(kind) + ":PATH");
  }
  return std::filesystem::path(std::string(arg));
}

}  // namespace

SyntheticMetricsSource::SyntheticMetricsSource(const SyntheticConfig& config)
    : trajectory_(config.profile, config.constant_values, config.seed) {
  config.validate();
}

std::optional<MetricsSample> SyntheticMetricsSource::read_sample(EpochSeconds now) {
  MetricsSample s;
  s.timestamp = now;
  s.values = trajectory_.next();
  return s;
}

SyntheticPowerBackend::SyntheticPowerBackend(const SyntheticConfig& config)
    : config_(config),
      trajectory_(config.profile, config.constant_values, config.seed),
      noise_rng_(noise_engine(config.seed)) {
  config_.validate();
}

SyntheticPowerBackend SyntheticPowerBackend::constant(double watts) {
  if (!(watts >= 0)) throw Error(ErrorKind::kConfig, "constant_watts must be >= 0");
  SyntheticConfig c;
  c.profile = WorkloadProfile::kConstant;
  c.noise_sigma = 0;
  c.power_function = PowerFunction::linear(watts, FeatureVector{});
  return SyntheticPowerBackend(c);
}

std::optional<PowerSample> SyntheticPowerBackend::read(EpochSeconds now) {
  const auto x = trajectory_.next();
  double watts = config_.power_function(x);
  if (config_.noise_sigma > 0) watts += config_.noise_sigma * noise_(noise_rng_);
  PowerSample s;
  s.timestamp = now;
  s.watts = std::max(0.0, watts);
  return s;
}

std::unique_ptr<MetricsSource> make_metrics_source(std::string_view spec) {
  const auto [kind, arg] = split_spec(spec);
  if (kind == "system") {
    return std::make_unique<SystemMetricsSource>(
        arg.empty() ? std::filesystem::path("/proc")
                    : std::filesystem::path(std::string(arg)));
  }
  if (kind == "replay") {
    return std::make_unique<ReplayMetricsSource>(
        ReplayMetricsSource::from_file(require_path(kind, arg)));
  }
  if (kind == "synthetic") {
    return std::make_unique<SyntheticMetricsSource>(
        synthetic_config_from_json(read_json_file(require_path(kind, arg))));
  }
  throw Error(ErrorKind::kConfig, "unknown metrics source '" + std::string(spec) +
                                      "' (expected system, replay:FILE or "
                                      "synthetic:CONFIG)");
}

std::unique_ptr<PowerBackend> make_power_backend(std::string_view spec) {
  const auto [kind, arg] = split_spec(spec);
  if (kind == "counter-file") {
    const auto dir = require_path(kind, arg);
    if (!std::filesystem::exists(dir / "energy_uj")) {
      throw Error(ErrorKind::kNotFound,
                  "no energy counter at " + (dir / "energy_uj").string());
    }
    return std::make_unique<CounterFileBackend>(dir);
  }
  if (kind == "external-csv") {
    return std::make_unique<ExternalCsvBackend>(
        ExternalCsvBackend::from_file(require_path(kind, arg)));
  }
  if (kind == "synthetic") {
    const auto j = read_json_file(require_path(kind, arg));
    if (j.is_object() && j.contains("constant_watts")) {
      if (!j.at("constant_watts").is_number()) {
        throw Error(ErrorKind::kConfig, "constant_watts must be a number");
      }
      return std::make_unique<SyntheticPowerBackend>(
          SyntheticPowerBackend::constant(j.at("constant_watts").get<double>()));
    }
    return std::make_unique<SyntheticPowerBackend>(synthetic_config_from_json(j));
  }
  throw Error(ErrorKind::kConfig,
              "unknown power backend '" + std::string(spec) +
                  "' (expected counter-file:PATH, external-csv:PATH or "
                  "synthetic:CONFIG)");
}

}  // namespace vmwatt
