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

// Synthetic test bench: paired guest metrics and host power logs produced
// from a known power function, for exercising the pipeline without RAPL
// hardware.
//
// Each feature follows a mean-reverting random walk on a [0, 1] "level"
// that is clipped at the bounds and then mapped to the feature's units,
// so consecutive samples are correlated like real telemetry. The profile
// decides which feature carries most of the variation.

#ifndef VMWATT_SYNTHETIC_HPP_
#define VMWATT_SYNTHETIC_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vmwatt/metrics.hpp"
#include "vmwatt/power.hpp"
#include "vmwatt/types.hpp"

namespace vmwatt {

enum class WorkloadProfile { kCpuHeavy, kNetHeavy, kDiskHeavy, kMixed, kConstant };

std::string_view to_string(WorkloadProfile profile);
WorkloadProfile parse_profile(std::string_view name);

struct PowerFunction {
  enum class Kind { kDefault, kLinear, kTiered };

  struct Step {
    std::size_t feature = kCpuTotal;
    double threshold = 0;
    double height = 0;
  };

  Kind kind = Kind::kDefault;
  double intercept = 8.0;
  // kDefault: cpu * cpu.total + net * log10(1 + net.rx / 1e6)
  //           + disk * sqrt(disk.write / 1e8)
  double cpu = 0.45;
  double net = 4.0;
  double disk = 3.0;
  // kLinear: sum of weights[i] * x[i].
  FeatureVector weights{};
  // kTiered: sum of height * [x[feature] > threshold].
  std::vector<Step> steps;

  static PowerFunction linear(double intercept, const FeatureVector& weights);
  static PowerFunction tiered(double intercept, std::vector<Step> steps);

  // Clamped at 0 W.
  double operator()(const FeatureVector& x) const;
};

struct SyntheticConfig {
  double duration = 3600;  // seconds, one sample per second
  WorkloadProfile profile = WorkloadProfile::kMixed;
  FeatureVector constant_values{};  // used by the constant profile
  PowerFunction power_function;
  double noise_sigma = 2.0;
  std::uint64_t seed = 0;
  EpochSeconds start = 1'700'000'000;

  void validate() const;
};

SyntheticConfig synthetic_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticConfig& config);

class TrajectoryGenerator {
 public:
  TrajectoryGenerator(WorkloadProfile profile, const FeatureVector& constant,
                      std::uint64_t seed);

  FeatureVector next();

 private:
  struct FeatureWalk {
    double mean = 0.5;        // long-run level
    double volatility = 0;    // per-step standard deviation of the level
    double reversion = 0.02;  // pull towards the mean per step
    bool log_scale = false;
    double lo = 0;            // linear: value at level 0
    double hi = 0;            // linear: value at level 1
    double unit = 1;          // log: unit * (10^(decades * level) - 1)
    double decades = 0;
    int coupled_to = -1;      // share the level of another feature
    double coupling = 0;
  };

  double map_level(const FeatureWalk& walk, double level) const;

  WorkloadProfile profile_;
  FeatureVector constant_;
  std::array<FeatureWalk, kFeatureCount> walks_{};
  std::array<double, kFeatureCount> levels_{};
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct SyntheticLogs {
  std::vector<MetricsSample> metrics;
  std::vector<PowerSample> power;
};

SyntheticLogs generate(const SyntheticConfig& config);

// Power noise stream, kept apart from the trajectory stream so changing the
// noise level leaves the feature trajectories untouched.
std::mt19937_64 noise_engine(std::uint64_t seed);

// Live sources for collect, log-power and infer. Both walk the same
// trajectory for a given config, so a metrics source and a power backend
// built from one config file produce paired logs. Timestamps come from the
// caller's clock.
class SyntheticMetricsSource final : public MetricsSource {
 public:
  explicit SyntheticMetricsSource(const SyntheticConfig& config);

  std::optional<MetricsSample> read_sample(EpochSeconds now) override;
  std::string_view kind() const override { return "synthetic"; }

 private:
  TrajectoryGenerator trajectory_;
};

class SyntheticPowerBackend final : public PowerBackend {
 public:
  explicit SyntheticPowerBackend(const SyntheticConfig& config);
  // Emits `watts` on every tick.
  static SyntheticPowerBackend constant(double watts);

  std::optional<PowerSample> read(EpochSeconds now) override;
  std::string_view kind() const override { return "synthetic"; }

 private:
  SyntheticConfig config_;
  TrajectoryGenerator trajectory_;
  std::mt19937_64 noise_rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

}  // namespace vmwatt

#endif  // VMWATT_SYNTHETIC_HPP_
