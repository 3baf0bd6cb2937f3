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

#include "vmwatt/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "vmwatt/error.hpp"

namespace vmwatt {
namespace {

std::size_t feature_index(const std::string& name) {
  auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
  if (it == kFeatureNames.end()) {
    throw Error(ErrorKind::kConfig, "unknown feature '" + name + "'");
  }
  return static_cast<std::size_t>(it - kFeatureNames.begin());
}

FeatureVector feature_map(const nlohmann::json& j) {
  FeatureVector v{};
  if (!j.is_object()) {
    throw Error(ErrorKind::kConfig, "expected an object keyed by feature name");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    v[feature_index(it.key())] = it.value().get<double>();
  }
  return v;
}

nlohmann::json feature_map_json(const FeatureVector& v) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    j[std::string(kFeatureNames[i])] = v[i];
  }
  return j;
}

}  // namespace

std::string_view to_string(WorkloadProfile profile) {
  switch (profile) {
    case WorkloadProfile::kCpuHeavy: return "cpu-heavy";
    case WorkloadProfile::kNetHeavy: return "net-heavy";
    case WorkloadProfile::kDiskHeavy: return "disk-heavy";
    case WorkloadProfile::kMixed: return "mixed";
    case WorkloadProfile::kConstant: return "constant";
  }
  return "mixed";
}

WorkloadProfile parse_profile(std::string_view name) {
  for (auto p : {WorkloadProfile::kCpuHeavy, WorkloadProfile::kNetHeavy,
                 WorkloadProfile::kDiskHeavy, WorkloadProfile::kMixed,
                 WorkloadProfile::kConstant}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorKind::kConfig, "unknown workload profile '" +
                                      std::string(name) + "'");
}

PowerFunction PowerFunction::linear(double intercept,
                                    const FeatureVector& weights) {
  PowerFunction f;
  f.kind = Kind::kLinear;
  f.intercept = intercept;
  f.weights = weights;
  return f;
}

PowerFunction PowerFunction::tiered(double intercept, std::vector<Step> steps) {
  PowerFunction f;
  f.kind = Kind::kTiered;
  f.intercept = intercept;
  f.steps = std::move(steps);
  return f;
}

double PowerFunction::operator()(const FeatureVector& x) const {
  double watts = intercept;
  switch (kind) {
    case Kind::kDefault:
      watts += cpu * x[kCpuTotal] + net * std::log10(1.0 + x[kNetRx] / 1e6) +
               disk * std::sqrt(x[kDiskWrite] / 1e8);
      break;
    case Kind::kLinear:
      for (std::size_t i = 0; i < kFeatureCount; ++i) watts += weights[i] * x[i];
      break;
    case Kind::kTiered:
      for (const auto& step : steps) {
        if (x[step.feature] > step.threshold) watts += step.height;
      }
      break;
  }
  return std::max(0.0, watts);
}

void SyntheticConfig::validate() const {
  if (!(duration >= 0)) throw Error(ErrorKind::kConfig, "duration must be >= 0");
  if (!(noise_sigma >= 0)) {
    throw Error(ErrorKind::kConfig, "noise_sigma must be >= 0");
  }
  if (profile == WorkloadProfile::kConstant) {
    for (auto f : {kCpuTotal, kMemUsed}) {
      if (constant_values[f] < 0 || constant_values[f] > 100) {
        throw Error(ErrorKind::kConfig, std::string(kFeatureNames[f]) +
                                            " must lie in [0, 100]");
      }
    }
    for (auto f : {kDiskRead, kDiskWrite, kNetRx, kNetTx}) {
      if (constant_values[f] < 0) {
        throw Error(ErrorKind::kConfig,
                    std::string(kFeatureNames[f]) + " must be >= 0");
      }
    }
  }
  for (const auto& step : power_function.steps) {
    if (step.feature >= kFeatureCount) {
      throw Error(ErrorKind::kConfig, "power step feature out of range");
    }
  }
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json& j) {
  SyntheticConfig c;
  try {
    if (j.contains("duration")) c.duration = j.at("duration").get<double>();
    if (j.contains("profile")) {
      c.profile = parse_profile(j.at("profile").get<std::string>());
    }
    if (j.contains("constant")) {
      c.constant_values = feature_map(j.at("constant"));
      if (!j.contains("profile")) c.profile = WorkloadProfile::kConstant;
    }
    if (j.contains("noise_sigma")) c.noise_sigma = j.at("noise_sigma").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("start")) c.start = j.at("start").get<double>();
    if (j.contains("power_function")) {
      const auto& pf = j.at("power_function");
      auto& f = c.power_function;
      const auto kind = pf.value("kind", std::string("default"));
      if (kind == "default") {
        f.kind = PowerFunction::Kind::kDefault;
        f.intercept = pf.value("intercept", f.intercept);
        f.cpu = pf.value("cpu", f.cpu);
        f.net = pf.value("net", f.net);
        f.disk = pf.value("disk", f.disk);
      } else if (kind == "linear") {
        f = PowerFunction::linear(pf.value("intercept", 0.0),
                                  feature_map(pf.value("weights", nlohmann::json::object())));
      } else if (kind == "tiered") {
        std::vector<PowerFunction::Step> steps;
        for (const auto& s : pf.value("steps", nlohmann::json::array())) {
          steps.push_back({feature_index(s.at("feature").get<std::string>()),
                           s.at("threshold").get<double>(),
                           s.at("height").get<double>()});
        }
        f = PowerFunction::tiered(pf.value("intercept", 0.0), std::move(steps));
      } else {
        throw Error(ErrorKind::kConfig, "unknown power function kind '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("synthetic config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const SyntheticConfig& c) {
  nlohmann::json pf;
  const auto& f = c.power_function;
  switch (f.kind) {
    case PowerFunction::Kind::kDefault:
      pf = {{"kind", "default"}, {"intercept", f.intercept}, {"cpu", f.cpu},
            {"net", f.net}, {"disk", f.disk}};
      break;
    case PowerFunction::Kind::kLinear:
      pf = {{"kind", "linear"}, {"intercept", f.intercept},
            {"weights", feature_map_json(f.weights)}};
      break;
    case PowerFunction::Kind::kTiered: {
      auto steps = nlohmann::json::array();
      for (const auto& s : f.steps) {
        steps.push_back({{"feature", std::string(kFeatureNames[s.feature])},
                         {"threshold", s.threshold},
                         {"height", s.height}});
      }
      pf = {{"kind", "tiered"}, {"intercept", f.intercept}, {"steps", steps}};
      break;
    }
  }
  nlohmann::json j{{"duration", c.duration},
                   {"profile", std::string(to_string(c.profile))},
                   {"noise_sigma", c.noise_sigma},
                   {"seed", c.seed},
                   {"start", c.start},
                   {"power_function", pf}};
  if (c.profile == WorkloadProfile::kConstant) {
    j["constant"] = feature_map_json(c.constant_values);
  }
  return j;
}

TrajectoryGenerator::TrajectoryGenerator(WorkloadProfile profile,
                                         const FeatureVector& constant,
                                         std::uint64_t seed)
    : profile_(profile), constant_(constant), rng_(seed) {
  auto lin = [](double mean, double vol, double lo, double hi) {
    FeatureWalk w;
    w.mean = mean;
    w.volatility = vol;
    w.lo = lo;
    w.hi = hi;
    return w;
  };
  auto log = [](double mean, double vol, double unit, double decades) {
    FeatureWalk w;
    w.mean = mean;
    w.volatility = vol;
    w.log_scale = true;
    w.unit = unit;
    w.decades = decades;
    return w;
  };

  switch (profile) {
    case WorkloadProfile::kCpuHeavy:
      walks_[kCpuTotal] = lin(0.6, 0.06, 0, 100);
      walks_[kMemUsed] = lin(0.5, 0.01, 15, 60);
      walks_[kDiskRead] = log(0.3, 0.03, 1e4, 3);
      walks_[kDiskWrite] = log(0.3, 0.03, 1e4, 3.5);
      walks_[kNetRx] = log(0.1, 0.01, 1e3, 2);
      walks_[kNetTx] = log(0.1, 0.01, 1e3, 2);
      break;
    case WorkloadProfile::kNetHeavy:
      walks_[kCpuTotal] = lin(0.08, 0.005, 0, 100);
      walks_[kMemUsed] = lin(0.4, 0.01, 20, 45);
      walks_[kDiskRead] = log(0.1, 0.01, 1e3, 3);
      walks_[kDiskWrite] = log(0.1, 0.01, 1e3, 3);
      walks_[kNetRx] = log(0.45, 0.07, 1e6, 3);
      walks_[kNetTx] = log(0.45, 0.05, 1e6, 3.3);
      walks_[kNetTx].coupled_to = kNetRx;
      walks_[kNetTx].coupling = 0.8;
      break;
    case WorkloadProfile::kDiskHeavy:
      walks_[kCpuTotal] = lin(0.08, 0.005, 0, 100);
      walks_[kMemUsed] = lin(0.6, 0.02, 30, 70);
      walks_[kDiskRead] = log(0.4, 0.05, 1e5, 3);
      walks_[kDiskWrite] = log(0.45, 0.07, 1e6, 3);
      walks_[kNetRx] = log(0.1, 0.01, 1e3, 2);
      walks_[kNetTx] = log(0.1, 0.01, 1e3, 2);
      break;
    case WorkloadProfile::kMixed:
      walks_[kCpuTotal] = lin(0.45, 0.05, 0, 100);
      walks_[kMemUsed] = lin(0.5, 0.02, 10, 80);
      walks_[kDiskRead] = log(0.3, 0.05, 1e5, 3);
      walks_[kDiskWrite] = log(0.3, 0.05, 1e6, 3);
      walks_[kNetRx] = log(0.3, 0.05, 1e6, 3);
      walks_[kNetTx] = log(0.3, 0.05, 1e6, 3);
      walks_[kNetTx].coupled_to = kNetRx;
      walks_[kNetTx].coupling = 0.5;
      break;
    case WorkloadProfile::kConstant:
      break;
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f) levels_[f] = walks_[f].mean;
}

double TrajectoryGenerator::map_level(const FeatureWalk& walk,
                                      double level) const {
  if (walk.log_scale) {
    return walk.unit * (std::pow(10.0, walk.decades * level) - 1.0);
  }
  return walk.lo + (walk.hi - walk.lo) * level;
}

FeatureVector TrajectoryGenerator::next() {
  if (profile_ == WorkloadProfile::kConstant) return constant_;

  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    auto& w = walks_[f];
    const double step =
        w.reversion * (w.mean - levels_[f]) + w.volatility * normal_(rng_);
    levels_[f] = std::clamp(levels_[f] + step, 0.0, 1.0);
  }
  FeatureVector x{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto& w = walks_[f];
    double level = levels_[f];
    if (w.coupled_to >= 0) {
      level = (1 - w.coupling) * level + w.coupling * levels_[w.coupled_to];
    }
    x[f] = map_level(w, level);
  }
  x[kCpuTotal] = std::clamp(x[kCpuTotal], 0.0, 100.0);
  x[kMemUsed] = std::clamp(x[kMemUsed], 0.0, 100.0);
  return x;
}

std::mt19937_64 noise_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x6e6f6973u};
  return std::mt19937_64(seq);
}

SyntheticLogs generate(const SyntheticConfig& config) {
  config.validate();
  SyntheticLogs logs;
  const auto rows = static_cast<std::size_t>(std::floor(config.duration));
  logs.metrics.reserve(rows);
  logs.power.reserve(rows);

  TrajectoryGenerator trajectory(config.profile, config.constant_values,
                                 config.seed);
  auto noise_rng = noise_engine(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (std::size_t i = 0; i < rows; ++i) {
    const EpochSeconds t = config.start + static_cast<double>(i);
    MetricsSample m;
    m.timestamp = t;
    m.values = trajectory.next();
    double watts = config.power_function(m.values);
    if (config.noise_sigma > 0) watts += config.noise_sigma * noise(noise_rng);
    PowerSample p;
    p.timestamp = t;
    p.watts = std::max(0.0, watts);
    logs.metrics.push_back(m);
    logs.power.push_back(p);
  }
  return logs;
}

}  // namespace vmwatt
