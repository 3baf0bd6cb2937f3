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

// Stochastic workload schedules for the web and database benches.

#ifndef VMWATT_WORKLOAD_HPP_
#define VMWATT_WORKLOAD_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace vmwatt {

using Rng = std::mt19937_64;

struct TruncatedLognormal {
  double mu = 0;
  double sigma = 1;
  double lower = 0;
  double upper = std::numeric_limits<double>::infinity();
};

// Rejection sampling with an inverse-CDF fallback after a bounded number of
// misses. Throws kConfig when the interval holds less than 1e-12 of the mass.
double sample_trunc_lognormal(const TruncatedLognormal& d, Rng& rng);

double sample_beta(double alpha, double beta, Rng& rng);

struct RateFunction {
  enum class Kind { kConstant, kSinusoid, kPiecewise };

  Kind kind = Kind::kSinusoid;
  double value = 0;  // constant
  // sinusoid: base + amplitude * sin(2 pi t / period + phase)
  double base = 0.02;
  double amplitude = 0.015;
  double period = 3600;
  double phase = 0;
  // piecewise: levels[i] on [breaks[i], breaks[i+1]), last level to infinity.
  std::vector<double> breaks;
  std::vector<double> levels;

  static RateFunction constant(double value);
  static RateFunction sinusoid(double base, double amplitude, double period,
                               double phase = 0);
  static RateFunction piecewise(std::vector<double> breaks,
                                std::vector<double> levels);

  double operator()(double t) const;
  // Supremum on [0, horizon].
  double max_on(double horizon) const;
};

RateFunction rate_function_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RateFunction& rate);

struct ThinningResult {
  std::vector<double> arrivals;
  std::size_t candidates = 0;
};

// Throws kBoundViolation if any candidate sees rate(t) > lambda_max.
ThinningResult ogata_thinning(const std::function<double(double)>& rate,
                              double lambda_max, double horizon, Rng& rng);

enum class Endpoint { kStatic, kPhp, kPerl };

std::string endpoint_name(Endpoint e);
Endpoint parse_endpoint(const std::string& name);

struct EndpointPaths {
  std::string static_path = "/index.html";
  std::string php_path = "/cgi-bin/index.php";
  std::string perl_path = "/cgi-bin/index.pl";

  const std::string& path(Endpoint e) const;
};

struct WebWorkloadConfig {
  double horizon = 10800;
  TruncatedLognormal lognormal_requests{4, 1, 1, 2000};
  TruncatedLognormal lognormal_concurrency{2, 0.7, 1, 100};
  std::array<double, 3> endpoint_weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
  RateFunction rate_function;
  double lambda_max = 0.035;
  EndpointPaths paths;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DbWorkloadConfig {
  double horizon = 10800;
  double alpha = 2;
  double beta = 5;
  double scale = 60;
  std::array<int, 2> clients_range{1, 32};
  std::array<int, 2> threads_range{1, 8};
  std::uint64_t seed = 0;

  void validate() const;
};

WebWorkloadConfig web_config_from_json(const nlohmann::json& j);
DbWorkloadConfig db_config_from_json(const nlohmann::json& j);

struct WebEvent {
  double arrival_time = 0;
  std::uint64_t n_requests = 1;
  std::uint64_t concurrency = 1;
  Endpoint endpoint = Endpoint::kStatic;

  bool operator==(const WebEvent&) const = default;
};

struct DbEvent {
  double arrival_time = 0;
  int clients = 1;
  int threads = 1;

  bool operator==(const DbEvent&) const = default;
};

struct WorkloadSchedule {
  enum class Kind { kWeb, kDb };

  Kind kind = Kind::kWeb;
  double horizon = 0;
  std::uint64_t seed = 0;
  std::vector<WebEvent> web_events;
  std::vector<DbEvent> db_events;
  EndpointPaths paths;  // web only

  std::size_t size() const {
    return kind == Kind::kWeb ? web_events.size() : db_events.size();
  }
};

WorkloadSchedule gen_web_schedule(const WebWorkloadConfig& config);
WorkloadSchedule gen_db_schedule(const DbWorkloadConfig& config);

// Throws kSchema when a schedule breaks ordering, bounds or positivity.
void check_schedule(const WorkloadSchedule& schedule);

std::string schedule_to_json(const WorkloadSchedule& schedule);
WorkloadSchedule schedule_from_json(const std::string& text,
                                    const std::string& source_name);
void save_schedule(const WorkloadSchedule& schedule,
                   const std::filesystem::path& path);
WorkloadSchedule load_schedule(const std::filesystem::path& path);

// `offset,command` rows, one `pgbench -c N -j M` line per db event.
void write_db_commands(std::ostream& out, const WorkloadSchedule& schedule);

}  // namespace vmwatt

#endif  // VMWATT_WORKLOAD_HPP_
