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

#include "vmwatt/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "vmwatt/csv.hpp"
#include "vmwatt/error.hpp"

namespace vmwatt {
namespace {

using OrderedJson = nlohmann::ordered_json;

constexpr int kRejectionTries = 64;
constexpr double kMinTruncatedMass = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kConfig, what);
}

TruncatedLognormal lognormal_from_json(const nlohmann::json& j,
                                       TruncatedLognormal d) {
  d.mu = j.value("mu", d.mu);
  d.sigma = j.value("sigma", d.sigma);
  d.lower = j.value("lower", d.lower);
  if (j.contains("upper")) {
    d.upper = j.at("upper").is_null() ? std::numeric_limits<double>::infinity()
                                      : j.at("upper").get<double>();
  }
  return d;
}

void validate_lognormal(const TruncatedLognormal& d, const std::string& name) {
  require(d.sigma > 0, name + ": sigma must be > 0");
  require(d.lower <= d.upper, name + ": lower must be <= upper");
  require(d.lower >= 0, name + ": lower must be >= 0");
}

std::array<int, 2> range_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::kConfig, "ranges are [min, max] pairs");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

double sample_trunc_lognormal(const TruncatedLognormal& d, Rng& rng) {
  validate_lognormal(d, "truncated lognormal");
  if (d.lower == d.upper) return d.lower;

  const boost::math::normal_distribution<double> log_dist(d.mu, d.sigma);
  const double a = d.lower > 0 ? std::log(d.lower)
                               : -std::numeric_limits<double>::infinity();
  const double b = std::isinf(d.upper) ? std::numeric_limits<double>::infinity()
                                       : std::log(d.upper);
  const double cdf_a = std::isinf(a) ? 0.0 : boost::math::cdf(log_dist, a);
  const double cdf_b = std::isinf(b) ? 1.0 : boost::math::cdf(log_dist, b);
  // Upper-tail complements keep precision when both bounds sit far right.
  const double sf_a = std::isinf(a) ? 1.0 : boost::math::cdf(boost::math::complement(log_dist, a));
  const double sf_b = std::isinf(b) ? 0.0 : boost::math::cdf(boost::math::complement(log_dist, b));
  const double mass = std::max(cdf_b - cdf_a, sf_a - sf_b);
  if (!(mass >= kMinTruncatedMass)) {
    throw Error(ErrorKind::kConfig,
                "truncation window [" + csv::format_number(d.lower) + ", " +
                    csv::format_number(d.upper) + "] holds " +
                    csv::format_number(mass) + " of the lognormal mass");
  }

  std::normal_distribution<double> normal(d.mu, d.sigma);
  for (int i = 0; i < kRejectionTries; ++i) {
    const double x = std::exp(normal(rng));
    if (x >= d.lower && x <= d.upper) return x;
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double z;
  if (cdf_b - cdf_a >= sf_a - sf_b) {
    const double p = std::clamp(cdf_a + unit(rng) * (cdf_b - cdf_a), 1e-300,
                                1.0 - 1e-16);
    z = boost::math::quantile(log_dist, p);
  } else {
    const double q = std::clamp(sf_b + unit(rng) * (sf_a - sf_b), 1e-300,
                                1.0 - 1e-16);
    z = boost::math::quantile(boost::math::complement(log_dist, q));
  }
  return std::clamp(std::exp(z), d.lower, d.upper);
}

double sample_beta(double alpha, double beta, Rng& rng) {
  if (!(alpha > 0) || !(beta > 0)) {
    throw Error(ErrorKind::kConfig, "beta shape parameters must be > 0");
  }
  std::gamma_distribution<double> gx(alpha, 1.0);
  std::gamma_distribution<double> gy(beta, 1.0);
  for (;;) {
    const double x = gx(rng);
    const double y = gy(rng);
    if (x + y > 0) return x / (x + y);
  }
}

RateFunction RateFunction::constant(double value) {
  RateFunction r;
  r.kind = Kind::kConstant;
  r.value = value;
  return r;
}

RateFunction RateFunction::sinusoid(double base, double amplitude,
                                    double period, double phase) {
  RateFunction r;
  r.kind = Kind::kSinusoid;
  r.base = base;
  r.amplitude = amplitude;
  r.period = period;
  r.phase = phase;
  return r;
}

RateFunction RateFunction::piecewise(std::vector<double> breaks,
                                     std::vector<double> levels) {
  RateFunction r;
  r.kind = Kind::kPiecewise;
  r.breaks = std::move(breaks);
  r.levels = std::move(levels);
  return r;
}

double RateFunction::operator()(double t) const {
  switch (kind) {
    case Kind::kConstant:
      return value;
    case Kind::kSinusoid:
      return base + amplitude * std::sin(2 * std::numbers::pi * t / period + phase);
    case Kind::kPiecewise: {
      auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
      if (it == breaks.begin()) return 0.0;
      return levels[static_cast<std::size_t>(it - breaks.begin()) - 1];
    }
  }
  return 0.0;
}

double RateFunction::max_on(double horizon) const {
  switch (kind) {
    case Kind::kConstant:
      return value;
    case Kind::kSinusoid:
      return base + std::abs(amplitude);
    case Kind::kPiecewise: {
      double m = 0;
      for (std::size_t i = 0; i < breaks.size(); ++i) {
        if (breaks[i] <= horizon) m = std::max(m, levels[i]);
      }
      return m;
    }
  }
  return 0.0;
}

RateFunction rate_function_from_json(const nlohmann::json& j) {
  const auto kind = j.value("kind", std::string("sinusoid"));
  RateFunction r;
  if (kind == "constant") {
    r = RateFunction::constant(j.at("value").get<double>());
    require(r.value >= 0, "constant rate must be >= 0");
  } else if (kind == "sinusoid") {
    r = RateFunction::sinusoid(j.value("base", r.base),
                               j.value("amplitude", r.amplitude),
                               j.value("period", r.period), j.value("phase", 0.0));
    require(r.period > 0, "sinusoid period must be > 0");
    require(r.base - std::abs(r.amplitude) >= 0,
            "sinusoid rate dips below zero");
  } else if (kind == "piecewise") {
    r = RateFunction::piecewise(j.at("breaks").get<std::vector<double>>(),
                                j.at("levels").get<std::vector<double>>());
    require(!r.breaks.empty() && r.breaks.size() == r.levels.size(),
            "piecewise rate needs one level per break");
    require(std::is_sorted(r.breaks.begin(), r.breaks.end(),
                           std::less_equal<double>()) &&
                std::adjacent_find(r.breaks.begin(), r.breaks.end()) == r.breaks.end(),
            "piecewise breaks must be strictly increasing");
    for (double l : r.levels) require(l >= 0, "piecewise levels must be >= 0");
  } else {
    throw Error(ErrorKind::kConfig, "unknown rate function '" + kind + "'");
  }
  return r;
}

nlohmann::json to_json(const RateFunction& r) {
  switch (r.kind) {
    case RateFunction::Kind::kConstant:
      return {{"kind", "constant"}, {"value", r.value}};
    case RateFunction::Kind::kSinusoid:
      return {{"kind", "sinusoid"}, {"base", r.base}, {"amplitude", r.amplitude},
              {"period", r.period}, {"phase", r.phase}};
    case RateFunction::Kind::kPiecewise:
      return {{"kind", "piecewise"}, {"breaks", r.breaks}, {"levels", r.levels}};
  }
  return {};
}

ThinningResult ogata_thinning(const std::function<double(double)>& rate,
                              double lambda_max, double horizon, Rng& rng) {
  if (!(lambda_max > 0) || !std::isfinite(lambda_max)) {
    throw Error(ErrorKind::kConfig, "lambda_max must be a positive number");
  }
  if (!(horizon >= 0)) throw Error(ErrorKind::kConfig, "horizon must be >= 0");

  ThinningResult result;
  std::exponential_distribution<double> gap(lambda_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = 0;
  for (;;) {
    t += gap(rng);
    if (t > horizon) break;
    ++result.candidates;
    const double lambda = rate(t);
    if (lambda > lambda_max || lambda < 0 || std::isnan(lambda)) {
      throw Error(ErrorKind::kBoundViolation,
                  "rate " + csv::format_number(lambda) + " at t=" +
                      csv::format_number(t) + " is outside [0, lambda_max=" +
                      csv::format_number(lambda_max) + "]");
    }
    if (unit(rng) * lambda_max < lambda) result.arrivals.push_back(t);
  }
  return result;
}

std::string endpoint_name(Endpoint e) {
  switch (e) {
    case Endpoint::kStatic: return "static";
    case Endpoint::kPhp: return "php";
    case Endpoint::kPerl: return "perl";
  }
  return "static";
}

Endpoint parse_endpoint(const std::string& name) {
  if (name == "static") return Endpoint::kStatic;
  if (name == "php") return Endpoint::kPhp;
  if (name == "perl") return Endpoint::kPerl;
  throw Error(ErrorKind::kSchema, "unknown endpoint '" + name + "'");
}

const std::string& EndpointPaths::path(Endpoint e) const {
  switch (e) {
    case Endpoint::kPhp: return php_path;
    case Endpoint::kPerl: return perl_path;
    default: return static_path;
  }
}

void WebWorkloadConfig::validate() const {
  require(horizon >= 0, "horizon must be >= 0");
  validate_lognormal(lognormal_requests, "lognormal_requests");
  validate_lognormal(lognormal_concurrency, "lognormal_concurrency");
  double total = 0;
  for (double w : endpoint_weights) {
    require(w >= 0, "endpoint weights must be >= 0");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-9, "endpoint weights must sum to 1");
  require(lambda_max > 0 && std::isfinite(lambda_max), "lambda_max must be > 0");
  const double peak = rate_function.max_on(horizon);
  if (peak > lambda_max) {
    throw Error(ErrorKind::kBoundViolation,
                "rate function reaches " + csv::format_number(peak) +
                    " above lambda_max=" + csv::format_number(lambda_max));
  }
}

void DbWorkloadConfig::validate() const {
  require(horizon >= 0, "horizon must be >= 0");
  require(alpha > 0 && beta > 0, "beta shape parameters must be > 0");
  require(scale > 0, "beta scale must be > 0");
  require(clients_range[0] >= 1 && clients_range[0] <= clients_range[1],
          "clients_range must be [min, max] with 1 <= min <= max");
  require(threads_range[0] >= 1 && threads_range[0] <= threads_range[1],
          "threads_range must be [min, max] with 1 <= min <= max");
}

WebWorkloadConfig web_config_from_json(const nlohmann::json& j) {
  WebWorkloadConfig c;
  try {
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("lognormal_requests")) {
      c.lognormal_requests =
          lognormal_from_json(j.at("lognormal_requests"), c.lognormal_requests);
    }
    if (j.contains("lognormal_concurrency")) {
      c.lognormal_concurrency = lognormal_from_json(j.at("lognormal_concurrency"),
                                                    c.lognormal_concurrency);
    }
    if (j.contains("endpoint_weights")) {
      const auto w = j.at("endpoint_weights").get<std::vector<double>>();
      require(w.size() == 3, "endpoint_weights needs 3 entries");
      std::copy(w.begin(), w.end(), c.endpoint_weights.begin());
    }
    if (j.contains("rate_function")) {
      c.rate_function = rate_function_from_json(j.at("rate_function"));
    }
    c.lambda_max = j.value("lambda_max", c.lambda_max);
    if (j.contains("endpoints")) {
      const auto& e = j.at("endpoints");
      c.paths.static_path = e.value("static", c.paths.static_path);
      c.paths.php_path = e.value("php", c.paths.php_path);
      c.paths.perl_path = e.value("perl", c.paths.perl_path);
    }
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("web workload config: ") + e.what());
  }
  c.validate();
  return c;
}

DbWorkloadConfig db_config_from_json(const nlohmann::json& j) {
  DbWorkloadConfig c;
  try {
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("beta_interarrival")) {
      const auto& b = j.at("beta_interarrival");
      c.alpha = b.value("alpha", c.alpha);
      c.beta = b.value("beta", c.beta);
      c.scale = b.value("scale", c.scale);
    }
    if (j.contains("clients_range")) c.clients_range = range_from_json(j.at("clients_range"));
    if (j.contains("threads_range")) c.threads_range = range_from_json(j.at("threads_range"));
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("db workload config: ") + e.what());
  }
  c.validate();
  return c;
}

WorkloadSchedule gen_web_schedule(const WebWorkloadConfig& config) {
  config.validate();
  Rng rng(config.seed);
  WorkloadSchedule schedule;
  schedule.kind = WorkloadSchedule::Kind::kWeb;
  schedule.horizon = config.horizon;
  schedule.seed = config.seed;
  schedule.paths = config.paths;

  const auto arrivals =
      ogata_thinning(config.rate_function, config.lambda_max, config.horizon, rng);
  std::discrete_distribution<int> endpoint(config.endpoint_weights.begin(),
                                           config.endpoint_weights.end());
  for (double t : arrivals.arrivals) {
    WebEvent e;
    e.arrival_time = t;
    e.n_requests = static_cast<std::uint64_t>(
        std::max(1.0, std::ceil(sample_trunc_lognormal(config.lognormal_requests, rng))));
    e.concurrency = static_cast<std::uint64_t>(std::max(
        1.0, std::ceil(sample_trunc_lognormal(config.lognormal_concurrency, rng))));
    e.concurrency = std::min(e.concurrency, e.n_requests);
    e.endpoint = static_cast<Endpoint>(endpoint(rng));
    schedule.web_events.push_back(e);
  }
  return schedule;
}

WorkloadSchedule gen_db_schedule(const DbWorkloadConfig& config) {
  config.validate();
  Rng rng(config.seed);
  WorkloadSchedule schedule;
  schedule.kind = WorkloadSchedule::Kind::kDb;
  schedule.horizon = config.horizon;
  schedule.seed = config.seed;

  std::uniform_int_distribution<int> clients(config.clients_range[0],
                                             config.clients_range[1]);
  std::uniform_int_distribution<int> threads(config.threads_range[0],
                                             config.threads_range[1]);
  double t = 0;
  for (;;) {
    const double gap = config.scale * sample_beta(config.alpha, config.beta, rng);
    // A zero gap would repeat the previous arrival time.
    if (!(gap > 0)) continue;
    t += gap;
    if (t > config.horizon) break;
    DbEvent e;
    e.arrival_time = t;
    e.clients = clients(rng);
    e.threads = threads(rng);
    schedule.db_events.push_back(e);
  }
  return schedule;
}

void check_schedule(const WorkloadSchedule& s) {
  auto check_time = [&](double t, double prev, std::size_t i) {
    if (!(t >= 0 && t <= s.horizon) || !(t > prev)) {
      throw Error(ErrorKind::kSchema,
                  "event " + std::to_string(i) + ": arrival_time " +
                      csv::format_number(t) +
                      " is out of order or outside [0, horizon]");
    }
  };
  double prev = -std::numeric_limits<double>::infinity();
  if (s.kind == WorkloadSchedule::Kind::kWeb) {
    if (!s.db_events.empty()) throw Error(ErrorKind::kSchema, "web schedule holds db events");
    for (std::size_t i = 0; i < s.web_events.size(); ++i) {
      const auto& e = s.web_events[i];
      check_time(e.arrival_time, prev, i);
      prev = e.arrival_time;
      if (e.n_requests < 1 || e.concurrency < 1 || e.concurrency > e.n_requests) {
        throw Error(ErrorKind::kSchema,
                    "event " + std::to_string(i) +
                        ": need 1 <= concurrency <= n_requests");
      }
    }
  } else {
    if (!s.web_events.empty()) throw Error(ErrorKind::kSchema, "db schedule holds web events");
    for (std::size_t i = 0; i < s.db_events.size(); ++i) {
      const auto& e = s.db_events[i];
      check_time(e.arrival_time, prev, i);
      prev = e.arrival_time;
      if (e.clients < 1 || e.threads < 1) {
        throw Error(ErrorKind::kSchema, "event " + std::to_string(i) +
                                            ": clients and threads must be >= 1");
      }
    }
  }
}

std::string schedule_to_json(const WorkloadSchedule& s) {
  OrderedJson j;
  const bool web = s.kind == WorkloadSchedule::Kind::kWeb;
  j["kind"] = web ? "web" : "db";
  j["horizon"] = s.horizon;
  j["seed"] = s.seed;
  auto events = OrderedJson::array();
  if (web) {
    j["endpoints"] = OrderedJson{{"static", s.paths.static_path},
                                 {"php", s.paths.php_path},
                                 {"perl", s.paths.perl_path}};
    for (const auto& e : s.web_events) {
      events.push_back(OrderedJson{{"arrival_time", e.arrival_time},
                                   {"n_requests", e.n_requests},
                                   {"concurrency", e.concurrency},
                                   {"endpoint", endpoint_name(e.endpoint)}});
    }
  } else {
    for (const auto& e : s.db_events) {
      events.push_back(OrderedJson{{"arrival_time", e.arrival_time},
                                   {"clients", e.clients},
                                   {"threads", e.threads}});
    }
  }
  j["events"] = std::move(events);
  return j.dump(2) + "\n";
}

WorkloadSchedule schedule_from_json(const std::string& text,
                                    const std::string& source_name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, source_name + ": at byte " +
                                       std::to_string(e.byte) + ": " + e.what());
  }
  WorkloadSchedule s;
  std::size_t i = 0;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "web") {
      s.kind = WorkloadSchedule::Kind::kWeb;
    } else if (kind == "db") {
      s.kind = WorkloadSchedule::Kind::kDb;
    } else {
      throw Error(ErrorKind::kSchema, source_name + ": unknown schedule kind '" + kind + "'");
    }
    s.horizon = j.at("horizon").get<double>();
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("endpoints")) {
      const auto& e = j.at("endpoints");
      s.paths.static_path = e.value("static", s.paths.static_path);
      s.paths.php_path = e.value("php", s.paths.php_path);
      s.paths.perl_path = e.value("perl", s.paths.perl_path);
    }
    for (const auto& ev : j.at("events")) {
      if (s.kind == WorkloadSchedule::Kind::kWeb) {
        s.web_events.push_back({ev.at("arrival_time").get<double>(),
                                ev.at("n_requests").get<std::uint64_t>(),
                                ev.at("concurrency").get<std::uint64_t>(),
                                parse_endpoint(ev.at("endpoint").get<std::string>())});
      } else {
        s.db_events.push_back({ev.at("arrival_time").get<double>(),
                               ev.at("clients").get<int>(), ev.at("threads").get<int>()});
      }
      ++i;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchema, source_name + ": at $.events[" +
                                        std::to_string(i) + "]: " + e.what());
  } catch (const Error& e) {
    throw Error(e.kind(), source_name + ": " + e.what());
  }
  try {
    check_schedule(s);
  } catch (const Error& e) {
    throw Error(e.kind(), source_name + ": " + e.what());
  }
  return s;
}

void save_schedule(const WorkloadSchedule& schedule,
                   const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << schedule_to_json(schedule);
  if (!out.flush()) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

WorkloadSchedule load_schedule(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return schedule_from_json(buf.str(), path.string());
}

void write_db_commands(std::ostream& out, const WorkloadSchedule& schedule) {
  if (schedule.kind != WorkloadSchedule::Kind::kDb) {
    throw Error(ErrorKind::kConfig, "bench commands need a db schedule");
  }
  out << "offset,command\n";
  for (const auto& e : schedule.db_events) {
    out << csv::format_number(e.arrival_time) << ",pgbench -c " << e.clients
        << " -j " << e.threads << '\n';
  }
}

}  // namespace vmwatt
