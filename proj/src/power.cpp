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

#include "vmwatt/power.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "vmwatt/csv.hpp"
#include "vmwatt/error.hpp"
#include "vmwatt/log.hpp"

namespace vmwatt {
namespace {

std::optional<std::uint64_t> read_counter_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string text;
  in >> text;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kParse,
                path.string() + ": not an integer counter: '" + text + "'");
  }
  return value;
}

}  // namespace

std::uint64_t energy_delta_uj(std::uint64_t last, std::uint64_t current,
                              std::uint64_t max_range) {
  if (current >= last) return current - last;
  if (last > max_range) {
    throw Error(ErrorKind::kData, "energy counter exceeds its declared range");
  }
  return (max_range - last) + current;
}

PowerReading energy_delta_to_watts(const EnergyCounterState& state,
                                   std::uint64_t current_energy_uj,
                                   EpochSeconds current_timestamp,
                                   double ceiling_watts) {
  const double dt = current_timestamp - state.last_timestamp;
  if (!(dt > 0)) {
    throw Error(ErrorKind::kTiming,
                "energy counter read is not later than the previous read");
  }
  const auto delta = energy_delta_uj(state.last_energy_uj, current_energy_uj,
                                     state.max_energy_range_uj);
  PowerReading reading;
  reading.watts = static_cast<double>(delta) / dt / 1e6;
  reading.implausible = reading.watts > ceiling_watts;
  reading.state = {current_energy_uj, current_timestamp,
                   state.max_energy_range_uj};
  return reading;
}

CounterFileBackend::CounterFileBackend(std::filesystem::path zone_dir,
                                       double ceiling_watts)
    : zone_dir_(std::move(zone_dir)), ceiling_watts_(ceiling_watts) {}

std::optional<std::uint64_t> CounterFileBackend::read_energy() const {
  return read_counter_file(zone_dir_ / "energy_uj");
}

void CounterFileBackend::prime(EpochSeconds now) {
  auto range = read_counter_file(zone_dir_ / "max_energy_range_uj");
  if (!range) {
    throw Error(ErrorKind::kCollection,
                "cannot read max_energy_range_uj in " + zone_dir_.string());
  }
  auto energy = read_energy();
  if (!energy) {
    throw Error(ErrorKind::kCollection,
                "cannot read energy_uj in " + zone_dir_.string());
  }
  state_ = EnergyCounterState{*energy, now, *range};
}

std::optional<PowerSample> CounterFileBackend::read(EpochSeconds now) {
  if (!state_) prime(now - 1.0);
  auto energy = read_energy();
  if (!energy) return std::nullopt;
  auto reading = energy_delta_to_watts(*state_, *energy, now, ceiling_watts_);
  state_ = reading.state;
  PowerSample sample;
  sample.timestamp = now;
  sample.watts = reading.watts;
  if (reading.implausible) sample.flags |= kFlagImplausible;
  return sample;
}

ExternalCsvBackend ExternalCsvBackend::from_file(
    const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return ExternalCsvBackend(read_external_power_csv(in, path.string()));
}

std::optional<PowerSample> ExternalCsvBackend::read(EpochSeconds) {
  if (next_ >= rows_.size()) return std::nullopt;
  return rows_[next_++];
}

void write_power_header(std::ostream& out) { out << kPowerHeader << '\n'; }

void write_power_row(std::ostream& out, const PowerSample& sample) {
  out << csv::format_number(sample.timestamp) << ','
      << csv::format_number(sample.watts);
  if (sample.flags != kFlagNone) out << ',' << flags_to_comment(sample.flags);
  out << '\n';
}

namespace {

void check_power_row(const PowerSample& sample,
                     const std::vector<PowerSample>& previous,
                     const std::string& where) {
  if (sample.watts < 0) {
    throw Error(ErrorKind::kParse, where + ": negative watts");
  }
  if (!previous.empty() && sample.timestamp <= previous.back().timestamp) {
    throw Error(ErrorKind::kParse,
                where + ": timestamps must be strictly increasing");
  }
}

}  // namespace

std::vector<PowerSample> read_power_csv(std::istream& in,
                                        const std::string& source_name) {
  std::string line;
  if (!csv::read_line(in, line)) {
    throw Error(ErrorKind::kParse, source_name + ":1: empty power file");
  }
  if (line != kPowerHeader) {
    throw Error(ErrorKind::kParse, csv::location(source_name, 1) +
                                       ": expected header '" +
                                       std::string(kPowerHeader) + "'");
  }
  std::vector<PowerSample> samples;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = csv::location(source_name, line_no);
    auto fields = csv::split(line);
    const bool has_comment = fields.size() == 3 && !fields[2].empty() &&
                             fields[2].front() == '#';
    if (fields.size() != 2 && !has_comment) {
      throw Error(ErrorKind::kParse, where + ": expected 2 fields, got " +
                                         std::to_string(fields.size()));
    }
    PowerSample sample;
    sample.timestamp = csv::parse_number(fields[0], where);
    sample.watts = csv::parse_number(fields[1], where);
    if (has_comment) sample.flags = flags_from_comment(fields[2]);
    check_power_row(sample, samples, where);
    samples.push_back(sample);
  }
  return samples;
}

std::vector<PowerSample> read_external_power_csv(
    std::istream& in, const std::string& source_name) {
  std::string line;
  if (!csv::read_line(in, line)) {
    throw Error(ErrorKind::kParse, source_name + ":1: empty power file");
  }
  auto header = csv::split(line);
  std::optional<std::size_t> ts_col;
  std::optional<std::size_t> watts_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto name = header[i];
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (name == "timestamp") ts_col = i;
    if (name == "watts") watts_col = i;
  }
  if (!ts_col || !watts_col) {
    throw Error(ErrorKind::kParse, csv::location(source_name, 1) +
                                       ": header needs 'timestamp' and "
                                       "'watts' columns");
  }
  const std::size_t needed = std::max(*ts_col, *watts_col) + 1;

  std::vector<PowerSample> samples;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = csv::location(source_name, line_no);
    auto fields = csv::split(line);
    if (fields.size() < needed) {
      throw Error(ErrorKind::kParse, where + ": too few fields");
    }
    PowerSample sample;
    sample.timestamp = csv::parse_number(fields[*ts_col], where);
    sample.watts = csv::parse_number(fields[*watts_col], where);
    check_power_row(sample, samples, where);
    samples.push_back(sample);
  }
  return samples;
}

std::vector<PowerSample> load_power_csv(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return read_power_csv(in, path.string());
}

void save_power_csv(const std::filesystem::path& path,
                    std::span<const PowerSample> samples) {
  auto out = csv::open_output(path);
  write_power_header(out);
  for (const auto& s : samples) write_power_row(out, s);
  if (!out.flush()) {
    throw Error(ErrorKind::kIo, "write failed: " + path.string());
  }
}

PowerLoggerResult run_power_logger(PowerBackend& backend, Clock& clock,
                                   const PowerLoggerOptions& options,
                                   std::ostream& sink) {
  if (!(options.interval > 0)) {
    throw Error(ErrorKind::kConfig, "power logging interval must be > 0");
  }
  if (!(options.duration >= 0)) {
    throw Error(ErrorKind::kConfig, "power logging duration must be >= 0");
  }

  PowerLoggerResult result;
  write_power_header(sink);
  if (!sink.flush()) throw Error(ErrorKind::kIo, "power sink not writable");

  const auto ticks = static_cast<std::size_t>(
      std::floor(options.duration / options.interval + 1e-9));
  const EpochSeconds start = std::ceil(clock.now());
  if (ticks > 0) {
    clock.sleep_until(start);
    backend.prime(start);
  }
  EpochSeconds last_written = -std::numeric_limits<double>::infinity();

  // Tick k reports the interval (start + (k-1)*interval, start + k*interval].
  for (std::size_t k = 1; k <= ticks; ++k) {
    if (options.stop && options.stop->load()) {
      result.stopped = true;
      break;
    }
    clock.sleep_until(start + static_cast<double>(k) * options.interval);
    const EpochSeconds now = std::round(clock.now());
    std::optional<PowerSample> sample;
    try {
      sample = backend.read(now);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kTiming) throw;
      log_warning(e.what());
      continue;
    }
    if (!sample) {
      result.backend_gone = true;
      log_warning("power backend " + std::string(backend.kind()) +
                  " went away after " + std::to_string(result.count) +
                  " samples");
      break;
    }
    sample->pid = options.pid;
    if (sample->timestamp <= last_written) {
      log_warning("non-increasing power timestamp; skipping tick");
      continue;
    }
    write_power_row(sink, *sample);
    if (!sink.flush()) {
      throw Error(ErrorKind::kIo, "power write failed after " +
                                      std::to_string(result.count) +
                                      " rows; output file is partial");
    }
    last_written = sample->timestamp;
    ++result.count;
  }
  return result;
}

}  // namespace vmwatt
