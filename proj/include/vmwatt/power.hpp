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

// Host-side power logging for one VM process.

#ifndef VMWATT_POWER_HPP_
#define VMWATT_POWER_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vmwatt/clock.hpp"
#include "vmwatt/types.hpp"

namespace vmwatt {

inline constexpr std::string_view kPowerHeader = "timestamp,watts";
inline constexpr double kDefaultPlausibilityCeilingWatts = 10'000.0;

// powercap-style cumulative energy counter, in microjoules.
struct EnergyCounterState {
  std::uint64_t last_energy_uj = 0;
  EpochSeconds last_timestamp = 0;
  std::uint64_t max_energy_range_uj = 0;
};

struct PowerReading {
  double watts = 0;
  bool implausible = false;
  EnergyCounterState state;
};

// Energy consumed between two counter reads, accounting for one wrap.
std::uint64_t energy_delta_uj(std::uint64_t last, std::uint64_t current,
                              std::uint64_t max_range);

PowerReading energy_delta_to_watts(
    const EnergyCounterState& state, std::uint64_t current_energy_uj,
    EpochSeconds current_timestamp,
    double ceiling_watts = kDefaultPlausibilityCeilingWatts);

class PowerBackend {
 public:
  virtual ~PowerBackend() = default;

  // Called once before the first tick.
  virtual void prime(EpochSeconds /*now*/) {}
  // One reading for the interval ending at `now`; std::nullopt when the
  // backend has gone away or ran out of data.
  virtual std::optional<PowerSample> read(EpochSeconds now) = 0;
  virtual std::string_view kind() const = 0;
};

// Reads `energy_uj` and `max_energy_range_uj` from a powercap zone directory.
// The whole domain's power is attributed to the target PID.
class CounterFileBackend final : public PowerBackend {
 public:
  explicit CounterFileBackend(
      std::filesystem::path zone_dir,
      double ceiling_watts = kDefaultPlausibilityCeilingWatts);

  void prime(EpochSeconds now) override;
  std::optional<PowerSample> read(EpochSeconds now) override;
  std::string_view kind() const override { return "counter-file"; }

 private:
  std::optional<std::uint64_t> read_energy() const;

  std::filesystem::path zone_dir_;
  double ceiling_watts_;
  std::optional<EnergyCounterState> state_;
};

// Adapter for CSV output of an external power tool. Needs `timestamp` and
// `watts` columns; any other columns are ignored.
class ExternalCsvBackend final : public PowerBackend {
 public:
  explicit ExternalCsvBackend(std::vector<PowerSample> rows)
      : rows_(std::move(rows)) {}
  static ExternalCsvBackend from_file(const std::filesystem::path& path);

  std::optional<PowerSample> read(EpochSeconds now) override;
  std::string_view kind() const override { return "external-csv"; }

 private:
  std::vector<PowerSample> rows_;
  std::size_t next_ = 0;
};

// "counter-file:PATH", "external-csv:PATH" or "synthetic:CONFIG".
std::unique_ptr<PowerBackend> make_power_backend(std::string_view spec);

void write_power_header(std::ostream& out);
void write_power_row(std::ostream& out, const PowerSample& sample);
std::vector<PowerSample> read_power_csv(std::istream& in,
                                        const std::string& source_name);
std::vector<PowerSample> load_power_csv(const std::filesystem::path& path);
void save_power_csv(const std::filesystem::path& path,
                    std::span<const PowerSample> samples);

// Lenient reader behind ExternalCsvBackend.
std::vector<PowerSample> read_external_power_csv(std::istream& in,
                                                 const std::string& source_name);

struct PowerLoggerOptions {
  long pid = 0;
  double interval = 1.0;
  double duration = 0.0;
  const std::atomic<bool>* stop = nullptr;
};

struct PowerLoggerResult {
  std::size_t count = 0;
  bool backend_gone = false;  // partial run, e.g. the VM was stopped
  bool stopped = false;
};

PowerLoggerResult run_power_logger(PowerBackend& backend, Clock& clock,
                                   const PowerLoggerOptions& options,
                                   std::ostream& sink);

}  // namespace vmwatt

#endif  // VMWATT_POWER_HPP_
