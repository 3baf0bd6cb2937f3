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

// Guest-side resource telemetry: the six features the power model consumes,
// the sources that produce them, and the metrics CSV log.
//
// Units: cpu.total and mem.used are percentages of total capacity, the four
// I/O features are bytes per second. Rates are counter deltas over the time
// delta between two reads; the very first read of a counter source has no
// prior snapshot, reports rate 0 and carries the baseline flag.

#ifndef VMWATT_METRICS_HPP_
#define VMWATT_METRICS_HPP_

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

inline constexpr std::string_view kMetricsHeader =
    "timestamp,cpu.total,mem.used,disk.read,disk.write,net.rx,net.tx";

// Cumulative counters as read from the operating system at one instant.
struct RawCounters {
  EpochSeconds timestamp = 0;
  std::uint64_t cpu_busy_ticks = 0;
  std::uint64_t cpu_total_ticks = 0;
  double mem_used_percent = 0;
  std::uint64_t disk_read_bytes = 0;
  std::uint64_t disk_write_bytes = 0;
  std::uint64_t net_rx_bytes = 0;
  std::uint64_t net_tx_bytes = 0;
};

// Turns successive counter snapshots into samples.
class RateTracker {
 public:
  MetricsSample update(const RawCounters& raw);
  void reset() { last_.reset(); }

 private:
  std::optional<RawCounters> last_;
};

class MetricsSource {
 public:
  virtual ~MetricsSource() = default;

  // Returns std::nullopt once a finite source is exhausted.
  virtual std::optional<MetricsSample> read_sample(EpochSeconds now) = 0;
  virtual std::string_view kind() const = 0;
};

// Reads /proc style files below `proc_root`.
class SystemMetricsSource final : public MetricsSource {
 public:
  explicit SystemMetricsSource(std::filesystem::path proc_root = "/proc");

  std::optional<MetricsSample> read_sample(EpochSeconds now) override;
  std::string_view kind() const override { return "system"; }

  RawCounters read_counters(EpochSeconds now) const;

 private:
  std::filesystem::path proc_root_;
  RateTracker tracker_;
};

// Replays a metrics CSV row by row, ignoring the wall clock.
class ReplayMetricsSource final : public MetricsSource {
 public:
  explicit ReplayMetricsSource(std::vector<MetricsSample> samples)
      : samples_(std::move(samples)) {}
  static ReplayMetricsSource from_file(const std::filesystem::path& path);

  std::optional<MetricsSample> read_sample(EpochSeconds now) override;
  std::string_view kind() const override { return "replay"; }

 private:
  std::vector<MetricsSample> samples_;
  std::size_t next_ = 0;
};

// Parses "system", "replay:FILE" or "synthetic:CONFIG".
std::unique_ptr<MetricsSource> make_metrics_source(std::string_view spec);

// CSV log.
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsSample& sample);
std::vector<MetricsSample> read_metrics_csv(std::istream& in,
                                            const std::string& source_name);
std::vector<MetricsSample> load_metrics_csv(const std::filesystem::path& path);
void save_metrics_csv(const std::filesystem::path& path,
                      std::span<const MetricsSample> samples);

struct CollectorOptions {
  double interval = 1.0;
  double duration = 0.0;
  // Polled once per tick; set from a signal handler to stop early.
  const std::atomic<bool>* stop = nullptr;
};

struct CollectorResult {
  std::size_t count = 0;
  std::size_t skipped_ticks = 0;
  bool source_exhausted = false;
  bool stopped = false;
};

// Writes the header and floor(duration / interval) rows, fewer when the
// source runs dry or a stop is requested.
CollectorResult run_collector(MetricsSource& source, Clock& clock,
                              const CollectorOptions& options,
                              std::ostream& sink);

}  // namespace vmwatt

#endif  // VMWATT_METRICS_HPP_
