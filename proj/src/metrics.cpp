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

#include "vmwatt/metrics.hpp"

#include <algorithm>
#include <cctype>
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

// Delta of a monotonic counter; a decrease means the counter was reset.
std::uint64_t counter_delta(std::uint64_t previous, std::uint64_t current,
                            bool& reset) {
  if (current < previous) {
    reset = true;
    return 0;
  }
  return current - previous;
}

std::string read_file(const std::filesystem::path& path,
                      std::string_view counter) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kCollection, "cannot read " + std::string(counter) +
                                            " counter from " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Whole-disk devices only, so partitions are not double counted.
bool is_whole_disk(const std::string& name) {
  if (name.starts_with("loop") || name.starts_with("ram") ||
      name.starts_with("zram") || name.starts_with("dm-") ||
      name.starts_with("md")) {
    return false;
  }
  if (name.starts_with("nvme") || name.starts_with("mmcblk")) {
    return name.find('p', name.starts_with("nvme") ? 4 : 6) ==
           std::string::npos;
  }
  return !name.empty() && !std::isdigit(static_cast<unsigned char>(name.back()));
}

}  // namespace

MetricsSample RateTracker::update(const RawCounters& raw) {
  MetricsSample sample;
  sample.timestamp = raw.timestamp;
  sample.values[kMemUsed] = std::clamp(raw.mem_used_percent, 0.0, 100.0);

  if (!last_) {
    // No prior snapshot: CPU falls back to the since-boot ratio, rates are 0.
    sample.values[kCpuTotal] =
        raw.cpu_total_ticks == 0
            ? 0.0
            : 100.0 * static_cast<double>(raw.cpu_busy_ticks) /
                  static_cast<double>(raw.cpu_total_ticks);
    sample.flags |= kFlagBaseline;
    last_ = raw;
    return sample;
  }

  const RawCounters& prev = *last_;
  const double dt = raw.timestamp - prev.timestamp;
  if (!(dt > 0)) {
    throw Error(ErrorKind::kTiming,
                "counter snapshots are not increasing in time");
  }

  bool reset = false;
  auto busy = counter_delta(prev.cpu_busy_ticks, raw.cpu_busy_ticks, reset);
  auto total = counter_delta(prev.cpu_total_ticks, raw.cpu_total_ticks, reset);
  sample.values[kCpuTotal] =
      total == 0 ? 0.0
                 : std::clamp(100.0 * static_cast<double>(busy) /
                                  static_cast<double>(total),
                              0.0, 100.0);

  auto rate = [&](std::uint64_t before, std::uint64_t after) {
    return static_cast<double>(counter_delta(before, after, reset)) / dt;
  };
  sample.values[kDiskRead] = rate(prev.disk_read_bytes, raw.disk_read_bytes);
  sample.values[kDiskWrite] = rate(prev.disk_write_bytes, raw.disk_write_bytes);
  sample.values[kNetRx] = rate(prev.net_rx_bytes, raw.net_rx_bytes);
  sample.values[kNetTx] = rate(prev.net_tx_bytes, raw.net_tx_bytes);
  if (reset) sample.flags |= kFlagCounterReset;

  last_ = raw;
  return sample;
}

SystemMetricsSource::SystemMetricsSource(std::filesystem::path proc_root)
    : proc_root_(std::move(proc_root)) {}

RawCounters SystemMetricsSource::read_counters(EpochSeconds now) const {
  RawCounters raw;
  raw.timestamp = now;

  {
    std::istringstream stat(read_file(proc_root_ / "stat", "cpu"));
    std::string label;
    stat >> label;
    if (label != "cpu") {
      throw Error(ErrorKind::kCollection, "cpu counter line missing in " +
                                              (proc_root_ / "stat").string());
    }
    std::uint64_t field = 0;
    std::uint64_t idle = 0;
    for (int i = 0; i < 8 && (stat >> field); ++i) {
      // user nice system idle iowait irq softirq steal; guest time is
      // already folded into user.
      raw.cpu_total_ticks += field;
      if (i == 3 || i == 4) idle += field;
    }
    raw.cpu_busy_ticks = raw.cpu_total_ticks - idle;
  }

  {
    std::istringstream meminfo(read_file(proc_root_ / "meminfo", "memory"));
    std::string key;
    double value = 0;
    std::string unit;
    double total = -1;
    double available = -1;
    while (meminfo >> key >> value) {
      std::getline(meminfo, unit);
      if (key == "MemTotal:") total = value;
      if (key == "MemAvailable:") available = value;
    }
    if (total <= 0 || available < 0) {
      throw Error(ErrorKind::kCollection,
                  "MemTotal/MemAvailable counters missing in " +
                      (proc_root_ / "meminfo").string());
    }
    raw.mem_used_percent = 100.0 * (total - available) / total;
  }

  {
    std::istringstream disks(read_file(proc_root_ / "diskstats", "disk"));
    std::string line;
    while (std::getline(disks, line)) {
      std::istringstream fields(line);
      unsigned major = 0;
      unsigned minor = 0;
      std::string name;
      std::uint64_t reads = 0, reads_merged = 0, sectors_read = 0, read_ms = 0;
      std::uint64_t writes = 0, writes_merged = 0, sectors_written = 0;
      if (!(fields >> major >> minor >> name >> reads >> reads_merged >>
            sectors_read >> read_ms >> writes >> writes_merged >>
            sectors_written)) {
        continue;
      }
      if (!is_whole_disk(name)) continue;
      raw.disk_read_bytes += sectors_read * 512;
      raw.disk_write_bytes += sectors_written * 512;
    }
  }

  {
    std::istringstream net(read_file(proc_root_ / "net" / "dev", "network"));
    std::string line;
    while (std::getline(net, line)) {
      auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string name = line.substr(0, colon);
      name.erase(0, name.find_first_not_of(' '));
      if (name == "lo") continue;
      std::istringstream fields(line.substr(colon + 1));
      std::uint64_t rx = 0;
      std::uint64_t skip = 0;
      std::uint64_t tx = 0;
      fields >> rx;
      for (int i = 0; i < 7; ++i) fields >> skip;
      fields >> tx;
      if (!fields) continue;
      raw.net_rx_bytes += rx;
      raw.net_tx_bytes += tx;
    }
  }
  return raw;
}

std::optional<MetricsSample> SystemMetricsSource::read_sample(
    EpochSeconds now) {
  return tracker_.update(read_counters(now));
}

ReplayMetricsSource ReplayMetricsSource::from_file(
    const std::filesystem::path& path) {
  return ReplayMetricsSource(load_metrics_csv(path));
}

std::optional<MetricsSample> ReplayMetricsSource::read_sample(EpochSeconds) {
  if (next_ >= samples_.size()) return std::nullopt;
  return samples_[next_++];
}

void write_metrics_header(std::ostream& out) { out << kMetricsHeader << '\n'; }

void write_metrics_row(std::ostream& out, const MetricsSample& sample) {
  out << csv::format_number(sample.timestamp);
  for (double v : sample.values) out << ',' << csv::format_number(v);
  if (sample.flags != kFlagNone) out << ',' << flags_to_comment(sample.flags);
  out << '\n';
}

std::vector<MetricsSample> read_metrics_csv(std::istream& in,
                                            const std::string& source_name) {
  std::string line;
  if (!csv::read_line(in, line)) {
    throw Error(ErrorKind::kParse, source_name + ":1: empty metrics file");
  }
  if (line != kMetricsHeader) {
    throw Error(ErrorKind::kParse, csv::location(source_name, 1) +
                                       ": expected header '" +
                                       std::string(kMetricsHeader) + "'");
  }

  std::vector<MetricsSample> samples;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = csv::location(source_name, line_no);
    auto fields = csv::split(line);
    const bool has_comment = fields.size() == 8 && !fields[7].empty() &&
                             fields[7].front() == '#';
    if (fields.size() != 7 && !has_comment) {
      throw Error(ErrorKind::kParse,
                  where + ": expected 7 fields, got " +
                      std::to_string(fields.size()));
    }
    MetricsSample sample;
    sample.timestamp = csv::parse_number(fields[0], where);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      sample.values[i] = csv::parse_number(fields[i + 1], where);
    }
    if (has_comment) sample.flags = flags_from_comment(fields[7]);

    for (auto f : {kCpuTotal, kMemUsed}) {
      if (sample.values[f] < 0 || sample.values[f] > 100) {
        throw Error(ErrorKind::kParse, where + ": " +
                                           std::string(kFeatureNames[f]) +
                                           " outside [0, 100]");
      }
    }
    for (auto f : {kDiskRead, kDiskWrite, kNetRx, kNetTx}) {
      if (sample.values[f] < 0) {
        throw Error(ErrorKind::kParse, where + ": negative " +
                                           std::string(kFeatureNames[f]));
      }
    }
    if (!samples.empty() && sample.timestamp <= samples.back().timestamp) {
      throw Error(ErrorKind::kParse,
                  where + ": timestamps must be strictly increasing");
    }
    samples.push_back(sample);
  }
  return samples;
}

std::vector<MetricsSample> load_metrics_csv(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return read_metrics_csv(in, path.string());
}

void save_metrics_csv(const std::filesystem::path& path,
                      std::span<const MetricsSample> samples) {
  auto out = csv::open_output(path);
  write_metrics_header(out);
  for (const auto& s : samples) write_metrics_row(out, s);
  if (!out.flush()) {
    throw Error(ErrorKind::kIo, "write failed: " + path.string());
  }
}

CollectorResult run_collector(MetricsSource& source, Clock& clock,
                              const CollectorOptions& options,
                              std::ostream& sink) {
  if (!(options.interval >= 1.0)) {
    throw Error(ErrorKind::kConfig, "collection interval must be >= 1 s");
  }
  if (!(options.duration >= 0.0)) {
    throw Error(ErrorKind::kConfig, "collection duration must be >= 0");
  }

  CollectorResult result;
  write_metrics_header(sink);
  if (!sink.flush()) throw Error(ErrorKind::kIo, "metrics sink not writable");

  const auto ticks = static_cast<std::size_t>(
      std::floor(options.duration / options.interval + 1e-9));
  const EpochSeconds start = std::ceil(clock.now());
  EpochSeconds last_reading = -std::numeric_limits<double>::infinity();
  EpochSeconds last_written = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < ticks; ++k) {
    if (options.stop && options.stop->load()) {
      result.stopped = true;
      break;
    }
    clock.sleep_until(start + static_cast<double>(k) * options.interval);
    const EpochSeconds reading = clock.now();
    if (reading < last_reading) {
      log_warning("clock went backwards; skipping tick");
      ++result.skipped_ticks;
      continue;
    }
    last_reading = reading;

    auto sample = source.read_sample(std::round(reading));
    if (!sample) {
      result.source_exhausted = true;
      break;
    }
    if (sample->timestamp <= last_written) {
      log_warning("non-increasing sample timestamp; skipping tick");
      ++result.skipped_ticks;
      continue;
    }
    write_metrics_row(sink, *sample);
    if (!sink.flush()) {
      throw Error(ErrorKind::kIo, "metrics write failed after " +
                                      std::to_string(result.count) +
                                      " rows; output file is partial");
    }
    last_written = sample->timestamp;
    ++result.count;
  }
  return result;
}

}  // namespace vmwatt
