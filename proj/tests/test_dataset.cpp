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

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "support.hpp"
#include "vmwatt/dataset.hpp"
#include "vmwatt/error.hpp"

using namespace vmwatt;

namespace {

std::vector<MetricsSample> metrics_grid(std::size_t n, double t0 = 1000, double step = 1) {
  std::vector<MetricsSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].timestamp = t0 + step * static_cast<double>(i);
    out[i].values = {static_cast<double>(i % 100), 50, 1, 2, 3, 4};
  }
  return out;
}

std::vector<PowerSample> power_grid(std::size_t n, double t0 = 1000, double step = 1) {
  std::vector<PowerSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].timestamp = t0 + step * static_cast<double>(i);
    out[i].watts = 10 + static_cast<double>(i);
  }
  return out;
}

TrainingDataset sized(std::size_t n, double tag) {
  TrainingDataset d;
  for (std::size_t i = 0; i < n; ++i) d.add_row({tag, 0, 0, 0, 0, 0}, static_cast<double>(i));
  return d;
}

}  // namespace

TEST_CASE("identical grids join one to one") {
  auto d = join(metrics_grid(100), power_grid(100));
  CHECK(d.size() == 100);
  const auto& s = d.provenance.joins.at(0);
  CHECK(s.matched == 100);
  CHECK(s.unmatched_metrics == 0);
  CHECK(s.unmatched_power == 0);
  CHECK(d.targets[7] == 17.0);
}

TEST_CASE("offset within tolerance matches, outside does not") {
  auto d = join(metrics_grid(50), power_grid(50, 1000.4), {0.5, false});
  CHECK(d.size() == 50);
  // on a 1 s grid +0.6 is 0.4 from the next row, so use a 2 s grid
  try {
    join(metrics_grid(50, 1000, 2), power_grid(50, 1000.6, 2), {0.5, false});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kJoin);
    CHECK(std::string(e.what()).find("1000") != std::string::npos);
  }
}

TEST_CASE("each power row is used once, nearest wins, earlier wins ties") {
  std::vector<MetricsSample> m(2);
  m[0].timestamp = 10.0;
  m[1].timestamp = 10.5;
  std::vector<PowerSample> p(1);
  p[0].timestamp = 10.25;  // equidistant
  p[0].watts = 5;
  auto d = join(m, p, {0.5, false});
  REQUIRE(d.size() == 1);
  CHECK(d.provenance.joins[0].unmatched_metrics == 1);

  m[0].values[kCpuTotal] = 1;
  m[1].values[kCpuTotal] = 2;
  d = join(m, p, {0.5, false});
  CHECK(d.features[0][kCpuTotal] == 1);

  p[0].timestamp = 10.3;  // closer to the second row
  d = join(m, p, {0.5, false});
  CHECK(d.features[0][kCpuTotal] == 2);
}

TEST_CASE("join properties on jittered logs") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> jitter(-0.7, 0.7);
  std::bernoulli_distribution drop(0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<MetricsSample> m;
    std::vector<PowerSample> p;
    for (int i = 0; i < 200; ++i) {
      if (!drop(rng)) {
        MetricsSample s;
        s.timestamp = i;
        s.values[kCpuTotal] = i % 100;
        m.push_back(s);
      }
      if (!drop(rng)) {
        PowerSample s;
        s.timestamp = i + jitter(rng);
        s.watts = 1000 + i;  // encodes the power row
        if (!p.empty() && s.timestamp <= p.back().timestamp) continue;
        p.push_back(s);
      }
    }
    const auto a = join(m, p, {0.5, false});
    const auto b = join(m, p, {0.5, false});
    std::stringstream sa, sb;
    write_dataset_csv(sa, a);
    write_dataset_csv(sb, b);
    CHECK(sa.str() == sb.str());

    std::set<double> used;
    for (std::size_t r = 0; r < a.size(); ++r) CHECK(used.insert(a.targets[r]).second);
    const auto& s = a.provenance.joins[0];
    CHECK(s.matched == a.size());
    CHECK(s.matched + s.unmatched_metrics == m.size());
    CHECK(s.matched + s.unmatched_power == p.size());
  }
}

TEST_CASE("every matched pair is within tolerance") {
  std::vector<MetricsSample> m = metrics_grid(30);
  std::vector<PowerSample> p;
  for (int i = 0; i < 30; ++i) {
    PowerSample s;
    s.timestamp = 1000 + i + (i % 3) * 0.3;
    s.watts = s.timestamp;  // remember the power time
    p.push_back(s);
  }
  auto d = join(m, p, {0.5, false});
  for (std::size_t r = 0; r < d.size(); ++r) {
    const double t_metrics = 1000 + d.features[r][kCpuTotal];
    CHECK(std::abs(t_metrics - d.targets[r]) <= 0.5);
  }
}

TEST_CASE("flagged rows are excluded unless kept") {
  auto m = metrics_grid(10);
  m[0].flags = kFlagBaseline;
  auto p = power_grid(10);
  p[3].flags = kFlagImplausible;
  auto d = join(m, p);
  CHECK(d.size() == 8);
  CHECK(d.provenance.joins[0].excluded_flagged == 2);
  auto kept = join(m, p, {0.5, true});
  CHECK(kept.size() == 10);
}

TEST_CASE("join input errors") {
  auto m = metrics_grid(3);
  std::vector<PowerSample> none;
  try {
    join(m, none);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kJoin);
  }
  auto unsorted = metrics_grid(3);
  std::swap(unsorted[0], unsorted[2]);
  try {
    join(unsorted, power_grid(3));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
  }
}

TEST_CASE("merge concatenates and keeps provenance") {
  std::vector<TrainingDataset> parts{sized(100, 1), sized(200, 2), sized(300, 3)};
  parts[0].provenance.sources = {"a"};
  parts[1].provenance.sources = {"b"};
  parts[2].provenance.sources = {"c"};
  auto merged = merge_datasets(parts);
  CHECK(merged.size() == 600);
  CHECK(merged.features[100][0] == 2);
  CHECK(merged.provenance.sources == std::vector<std::string>{"a", "b", "c"});

  std::vector<TrainingDataset> twice{parts[0], parts[0]};
  auto doubled = merge_datasets(twice);
  REQUIRE(doubled.size() == 200);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(doubled.targets[i] == parts[0].targets[i]);
    CHECK(doubled.targets[100 + i] == parts[0].targets[i]);
  }
}

TEST_CASE("merging mismatched feature orders is a schema error") {
  testing::TempDir dir;
  save_dataset(dir / "a.csv", sized(5, 1));
  testing::write_file(dir / "b.csv",
                      "mem.used,cpu.total,disk.read,disk.write,net.rx,net.tx,watts\n"
                      "1,2,3,4,5,6,7\n");
  std::vector<TrainingDataset> parts{load_dataset(dir / "a.csv"), load_dataset(dir / "b.csv")};
  try {
    merge_datasets(parts);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSchema);
  }
}

TEST_CASE("dataset CSV and provenance round trip") {
  testing::TempDir dir;
  auto d = join(metrics_grid(20), power_grid(20), {0.5, false}, "m.csv", "p.csv");
  d.features[3] = {12.345678901234567, 0.1, 1e-7, 3e12, 0, 99};
  save_dataset(dir / "d.csv", d);
  CHECK(testing::read_file(dir / "d.csv").rfind(std::string(kDatasetHeader) + "\n", 0) == 0);
  CHECK(std::filesystem::exists(provenance_path(dir / "d.csv")));
  auto back = load_dataset(dir / "d.csv");
  CHECK(back.feature_names == d.feature_names);
  CHECK(back.features == d.features);
  CHECK(back.targets == d.targets);
  CHECK(back.provenance == d.provenance);
}

TEST_CASE("malformed dataset CSV") {
  for (const std::string& bad : std::vector<std::string>{
           "", "cpu.total,watts\n", std::string(kDatasetHeader) + "\n1,2,3\n",
        std::string(kDatasetHeader) + "\n1,2,3,4,5,6,-1\n",
        std::string(kDatasetHeader) + "\n1,2,3,4,5,inf,1\n"}) {
    std::stringstream in(bad);
    try {
      read_dataset_csv(in, "d.csv");
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kParse);
      CHECK(std::string(e.what()).find("d.csv:") != std::string::npos);
    }
  }
}
