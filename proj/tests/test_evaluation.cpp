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

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "vmwatt/error.hpp"
#include "vmwatt/evaluation.hpp"
#include "vmwatt/plot.hpp"

using namespace vmwatt;

namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kConfig;
}

TrainingDataset step_dataset(std::size_t n) {
  TrainingDataset d;
  for (std::size_t i = 0; i < n; ++i) {
    const double cpu = static_cast<double>(i % 10) * 10;
    d.add_row({cpu, 0, 0, 0, 0, 0}, cpu < 50 ? 10.0 : 30.0);
  }
  return d;
}

}  // namespace

TEST_CASE("shuffle split sizes and disjointness") {
  ShuffleSplitPlan plan{100, 0.2, 7};
  auto folds = shuffle_split(10, plan);
  REQUIRE(folds.size() == 100);
  for (const auto& f : folds) {
    CHECK(f.test.size() == 2);
    CHECK(f.train.size() == 8);
    std::set<std::size_t> all(f.test.begin(), f.test.end());
    all.insert(f.train.begin(), f.train.end());
    CHECK(all.size() == 10);
  }
  auto again = shuffle_split(10, plan);
  for (std::size_t k = 0; k < folds.size(); ++k) {
    CHECK(again[k].test == folds[k].test);
    CHECK(again[k].train == folds[k].train);
  }
}

TEST_CASE("degenerate splits are configuration errors") {
  CHECK(kind_of([] { shuffle_split(10, {100, 0.05, 0}); }) == ErrorKind::kConfig);
  CHECK(kind_of([] { shuffle_split(1, {1, 0.5, 0}); }) == ErrorKind::kConfig);
  CHECK(kind_of([] { shuffle_split(10, {0, 0.2, 0}); }) == ErrorKind::kConfig);
  CHECK(kind_of([] { shuffle_split(10, {1, 0.99, 0}); }) == ErrorKind::kConfig);
}

TEST_CASE("r2 examples") {
  std::vector<double> y{0, 1, 2, 3};
  CHECK(r2(y, y) == 1.0);
  std::vector<double> mean(4, 1.5);
  CHECK(r2(y, mean) == 0.0);
  std::vector<double> p{0, 1, 2, 5};
  CHECK(r2(y, p) == doctest::Approx(0.2));
  std::vector<double> flat{2, 2, 2};
  CHECK(kind_of([&] { r2(flat, flat); }) == ErrorKind::kUndefinedMetric);
  std::vector<double> shorter{1, 2};
  CHECK(kind_of([&] { r2(y, shorter); }) == ErrorKind::kShape);
}

TEST_CASE("mae and rmse examples") {
  std::vector<double> y{3, 4};
  CHECK(mae(y, y) == 0.0);
  CHECK(rmse(y, y) == 0.0);
  std::vector<double> pm{2, 5};
  CHECK(mae(y, pm) == 1.0);
  CHECK(rmse(y, pm) == 1.0);
  std::vector<double> p02{3, 6};
  CHECK(mae(y, p02) == 1.0);
  CHECK(rmse(y, p02) == doctest::Approx(std::sqrt(2.0)));
  std::vector<double> one{1};
  CHECK(kind_of([&] { mae(y, one); }) == ErrorKind::kShape);
}

TEST_CASE("metric properties on random vectors") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0, 10);
  std::uniform_int_distribution<int> len(2, 50);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(len(rng)));
    std::vector<double> b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = n(rng);
      b[i] = n(rng);
    }
    CHECK(rmse(a, b) >= mae(a, b));
    const double shift = n(rng) * 5;
    auto as = a;
    auto bs = b;
    for (auto& v : as) v += shift;
    for (auto& v : bs) v += shift;
    CHECK(r2(as, bs) == doctest::Approx(r2(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("perfectly learnable target scores 1") {
  auto d = step_dataset(200);
  GbrHyperparameters hp;
  hp.n_trees = 1;
  hp.learning_rate = 1.0;
  hp.max_depth = 1;
  auto result = cross_validate(d, hp, {10, 0.2, 3});
  REQUIRE(result.report.per_fold.size() == 10);
  for (const auto& m : result.report.per_fold) {
    CHECK(m.r2 == 1.0);
    CHECK(m.mae == 0.0);
    CHECK(m.rmse == 0.0);
  }
}

TEST_CASE("single fold report and export") {
  auto d = step_dataset(50);
  GbrHyperparameters hp;
  hp.n_trees = 20;
  CvOptions opt;
  opt.export_fold = 0;
  auto result = cross_validate(d, hp, {1, 0.2, 1}, opt);
  REQUIRE(result.report.per_fold.size() == 1);
  CHECK(result.report.mean_r2 == result.report.per_fold[0].r2);
  CHECK(result.report.mean_mae == result.report.per_fold[0].mae);
  CHECK(result.report.mean_rmse == result.report.per_fold[0].rmse);
  CHECK(result.exported.size() == 10);
  auto folds = shuffle_split(50, {1, 0.2, 1});
  for (std::size_t i = 0; i < result.exported.size(); ++i) {
    CHECK(result.exported[i].row == folds[0].test[i]);
    CHECK(result.exported[i].truth == d.targets[folds[0].test[i]]);
  }

  opt.export_fold = 5;
  CHECK(kind_of([&] { cross_validate(d, hp, {1, 0.2, 1}, opt); }) == ErrorKind::kConfig);
}

TEST_CASE("fold results do not depend on the thread count") {
  TrainingDataset d;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 100);
  for (int i = 0; i < 200; ++i) {
    FeatureVector x{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    d.add_row(x, 0.3 * x[0] + 0.1 * x[3] + u(rng) / 20);
  }
  GbrHyperparameters hp;
  hp.n_trees = 20;
  CvOptions serial;
  serial.threads = 1;
  CvOptions parallel;
  parallel.threads = 4;
  auto a = cross_validate(d, hp, {12, 0.25, 9}, serial);
  auto b = cross_validate(d, hp, {12, 0.25, 9}, parallel);
  CHECK(a.report.per_fold == b.report.per_fold);
  CHECK(report_to_json(a.report) == report_to_json(b.report));

  double sum = 0;
  for (const auto& m : a.report.per_fold) {
    sum += m.r2;
    CHECK(m.rmse >= m.mae);
    CHECK(m.mae >= 0);
  }
  CHECK(a.report.mean_r2 == doctest::Approx(sum / 12).epsilon(1e-12));
}

TEST_CASE("fold errors name the fold") {
  // Every target equal inside each test fold: R^2 undefined.
  TrainingDataset d;
  for (int i = 0; i < 10; ++i) d.add_row({static_cast<double>(i), 0, 0, 0, 0, 0}, 5.0);
  GbrHyperparameters hp;
  hp.n_trees = 2;
  try {
    cross_validate(d, hp, {3, 0.2, 0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUndefinedMetric);
    CHECK(std::string(e.what()).rfind("fold 0:", 0) == 0);
  }
}

TEST_CASE("report JSON mirrors the report") {
  CvReport r;
  r.per_fold = {{0.9, 1.0, 1.5}, {0.8, 2.0, 2.5}};
  r.mean_r2 = 0.85;
  auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["n_splits"] == 100);
  CHECK(j["per_fold"].size() == 2);
  CHECK(j["per_fold"][1]["rmse"] == 2.5);
  CHECK(j["mean_r2"] == 0.85);
}

TEST_CASE("truth/prediction CSV round trip and plot") {
  std::vector<TruthPrediction> rows{{3, 10.5, 11.25}, {0, 20, 19.0625}, {7, 0.1, 0.3}};
  std::stringstream buf;
  write_truth_prediction_csv(buf, rows);
  auto back = read_truth_prediction_csv(buf, "tp.csv");
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].row == rows[i].row);
    CHECK(back[i].truth == rows[i].truth);
    CHECK(back[i].prediction == rows[i].prediction);
  }

  std::stringstream bad("row,truth,prediction\n1,2\n");
  try {
    read_truth_prediction_csv(bad, "tp.csv");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("tp.csv:2") != std::string::npos);
  }

  const auto svg = render_truth_prediction_svg(rows);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
