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

#include "vmwatt/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "vmwatt/csv.hpp"
#include "vmwatt/error.hpp"

namespace vmwatt {
namespace {

void check_lengths(std::span<const double> a, std::span<const double> b,
                   std::size_t min_len) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kShape, "y_true and y_pred lengths differ (" +
                                       std::to_string(a.size()) + " vs " +
                                       std::to_string(b.size()) + ")");
  }
  if (a.size() < min_len) {
    throw Error(ErrorKind::kShape, "need at least " + std::to_string(min_len) +
                                       " values");
  }
}

}  // namespace

std::size_t test_size(std::size_t n, const ShuffleSplitPlan& plan) {
  // Halves round to even, so 0.5 rows is 0 rows.
  return static_cast<std::size_t>(
      std::nearbyint(plan.test_fraction * static_cast<double>(n)));
}

std::vector<Fold> shuffle_split(std::size_t n, const ShuffleSplitPlan& plan) {
  if (plan.n_splits < 1) {
    throw Error(ErrorKind::kConfig, "need at least one split");
  }
  if (!(plan.test_fraction > 0 && plan.test_fraction < 1)) {
    throw Error(ErrorKind::kConfig, "test_fraction must lie in (0, 1)");
  }
  const auto n_test = test_size(n, plan);
  if (n < 2 || n_test < 1 || n_test >= n) {
    throw Error(ErrorKind::kConfig,
                "test_fraction " + csv::format_number(plan.test_fraction) +
                    " on " + std::to_string(n) +
                    " rows leaves an empty train or test set");
  }

  std::mt19937_64 rng(plan.seed);
  std::vector<std::size_t> perm(n);
  std::vector<Fold> folds;
  folds.reserve(plan.n_splits);
  for (std::size_t k = 0; k < plan.n_splits; ++k) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Fold fold;
    fold.test.assign(perm.begin(), perm.begin() + static_cast<long>(n_test));
    fold.train.assign(perm.begin() + static_cast<long>(n_test), perm.end());
    folds.push_back(std::move(fold));
  }
  return folds;
}

double r2(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, 2);
  const double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) /
                      static_cast<double>(y_true.size());
  double ss_res = 0;
  double ss_tot = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (!(ss_tot > 0)) {
    throw Error(ErrorKind::kUndefinedMetric,
                "R^2 is undefined when y_true has zero variance");
  }
  return 1.0 - ss_res / ss_tot;
}

double mae(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, 1);
  double acc = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    acc += std::abs(y_true[i] - y_pred[i]);
  }
  return acc / static_cast<double>(y_true.size());
}

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, 1);
  double acc = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    acc += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
  }
  return std::sqrt(acc / static_cast<double>(y_true.size()));
}

CvResult cross_validate(const TrainingDataset& dataset,
                        const GbrHyperparameters& hyperparameters,
                        const ShuffleSplitPlan& plan,
                        const CvOptions& options) {
  hyperparameters.validate();
  const auto folds = shuffle_split(dataset.size(), plan);
  if (options.export_fold && *options.export_fold >= folds.size()) {
    throw Error(ErrorKind::kConfig,
                "export fold " + std::to_string(*options.export_fold) +
                    " does not exist (" + std::to_string(folds.size()) +
                    " folds)");
  }

  CvResult result;
  result.report.plan = plan;
  result.report.hyperparameters = hyperparameters;
  result.report.per_fold.resize(folds.size());

  auto run_fold = [&](std::size_t k) {
    const auto& fold = folds[k];
    std::vector<FeatureVector> x_train;
    std::vector<double> y_train;
    x_train.reserve(fold.train.size());
    y_train.reserve(fold.train.size());
    for (auto r : fold.train) {
      x_train.push_back(dataset.features[r]);
      y_train.push_back(dataset.targets[r]);
    }
    GbrModel model;
    try {
      model = fit_gbr(x_train, y_train, hyperparameters, dataset.feature_names);
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(k) + ": " + e.what());
    }

    std::vector<double> y_true;
    std::vector<double> y_pred;
    for (auto r : fold.test) {
      y_true.push_back(dataset.targets[r]);
      y_pred.push_back(model.predict(dataset.features[r]));
    }
    FoldMetrics m;
    try {
      m = {r2(y_true, y_pred), mae(y_true, y_pred), rmse(y_true, y_pred)};
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(k) + ": " + e.what());
    }
    result.report.per_fold[k] = m;

    if (options.export_fold && *options.export_fold == k) {
      for (std::size_t i = 0; i < fold.test.size(); ++i) {
        result.exported.push_back({fold.test[i], y_true[i], y_pred[i]});
      }
    }
  };

  // Folds are independent; each worker writes only its own slot and the
  // first failing fold (lowest index) is reported.
  unsigned threads = options.threads ? options.threads
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, folds.size()));
  if (threads <= 1) {
    for (std::size_t k = 0; k < folds.size(); ++k) run_fold(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_fold = folds.size();
    std::exception_ptr error;
    {
      std::vector<std::jthread> workers;
      for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
          for (std::size_t k = next++; k < folds.size(); k = next++) {
            try {
              run_fold(k);
            } catch (...) {
              std::lock_guard<std::mutex> lock(error_mutex);
              if (k < error_fold) {
                error_fold = k;
                error = std::current_exception();
              }
            }
          }
        });
      }
    }
    if (error) std::rethrow_exception(error);
  }

  auto& report = result.report;
  const double n = static_cast<double>(report.per_fold.size());
  for (const auto& m : report.per_fold) {
    report.mean_r2 += m.r2;
    report.mean_mae += m.mae;
    report.mean_rmse += m.rmse;
  }
  report.mean_r2 /= n;
  report.mean_mae /= n;
  report.mean_rmse /= n;
  return result;
}

std::string report_to_json(const CvReport& report) {
  nlohmann::ordered_json j;
  j["n_splits"] = report.plan.n_splits;
  j["test_fraction"] = report.plan.test_fraction;
  j["seed"] = report.plan.seed;
  const auto& hp = report.hyperparameters;
  j["hyperparameters"] = nlohmann::ordered_json{
      {"n_trees", hp.n_trees},
      {"learning_rate", hp.learning_rate},
      {"max_depth", hp.max_depth},
      {"min_samples_leaf", hp.min_samples_leaf},
      {"seed", hp.seed}};
  j["mean_r2"] = report.mean_r2;
  j["mean_mae"] = report.mean_mae;
  j["mean_rmse"] = report.mean_rmse;
  auto folds = nlohmann::ordered_json::array();
  for (const auto& m : report.per_fold) {
    folds.push_back({{"r2", m.r2}, {"mae", m.mae}, {"rmse", m.rmse}});
  }
  j["per_fold"] = std::move(folds);
  return j.dump(2) + "\n";
}

void write_truth_prediction_csv(std::ostream& out,
                                std::span<const TruthPrediction> rows) {
  out << "row,truth,prediction\n";
  for (const auto& r : rows) {
    out << r.row << ',' << csv::format_number(r.truth) << ','
        << csv::format_number(r.prediction) << '\n';
  }
}

std::vector<TruthPrediction> read_truth_prediction_csv(
    std::istream& in, const std::string& source_name) {
  std::string line;
  if (!csv::read_line(in, line) || line != "row,truth,prediction") {
    throw Error(ErrorKind::kParse, csv::location(source_name, 1) +
                                       ": expected header 'row,truth,prediction'");
  }
  std::vector<TruthPrediction> rows;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = csv::location(source_name, line_no);
    auto fields = csv::split(line);
    if (fields.size() != 3) {
      throw Error(ErrorKind::kParse, where + ": expected 3 fields");
    }
    const double row = csv::parse_number(fields[0], where);
    if (row < 0 || row != std::floor(row)) {
      throw Error(ErrorKind::kParse, where + ": row must be a non-negative integer");
    }
    rows.push_back({static_cast<std::size_t>(row),
                    csv::parse_number(fields[1], where),
                    csv::parse_number(fields[2], where)});
  }
  return rows;
}

}  // namespace vmwatt
