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

#ifndef VMWATT_EVALUATION_HPP_
#define VMWATT_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vmwatt/dataset.hpp"
#include "vmwatt/gbrt.hpp"

namespace vmwatt {

struct ShuffleSplitPlan {
  std::size_t n_splits = 100;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
};

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Test size is round(test_fraction * n), halves to even, for every fold.
std::size_t test_size(std::size_t n, const ShuffleSplitPlan& plan);
std::vector<Fold> shuffle_split(std::size_t n, const ShuffleSplitPlan& plan);

double r2(std::span<const double> y_true, std::span<const double> y_pred);
double mae(std::span<const double> y_true, std::span<const double> y_pred);
double rmse(std::span<const double> y_true, std::span<const double> y_pred);

struct FoldMetrics {
  double r2 = 0;
  double mae = 0;
  double rmse = 0;

  bool operator==(const FoldMetrics&) const = default;
};

struct CvReport {
  ShuffleSplitPlan plan;
  GbrHyperparameters hyperparameters;
  std::vector<FoldMetrics> per_fold;
  double mean_r2 = 0;
  double mean_mae = 0;
  double mean_rmse = 0;
};

struct TruthPrediction {
  std::size_t row = 0;  // index into the dataset
  double truth = 0;
  double prediction = 0;
};

struct CvOptions {
  std::optional<std::size_t> export_fold;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct CvResult {
  CvReport report;
  std::vector<TruthPrediction> exported;  // held-out rows of export_fold
};

CvResult cross_validate(const TrainingDataset& dataset,
                        const GbrHyperparameters& hyperparameters,
                        const ShuffleSplitPlan& plan,
                        const CvOptions& options = {});

std::string report_to_json(const CvReport& report);

void write_truth_prediction_csv(std::ostream& out,
                                std::span<const TruthPrediction> rows);
std::vector<TruthPrediction> read_truth_prediction_csv(
    std::istream& in, const std::string& source_name);

}  // namespace vmwatt

#endif  // VMWATT_EVALUATION_HPP_
