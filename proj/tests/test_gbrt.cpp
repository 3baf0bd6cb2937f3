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
#include <vector>

#include "oracles/tree_oracle.hpp"
#include "support.hpp"
#include "vmwatt/error.hpp"
#include "vmwatt/gbrt.hpp"

using namespace vmwatt;

namespace {

FeatureVector fv(double a, double b = 0) { return {a, b, 0, 0, 0, 0}; }

GbrHyperparameters hp(int n_trees, double lr, int depth, std::size_t leaf = 1) {
  GbrHyperparameters h;
  h.n_trees = n_trees;
  h.learning_rate = lr;
  h.max_depth = depth;
  h.min_samples_leaf = leaf;
  return h;
}

}  // namespace

TEST_CASE("constant targets give a single leaf") {
  std::vector<FeatureVector> x{fv(1), fv(2), fv(3), fv(4)};
  std::vector<double> y{5, 5, 5, 5};
  auto tree = fit_tree(x, y, {3, 1}, 0);
  REQUIRE(tree.nodes().size() == 1);
  CHECK(tree.nodes()[0].is_leaf());
  CHECK(tree.nodes()[0].value == 5.0);
  CHECK(tree.nodes()[0].n_samples == 4);
}

TEST_CASE("step data splits at the midpoint 2.5") {
  std::vector<FeatureVector> x{fv(1), fv(2), fv(3), fv(4)};
  std::vector<double> y{0, 0, 10, 10};
  auto tree = fit_tree(x, y, {1, 1}, 0);
  const auto& root = tree.nodes()[0];
  REQUIRE_FALSE(root.is_leaf());
  CHECK(root.feature_index == 0);
  CHECK(root.threshold == 2.5);
  CHECK(tree.nodes()[root.left].value == 0.0);
  CHECK(tree.nodes()[root.right].value == 10.0);
  CHECK(root.impurity_decrease == doctest::Approx(100.0));

  CHECK(tree_predict(tree, fv(2)) == 0.0);
  CHECK(tree_predict(tree, fv(3)) == 10.0);
  CHECK(tree_predict(tree, fv(2.5)) == 0.0);
}

TEST_CASE("max_depth 0 gives the mean") {
  std::vector<FeatureVector> x{fv(1), fv(2), fv(7)};
  std::vector<double> y{1, 2, 6};
  auto tree = fit_tree(x, y, {0, 1}, 0);
  REQUIRE(tree.nodes().size() == 1);
  CHECK(tree.nodes()[0].value == doctest::Approx(3.0));
}

TEST_CASE("a single-leaf tree predicts its value everywhere") {
  auto tree = RegressionTree::leaf(7.0, 3);
  CHECK(tree_predict(tree, fv(-100, 4)) == 7.0);
  CHECK(tree_predict(tree, fv(1e9)) == 7.0);
}

TEST_CASE("ties go to the lowest feature, then the lowest threshold") {
  // Features 0 and 1 are identical, so every split ties across features.
  std::vector<FeatureVector> x{fv(1, 1), fv(2, 2), fv(3, 3), fv(4, 4)};
  std::vector<double> y{0, 10, 0, 10};
  auto tree = fit_tree(x, y, {1, 1}, 0);
  CHECK(tree.nodes()[0].feature_index == 0);
  // Thresholds 1.5 and 3.5 give the same gain; the lower one wins.
  CHECK(tree.nodes()[0].threshold == 1.5);
}

TEST_CASE("min_samples_leaf is respected") {
  std::vector<FeatureVector> x{fv(1), fv(2), fv(3), fv(4), fv(5)};
  std::vector<double> y{100, 0, 0, 0, 0};
  auto tree = fit_tree(x, y, {1, 2}, 0);
  const auto& root = tree.nodes()[0];
  REQUIRE_FALSE(root.is_leaf());
  CHECK(tree.nodes()[root.left].n_samples >= 2);
  CHECK(tree.nodes()[root.right].n_samples >= 2);
}

TEST_CASE("fit input errors") {
  std::vector<FeatureVector> none;
  std::vector<double> empty;
  CHECK_THROWS_AS(fit_tree(none, empty, {}, 0), Error);
  try {
    fit_gbr(none, empty, hp(1, 1, 1));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kData);
  }

  std::vector<FeatureVector> x{fv(1), fv(NAN)};
  std::vector<double> y{1, 2};
  try {
    fit_tree(x, y, {}, 0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kData);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("hyperparameter validation") {
  std::vector<FeatureVector> x{fv(1), fv(2)};
  std::vector<double> y{1, 2};
  for (auto bad : {hp(0, 0.1, 3), hp(1, 0.0, 3), hp(1, 1.5, 3), hp(1, 0.1, 3, 0)}) {
    try {
      fit_gbr(x, y, bad);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConfig);
    }
  }
}

TEST_CASE("tree splits match the brute-force oracle") {
  std::mt19937_64 rng(1234);
  for (int instance = 0; instance < 60; ++instance) {
    std::uniform_int_distribution<int> n_dist(1, 40);
    const auto n = static_cast<std::size_t>(n_dist(rng));
    // Small integer grids force plenty of exact ties.
    std::uniform_int_distribution<int> v(0, 6);
    std::vector<FeatureVector> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = fv(v(rng), v(rng));
      y[i] = v(rng);
    }
    const int depth = instance % 3;
    const std::size_t leaf = 1 + static_cast<std::size_t>(instance % 2);
    auto got = oracle::flatten(fit_tree(x, y, {depth, leaf}, 0));
    auto want = oracle::brute_force_tree(x, y, depth, leaf);
    CHECK_MESSAGE(oracle::same_steps(got, want), "instance " << instance);
  }
}

TEST_CASE("zero trees predict the baseline") {
  GbrModel m;
  m.baseline = 12.5;
  CHECK(m.predict(fv(3, 4)) == 12.5);
  std::vector<double> x(6, 1.0);
  CHECK(gbr_predict(m, x) == 12.5);
}

TEST_CASE("wrong feature count is a shape error") {
  GbrModel m;
  std::vector<double> x(5, 1.0);
  try {
    gbr_predict(m, x);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kShape);
  }
}

TEST_CASE("one full tree with unit learning rate reproduces the targets") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 100);
  std::vector<FeatureVector> x(200);
  std::vector<double> y(200);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    y[i] = u(rng);
  }
  auto model = fit_gbr(x, y, hp(1, 1.0, 64));
  auto pred = model.predict_batch(x);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(pred[i] == doctest::Approx(y[i]).epsilon(1e-9));
}

TEST_CASE("constant targets give zero-valued leaves") {
  std::vector<FeatureVector> x{fv(1), fv(2), fv(3)};
  std::vector<double> y{4, 4, 4};
  auto model = fit_gbr(x, y, hp(5, 0.1, 3));
  CHECK(model.baseline == 4.0);
  REQUIRE(model.trees.size() == 5);
  for (const auto& t : model.trees) {
    REQUIRE(t.nodes().size() == 1);
    CHECK(t.nodes()[0].value == 0.0);
  }
  CHECK(model.predict(fv(100)) == 4.0);
  auto imp = mdi_importances(model);
  CHECK(imp.no_splits);
  for (double p : imp.percentages) CHECK(p == 0.0);
}

TEST_CASE("linear target: training RMSE and agreement with naive boosting") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> cpu(0, 100);
  std::vector<FeatureVector> x(1000);
  std::vector<double> y(1000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = fv(cpu(rng));
    y[i] = 10 + 0.5 * x[i][0];
  }
  FitTrace trace;
  auto model = fit_gbr(x, y, hp(200, 0.1, 3), default_feature_names(), &trace);
  auto pred = model.predict_batch(x);
  double se = 0;
  for (std::size_t i = 0; i < y.size(); ++i) se += (pred[i] - y[i]) * (pred[i] - y[i]);
  const double train_rmse = std::sqrt(se / static_cast<double>(y.size()));
  CHECK(train_rmse < 0.5);
  CHECK(trace.training_mse.size() == 201);
  CHECK(trace.training_mse.back() == doctest::Approx(train_rmse * train_rmse));

  auto naive = oracle::naive_boost(x, y, 200, 0.1, 3, 1);
  CHECK(naive.baseline == doctest::Approx(model.baseline).epsilon(1e-12));
  double max_diff = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(naive.train_predictions[i] - pred[i]));
  }
  CHECK(max_diff < 1e-6);
  std::size_t same_trees = 0;
  for (std::size_t m = 0; m < model.trees.size(); ++m) {
    same_trees += same_steps(oracle::flatten(model.trees[m]), naive.trees[m]);
  }
  CHECK(same_trees == model.trees.size());
}

TEST_CASE("prediction decomposes tree by tree") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<FeatureVector> x(150);
  std::vector<double> y(150);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    y[i] = std::sin(6 * x[i][0]) + x[i][3];
  }
  auto model = fit_gbr(x, y, hp(30, 0.3, 2));
  for (std::size_t i = 0; i < 20; ++i) {
    double sum = 0;
    for (const auto& t : model.trees) sum += tree_predict(t, x[i]);
    CHECK(model.predict(x[i]) == model.baseline + model.learning_rate * sum);
  }
}

TEST_CASE("training MSE never increases") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0, 1);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<FeatureVector> x(300);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    y[i] = x[i][0] * x[i][1] + noise(rng);
  }
  FitTrace trace;
  fit_gbr(x, y, hp(100, 0.1, 3), default_feature_names(), &trace);
  for (std::size_t m = 1; m < trace.training_mse.size(); ++m) {
    CHECK(trace.training_mse[m] <= trace.training_mse[m - 1]);
  }
}

TEST_CASE("MDI: single-feature splits and normalization") {
  std::vector<FeatureVector> x{fv(1), fv(2), fv(3), fv(4)};
  std::vector<double> y{0, 1, 5, 9};
  auto model = fit_gbr(x, y, hp(10, 0.5, 2));
  auto imp = mdi_importances(model);
  CHECK_FALSE(imp.no_splits);
  CHECK(imp.percentages[0] == doctest::Approx(100.0));
  for (std::size_t f = 1; f < kFeatureCount; ++f) CHECK(imp.percentages[f] == 0.0);

  // Hand-built model: decreases 30 and 10 on features 2 and 5.
  GbrModel hand;
  TreeNode a;
  a.feature_index = 2;
  a.threshold = 0;
  a.left = 1;
  a.right = 2;
  a.impurity_decrease = 30;
  a.n_samples = 2;
  TreeNode leaf;
  leaf.n_samples = 1;
  TreeNode b = a;
  b.feature_index = 5;
  b.impurity_decrease = 10;
  hand.trees.emplace_back(std::vector<TreeNode>{a, leaf, leaf});
  hand.trees.emplace_back(std::vector<TreeNode>{b, leaf, leaf});
  auto hi = mdi_importances(hand);
  CHECK(hi.percentages[2] == doctest::Approx(75.0));
  CHECK(hi.percentages[5] == doctest::Approx(25.0));
}

TEST_CASE("fitting is deterministic") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<FeatureVector> x(100);
  std::vector<double> y(100);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    y[i] = u(rng);
  }
  auto a = fit_gbr(x, y, hp(20, 0.1, 3));
  auto b = fit_gbr(x, y, hp(20, 0.1, 3));
  CHECK(model_to_json(a) == model_to_json(b));
}

TEST_CASE("model JSON round trip") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 50);
  std::vector<FeatureVector> x(120);
  std::vector<double> y(120);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    y[i] = x[i][0] * 0.3 + std::sqrt(x[i][4]);
  }
  auto model = fit_gbr(x, y, hp(25, 0.2, 3));
  testing::TempDir dir;
  save_model(model, dir / "m.json");
  auto loaded = load_model(dir / "m.json");
  CHECK(loaded == model);
  for (int i = 0; i < 100; ++i) {
    FeatureVector q{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    CHECK(loaded.predict(q) == model.predict(q));
  }

  const auto text = testing::read_file(dir / "m.json");
  CHECK(text.rfind("{\"version\":1,\"feature_names\":", 0) == 0);
}

TEST_CASE("model JSON errors") {
  testing::TempDir dir;
  testing::write_file(dir / "empty.json", "");
  try {
    load_model(dir / "empty.json");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
  }

  GbrModel m;
  auto text = model_to_json(m);
  auto v2 = text;
  v2.replace(v2.find("\"version\":1"), 11, "\"version\":2");
  try {
    model_from_json(v2);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnsupportedVersion);
  }

  auto bad = text;
  bad.replace(bad.find("\"baseline\":0.0"), 14, "\"baseline\":\"x\"");
  try {
    model_from_json(bad, "bad.json");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("$.baseline") != std::string::npos);
  }

  try {
    load_model(dir / "missing.json");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotFound);
  }
}
