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

// Versioned JSON model format. Trees are nested node objects:
//   leaf:     {"value", "n_samples"}
//   internal: {"feature_index", "threshold", "impurity_decrease",
//              "n_samples", "left", "right"}

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vmwatt/csv.hpp"
#include "vmwatt/error.hpp"
#include "vmwatt/gbrt.hpp"

namespace vmwatt {
namespace {

using Json = nlohmann::ordered_json;

Json node_to_json(const std::vector<TreeNode>& nodes, std::size_t i) {
  const auto& node = nodes[i];
  Json j;
  if (node.is_leaf()) {
    j["value"] = node.value;
    j["n_samples"] = node.n_samples;
    return j;
  }
  j["feature_index"] = node.feature_index;
  j["threshold"] = node.threshold;
  j["impurity_decrease"] = node.impurity_decrease;
  j["n_samples"] = node.n_samples;
  j["left"] = node_to_json(nodes, static_cast<std::size_t>(node.left));
  j["right"] = node_to_json(nodes, static_cast<std::size_t>(node.right));
  return j;
}

class ModelReader {
 public:
  explicit ModelReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw Error(ErrorKind::kParse, source_ + ": at " + path + ": " + what);
  }

  const Json& field(const Json& obj, const char* key,
                    const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const Json& obj, const char* key, const std::string& path) const {
    const auto& v = field(obj, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path + "." + key, "non-finite number");
    return d;
  }

  std::size_t count(const Json& obj, const char* key,
                    const std::string& path) const {
    const auto& v = field(obj, key, path);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail(path + "." + key, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  // Reads one tree breadth first, children allocated in pairs, which is the
  // layout fit_tree produces.
  std::vector<TreeNode> read_tree(const Json& root, const std::string& root_path) const {
    struct Pending {
      const Json* json;
      std::string path;
    };
    std::vector<TreeNode> nodes(1);
    std::vector<Pending> queue{{&root, root_path}};
    for (std::size_t index = 0; index < queue.size(); ++index) {
      const Json& j = *queue[index].json;
      const std::string path = queue[index].path;
      if (!j.is_object()) fail(path, "expected a node object");
      TreeNode node;
      node.n_samples = count(j, "n_samples", path);
      if (!j.contains("left") && !j.contains("right")) {
        node.value = number(j, "value", path);
        nodes[index] = node;
        continue;
      }
      node.feature_index = count(j, "feature_index", path);
      if (node.feature_index >= kFeatureCount) {
        fail(path + ".feature_index", "out of range");
      }
      node.threshold = number(j, "threshold", path);
      node.impurity_decrease = number(j, "impurity_decrease", path);
      if (node.impurity_decrease < 0) {
        fail(path + ".impurity_decrease", "must be >= 0");
      }
      const Json& left = field(j, "left", path);
      const Json& right = field(j, "right", path);
      for (const Json* child : {&left, &right}) {
        if (!child->is_object()) fail(path, "expected child node objects");
      }
      const std::size_t n_children = count(left, "n_samples", path + ".left") +
                                     count(right, "n_samples", path + ".right");
      if (n_children != node.n_samples) {
        fail(path + ".n_samples", "does not equal the children's sum");
      }
      node.left = static_cast<std::int32_t>(nodes.size());
      node.right = node.left + 1;
      nodes.resize(nodes.size() + 2);
      queue.push_back({&left, path + ".left"});
      queue.push_back({&right, path + ".right"});
      nodes[index] = node;
    }
    return nodes;
  }

  GbrModel read(const Json& root) const {
    if (!root.is_object()) fail("$", "expected a JSON object");
    const auto& version = field(root, "version", "$");
    if (!version.is_number_integer() || version.get<long long>() != kModelFormatVersion) {
      throw Error(ErrorKind::kUnsupportedVersion,
                  source_ + ": model format version " + version.dump() +
                      " is not supported (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    }

    GbrModel model;
    const auto& names = field(root, "feature_names", "$");
    if (!names.is_array() || names.size() != kFeatureCount) {
      fail("$.feature_names", "expected an array of six names");
    }
    model.feature_names.clear();
    for (const auto& name : names) {
      if (!name.is_string()) fail("$.feature_names", "expected strings");
      model.feature_names.push_back(name.get<std::string>());
    }
    model.baseline = number(root, "baseline", "$");
    model.learning_rate = number(root, "learning_rate", "$");

    const auto& hp = field(root, "hyperparameters", "$");
    const std::string hp_path = "$.hyperparameters";
    model.hyperparameters.n_trees = static_cast<int>(count(hp, "n_trees", hp_path));
    model.hyperparameters.learning_rate = number(hp, "learning_rate", hp_path);
    model.hyperparameters.max_depth =
        static_cast<int>(count(hp, "max_depth", hp_path));
    model.hyperparameters.min_samples_leaf =
        count(hp, "min_samples_leaf", hp_path);
    model.hyperparameters.seed = field(hp, "seed", hp_path).get<std::uint64_t>();

    const auto& trees = field(root, "trees", "$");
    if (!trees.is_array()) fail("$.trees", "expected an array");
    for (std::size_t t = 0; t < trees.size(); ++t) {
      model.trees.emplace_back(
          read_tree(trees[t], "$.trees[" + std::to_string(t) + "]"));
    }
    return model;
  }

 private:
  std::string source_;
};

}  // namespace

std::string model_to_json(const GbrModel& model) {
  Json j;
  j["version"] = kModelFormatVersion;
  j["feature_names"] = model.feature_names;
  j["baseline"] = model.baseline;
  j["learning_rate"] = model.learning_rate;
  const auto& hp = model.hyperparameters;
  j["hyperparameters"] = Json{{"n_trees", hp.n_trees},
                              {"learning_rate", hp.learning_rate},
                              {"max_depth", hp.max_depth},
                              {"min_samples_leaf", hp.min_samples_leaf},
                              {"seed", hp.seed}};
  Json trees = Json::array();
  for (const auto& tree : model.trees) {
    trees.push_back(node_to_json(tree.nodes(), 0));
  }
  j["trees"] = std::move(trees);
  return j.dump() + "\n";
}

GbrModel model_from_json(const std::string& text,
                         const std::string& source_name) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, source_name + ": at byte " +
                                       std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return ModelReader(source_name).read(root);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, source_name + ": " + e.what());
  }
}

void save_model(const GbrModel& model, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << model_to_json(model);
  if (!out.flush()) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

GbrModel load_model(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str(), path.string());
}

}  // namespace vmwatt
