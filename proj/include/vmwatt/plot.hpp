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

#ifndef VMWATT_PLOT_HPP_
#define VMWATT_PLOT_HPP_

#include <span>
#include <string>

#include "vmwatt/evaluation.hpp"

namespace vmwatt {

struct PlotOptions {
  int width = 900;
  int height = 420;
  std::string title = "Ground truth vs. prediction";
};

// Line chart of truth and prediction in dataset row order, as standalone SVG.
std::string render_truth_prediction_svg(std::span<const TruthPrediction> rows,
                                        const PlotOptions& options = {});

}  // namespace vmwatt

#endif  // VMWATT_PLOT_HPP_
