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

#include "vmwatt/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "vmwatt/csv.hpp"

namespace vmwatt {
namespace {

constexpr double kMarginLeft = 60;
constexpr double kMarginRight = 20;
constexpr double kMarginTop = 40;
constexpr double kMarginBottom = 45;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

}  // namespace

std::string render_truth_prediction_svg(std::span<const TruthPrediction> rows,
                                        const PlotOptions& options) {
  std::vector<TruthPrediction> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.row < b.row; });

  double lo = 0;
  double hi = 1;
  if (!sorted.empty()) {
    lo = hi = sorted.front().truth;
    for (const auto& r : sorted) {
      lo = std::min({lo, r.truth, r.prediction});
      hi = std::max({hi, r.truth, r.prediction});
    }
    if (hi - lo < 1e-9) {
      lo -= 1;
      hi += 1;
    }
  }
  const double plot_w = options.width - kMarginLeft - kMarginRight;
  const double plot_h = options.height - kMarginTop - kMarginBottom;
  const double n = static_cast<double>(std::max<std::size_t>(sorted.size(), 2) - 1);

  auto px = [&](std::size_t i) { return kMarginLeft + plot_w * static_cast<double>(i) / n; };
  auto py = [&](double w) { return kMarginTop + plot_h * (hi - w) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
      << "\" height=\"" << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << options.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << options.title << "</text>\n";

  // Axes and y ticks.
  svg << "<g stroke=\"#444\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << kMarginTop + plot_h << "\"/>\n";
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
      << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h << "\"/>\n";
  svg << "</g>\n";
  for (int t = 0; t <= 4; ++t) {
    const double w = lo + (hi - lo) * t / 4.0;
    svg << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << fmt(py(w) + 4)
        << "\" text-anchor=\"end\">" << fmt(w) << "</text>\n";
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(py(w)) << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << fmt(py(w))
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
  }
  svg << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" transform=\"rotate(-90 16 " << kMarginTop + plot_h / 2
      << ")\" text-anchor=\"middle\">watts</text>\n";
  svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << options.height - 10
      << "\" text-anchor=\"middle\">held-out sample (dataset order)</text>\n";

  auto polyline = [&](auto value, const char* color) {
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      svg << fmt(px(i)) << ',' << fmt(py(value(sorted[i]))) << ' ';
    }
    svg << "\"/>\n";
  };
  polyline([](const TruthPrediction& r) { return r.truth; }, "#1f77b4");
  polyline([](const TruthPrediction& r) { return r.prediction; }, "#ff7f0e");

  const double lx = kMarginLeft + plot_w - 150;
  svg << "<rect x=\"" << lx << "\" y=\"" << kMarginTop + 4
      << "\" width=\"145\" height=\"40\" fill=\"white\" stroke=\"#bbb\"/>\n";
  svg << "<line x1=\"" << lx + 8 << "\" y1=\"" << kMarginTop + 17 << "\" x2=\"" << lx + 30
      << "\" y2=\"" << kMarginTop + 17 << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << lx + 36 << "\" y=\"" << kMarginTop + 21 << "\">ground truth</text>\n";
  svg << "<line x1=\"" << lx + 8 << "\" y1=\"" << kMarginTop + 35 << "\" x2=\"" << lx + 30
      << "\" y2=\"" << kMarginTop + 35 << "\" stroke=\"#ff7f0e\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << lx + 36 << "\" y=\"" << kMarginTop + 39 << "\">prediction</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vmwatt
