/*
 * Copyright 2026 The dflsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef DFLSIM_CHART_HPP_
#define DFLSIM_CHART_HPP_

#include <string>
#include <utility>
#include <vector>

#include "dflsim/results.hpp"

namespace dflsim {

struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // sorted by x
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
};

// Self-contained SVG document. The y axis is fixed to [0, 1].
std::string render_svg(const LineChart& chart);

struct ChartFile {
  std::string filename;
  LineChart chart;
};

// One chart per (topology, aggregation): final mean benign F1 against
// malicious fraction, one series per attack, replicates averaged.
// Failed runs are skipped.
std::vector<ChartFile> campaign_charts(const ResultsBundle& bundle);

}  // namespace dflsim

#endif  // DFLSIM_CHART_HPP_
