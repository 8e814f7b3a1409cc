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

#include "dflsim/chart.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace dflsim {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  double x_min = 0.0, x_max = 1.0;
  bool any = false;
  for (const auto& s : chart.series) {
    for (const auto& [x, y] : s.points) {
      x_min = any ? std::min(x_min, x) : x;
      x_max = any ? std::max(x_max, x) : x;
      any = true;
    }
  }
  if (x_max - x_min < 1e-12) {
    x_min -= 0.05;
    x_max += 0.05;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  const auto sy = [&](double y) { return kTop + (1.0 - std::clamp(y, 0.0, 1.0)) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<title>" << escape(chart.title) << "</title>\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
    << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(chart.title) << "</text>\n";

  o << "<g class=\"axes\" stroke=\"#333\" stroke-width=\"1\">\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph
    << "\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph << "\"/>\n"
    << "</g>\n";

  o << "<g class=\"ticks\" fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = i / 5.0;
    o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(sy(y) + 4) << "\" text-anchor=\"end\">" << tick(y)
      << "</text>\n";
    const double x = x_min + (x_max - x_min) * i / 5.0;
    o << "<text x=\"" << fmt(sx(x)) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">" << tick(x)
      << "</text>\n";
  }
  o << "</g>\n";
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(chart.x_label) << "</text>\n"
    << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fmt(kTop + ph / 2) << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    o << "<g class=\"series\" data-name=\"" << escape(s.name) << "\">\n";
    if (!s.points.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t p = 0; p < s.points.size(); ++p) {
        o << (p ? " " : "") << fmt(sx(s.points[p].first)) << ',' << fmt(sy(s.points[p].second));
      }
      o << "\"/>\n";
      for (const auto& [x, y] : s.points) {
        o << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
    o << "<line x1=\"" << fmt(kLeft + pw + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(kLeft + pw + 32)
      << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << fmt(kLeft + pw + 38) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.name) << "</text>\n"
      << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<ChartFile> campaign_charts(const ResultsBundle& bundle) {
  // (topology, aggregation) -> attack -> fraction -> (sum, count)
  using Acc = std::map<double, std::pair<double, std::size_t>>;
  std::map<std::pair<std::string, std::string>, std::map<std::string, Acc>> groups;
  std::vector<std::pair<std::string, std::string>> group_order;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> attack_order;

  for (const auto& r : bundle.runs) {
    if (!r.result) continue;
    const std::pair<std::string, std::string> g{std::string(to_string(r.run.key.topology)), r.run.key.aggregation};
    if (!groups.count(g)) group_order.push_back(g);
    auto& attacks = groups[g];
    if (!attacks.count(r.run.key.attack)) attack_order[g].push_back(r.run.key.attack);
    auto& cell = attacks[r.run.key.attack][r.run.key.fraction];
    cell.first += r.result->summary.final_mean_benign_f1;
    cell.second += 1;
  }

  std::vector<ChartFile> files;
  for (const auto& g : group_order) {
    ChartFile f;
    f.filename = "f1_vs_fraction_" + g.first + "_" + g.second + ".svg";
    f.chart.title = "Mean benign F1: " + g.first + " / " + g.second;
    f.chart.x_label = "malicious fraction";
    f.chart.y_label = "final mean benign F1";
    for (const auto& attack : attack_order[g]) {
      ChartSeries s;
      s.name = attack;
      for (const auto& [x, acc] : groups[g][attack]) {
        s.points.emplace_back(x, acc.first / static_cast<double>(acc.second));
      }
      f.chart.series.push_back(std::move(s));
    }
    files.push_back(std::move(f));
  }
  return files;
}

}  // namespace dflsim
