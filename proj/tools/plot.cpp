// Copyright 2026 The mitiknit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "mitiknit/circuit.hpp"

namespace mitiknit::tools {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

}  // namespace

int CsvData::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error("CSV has no column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  CsvData d;
  std::string line;
  if (!std::getline(in, line)) throw Error(path + " is empty");
  d.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_line(line);
    if (row.size() != d.header.size()) throw Error("ragged row in " + path);
    d.rows.push_back(std::move(row));
  }
  return d;
}

PlotSpec default_spec(const CsvData& d) {
  auto has = [&](const char* c) { return std::find(d.header.begin(), d.header.end(), c) != d.header.end(); };
  if (has("energy_per_qubit")) return {"step", "energy_per_qubit", "mode", false, "E/N per VQE step"};
  if (has("delta_e_per_qubit")) return {"p_noise", "delta_e_per_qubit", "method", true, "final error vs noise scale"};
  if (has("C")) return {"C", "one_minus_r2", "N", true, "1 - R^2 vs cuts"};
  if (has("baseline_error")) return {"k_train", "one_minus_r2", "", true, "1 - R^2 vs training-set size"};
  if (has("k_train")) return {"k_train", "one_minus_r2", "N", true, "1 - R^2 vs training-set size"};
  if (d.header.size() < 2) throw Error("need at least two columns to plot");
  return {d.header[0], d.header[1], "", false, ""};
}

std::string render_svg(const CsvData& d, const PlotSpec& spec) {
  const int xc = d.column(spec.x), yc = d.column(spec.y);
  const int sc = spec.series.empty() ? -1 : d.column(spec.series);
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  for (const auto& r : d.rows) {
    const std::string key = sc < 0 ? spec.y : r[static_cast<std::size_t>(sc)];
    double x = std::stod(r[static_cast<std::size_t>(xc)]);
    double y = std::stod(r[static_cast<std::size_t>(yc)]);
    if (spec.log_y) {
      if (!(y > 0)) continue;
      y = std::log10(y);
    }
    if (!series.count(key)) order.push_back(key);
    series[key].emplace_back(x, y);
  }
  // fig8 carries a flat reference line in its own column.
  const bool baseline = std::find(d.header.begin(), d.header.end(), "baseline_error") != d.header.end();
  if (baseline) {
    const int bc = d.column("baseline_error");
    for (const auto& r : d.rows) {
      const double y = std::stod(r[static_cast<std::size_t>(bc)]);
      if (spec.log_y && !(y > 0)) continue;
      if (!series.count("baseline_error")) order.push_back("baseline_error");
      series["baseline_error"].emplace_back(std::stod(r[static_cast<std::size_t>(xc)]),
                                            spec.log_y ? std::log10(y) : y);
    }
  }
  if (series.empty()) throw Error("nothing to plot");

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (auto& [_, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (auto [x, y] : pts) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double w = 640, h = 420, left = 80, right = 170, top = 40, bottom = 60;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };

  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
    << "</text>\n"
    << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4, yv = y0 + (y1 - y0) * t / 4;
    std::ostringstream xl, yl;
    xl << std::setprecision(4) << xv;
    yl << std::setprecision(3) << (spec.log_y ? std::pow(10.0, yv) : yv);
    s << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 16 << "\" text-anchor=\"middle\">" << xl.str()
      << "</text>\n"
      << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yl.str()
      << "</text>\n";
  }
  s << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 18 << "\" text-anchor=\"middle\">"
    << escape(spec.x) << "</text>\n"
    << "<text x=\"18\" y=\"" << (top + h - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (top + h - bottom) / 2 << ")\">" << escape(spec.y) << (spec.log_y ? " (log)" : "") << "</text>\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& pts = series[order[i]];
    const char* color = kColors[i % std::size(kColors)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
      << (order[i] == "baseline_error" ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (auto [x, y] : pts) s << px(x) << ',' << py(y) << ' ';
    s << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(i);
    s << "<line x1=\"" << w - right + 12 << "\" y1=\"" << ly << "\" x2=\"" << w - right + 32 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << w - right + 38 << "\" y=\"" << ly + 4 << "\">" << escape(order[i]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace mitiknit::tools
