//
// Copyright 2026 The OraclePriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ORACLEPRIV_PLOT_H_
#define ORACLEPRIV_PLOT_H_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oraclepriv/stats.hpp"

namespace oraclepriv {

class PlotError : public std::runtime_error {
 public:
  explicit PlotError(const std::string& what) : std::runtime_error(what) {}
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  size_t ColumnIndex(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw PlotError("missing column: " + name);
  }
};

inline CsvTable ReadCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlotError("cannot open csv: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw PlotError("empty csv: " + path);
  return table;
}

struct PlotOptions {
  std::string x;
  std::string y;
  std::string group;  // optional
  bool log_x = false;
  bool log_y = false;
  int width = 720;
  int height = 480;
};

namespace internal {

inline std::string SvgColor(size_t series) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  return kPalette[series % 8];
}

inline std::string FormatTick(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

}  // namespace internal

// Renders a median-with-IQR-band line chart: one series per group value,
// aggregation over trials at each x.
inline void RenderSvg(const CsvTable& table, const PlotOptions& opt,
                      const std::string& out_path) {
  if (table.rows.empty()) throw PlotError("csv has no data rows");
  size_t xi = table.ColumnIndex(opt.x);
  size_t yi = table.ColumnIndex(opt.y);
  bool grouped = !opt.group.empty();
  size_t gi = grouped ? table.ColumnIndex(opt.group) : 0;

  // group -> x -> y samples
  std::map<std::string, std::map<double, std::vector<double>>> series;
  for (const auto& row : table.rows) {
    if (row.size() <= std::max(xi, yi)) continue;
    double x, y;
    try {
      x = std::stod(row[xi]);
      y = std::stod(row[yi]);
    } catch (const std::exception&) {
      throw PlotError("non-numeric cell in column " + opt.x + " or " + opt.y);
    }
    std::string g = grouped ? row[gi] : "all";
    series[g][x].push_back(y);
  }
  if (series.empty()) throw PlotError("no plottable rows");

  auto tx = [&](double v) {
    if (!opt.log_x) return v;
    if (v <= 0.0) throw PlotError("log scale requires positive x values");
    return std::log10(v);
  };
  auto ty = [&](double v) {
    if (!opt.log_y) return v;
    if (v <= 0.0) throw PlotError("log scale requires positive y values");
    return std::log10(v);
  };

  struct Band {
    double x, med, lo, hi;
  };
  std::map<std::string, std::vector<Band>> bands;
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (auto& [g, by_x] : series) {
    for (auto& [x, ys] : by_x) {
      Band b;
      b.x = tx(x);
      b.med = ty(Median(ys));
      b.lo = ty(Quantile(ys, 0.25));
      b.hi = ty(Quantile(ys, 0.75));
      min_x = std::min(min_x, b.x);
      max_x = std::max(max_x, b.x);
      min_y = std::min(min_y, b.lo);
      max_y = std::max(max_y, b.hi);
      bands[g].push_back(b);
    }
  }
  if (max_x <= min_x) {
    max_x = min_x + 1.0;
    min_x -= 1.0;
  }
  if (max_y <= min_y) {
    max_y = min_y + 1.0;
    min_y -= 1.0;
  }
  double pad_y = 0.05 * (max_y - min_y);
  min_y -= pad_y;
  max_y += pad_y;

  const int ml = 70, mr = 20, mt = 20, mb = 50;
  double pw = opt.width - ml - mr;
  double ph = opt.height - mt - mb;
  auto px = [&](double v) { return ml + (v - min_x) / (max_x - min_x) * pw; };
  auto py = [&](double v) { return mt + ph - (v - min_y) / (max_y - min_y) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
      << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << " "
      << opt.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes and ticks.
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    double fx = min_x + (max_x - min_x) * t / 5.0;
    double fy = min_y + (max_y - min_y) * t / 5.0;
    double label_x = opt.log_x ? std::pow(10.0, fx) : fx;
    double label_y = opt.log_y ? std::pow(10.0, fy) : fy;
    svg << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(fx)
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">"
        << internal::FormatTick(label_x) << "</text>\n";
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml
        << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">"
        << internal::FormatTick(label_y) << "</text>\n";
  }
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << opt.height - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">" << opt.x << "</text>\n";
  svg << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << mt + ph / 2 << ")\">" << opt.y << "</text>\n";

  size_t series_idx = 0;
  double legend_y = mt + 12;
  for (auto& [g, pts] : bands) {
    std::sort(pts.begin(), pts.end(),
              [](const Band& a, const Band& b) { return a.x < b.x; });
    std::string color = internal::SvgColor(series_idx);
    if (pts.size() > 1) {
      // IQR band.
      svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (const auto& b : pts) svg << px(b.x) << "," << py(b.hi) << " ";
      for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        svg << px(it->x) << "," << py(it->lo) << " ";
      }
      svg << "\"/>\n";
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\" points=\"";
      for (const auto& b : pts) svg << px(b.x) << "," << py(b.med) << " ";
      svg << "\"/>\n";
    }
    for (const auto& b : pts) {
      svg << "<circle cx=\"" << px(b.x) << "\" cy=\"" << py(b.med)
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    svg << "<rect x=\"" << ml + pw - 150 << "\" y=\"" << legend_y - 9
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << ml + pw - 135 << "\" y=\"" << legend_y
        << "\" font-size=\"12\">" << g << "</text>\n";
    legend_y += 16;
    ++series_idx;
  }
  svg << "</svg>\n";

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw PlotError("cannot write svg: " + out_path);
  out << svg.str();
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_PLOT_H_
