#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "forage/stats.hpp"

namespace forage {

namespace detail {

inline std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

/// Self-contained SVG 1.1 learning-curve chart: one polyline per algorithm
/// (mean steps survived per iteration) plus a centered moving-average overlay
/// per algorithm. Returns the plotted table as CSV through `table_csv`.
inline void emit_learning_curves(
    const std::map<std::string, std::vector<SeriesPoint>>& curves,
    std::ostream& svg, std::string* table_csv = nullptr,
    int smooth_window = 9) {
  const int width = 960, height = 540;
  const int ml = 60, mr = 160, mt = 30, mb = 50;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;

  std::size_t n_iter = 0;
  double y_max = 1.0;
  for (const auto& [name, series] : curves) {
    n_iter = std::max(n_iter, series.size());
    for (const auto& pt : series) y_max = std::max(y_max, pt.mean);
  }
  y_max *= 1.05;
  const double x_span = n_iter > 1 ? static_cast<double>(n_iter - 1) : 1.0;

  auto x_of = [&](double i) { return ml + plot_w * (i / x_span); };
  auto y_of = [&](double v) { return mt + plot_h * (1.0 - v / y_max); };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};

  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width
      << " " << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\""
      << ml + plot_w << "\" y2=\"" << mt + plot_h
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * i / 5.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << detail::fmt1(v)
        << "</text>\n";
  }
  for (int i = 0; i <= 6; ++i) {
    const double it = x_span * i / 6.0;
    const double x = x_of(it);
    svg << "<line x1=\"" << x << "\" y1=\"" << mt + plot_h << "\" x2=\"" << x
        << "\" y2=\"" << mt + plot_h + 4 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << x << "\" y=\"" << mt + plot_h + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">"
        << static_cast<int>(it) << "</text>\n";
  }
  svg << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">iteration</text>\n";
  svg << "<text x=\"18\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << mt + plot_h / 2 << ")\">mean steps survived</text>\n";

  int ci = 0;
  int legend_y = mt + 10;
  for (const auto& [name, series] : curves) {
    const char* color = kColors[ci % 6];
    // raw means
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1\" stroke-opacity=\"0.45\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i)
      svg << detail::fmt1(x_of(static_cast<double>(i))) << ','
          << detail::fmt1(y_of(series[i].mean)) << ' ';
    svg << "\"/>\n";
    // moving average overlay
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2.5\" points=\"";
    const int hw = smooth_window / 2;
    for (std::size_t i = 0; i < series.size(); ++i) {
      double acc = 0.0;
      int n = 0;
      for (int j = static_cast<int>(i) - hw; j <= static_cast<int>(i) + hw; ++j)
        if (j >= 0 && j < static_cast<int>(series.size())) {
          acc += series[j].mean;
          ++n;
        }
      svg << detail::fmt1(x_of(static_cast<double>(i))) << ','
          << detail::fmt1(y_of(acc / n)) << ' ';
    }
    svg << "\"/>\n";
    // legend entry
    svg << "<line x1=\"" << ml + plot_w + 14 << "\" y1=\"" << legend_y
        << "\" x2=\"" << ml + plot_w + 38 << "\" y2=\"" << legend_y
        << "\" stroke=\"" << color << "\" stroke-width=\"2.5\"/>\n"
        << "<text x=\"" << ml + plot_w + 44 << "\" y=\"" << legend_y + 4
        << "\" font-size=\"12\">" << name << "</text>\n";
    legend_y += 20;
    ++ci;
  }
  svg << "</svg>\n";

  if (table_csv) {
    std::string& t = *table_csv;
    t = "iteration";
    for (const auto& [name, series] : curves) t += "," + name;
    t += '\n';
    for (std::size_t i = 0; i < n_iter; ++i) {
      t += std::to_string(i);
      for (const auto& [name, series] : curves) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f",
                      i < series.size() ? series[i].mean : 0.0);
        t += ',';
        t += buf;
      }
      t += '\n';
    }
  }
}

}  // namespace forage
