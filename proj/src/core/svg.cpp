/******************************************************************************
 * Copyright 2026 The DPTCO Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include "dptco/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dptco/errors.hpp"

namespace dptco {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool usable(double y, bool log_y) {
  return std::isfinite(y) && (!log_y || y > 0.0);
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels, int width,
                       int panel_height, std::size_t max_points) {
  const int ml = 70, mr = 150, mt = 30, mb = 45;
  const int height = panel_height * static_cast<int>(std::max<std::size_t>(1, panels.size()));
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const PlotPanel& panel = panels[p];
    const int top = static_cast<int>(p) * panel_height;
    const double pw = width - ml - mr, ph = panel_height - mt - mb;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : panel.series)
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !usable(s.y[k], panel.log_y)) continue;
        const double yv = panel.log_y ? std::log10(s.y[k]) : s.y[k];
        x0 = std::min(x0, s.x[k]);
        x1 = std::max(x1, s.x[k]);
        y0 = std::min(y0, yv);
        y1 = std::max(y1, yv);
      }
    if (!(x0 < x1)) { x0 = 0.0; x1 = 1.0; }
    if (!(y0 < y1)) { y0 = std::isfinite(y0) ? y0 - 1.0 : 0.0; y1 = y0 + 2.0; }
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) {
      const double v = panel.log_y ? std::log10(y) : y;
      return top + mt + (1.0 - (v - y0) / (y1 - y0)) * ph;
    };

    os << "<text x=\"" << width / 2 << "\" y=\"" << top + 18
       << "\" text-anchor=\"middle\" font-size=\"13\">" << esc(panel.title)
       << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << top + mt << "\" width=\"" << pw
       << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double xv = x0 + (x1 - x0) * t / 4.0;
      const double yv = y0 + (y1 - y0) * t / 4.0;
      const double X = px(xv), Y = top + mt + (1.0 - t / 4.0) * ph;
      os << "<text x=\"" << X << "\" y=\"" << top + mt + ph + 15
         << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
      os << "<text x=\"" << ml - 5 << "\" y=\"" << Y + 4
         << "\" text-anchor=\"end\">"
         << (panel.log_y ? "1e" + fmt(yv) : fmt(yv)) << "</text>\n";
      os << "<line x1=\"" << ml << "\" x2=\"" << ml + pw << "\" y1=\"" << Y
         << "\" y2=\"" << Y << "\" stroke=\"#ddd\"/>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << top + panel_height - 8
       << "\" text-anchor=\"middle\">" << esc(panel.x_label) << "</text>\n";
    os << "<text transform=\"translate(14," << top + mt + ph / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << esc(panel.y_label)
       << "</text>\n";

    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const PlotSeries& ser = panel.series[s];
      const char* color = kPalette[s % std::size(kPalette)];
      const std::size_t n = std::min(ser.x.size(), ser.y.size());
      const std::size_t stride = std::max<std::size_t>(1, n / max_points);
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.3\"" << (ser.dashed ? " stroke-dasharray=\"5,3\"" : "")
         << " points=\"";
      char buf[64];
      auto vertex = [&](std::size_t k) {
        if (!std::isfinite(ser.x[k]) || !usable(ser.y[k], panel.log_y)) return;
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(ser.x[k]), py(ser.y[k]));
        os << buf;
      };
      for (std::size_t k = 0; k < n; k += stride) vertex(k);
      if (n > 0 && (n - 1) % stride != 0) vertex(n - 1);
      os << "\"/>\n";
      const int ly = top + mt + 14 * static_cast<int>(s) + 8;
      os << "<line x1=\"" << ml + pw + 10 << "\" x2=\"" << ml + pw + 30
         << "\" y1=\"" << ly << "\" y2=\"" << ly << "\" stroke=\"" << color
         << "\"" << (ser.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
      os << "<text x=\"" << ml + pw + 34 << "\" y=\"" << ly + 4 << "\">"
         << esc(ser.label) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const std::string& path, const std::vector<PlotPanel>& panels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  out << render_svg(panels);
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path);
}

}  // namespace dptco
