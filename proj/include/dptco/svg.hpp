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
#pragma once

// Minimal static SVG line charts: stacked panels of polylines with linear
// axes and an optional log-scaled y axis.

#include <string>
#include <vector>

namespace dptco {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

/// At most `max_points` vertices are drawn per series. Non-finite samples,
/// and non-positive ones on log axes, are skipped.
std::string render_svg(const std::vector<PlotPanel>& panels, int width = 800,
                       int panel_height = 360, std::size_t max_points = 2000);

/// Throws kIoFailure.
void write_svg(const std::string& path, const std::vector<PlotPanel>& panels);

}  // namespace dptco
