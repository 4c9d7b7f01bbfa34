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

#include <string>
#include <utility>
#include <vector>

namespace dptco {

/// Outcome of one runtime or post-hoc monitor.
struct MonitorReport {
  std::string name;
  bool pass = true;
  double max_ratio = 0.0;
  /// Negative when no violation occurred.
  double first_violation_t = -1.0;
  /// Named extra numbers (fitted constants and the like).
  std::vector<std::pair<std::string, double>> extras;

  double extra(const std::string& key, double fallback = 0.0) const {
    for (const auto& [k, v] : extras)
      if (k == key) return v;
    return fallback;
  }
};

}  // namespace dptco
