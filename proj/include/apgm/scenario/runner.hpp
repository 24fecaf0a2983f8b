// Copyright 2026 The APGM Authors
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

#ifndef APGM_SCENARIO_RUNNER_HPP
#define APGM_SCENARIO_RUNNER_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "apgm/grid_map.hpp"
#include "apgm/requirements.hpp"
#include "apgm/scenario/config.hpp"
#include "apgm/scenario/metrics.hpp"
#include "apgm/scenario/world.hpp"

namespace apgm::scenario {

/// Live state handed to the observer after requirements were applied.
struct CycleView {
  std::size_t cycle = 0;
  double time_s = 0.0;
  ModeLabel mode = ModeLabel::kParking;
  const RequirementProfile& profile;
  const GridMap& grid;
  const MetricsRecord& record;
};

struct RunOptions {
  std::function<void(const CycleView&)> observer;
};

struct ScenarioResult {
  std::vector<MetricsRecord> records;
  GridMap grid;
  std::size_t conflicts = 0;
};

/// Per cycle: simulate sensors, build measurement grids, fuse them, fold in
/// the aged previous grid, apply the active requirement profile, record.
ScenarioResult run_scenario(const ScenarioConfig& config, const WorldModel& world,
                            const RunOptions& options = {});

}  // namespace apgm::scenario

#endif  // APGM_SCENARIO_RUNNER_HPP
