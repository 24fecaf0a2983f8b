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

#ifndef APGM_SCENARIO_CONFIG_HPP
#define APGM_SCENARIO_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "apgm/requirements.hpp"
#include "apgm/scenario/simulation.hpp"
#include "apgm/sensor_models.hpp"

namespace apgm::scenario {

struct Keyframe {
  double time_s = 0.0;
  Pose2 pose;
  ModeLabel mode = ModeLabel::kParking;
};

/// Piecewise-linear vehicle trajectory with a mode per segment.
struct ScenarioScript {
  std::vector<Keyframe> keyframes;
  double cycle_s = 0.1;
  double duration_s = 60.0;

  std::size_t cycle_count() const;
  double cycle_time(std::size_t cycle) const { return static_cast<double>(cycle) * cycle_s; }
  /// Position interpolated between keyframes, heading of the active keyframe.
  Pose2 pose_at(double t) const;
  /// Mode of the last keyframe at or before t.
  ModeLabel mode_at(double t) const;

  /// Throws Errc::kConfigError.
  void validate() const;
};

/// Constant-size layouts the fused grid is compared against.
struct ReferenceSettings {
  /// Cell count of the static non-uniform layout read off the original
  /// evaluation plot (dashed reference line at 6.4e5).
  std::size_t static_cells = 640000;
  /// Bytes per reference cell, consistent with the reported memory factors.
  std::size_t bytes_per_cell = 24;
};

struct ScenarioConfig {
  std::uint64_t seed = 42;
  GridGeometry geometry{{0.0, 0.0}, kDefaultEdgeLength};
  SensorModelParams sensor_model;
  std::vector<LidarConfig> lidars;
  CameraConfig camera;
  /// Requirement profiles per mode; the vehicle pose is filled in per cycle.
  std::map<ModeLabel, RequirementProfile> modes;
  ScenarioScript script;
  double temporal_alpha = 0.95;
  unsigned fusion_threads = 1;
  ReferenceSettings reference;

  /// Throws Errc::kConfigError with a diagnostic naming the offending key.
  void validate() const;
};

/// Parking/road scenario over default_world().
ScenarioConfig default_config();

/// INI-style file, see configs/default.ini. Missing keys keep their
/// defaults. Throws Errc::kConfigError, also for unreadable files.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace apgm::scenario

#endif  // APGM_SCENARIO_CONFIG_HPP
