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

#ifndef APGM_SCENARIO_SIMULATION_HPP
#define APGM_SCENARIO_SIMULATION_HPP

#include <cstdint>
#include <string>

#include "apgm/requirements.hpp"
#include "apgm/scenario/world.hpp"
#include "apgm/sensor_models.hpp"

namespace apgm::scenario {

struct LidarConfig {
  std::string name = "lidar";
  Vec2 mount_offset;  // vehicle frame, x forward
  int beams = 720;
  double max_range = 120.0;
  double noise_sigma = 0.02;
};

struct CameraConfig {
  std::string name = "camera";
  Vec2 mount_offset;
  double half_fov_rad = 0.5235987755982988;  // 30 deg
  double range_m = 40.0;
  double range_step_m = 0.2;
  double angle_step_rad = 0.008726646259971648;  // 0.5 deg
  double confidence_near = 0.9;
  double confidence_far = 0.4;
};

/// World pose of a sensor mounted at `offset` on a vehicle at `vehicle`.
Pose2 sensor_pose(const Pose2& vehicle, Vec2 offset);

/// Casts `beams` evenly spaced beams over 360 degrees and returns the hits
/// within max range. Range noise is drawn from a generator seeded with `seed`.
PointCloud simulate_lidar(const WorldModel& world, const Pose2& sensor, const LidarConfig& config,
                          std::uint64_t seed);

/// Linear decay from confidence_near at range 0 to confidence_far at range_m.
double camera_confidence(double range, const CameraConfig& config);

/// Labeled ground samples on a polar grid inside the frustum.
SemanticObservation simulate_camera(const WorldModel& world, const Pose2& sensor,
                                    const CameraConfig& config);
SemanticObservation simulate_camera(const LabelIndex& labels, const Pose2& sensor,
                                    const CameraConfig& config);

}  // namespace apgm::scenario

#endif  // APGM_SCENARIO_SIMULATION_HPP
