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

#include "apgm/scenario/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace apgm::scenario {

Pose2 sensor_pose(const Pose2& vehicle, Vec2 offset) {
  const double c = std::cos(vehicle.heading);
  const double s = std::sin(vehicle.heading);
  return {{vehicle.position.x + c * offset.x - s * offset.y,
           vehicle.position.y + s * offset.x + c * offset.y},
          vehicle.heading};
}

PointCloud simulate_lidar(const WorldModel& world, const Pose2& sensor, const LidarConfig& config,
                          std::uint64_t seed) {
  PointCloud cloud{sensor.position, {}, 0.0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, config.noise_sigma > 0.0 ? config.noise_sigma : 1.0);
  for (int i = 0; i < config.beams; ++i) {
    const double angle = sensor.heading + 2.0 * std::numbers::pi * i / config.beams;
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    const auto range = world.cast(sensor.position, dir, config.max_range);
    if (!range) continue;
    double r = *range;
    if (config.noise_sigma > 0.0) r += noise(rng);
    if (r <= 0.0 || r > config.max_range) continue;
    cloud.points.push_back(sensor.position + r * dir);
  }
  return cloud;
}

double camera_confidence(double range, const CameraConfig& config) {
  const double f = std::clamp(range / config.range_m, 0.0, 1.0);
  return config.confidence_near - f * (config.confidence_near - config.confidence_far);
}

SemanticObservation simulate_camera(const WorldModel& world, const Pose2& sensor,
                                    const CameraConfig& config) {
  return simulate_camera(LabelIndex(world), sensor, config);
}

SemanticObservation simulate_camera(const LabelIndex& labels, const Pose2& sensor,
                                    const CameraConfig& config) {
  SemanticObservation obs{sensor.position, {}, 0.0};
  const auto ranges = static_cast<int>(std::floor(config.range_m / config.range_step_m + 1e-9));
  const auto angles =
      static_cast<int>(std::floor(2.0 * config.half_fov_rad / config.angle_step_rad + 1e-9));
  obs.points.reserve(static_cast<std::size_t>(ranges) * (angles + 1));
  for (int k = 1; k <= ranges; ++k) {
    const double r = k * config.range_step_m;
    const double confidence = camera_confidence(r, config);
    for (int j = 0; j <= angles; ++j) {
      const double a = sensor.heading - config.half_fov_rad + j * config.angle_step_rad;
      const Vec2 p = sensor.position + r * Vec2{std::cos(a), std::sin(a)};
      obs.points.push_back({p, labels.label_at(p), confidence});
    }
  }
  return obs;
}

}  // namespace apgm::scenario
