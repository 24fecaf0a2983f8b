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

#include "apgm/scenario/runner.hpp"

#include <chrono>
#include <random>

#include "apgm/fusion.hpp"
#include "apgm/scenario/simulation.hpp"
#include "apgm/sensor_models.hpp"

namespace apgm::scenario {

namespace {

// Independent noise stream per (run seed, cycle, sensor).
std::uint64_t sensor_seed(std::uint64_t seed, std::size_t cycle, std::size_t sensor) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cycle), static_cast<std::uint32_t>(sensor)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

SourceCount count(const GridMap& grid, std::string source, TypeTag type) {
  return {std::move(source), type, grid.cell_count(type), grid.memory_bytes(type)};
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const WorldModel& world,
                            const RunOptions& options) {
  config.validate();
  world.validate();
  ScenarioResult result{{}, GridMap(config.geometry), 0};
  const ScenarioScript& script = config.script;
  const std::size_t cycles = script.cycle_count();
  result.records.reserve(cycles);

  const LabelIndex labels(world);
  FusionPolicy policy;
  policy.alpha_age = config.temporal_alpha;
  policy.threads = config.fusion_threads;

  for (std::size_t cycle = 0; cycle < cycles; ++cycle) {
    const double t = script.cycle_time(cycle);
    const ModeLabel mode = script.mode_at(t);
    RequirementProfile profile = config.modes.at(mode);
    profile.vehicle = script.pose_at(t);
    policy.required_step.clear();
    for (TypeTag type : kAllTypes) {
      if (profile.active(type)) {
        policy.required_step[type] = required_step(profile, type, config.geometry.edge);
      }
    }

    std::vector<GridMap> sources;
    sources.reserve(config.lidars.size() + 1);
    for (std::size_t j = 0; j < config.lidars.size(); ++j) {
      const LidarConfig& lidar = config.lidars[j];
      PointCloud cloud = simulate_lidar(world, sensor_pose(profile.vehicle, lidar.mount_offset),
                                        lidar, sensor_seed(config.seed, cycle, j));
      cloud.timestamp = t;
      sources.push_back(
          measurement_grid_occupancy(cloud, config.sensor_model, profile, config.geometry));
    }
    SemanticMeasurement semantic{GridMap(config.geometry), 0};
    if (profile.active(TypeTag::kSemantic)) {
      SemanticObservation obs =
          simulate_camera(labels, sensor_pose(profile.vehicle, config.camera.mount_offset),
                          config.camera);
      obs.timestamp = t;
      semantic = measurement_grid_semantic(obs, profile, config.geometry);
      result.conflicts += semantic.conflicts;
    }

    // Requirements are realized on the aged grid first so patches that left
    // the horizon are not carried through fusion.
    apply_requirements(result.grid, profile, *policy.registry);

    const auto start = std::chrono::steady_clock::now();
    std::vector<const GridMap*> inputs;
    for (const GridMap& g : sources) inputs.push_back(&g);
    inputs.push_back(&semantic.grid);
    FusedGrid current = fuse_grids(inputs, policy);
    FusedGrid live = temporal_update(result.grid, current.grid, policy);
    const auto stop = std::chrono::steady_clock::now();
    result.conflicts += current.conflicts + live.conflicts;

    apply_requirements(live.grid, profile, *policy.registry);
    result.grid = std::move(live.grid);

    MetricsRecord record;
    record.time_s = t;
    record.mode = mode;
    record.horizon_m = profile.find(TypeTag::kOccupancy) ? profile.find(TypeTag::kOccupancy)->horizon_m
                                                         : 0.0;
    record.fuse_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    for (std::size_t j = 0; j < config.lidars.size(); ++j) {
      record.sources.push_back(count(sources[j], config.lidars[j].name, TypeTag::kOccupancy));
    }
    record.sources.push_back(count(semantic.grid, config.camera.name, TypeTag::kSemantic));
    record.sources.push_back(count(result.grid, "fused", TypeTag::kOccupancy));
    record.sources.push_back(count(result.grid, "fused", TypeTag::kSemantic));
    for (const ReferenceLayout& ref :
         reference_cell_counts(config.reference, config.geometry, profile)) {
      record.sources.push_back({ref.label, TypeTag::kOccupancy, ref.cells, ref.bytes()});
    }
    result.records.push_back(std::move(record));

    if (options.observer) {
      options.observer({cycle, t, mode, profile, result.grid, result.records.back()});
    }
  }
  return result;
}

}  // namespace apgm::scenario
