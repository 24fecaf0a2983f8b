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

#ifndef APGM_REQUIREMENTS_HPP
#define APGM_REQUIREMENTS_HPP

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string_view>

#include "apgm/grid_map.hpp"
#include "apgm/resample.hpp"

namespace apgm {

struct Pose2 {
  Vec2 position;
  double heading = 0.0;  // radians, counter-clockwise from +x
};

struct TypeRequirement {
  bool active = false;
  double horizon_m = 0.0;
  double max_cell_size_m = 0.1;
  /// Half opening angle of the allowed frustum around the vehicle heading.
  /// Unset means all around.
  std::optional<double> fov_half_angle_rad;
};

/// Per-patch resolution hook; returning nullopt falls back to the profile.
using StepOverride = std::function<std::optional<int>(PatchIndex, TypeTag)>;

/// Situational requirements: which types must be kept, how far and how fine.
struct RequirementProfile {
  std::map<TypeTag, TypeRequirement> types;
  Pose2 vehicle;
  StepOverride step_override;

  const TypeRequirement* find(TypeTag type) const;
  bool active(TypeTag type) const;

  /// Throws Errc::kInvalidProfile when an active type has a non-positive
  /// horizon or cell size, or edge / cell size is not a power of two.
  void validate(double edge) const;
};

enum class ModeLabel { kParking, kRoad };

std::string_view mode_name(ModeLabel label);

struct ScenarioMode {
  ModeLabel label = ModeLabel::kParking;
  RequirementProfile profile;
};

/// Smallest r with edge / 2^r <= max cell size of `type`.
int required_step(const RequirementProfile& profile, TypeTag type, double edge);
/// Same, honoring the profile's per-patch override.
int required_step(const RequirementProfile& profile, TypeTag type, double edge, PatchIndex patch);

/// Distance from `point` to the closed patch square.
double distance_to_patch(const GridGeometry& geometry, PatchIndex patch, Vec2 point);

/// True iff the patch square comes within the type's horizon of the vehicle
/// and, when a frustum is set, intersects it. Inactive types yield false.
bool patch_in_horizon(PatchIndex patch, const GridGeometry& geometry,
                      const RequirementProfile& profile, TypeTag type);

/// True iff `point` lies in the type's horizon disc and frustum.
bool point_in_horizon(Vec2 point, const RequirementProfile& profile, TypeTag type);

struct MutationReport {
  std::size_t patches_deleted = 0;
  std::size_t layers_deleted = 0;
  std::size_t layers_resampled = 0;

  bool empty() const {
    return patches_deleted == 0 && layers_deleted == 0 && layers_resampled == 0;
  }
};

/// Drops layers of inactive types and layers whose patch left the type's
/// horizon, deletes patches left without layers, and resamples surviving
/// layers to the required step. Never allocates new layers.
MutationReport apply_requirements(GridMap& grid, const RequirementProfile& profile,
                                  const ResampleRegistry& registry = default_resample_registry());

/// Resamples in hops of at most kDefaultMaxStepDelta.
Layer resample_to(Layer layer, int target_step, const ResampleRegistry& registry);

}  // namespace apgm

#endif  // APGM_REQUIREMENTS_HPP
