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

#ifndef APGM_FUSION_HPP
#define APGM_FUSION_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "apgm/evidence.hpp"
#include "apgm/grid_map.hpp"
#include "apgm/requirements.hpp"
#include "apgm/resample.hpp"

namespace apgm {

/// Cell fusion operator on singleton mass vectors with implicit frame mass.
/// Fuses `incoming` into `acc` and returns the conflict; a return value at or
/// above kTotalConflictThreshold means `acc` was left untouched.
using CellFuseFn = double (*)(std::span<double> acc, std::span<const double> incoming);

/// Dempster's rule as a cell operator.
double dempster_cell_operator(std::span<double> acc, std::span<const double> incoming);

enum class ConflictFallback {
  kVacuous,          // reset the cell to "no information"
  kKeepAccumulated,  // ignore the conflicting source for this cell
};

struct FusionPolicy {
  std::map<TypeTag, CellFuseFn> operators = {
      {TypeTag::kOccupancy, &dempster_cell_operator},
      {TypeTag::kSemantic, &dempster_cell_operator},
  };
  /// Required step per type; a missing entry means "finest available".
  std::map<TypeTag, int> required_step;
  /// Temporal discount applied to the previous grid; 1 keeps it unchanged,
  /// 0 forgets it.
  double alpha_age = 0.95;
  ConflictFallback fallback = ConflictFallback::kVacuous;
  /// Worker threads for fuse_grids; 1 runs inline.
  unsigned threads = 1;
  const ResampleRegistry* registry = &default_resample_registry();

  std::optional<int> required(TypeTag type) const;
};

struct CellFusion {
  Bba bba;
  std::size_t conflicts = 0;
};

/// Left fold of Dempster's rule with the conflict fallback.
CellFusion fuse_cells(std::span<const Bba> cells,
                      ConflictFallback fallback = ConflictFallback::kVacuous);
/// fuse_cells restricted to the occupancy frame (throws kFrameMismatch).
CellFusion fuse_cells_occ(std::span<const Bba> cells,
                          ConflictFallback fallback = ConflictFallback::kVacuous);

struct FusedLayer {
  Layer layer;
  std::size_t conflicts = 0;
};

/// Resamples every layer to min(r_req, finest input step) and fuses cell by
/// cell with the type's operator. Throws kUnsupportedType.
FusedLayer fuse_layers(std::span<const Layer* const> layers, std::optional<int> required_step,
                       const FusionPolicy& policy);

struct FusedPatch {
  Patch patch;
  std::size_t conflicts = 0;
};

/// One fused layer for every type present in any input patch.
FusedPatch fuse_patches(std::span<const Patch* const> patches, const FusionPolicy& policy);

struct FusedGrid {
  GridMap grid;
  std::size_t conflicts = 0;
};

/// Output patch set is the union of the inputs' patch sets. With
/// policy.threads > 1 the union is partitioned across workers; each patch
/// index is owned by exactly one worker, inputs are only read.
/// Throws kDatumMismatch / kEdgeMismatch.
FusedGrid fuse_grids(std::span<const GridMap* const> grids, const FusionPolicy& policy);

/// Cell-wise discounting of every layer.
GridMap discount_grid(const GridMap& grid, ReliabilityFactor alpha);

/// Discounts `previous` by policy.alpha_age and fuses it with `current`.
/// When a profile is given, patches outside every active type's horizon are
/// dropped afterwards.
FusedGrid temporal_update(const GridMap& previous, const GridMap& current,
                          const FusionPolicy& policy,
                          const RequirementProfile* profile = nullptr);

}  // namespace apgm

#endif  // APGM_FUSION_HPP
