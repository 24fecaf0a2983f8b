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

#ifndef APGM_RESAMPLE_HPP
#define APGM_RESAMPLE_HPP

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "apgm/evidence.hpp"
#include "apgm/grid_map.hpp"

namespace apgm {

inline constexpr int kDefaultMaxStepDelta = 4;

struct ResampleRequest {
  int source_step = 0;
  int target_step = 0;

  int delta() const { return target_step - source_step; }
  /// Throws Errc::kInvalidResolution / kStepDeltaTooLarge.
  void validate(int max_delta = kDefaultMaxStepDelta) const;
};

/// Occupancy evidence with the frame mass implicit (1 - occupied - free).
struct OccupancyMasses {
  double occupied = 0.0;
  double free = 0.0;
};

/// Spatial merge in measurement space: occupied = 1 - prod(1 - m_c(O)),
/// free = min(median of children free, 1 - occupied).
OccupancyMasses merge_occupancy(std::span<const OccupancyMasses> children);
/// Inverse of merge_occupancy for one of n equal children: the
/// non-relevance product is spread evenly, free mass is copied then clipped.
OccupancyMasses split_occupancy(OccupancyMasses parent, std::size_t n);

/// BBA-level wrappers over the occupancy frame. Throw kFrameMismatch.
Bba merge_occ(std::span<const Bba> cells);
std::vector<Bba> split_occ(const Bba& cell, std::size_t n);

/// Semantic placeholder operators: mean of mass vectors / value copy.
Bba merge_sem(std::span<const Bba> cells);
std::vector<Bba> split_sem(const Bba& cell, std::size_t n);

/// Raw-cell operators used by layer resampling. `children` holds n cells of
/// `stride` floats each.
using CellMergeFn = void (*)(std::span<const float> children, std::size_t stride,
                             std::span<float> out);
using CellSplitFn = void (*)(std::span<const float> parent, std::size_t n,
                             std::span<float> child);

struct ResampleOperators {
  CellMergeFn merge = nullptr;
  CellSplitFn split = nullptr;
};

using ResampleRegistry = std::map<TypeTag, ResampleOperators>;

/// Occupancy and semantic operators.
const ResampleRegistry& default_resample_registry();

/// Layer resampling function. Equal steps return the argument unchanged
/// (moved, no allocation). Throws kUnsupportedType / kStepDeltaTooLarge.
Layer resample_layer(Layer layer, int target_step,
                     const ResampleRegistry& registry = default_resample_registry(),
                     int max_delta = kDefaultMaxStepDelta);

}  // namespace apgm

#endif  // APGM_RESAMPLE_HPP
