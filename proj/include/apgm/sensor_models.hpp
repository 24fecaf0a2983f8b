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

#ifndef APGM_SENSOR_MODELS_HPP
#define APGM_SENSOR_MODELS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "apgm/grid_map.hpp"
#include "apgm/requirements.hpp"

namespace apgm {

/// Ground-projected returns of one scan.
struct PointCloud {
  Vec2 origin;
  std::vector<Vec2> points;
  double timestamp = 0.0;
};

struct SensorModelParams {
  double mu_hit = 0.6;    // probability a return is relevant to its cell's occupancy
  double mu_free = 0.3;   // free evidence contributed per traversing ray
  double max_range = 120.0;

  /// Throws Errc::kConfigError.
  void validate() const;
};

/// Hypothesis order of semantic_frame().
enum class SemanticLabel : std::uint8_t { kRoad = 0, kMarking = 1, kBlocked = 2, kUnknown = 3 };

struct LabeledPoint {
  Vec2 position;
  SemanticLabel label = SemanticLabel::kUnknown;
  double confidence = 0.0;
};

struct SemanticObservation {
  Vec2 origin;
  std::vector<LabeledPoint> points;
  double timestamp = 0.0;
};

/// Grid measurement model with a cell-invariant non-relevance probability:
/// m(O) = 1 - (1 - mu_hit)^k.
double occupancy_evidence(std::size_t points_in_cell, const SensorModelParams& params);

struct CellRef {
  PatchIndex patch;
  CellIndex cell;

  friend bool operator==(const CellRef&, const CellRef&) = default;
};

/// Global lattice coordinates of the cell holding `point` at `step`.
struct LatticeCoord {
  std::int64_t x = 0;
  std::int64_t y = 0;
};
LatticeCoord lattice_coord(const GridGeometry& geometry, int step, Vec2 point);
CellRef to_cell_ref(LatticeCoord coord, int step);

/// Parametric grid traversal on the lattice of `step` spanning all patches.
/// Calls `visit` for every cell whose interior the segment crosses, in
/// order, strictly between the origin cell and the endpoint cell. Exact
/// corner crossings advance both axes at once.
void traverse_ray(Vec2 origin, Vec2 endpoint, const GridGeometry& geometry, int step,
                  const std::function<void(const CellRef&)>& visit);
std::vector<CellRef> ray_traverse(Vec2 origin, Vec2 endpoint, const GridGeometry& geometry,
                                  int step);

/// Occupancy measurement grid: hit cells carry 1 - (1 - mu_hit)^k, cells only
/// crossed by rays carry free evidence 1 - (1 - mu_free)^n. Only patches in
/// the occupancy horizon are allocated.
GridMap measurement_grid_occupancy(const PointCloud& cloud, const SensorModelParams& params,
                                   const RequirementProfile& profile,
                                   const GridGeometry& geometry);

struct SemanticMeasurement {
  GridMap grid;
  std::size_t conflicts = 0;
};

/// Semantic measurement grid: every labeled point is a simple-support BBA
/// combined into its cell with Dempster's rule. Points outside the semantic
/// horizon/frustum are ignored. A totally conflicting cell is reset to
/// vacuous and counted.
SemanticMeasurement measurement_grid_semantic(const SemanticObservation& obs,
                                              const RequirementProfile& profile,
                                              const GridGeometry& geometry);

/// Text fixtures: one point per line, `x y` or `x y label confidence`.
/// Blank lines and lines starting with '#' are skipped.
struct PointFile {
  std::vector<Vec2> points;
  std::vector<LabeledPoint> labeled;
};

PointFile parse_point_text(std::istream& in);
/// Throws Errc::kIoError / kFormatError.
PointFile load_point_file(const std::filesystem::path& path);

}  // namespace apgm

#endif  // APGM_SENSOR_MODELS_HPP
