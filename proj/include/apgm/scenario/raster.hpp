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

#ifndef APGM_SCENARIO_RASTER_HPP
#define APGM_SCENARIO_RASTER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "apgm/grid_map.hpp"
#include "apgm/scenario/world.hpp"

namespace apgm::scenario {

/// 8-bit grey image, row 0 is the northern (max y) edge.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::size_t col, std::size_t row) const { return pixels[row * width + col]; }
};

inline constexpr std::uint8_t kUnknownPixel = 127;

/// Samples floor(255 * BetP(first hypothesis)) at the finest step allocated
/// for `type` in `region`; unallocated area is kUnknownPixel. An empty
/// region or a region without layers renders at `fallback_step`.
Raster render_raster(const GridMap& grid, TypeTag type, const Rect& region,
                     int fallback_step = 7);

/// Binary PGM (P5, maxval 255). Throws Errc::kIoError.
void write_pgm(const Raster& raster, const std::filesystem::path& path);

void export_raster(const GridMap& grid, TypeTag type, const Rect& region,
                   const std::filesystem::path& path);

/// Bounding box of all patches that hold a layer of `type`.
std::optional<Rect> allocated_region(const GridMap& grid, TypeTag type);

/// Layer merged by whole blocks with the measurement-space operator and with
/// a Dempster fold over the block, for comparison.
struct MergeComparison {
  int block = 0;
  Layer measurement;
  Layer dempster;
};

/// Merges `layer` by 2x2 and 8x8 blocks under both operators.
std::vector<MergeComparison> compare_resampling(const Layer& layer);

/// Occupancy layer at step 7 with thin occupied structures in free space.
Layer demo_occupancy_layer();

/// Writes one raster per block size and operator into `out_dir` and returns
/// the comparisons. Throws Errc::kIoError.
std::vector<MergeComparison> compare_resampling_demo(const Layer& layer,
                                                     const std::filesystem::path& out_dir);

}  // namespace apgm::scenario

#endif  // APGM_SCENARIO_RASTER_HPP
