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

#ifndef APGM_SCENARIO_METRICS_HPP
#define APGM_SCENARIO_METRICS_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "apgm/requirements.hpp"
#include "apgm/scenario/config.hpp"

namespace apgm::scenario {

struct SourceCount {
  std::string source;
  TypeTag type = TypeTag::kOccupancy;
  std::size_t cells = 0;
  std::size_t bytes = 0;
};

struct MetricsRecord {
  double time_s = 0.0;
  ModeLabel mode = ModeLabel::kParking;
  double horizon_m = 0.0;
  /// Per-sensor measurement grids, then the fused grid, then references.
  std::vector<SourceCount> sources;
  double fuse_ms = 0.0;

  const SourceCount* find(std::string_view source, TypeTag type) const;
};

struct ReferenceLayout {
  std::string label;
  std::size_t cells = 0;
  std::size_t bytes_per_cell = 0;

  std::size_t bytes() const { return cells * bytes_per_cell; }
};

/// Static reference (constant cell count) and a uniform patched reference:
/// patches within the largest active horizon times 4^(finest required step),
/// at least the vehicle's own patch.
std::vector<ReferenceLayout> reference_cell_counts(const ReferenceSettings& settings,
                                                   const GridGeometry& geometry,
                                                   const RequirementProfile& profile);

/// Run-level aggregates. Memory factors are mean reference bytes over mean
/// fused bytes (all types).
struct RunSummary {
  std::size_t cycles = 0;
  double mean_fused_occ_cells = 0.0;
  std::size_t max_fused_occ_cells = 0;
  double mean_fused_bytes = 0.0;
  double factor_static = 0.0;
  double factor_uniform = 0.0;
  double mean_fuse_ms = 0.0;
  double max_fuse_ms = 0.0;
};

RunSummary summarize(const std::vector<MetricsRecord>& records);

/// CSV with header `time_s,mode,horizon_m,src,type,cells,bytes,fuse_ms`.
/// fuse_ms is left empty unless `with_wall_time`, which keeps the file
/// reproducible byte for byte.
void write_metrics(const std::vector<MetricsRecord>& records, std::ostream& out,
                   bool with_wall_time = false);
/// Throws Errc::kIoError.
void write_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& path,
                   bool with_wall_time = false);

}  // namespace apgm::scenario

#endif  // APGM_SCENARIO_METRICS_HPP
