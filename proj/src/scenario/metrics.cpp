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

#include "apgm/scenario/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "apgm/error.hpp"

namespace apgm::scenario {

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return {buf, res.ptr};
}

}  // namespace

const SourceCount* MetricsRecord::find(std::string_view source, TypeTag type) const {
  const auto it = std::ranges::find_if(
      sources, [&](const SourceCount& s) { return s.source == source && s.type == type; });
  return it == sources.end() ? nullptr : &*it;
}

std::vector<ReferenceLayout> reference_cell_counts(const ReferenceSettings& settings,
                                                   const GridGeometry& geometry,
                                                   const RequirementProfile& profile) {
  double horizon = 0.0;
  int step = 0;
  for (const auto& [type, req] : profile.types) {
    if (!req.active) continue;
    horizon = std::max(horizon, req.horizon_m);
    step = std::max(step, required_step(profile, type, geometry.edge));
  }

  const Vec2 v = profile.vehicle.position;
  const PatchIndex lo = patch_index_of(geometry, {v.x - horizon, v.y - horizon});
  const PatchIndex hi = patch_index_of(geometry, {v.x + horizon, v.y + horizon});
  std::size_t patches = 0;
  for (std::int32_t x = lo.x; x <= hi.x; ++x) {
    for (std::int32_t y = lo.y; y <= hi.y; ++y) {
      if (distance_to_patch(geometry, {x, y}, v) <= horizon + 1e-9) ++patches;
    }
  }
  patches = std::max<std::size_t>(patches, 1);
  return {{"ref_static", settings.static_cells, settings.bytes_per_cell},
          {"ref_uniform", patches * cells_per_layer(step), settings.bytes_per_cell}};
}

RunSummary summarize(const std::vector<MetricsRecord>& records) {
  RunSummary s;
  s.cycles = records.size();
  if (records.empty()) return s;
  double fused_bytes = 0.0;
  double static_bytes = 0.0;
  double uniform_bytes = 0.0;
  double occ_cells = 0.0;
  double fuse_ms = 0.0;
  auto bytes_of = [](const MetricsRecord& r, std::string_view src, TypeTag t) {
    const SourceCount* c = r.find(src, t);
    return c ? static_cast<double>(c->bytes) : 0.0;
  };
  for (const MetricsRecord& r : records) {
    const SourceCount* occ = r.find("fused", TypeTag::kOccupancy);
    const std::size_t cells = occ ? occ->cells : 0;
    occ_cells += static_cast<double>(cells);
    s.max_fused_occ_cells = std::max(s.max_fused_occ_cells, cells);
    fused_bytes += bytes_of(r, "fused", TypeTag::kOccupancy) + bytes_of(r, "fused", TypeTag::kSemantic);
    static_bytes += bytes_of(r, "ref_static", TypeTag::kOccupancy);
    uniform_bytes += bytes_of(r, "ref_uniform", TypeTag::kOccupancy);
    fuse_ms += r.fuse_ms;
    s.max_fuse_ms = std::max(s.max_fuse_ms, r.fuse_ms);
  }
  const double n = static_cast<double>(records.size());
  s.mean_fused_occ_cells = occ_cells / n;
  s.mean_fused_bytes = fused_bytes / n;
  s.mean_fuse_ms = fuse_ms / n;
  if (fused_bytes > 0.0) {
    s.factor_static = static_bytes / fused_bytes;
    s.factor_uniform = uniform_bytes / fused_bytes;
  }
  return s;
}

void write_metrics(const std::vector<MetricsRecord>& records, std::ostream& out,
                   bool with_wall_time) {
  out << "time_s,mode,horizon_m,src,type,cells,bytes,fuse_ms\n";
  for (const MetricsRecord& r : records) {
    const std::string prefix =
        fixed(r.time_s, 3) + ',' + std::string(mode_name(r.mode)) + ',' + fixed(r.horizon_m, 3) + ',';
    const std::string wall = with_wall_time ? fixed(r.fuse_ms, 3) : std::string();
    for (const SourceCount& s : r.sources) {
      out << prefix << s.source << ',' << type_name(s.type) << ',' << s.cells << ',' << s.bytes
          << ',' << wall << '\n';
    }
  }
}

void write_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& path,
                   bool with_wall_time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  write_metrics(records, out, with_wall_time);
  if (!out) throw Error(Errc::kIoError, "write failed for " + path.string());
}

}  // namespace apgm::scenario
