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

#include "apgm/sensor_models.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>

#include "apgm/error.hpp"

namespace apgm {

namespace {

constexpr double kCornerTieTolerance = 1e-10;

struct PatchHash {
  std::size_t operator()(PatchIndex p) const {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
                                      static_cast<std::uint32_t>(p.y));
  }
};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Memoized horizon membership of patches for one profile.
class HorizonCache {
 public:
  HorizonCache(const GridGeometry& geometry, const RequirementProfile& profile, TypeTag type)
      : geometry_(geometry), profile_(profile), type_(type) {}

  bool contains(PatchIndex p) {
    auto [it, inserted] = cache_.try_emplace(p, false);
    if (inserted) it->second = patch_in_horizon(p, geometry_, profile_, type_);
    return it->second;
  }

 private:
  const GridGeometry& geometry_;
  const RequirementProfile& profile_;
  TypeTag type_;
  std::unordered_map<PatchIndex, bool, PatchHash> cache_;
};

std::string lower(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void SensorModelParams::validate() const {
  if (!(mu_hit > 0.0 && mu_hit <= 1.0)) {
    throw Error(Errc::kConfigError, "mu_hit must lie in (0, 1]");
  }
  if (!(mu_free > 0.0 && mu_free < 1.0)) {
    throw Error(Errc::kConfigError, "mu_free must lie in (0, 1)");
  }
  if (!(max_range > 0.0)) throw Error(Errc::kConfigError, "max_range must be positive");
}

double occupancy_evidence(std::size_t points_in_cell, const SensorModelParams& params) {
  if (points_in_cell == 0) return 0.0;
  return 1.0 - std::pow(1.0 - params.mu_hit, static_cast<double>(points_in_cell));
}

LatticeCoord lattice_coord(const GridGeometry& geometry, int step, Vec2 point) {
  const double width = geometry.edge / cells_per_axis(step);
  return {static_cast<std::int64_t>(std::floor((point.x - geometry.datum.x) / width)),
          static_cast<std::int64_t>(std::floor((point.y - geometry.datum.y) / width))};
}

CellRef to_cell_ref(LatticeCoord coord, int step) {
  const std::int64_t side = cells_per_axis(step);
  const std::int64_t px = floor_div(coord.x, side);
  const std::int64_t py = floor_div(coord.y, side);
  return {{static_cast<std::int32_t>(px), static_cast<std::int32_t>(py)},
          {static_cast<std::uint32_t>(coord.x - px * side),
           static_cast<std::uint32_t>(coord.y - py * side)}};
}

void traverse_ray(Vec2 origin, Vec2 endpoint, const GridGeometry& geometry, int step,
                  const std::function<void(const CellRef&)>& visit) {
  const double width = geometry.edge / cells_per_axis(step);
  const double sx = (origin.x - geometry.datum.x) / width;
  const double sy = (origin.y - geometry.datum.y) / width;
  const double dx = (endpoint.x - geometry.datum.x) / width - sx;
  const double dy = (endpoint.y - geometry.datum.y) / width - sy;

  const LatticeCoord end = lattice_coord(geometry, step, endpoint);
  LatticeCoord cur{static_cast<std::int64_t>(std::floor(sx)),
                   static_cast<std::int64_t>(std::floor(sy))};
  if (cur.x == end.x && cur.y == end.y) return;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
  const double delta_x = step_x != 0 ? 1.0 / std::abs(dx) : kInf;
  const double delta_y = step_y != 0 ? 1.0 / std::abs(dy) : kInf;
  double t_x = step_x > 0 ? (static_cast<double>(cur.x + 1) - sx) / dx
               : step_x < 0 ? (sx - static_cast<double>(cur.x)) / -dx
                            : kInf;
  double t_y = step_y > 0 ? (static_cast<double>(cur.y + 1) - sy) / dy
               : step_y < 0 ? (sy - static_cast<double>(cur.y)) / -dy
                            : kInf;

  const std::int64_t max_steps = std::abs(end.x - cur.x) + std::abs(end.y - cur.y);
  for (std::int64_t i = 0; i < max_steps; ++i) {
    const double t = std::min(t_x, t_y);
    if (t > 1.0 + kCornerTieTolerance) break;
    if (std::abs(t_x - t_y) <= kCornerTieTolerance) {
      cur.x += step_x;
      cur.y += step_y;
      t_x += delta_x;
      t_y += delta_y;
    } else if (t_x < t_y) {
      cur.x += step_x;
      t_x += delta_x;
    } else {
      cur.y += step_y;
      t_y += delta_y;
    }
    if (cur.x == end.x && cur.y == end.y) return;
    visit(to_cell_ref(cur, step));
  }
}

std::vector<CellRef> ray_traverse(Vec2 origin, Vec2 endpoint, const GridGeometry& geometry,
                                  int step) {
  std::vector<CellRef> cells;
  traverse_ray(origin, endpoint, geometry, step,
               [&cells](const CellRef& c) { cells.push_back(c); });
  return cells;
}

GridMap measurement_grid_occupancy(const PointCloud& cloud, const SensorModelParams& params,
                                   const RequirementProfile& profile,
                                   const GridGeometry& geometry) {
  params.validate();
  GridMap grid(geometry);
  if (!profile.active(TypeTag::kOccupancy) || cloud.points.empty()) return grid;

  const int step = required_step(profile, TypeTag::kOccupancy, geometry.edge);
  const std::size_t n_cells = cells_per_layer(step);
  struct Counts {
    std::vector<std::uint32_t> hits;
    std::vector<std::uint32_t> rays;
  };
  std::unordered_map<PatchIndex, Counts, PatchHash> counts;
  HorizonCache horizon(geometry, profile, TypeTag::kOccupancy);

  auto counts_for = [&](PatchIndex p) -> Counts& {
    auto [it, inserted] = counts.try_emplace(p);
    if (inserted) {
      it->second.hits.assign(n_cells, 0);
      it->second.rays.assign(n_cells, 0);
    }
    return it->second;
  };
  const std::uint32_t side = cells_per_axis(step);
  auto linear = [side](CellIndex c) { return static_cast<std::size_t>(c.b) * side + c.a; };

  for (const Vec2& p : cloud.points) {
    if (std::hypot(p.x - cloud.origin.x, p.y - cloud.origin.y) > params.max_range) continue;
    const CellRef hit = to_cell_ref(lattice_coord(geometry, step, p), step);
    if (horizon.contains(hit.patch)) ++counts_for(hit.patch).hits[linear(hit.cell)];
    traverse_ray(cloud.origin, p, geometry, step, [&](const CellRef& c) {
      if (horizon.contains(c.patch)) ++counts_for(c.patch).rays[linear(c.cell)];
    });
  }

  const double not_free = 1.0 - params.mu_free;
  for (const auto& [index, c] : counts) {
    Layer& layer = grid.get_or_create_layer(index, TypeTag::kOccupancy, step);
    for (std::size_t i = 0; i < n_cells; ++i) {
      auto cell = layer.cell(i);
      if (c.hits[i] > 0) {
        cell[kOccupied] = static_cast<float>(occupancy_evidence(c.hits[i], params));
      } else if (c.rays[i] > 0) {
        cell[kFree] = static_cast<float>(1.0 - std::pow(not_free, static_cast<double>(c.rays[i])));
      }
    }
  }
  return grid;
}

SemanticMeasurement measurement_grid_semantic(const SemanticObservation& obs,
                                              const RequirementProfile& profile,
                                              const GridGeometry& geometry) {
  SemanticMeasurement result{GridMap(geometry), 0};
  if (!profile.active(TypeTag::kSemantic) || obs.points.empty()) return result;

  const int step = required_step(profile, TypeTag::kSemantic, geometry.edge);
  const std::size_t stride = semantic_frame().size();
  const std::size_t n_cells = cells_per_layer(step);
  const std::uint32_t side = cells_per_axis(step);
  HorizonCache horizon(geometry, profile, TypeTag::kSemantic);
  std::unordered_map<PatchIndex, std::vector<double>, PatchHash> masses;

  std::array<double, 4> evidence{};
  std::array<double, 4> fused{};
  for (const LabeledPoint& lp : obs.points) {
    if (!point_in_horizon(lp.position, profile, TypeTag::kSemantic)) continue;
    const CellRef ref = to_cell_ref(lattice_coord(geometry, step, lp.position), step);
    if (!horizon.contains(ref.patch)) continue;
    auto [it, inserted] = masses.try_emplace(ref.patch);
    if (inserted) it->second.assign(n_cells * stride, 0.0);
    std::span<double> cell(it->second.data() + (static_cast<std::size_t>(ref.cell.b) * side + ref.cell.a) * stride,
                           stride);

    evidence.fill(0.0);
    evidence[static_cast<std::size_t>(lp.label)] = std::clamp(lp.confidence, 0.0, 1.0);
    const double conflict = detail::combine_singletons(cell, evidence, fused);
    if (conflict >= kTotalConflictThreshold) {
      std::ranges::fill(cell, 0.0);
      ++result.conflicts;
    } else {
      std::ranges::copy(fused, cell.begin());
    }
  }

  for (const auto& [index, m] : masses) {
    Layer& layer = result.grid.get_or_create_layer(index, TypeTag::kSemantic, step);
    auto raw = layer.raw();
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<float>(m[i]);
  }
  return result;
}

PointFile parse_point_text(std::istream& in) {
  PointFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Vec2 p;
    if (!(fields >> p.x >> p.y)) {
      throw Error(Errc::kFormatError, "line " + std::to_string(line_no) + ": expected x y");
    }
    std::string label;
    if (!(fields >> label)) {
      file.points.push_back(p);
      continue;
    }
    double confidence = 0.0;
    if (!(fields >> confidence) || confidence < 0.0 || confidence > 1.0) {
      throw Error(Errc::kFormatError,
                  "line " + std::to_string(line_no) + ": expected confidence in [0, 1]");
    }
    const auto& labels = semantic_frame().labels();
    const auto it = std::ranges::find_if(labels, [&](const std::string& l) {
      return lower(l) == lower(label);
    });
    if (it == labels.end()) {
      throw Error(Errc::kFormatError,
                  "line " + std::to_string(line_no) + ": unknown label '" + label + "'");
    }
    file.labeled.push_back(
        {p, static_cast<SemanticLabel>(it - labels.begin()), confidence});
  }
  return file;
}

PointFile load_point_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  return parse_point_text(in);
}

}  // namespace apgm
