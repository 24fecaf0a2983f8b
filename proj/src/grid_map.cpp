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

#include "apgm/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apgm/error.hpp"

namespace apgm {

const Frame& occupancy_frame() {
  static const Frame frame{"occupied", "free"};
  return frame;
}

const Frame& semantic_frame() {
  static const Frame frame{"Road", "Marking", "Blocked", "Unknown"};
  return frame;
}

const Frame& frame_of(TypeTag type) {
  switch (type) {
    case TypeTag::kOccupancy: return occupancy_frame();
    case TypeTag::kSemantic: return semantic_frame();
  }
  throw Error(Errc::kUnsupportedType, std::to_string(static_cast<int>(type)));
}

const char* type_name(TypeTag type) {
  switch (type) {
    case TypeTag::kOccupancy: return "occ";
    case TypeTag::kSemantic: return "sem";
  }
  return "?";
}

// ---------------------------------------------------------------- Layer

Layer::Layer(TypeTag type, int step)
    : type_(type), step_(step), stride_(frame_of(type).size()) {
  if (step < 0 || step > 15) {
    throw Error(Errc::kInvalidResolution, "step " + std::to_string(step));
  }
  masses_.assign(cells_per_layer(step) * stride_, 0.0F);
}

void Layer::check(CellIndex c) const {
  if (c.a >= side() || c.b >= side()) {
    throw Error(Errc::kCellOutOfBounds, "(" + std::to_string(c.a) + ", " +
                                            std::to_string(c.b) + ") at step " +
                                            std::to_string(step_));
  }
}

Bba Layer::bba(CellIndex c) const {
  check(c);
  return Bba::from_storage(frame(), cell(c));
}

void Layer::set(CellIndex c, const Bba& value) {
  check(c);
  if (!(value.frame() == frame())) {
    throw Error(Errc::kFrameMismatch, "BBA frame differs from layer frame");
  }
  auto out = cell(c);
  for (std::size_t i = 0; i < stride_; ++i) out[i] = static_cast<float>(value.singleton(i));
}

void Layer::set_vacuous(CellIndex c) {
  check(c);
  std::ranges::fill(cell(c), 0.0F);
}

bool is_vacuous(std::span<const float> cell) {
  return std::ranges::all_of(cell, [](float m) { return m == 0.0F; });
}

// ---------------------------------------------------------------- Patch

Layer* Patch::find(TypeTag type) {
  auto it = layers_.find(type);
  return it == layers_.end() ? nullptr : &it->second;
}

const Layer* Patch::find(TypeTag type) const {
  auto it = layers_.find(type);
  return it == layers_.end() ? nullptr : &it->second;
}

Layer& Patch::put(Layer layer) {
  const TypeTag type = layer.type();
  auto [it, inserted] = layers_.insert_or_assign(type, std::move(layer));
  return it->second;
}

// ---------------------------------------------------------------- geometry

Vec2 patch_datum(const GridGeometry& geometry, PatchIndex index) {
  return {geometry.datum.x + geometry.edge * index.x,
          geometry.datum.y + geometry.edge * index.y};
}

Vec2 cell_datum(const GridGeometry& geometry, PatchIndex patch, int step, CellIndex cell) {
  const std::uint32_t side = cells_per_axis(step);
  if (cell.a >= side || cell.b >= side) {
    throw Error(Errc::kCellOutOfBounds, "cell outside lattice of step " + std::to_string(step));
  }
  const double width = geometry.edge / side;
  const Vec2 d = patch_datum(geometry, patch);
  return {d.x + width * cell.a, d.y + width * cell.b};
}

PatchIndex patch_index_of(const GridGeometry& geometry, Vec2 point) {
  return {static_cast<std::int32_t>(std::floor((point.x - geometry.datum.x) / geometry.edge)),
          static_cast<std::int32_t>(std::floor((point.y - geometry.datum.y) / geometry.edge))};
}

CellIndex cell_index_of(Vec2 point, Vec2 patch_datum, double edge, int step) {
  const std::uint32_t side = cells_per_axis(step);
  const double slack = edge * 1e-9;
  auto axis = [&](double offset) {
    if (offset < -slack || offset >= edge + slack) {
      throw Error(Errc::kPointOutsidePatch, "offset " + std::to_string(offset));
    }
    const double scaled = std::floor(offset * side / edge);
    return static_cast<std::uint32_t>(std::clamp(scaled, 0.0, static_cast<double>(side - 1)));
  };
  return {axis(point.x - patch_datum.x), axis(point.y - patch_datum.y)};
}

// ---------------------------------------------------------------- GridMap

GridMap::GridMap(GridGeometry geometry, int max_step)
    : geometry_(geometry), max_step_(max_step) {
  if (!(geometry.edge > 0.0) || !std::isfinite(geometry.edge)) {
    throw Error(Errc::kEdgeMismatch, "patch edge length must be positive");
  }
  if (max_step < 0 || max_step > 15) {
    throw Error(Errc::kInvalidResolution, "max step " + std::to_string(max_step));
  }
}

void GridMap::check_step(int step) const {
  if (step < 0 || step > max_step_) {
    throw Error(Errc::kInvalidResolution,
                "step " + std::to_string(step) + " outside [0, " + std::to_string(max_step_) + "]");
  }
}

Patch* GridMap::find(PatchIndex index) {
  auto it = patches_.find(index);
  return it == patches_.end() ? nullptr : &it->second;
}

const Patch* GridMap::find(PatchIndex index) const {
  auto it = patches_.find(index);
  return it == patches_.end() ? nullptr : &it->second;
}

Layer* GridMap::find_layer(PatchIndex index, TypeTag type) {
  Patch* p = find(index);
  return p ? p->find(type) : nullptr;
}

const Layer* GridMap::find_layer(PatchIndex index, TypeTag type) const {
  const Patch* p = find(index);
  return p ? p->find(type) : nullptr;
}

Layer& GridMap::get_or_create_layer(PatchIndex index, TypeTag type, int step) {
  check_step(step);
  auto [it, inserted] = patches_.try_emplace(index, index);
  Patch& patch = it->second;
  if (Layer* existing = patch.find(type)) {
    if (existing->step() != step) {
      throw Error(Errc::kResolutionConflict,
                  std::string(type_name(type)) + " layer exists at step " +
                      std::to_string(existing->step()) + ", requested " + std::to_string(step));
    }
    return *existing;
  }
  return patch.put(Layer(type, step));
}

Patch& GridMap::put_patch(Patch patch) {
  for (const auto& [type, layer] : patch.layers()) check_step(layer.step());
  const PatchIndex index = patch.index();
  auto [it, inserted] = patches_.insert_or_assign(index, std::move(patch));
  return it->second;
}

std::size_t GridMap::cell_count(std::optional<TypeTag> type) const {
  std::size_t total = 0;
  for (const auto& [index, patch] : patches_) {
    for (const auto& [t, layer] : patch.layers()) {
      if (!type || *type == t) total += layer.cell_count();
    }
  }
  return total;
}

std::size_t GridMap::memory_bytes(std::optional<TypeTag> type) const {
  std::size_t total = 0;
  for (const auto& [index, patch] : patches_) {
    for (const auto& [t, layer] : patch.layers()) {
      if (!type || *type == t) total += layer.payload_bytes();
    }
  }
  return total;
}

}  // namespace apgm
