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

#ifndef APGM_GRID_MAP_HPP
#define APGM_GRID_MAP_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "apgm/evidence.hpp"

namespace apgm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

/// Information type of a layer. Each tag is bound to one frame of discernment.
enum class TypeTag : std::uint8_t {
  kOccupancy = 0,
  kSemantic = 1,
};

inline constexpr TypeTag kAllTypes[] = {TypeTag::kOccupancy, TypeTag::kSemantic};

/// {occupied, free}
const Frame& occupancy_frame();
/// {Road, Marking, Blocked, Unknown}
const Frame& semantic_frame();
const Frame& frame_of(TypeTag type);
const char* type_name(TypeTag type);

inline constexpr std::size_t kOccupied = 0;
inline constexpr std::size_t kFree = 1;

struct PatchIndex {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend auto operator<=>(const PatchIndex&, const PatchIndex&) = default;
};

struct CellIndex {
  std::uint32_t a = 0;
  std::uint32_t b = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Number of cells along one layer axis, 2^step.
inline constexpr std::uint32_t cells_per_axis(int step) { return 1U << step; }
inline constexpr std::size_t cells_per_layer(int step) {
  return std::size_t{1} << (2 * step);
}

/// Square lattice of 2^r x 2^r cells of one type. Cells are stored row-major
/// (b is the row, a the column) as |frame| float masses each; the mass of
/// the full frame is implicit.
class Layer {
 public:
  /// All cells vacuous.
  Layer(TypeTag type, int step);

  TypeTag type() const { return type_; }
  int step() const { return step_; }
  std::uint32_t side() const { return cells_per_axis(step_); }
  std::size_t cell_count() const { return cells_per_layer(step_); }
  std::size_t hypotheses() const { return stride_; }
  const Frame& frame() const { return frame_of(type_); }
  std::size_t payload_bytes() const { return masses_.size() * sizeof(float); }

  std::span<float> cell(std::size_t linear) {
    return {masses_.data() + linear * stride_, stride_};
  }
  std::span<const float> cell(std::size_t linear) const {
    return {masses_.data() + linear * stride_, stride_};
  }
  std::span<float> cell(CellIndex c) { return cell(linear_index(c)); }
  std::span<const float> cell(CellIndex c) const { return cell(linear_index(c)); }

  std::size_t linear_index(CellIndex c) const {
    return static_cast<std::size_t>(c.b) * side() + c.a;
  }

  /// Throws Errc::kCellOutOfBounds.
  Bba bba(CellIndex c) const;
  void set(CellIndex c, const Bba& value);
  void set_vacuous(CellIndex c);

  std::span<float> raw() { return masses_; }
  std::span<const float> raw() const { return masses_; }

 private:
  void check(CellIndex c) const;

  TypeTag type_;
  int step_;
  std::size_t stride_;
  std::vector<float> masses_;
};

bool is_vacuous(std::span<const float> cell);

/// Holds at most one layer per type.
class Patch {
 public:
  Patch() = default;
  explicit Patch(PatchIndex index) : index_(index) {}

  PatchIndex index() const { return index_; }
  const std::map<TypeTag, Layer>& layers() const { return layers_; }
  bool empty() const { return layers_.empty(); }

  Layer* find(TypeTag type);
  const Layer* find(TypeTag type) const;

  /// Inserts or replaces the layer of the same type.
  Layer& put(Layer layer);
  bool erase(TypeTag type) { return layers_.erase(type) > 0; }

 private:
  PatchIndex index_;
  std::map<TypeTag, Layer> layers_;
};

struct GridGeometry {
  Vec2 datum;
  double edge = 12.8;
};

inline constexpr double kDefaultEdgeLength = 12.8;
inline constexpr int kDefaultMaxStep = 12;

Vec2 patch_datum(const GridGeometry& geometry, PatchIndex index);
/// Throws Errc::kCellOutOfBounds.
Vec2 cell_datum(const GridGeometry& geometry, PatchIndex patch, int step, CellIndex cell);
PatchIndex patch_index_of(const GridGeometry& geometry, Vec2 point);
/// Throws Errc::kPointOutsidePatch when the point is not in the half-open
/// patch square.
CellIndex cell_index_of(Vec2 point, Vec2 patch_datum, double edge, int step);

/// Sparse map PatchIndex -> Patch with a fixed datum and patch edge length.
/// Single writer; concurrent readers are fine between mutations.
class GridMap {
 public:
  explicit GridMap(GridGeometry geometry = {}, int max_step = kDefaultMaxStep);

  const GridGeometry& geometry() const { return geometry_; }
  Vec2 datum() const { return geometry_.datum; }
  double edge() const { return geometry_.edge; }
  int max_step() const { return max_step_; }

  const std::map<PatchIndex, Patch>& patches() const { return patches_; }
  std::size_t patch_count() const { return patches_.size(); }

  Patch* find(PatchIndex index);
  const Patch* find(PatchIndex index) const;
  Layer* find_layer(PatchIndex index, TypeTag type);
  const Layer* find_layer(PatchIndex index, TypeTag type) const;

  /// Lazily allocates the patch and the layer. An existing layer keeps its
  /// step; requesting a different one throws Errc::kResolutionConflict.
  Layer& get_or_create_layer(PatchIndex index, TypeTag type, int step);

  /// Inserts a fully built patch, replacing any patch at the same index.
  Patch& put_patch(Patch patch);
  bool erase_patch(PatchIndex index) { return patches_.erase(index) > 0; }

  std::size_t cell_count(std::optional<TypeTag> type = std::nullopt) const;
  /// Mass payload only: 4 bytes per stored hypothesis per cell.
  std::size_t memory_bytes(std::optional<TypeTag> type = std::nullopt) const;

  Vec2 patch_datum(PatchIndex index) const { return apgm::patch_datum(geometry_, index); }
  PatchIndex patch_index_of(Vec2 point) const { return apgm::patch_index_of(geometry_, point); }

 private:
  void check_step(int step) const;

  GridGeometry geometry_;
  int max_step_;
  std::map<PatchIndex, Patch> patches_;
};

/// Binary snapshot, little-endian:
///   "APGM\x01", f64 datum.x, f64 datum.y, f64 edge,
///   u8 type count, per type { u8 tag, u8 |frame|, per label { u8 len, bytes } },
///   u32 patch count, per patch { i32 ix, i32 iy, u8 layer count,
///     per layer { u8 tag, u8 step, f32[4^step * |frame|] } }.
void write_snapshot(const GridMap& grid, std::ostream& out);
/// Throws Errc::kFormatError on malformed input.
GridMap read_snapshot(std::istream& in);

}  // namespace apgm

#endif  // APGM_GRID_MAP_HPP
