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

#include "apgm/requirements.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "apgm/error.hpp"

namespace apgm {

namespace {

constexpr double kDistanceSlack = 1e-9;

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

bool has_frustum(const TypeRequirement& req) {
  return req.fov_half_angle_rad && *req.fov_half_angle_rad < std::numbers::pi;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

// Polygon kept on the side where cross(edge_dir, p) >= 0.
std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, Vec2 dir) {
  std::vector<Vec2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 cur = poly[i];
    const Vec2 next = poly[(i + 1) % n];
    const double sc = cross(dir, cur);
    const double sn = cross(dir, next);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc >= 0.0) != (sn >= 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + t * (next - cur));
    }
  }
  return out;
}

// Minimum distance from the origin to a convex polygon (0 if inside).
double origin_distance(const std::vector<Vec2>& poly) {
  if (poly.empty()) return INFINITY;
  if (poly.size() >= 3) {
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const double c = cross(poly[(i + 1) % poly.size()] - poly[i], Vec2{} - poly[i]);
      pos |= c > 0.0;
      neg |= c < 0.0;
    }
    if (!(pos && neg)) return 0.0;
  }
  double best = norm(poly.front());
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, point_segment_distance({}, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

// Distance from the apex to the part of the square inside the wedge spanned
// counter-clockwise from angle `from` to angle `to` (span <= pi).
double wedge_distance(const std::vector<Vec2>& square, double from, double to) {
  const Vec2 d1{std::cos(from), std::sin(from)};
  const Vec2 d2{std::cos(to), std::sin(to)};
  auto clipped = clip_half_plane(square, d1);
  clipped = clip_half_plane(clipped, Vec2{-d2.x, -d2.y});
  return origin_distance(clipped);
}

}  // namespace

const TypeRequirement* RequirementProfile::find(TypeTag type) const {
  auto it = types.find(type);
  return it == types.end() ? nullptr : &it->second;
}

bool RequirementProfile::active(TypeTag type) const {
  const TypeRequirement* req = find(type);
  return req && req->active;
}

void RequirementProfile::validate(double edge) const {
  for (const auto& [type, req] : types) {
    if (!req.active) continue;
    const std::string name = type_name(type);
    if (!(req.horizon_m > 0.0)) {
      throw Error(Errc::kInvalidProfile, name + ": horizon must be positive");
    }
    if (!(req.max_cell_size_m > 0.0)) {
      throw Error(Errc::kInvalidProfile, name + ": cell size must be positive");
    }
    const double ratio = edge / req.max_cell_size_m;
    const double step = std::round(std::log2(ratio));
    if (step < 0.0 || std::abs(std::exp2(step) - ratio) > 1e-9 * ratio) {
      throw Error(Errc::kInvalidProfile,
                  name + ": edge / cell size = " + std::to_string(ratio) + " is not a power of two");
    }
    if (req.fov_half_angle_rad && !(*req.fov_half_angle_rad > 0.0)) {
      throw Error(Errc::kInvalidProfile, name + ": field of view must be positive");
    }
  }
}

std::string_view mode_name(ModeLabel label) {
  return label == ModeLabel::kParking ? "parking" : "road";
}

int required_step(const RequirementProfile& profile, TypeTag type, double edge) {
  const TypeRequirement* req = profile.find(type);
  const double cell = req ? req->max_cell_size_m : edge;
  int step = 0;
  while (step < 15 && edge / std::exp2(step) > cell * (1.0 + 1e-9)) ++step;
  return step;
}

int required_step(const RequirementProfile& profile, TypeTag type, double edge, PatchIndex patch) {
  if (profile.step_override) {
    if (auto step = profile.step_override(patch, type)) return *step;
  }
  return required_step(profile, type, edge);
}

double distance_to_patch(const GridGeometry& geometry, PatchIndex patch, Vec2 point) {
  const Vec2 lo = patch_datum(geometry, patch);
  const double dx = std::max({lo.x - point.x, 0.0, point.x - (lo.x + geometry.edge)});
  const double dy = std::max({lo.y - point.y, 0.0, point.y - (lo.y + geometry.edge)});
  return std::hypot(dx, dy);
}

bool patch_in_horizon(PatchIndex patch, const GridGeometry& geometry,
                      const RequirementProfile& profile, TypeTag type) {
  const TypeRequirement* req = profile.find(type);
  if (!req || !req->active) return false;
  const Vec2 apex = profile.vehicle.position;
  const double limit = req->horizon_m + kDistanceSlack;
  if (distance_to_patch(geometry, patch, apex) > limit) return false;
  if (!has_frustum(*req)) return true;

  const Vec2 lo = patch_datum(geometry, patch) - apex;
  const double e = geometry.edge;
  const std::vector<Vec2> square = {lo, {lo.x + e, lo.y}, {lo.x + e, lo.y + e}, {lo.x, lo.y + e}};
  const double h = *req->fov_half_angle_rad;
  const double heading = profile.vehicle.heading;
  return wedge_distance(square, heading - h, heading) <= limit ||
         wedge_distance(square, heading, heading + h) <= limit;
}

bool point_in_horizon(Vec2 point, const RequirementProfile& profile, TypeTag type) {
  const TypeRequirement* req = profile.find(type);
  if (!req || !req->active) return false;
  const Vec2 rel = point - profile.vehicle.position;
  const double dist = norm(rel);
  if (dist > req->horizon_m + kDistanceSlack) return false;
  if (!has_frustum(*req) || dist == 0.0) return true;
  const double bearing = wrap_angle(std::atan2(rel.y, rel.x) - profile.vehicle.heading);
  return std::abs(bearing) <= *req->fov_half_angle_rad + 1e-12;
}

Layer resample_to(Layer layer, int target_step, const ResampleRegistry& registry) {
  while (layer.step() != target_step) {
    const int delta = std::clamp(target_step - layer.step(), -kDefaultMaxStepDelta,
                                 kDefaultMaxStepDelta);
    layer = resample_layer(std::move(layer), layer.step() + delta, registry);
  }
  return layer;
}

MutationReport apply_requirements(GridMap& grid, const RequirementProfile& profile,
                                  const ResampleRegistry& registry) {
  struct Decision {
    PatchIndex index;
    std::vector<TypeTag> drop;
    std::vector<std::pair<TypeTag, int>> resample;
    bool delete_patch = false;
  };

  // Decide per patch without touching the grid, then commit.
  std::vector<Decision> decisions;
  for (const auto& [index, patch] : grid.patches()) {
    Decision d{index, {}, {}, false};
    std::size_t kept = 0;
    for (const auto& [type, layer] : patch.layers()) {
      if (!patch_in_horizon(index, grid.geometry(), profile, type)) {
        d.drop.push_back(type);
        continue;
      }
      ++kept;
      const int step = required_step(profile, type, grid.edge(), index);
      if (step != layer.step()) d.resample.emplace_back(type, step);
    }
    d.delete_patch = kept == 0;
    if (d.delete_patch || !d.drop.empty() || !d.resample.empty()) {
      decisions.push_back(std::move(d));
    }
  }

  MutationReport report;
  for (Decision& d : decisions) {
    if (d.delete_patch) {
      grid.erase_patch(d.index);
      ++report.patches_deleted;
      report.layers_deleted += d.drop.size();
      continue;
    }
    Patch* patch = grid.find(d.index);
    for (TypeTag type : d.drop) {
      patch->erase(type);
      ++report.layers_deleted;
    }
    for (auto [type, step] : d.resample) {
      Layer* layer = patch->find(type);
      patch->put(resample_to(std::move(*layer), step, registry));
      ++report.layers_resampled;
    }
  }
  return report;
}

}  // namespace apgm
