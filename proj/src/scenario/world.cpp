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

#include "apgm/scenario/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apgm/error.hpp"

namespace apgm::scenario {

namespace {

constexpr double kParallelEpsilon = 1e-12;

// Entry distance of the ray into the box, if any. Boxes containing the
// origin are ignored so a sensor never reports its own mount.
std::optional<double> ray_box(Vec2 o, Vec2 d, const Rect& box) {
  if (box.contains(o)) return std::nullopt;
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  const double origin[2] = {o.x, o.y};
  const double dir[2] = {d.x, d.y};
  const double lo[2] = {box.min.x, box.min.y};
  const double hi[2] = {box.max.x, box.max.y};
  for (int axis = 0; axis < 2; ++axis) {
    if (std::abs(dir[axis]) < kParallelEpsilon) {
      if (origin[axis] < lo[axis] || origin[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    double ta = (lo[axis] - origin[axis]) / dir[axis];
    double tb = (hi[axis] - origin[axis]) / dir[axis];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

std::optional<double> ray_segment(Vec2 o, Vec2 d, const Segment& s) {
  const Vec2 e = s.b - s.a;
  const double denom = d.x * e.y - d.y * e.x;
  if (std::abs(denom) < kParallelEpsilon) return std::nullopt;
  const Vec2 w = s.a - o;
  const double t = (w.x * e.y - w.y * e.x) / denom;
  const double u = (w.x * d.y - w.y * d.x) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

Region rect_region(Rect r, SemanticLabel label) {
  return {{r.min, {r.max.x, r.min.y}, r.max, {r.min.x, r.max.y}}, label};
}

bool finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Perpendicular parking rows: cars 1.9 m wide, 4.5 m deep, one bay every 3 m.
void add_parking_row(WorldModel& w, double x_begin, double x_end, double y, int skip_every) {
  int k = 0;
  for (double x = x_begin; x + 1.9 <= x_end; x += 3.0, ++k) {
    if (skip_every > 0 && k % skip_every == skip_every - 1) continue;
    w.obstacles.push_back({{x, y}, {x + 1.9, y + 4.5}});
  }
}

// Walled lot spanning [x0, x0 + 60] x [0, 60] with an opening on one side
// at y in [24, 36].
void add_lot(WorldModel& w, double x0, bool opening_right) {
  const double x1 = x0 + 60.0;
  w.walls.push_back({{x0, 0.0}, {x1, 0.0}});
  w.walls.push_back({{x0, 60.0}, {x1, 60.0}});
  const double open_x = opening_right ? x1 : x0;
  const double closed_x = opening_right ? x0 : x1;
  w.walls.push_back({{closed_x, 0.0}, {closed_x, 60.0}});
  w.walls.push_back({{open_x, 0.0}, {open_x, 24.0}});
  w.walls.push_back({{open_x, 36.0}, {open_x, 60.0}});
  add_parking_row(w, x0 + 3.0, x1 - 3.0, 4.0, 4);
  add_parking_row(w, x0 + 3.0, x1 - 3.0, 16.0, 3);
  add_parking_row(w, x0 + 3.0, x1 - 3.0, 39.5, 5);
  add_parking_row(w, x0 + 3.0, x1 - 3.0, 51.5, 4);
}

}  // namespace

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& polygon) {
  bool inside = false;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

std::optional<double> WorldModel::cast(Vec2 origin, Vec2 dir, double max_range) const {
  double best = max_range;
  bool hit = false;
  for (const Rect& r : obstacles) {
    if (auto t = ray_box(origin, dir, r); t && *t <= best) {
      best = *t;
      hit = true;
    }
  }
  for (const Segment& s : walls) {
    if (auto t = ray_segment(origin, dir, s); t && *t <= best) {
      best = *t;
      hit = true;
    }
  }
  if (!hit) return std::nullopt;
  return best;
}

SemanticLabel WorldModel::label_at(Vec2 p) const {
  for (const Region& r : regions) {
    if (point_in_polygon(p, r.polygon)) return r.label;
  }
  return SemanticLabel::kUnknown;
}

LabelIndex::LabelIndex(const WorldModel& world, double bucket_m)
    : world_(world), bucket_(bucket_m), origin_(world.bounds.min) {
  cols_ = static_cast<std::int64_t>(std::ceil((world.bounds.max.x - origin_.x) / bucket_)) + 1;
  rows_ = static_cast<std::int64_t>(std::ceil((world.bounds.max.y - origin_.y) / bucket_)) + 1;
  buckets_.resize(static_cast<std::size_t>(cols_ * rows_));
  for (const Region& r : world.regions) {
    Rect box{r.polygon.front(), r.polygon.front()};
    for (Vec2 v : r.polygon) {
      box.min = {std::min(box.min.x, v.x), std::min(box.min.y, v.y)};
      box.max = {std::max(box.max.x, v.x), std::max(box.max.y, v.y)};
    }
    auto col = [&](double x) {
      return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((x - origin_.x) / bucket_)), 0, cols_ - 1);
    };
    auto row = [&](double y) {
      return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((y - origin_.y) / bucket_)), 0, rows_ - 1);
    };
    for (std::int64_t j = row(box.min.y); j <= row(box.max.y); ++j) {
      for (std::int64_t i = col(box.min.x); i <= col(box.max.x); ++i) {
        buckets_[static_cast<std::size_t>(j * cols_ + i)].push_back({box, &r});
      }
    }
  }
}

SemanticLabel LabelIndex::label_at(Vec2 p) const {
  const auto i = static_cast<std::int64_t>(std::floor((p.x - origin_.x) / bucket_));
  const auto j = static_cast<std::int64_t>(std::floor((p.y - origin_.y) / bucket_));
  if (i < 0 || j < 0 || i >= cols_ || j >= rows_) return world_.label_at(p);
  for (const Entry& e : buckets_[static_cast<std::size_t>(j * cols_ + i)]) {
    if (e.box.contains(p) && point_in_polygon(p, e.region->polygon)) return e.region->label;
  }
  return SemanticLabel::kUnknown;
}

void WorldModel::validate() const {
  auto inside = [&](Vec2 p) { return finite(p) && bounds.contains(p); };
  if (!finite(bounds.min) || !finite(bounds.max) || bounds.min.x >= bounds.max.x ||
      bounds.min.y >= bounds.max.y) {
    throw Error(Errc::kConfigError, "world bounds are empty or not finite");
  }
  for (const Rect& r : obstacles) {
    if (!inside(r.min) || !inside(r.max) || r.min.x > r.max.x || r.min.y > r.max.y) {
      throw Error(Errc::kConfigError, "obstacle outside world bounds");
    }
  }
  for (const Segment& s : walls) {
    if (!inside(s.a) || !inside(s.b)) throw Error(Errc::kConfigError, "wall outside world bounds");
  }
  for (const Region& r : regions) {
    if (r.polygon.size() < 3) throw Error(Errc::kConfigError, "region needs three vertices");
    for (Vec2 p : r.polygon) {
      if (!inside(p)) throw Error(Errc::kConfigError, "region outside world bounds");
    }
  }
}

WorldModel default_world() {
  WorldModel w;
  w.bounds = {{-10.0, -10.0}, {530.0, 70.0}};
  add_lot(w, 0.0, true);
  add_lot(w, 460.0, false);

  // Building blocks 28 m long with 4 m gaps on both sides of the road,
  // lamp posts on the sidewalks.
  for (double x = 62.0; x < 458.0; x += 32.0) {
    const double end = std::min(x + 28.0, 458.0);
    w.obstacles.push_back({{x, 40.0}, {end, 52.0}});
    w.obstacles.push_back({{x, 8.0}, {end, 20.0}});
  }
  for (double x = 70.0; x < 455.0; x += 25.0) {
    w.obstacles.push_back({{x, 37.8}, {x + 0.3, 38.1}});
    w.obstacles.push_back({{x, 21.9}, {x + 0.3, 22.2}});
  }

  // Regions, most specific first.
  for (double x = 60.0; x + 3.0 <= 460.0; x += 6.0) {
    w.regions.push_back(rect_region({{x, 29.9}, {x + 3.0, 30.1}}, SemanticLabel::kMarking));
  }
  w.regions.push_back(rect_region({{60.0, 24.3}, {460.0, 24.45}}, SemanticLabel::kMarking));
  w.regions.push_back(rect_region({{60.0, 35.55}, {460.0, 35.7}}, SemanticLabel::kMarking));
  for (const Rect& r : w.obstacles) w.regions.push_back(rect_region(r, SemanticLabel::kBlocked));
  w.regions.push_back(rect_region({{60.0, 36.0}, {460.0, 40.0}}, SemanticLabel::kBlocked));
  w.regions.push_back(rect_region({{60.0, 20.0}, {460.0, 24.0}}, SemanticLabel::kBlocked));
  w.regions.push_back(rect_region({{60.0, 24.0}, {460.0, 36.0}}, SemanticLabel::kRoad));
  w.regions.push_back(rect_region({{0.0, 22.0}, {60.0, 38.0}}, SemanticLabel::kRoad));
  w.regions.push_back(rect_region({{460.0, 22.0}, {520.0, 38.0}}, SemanticLabel::kRoad));
  return w;
}

}  // namespace apgm::scenario
