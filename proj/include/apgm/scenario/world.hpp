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

#ifndef APGM_SCENARIO_WORLD_HPP
#define APGM_SCENARIO_WORLD_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "apgm/grid_map.hpp"
#include "apgm/sensor_models.hpp"

namespace apgm::scenario {

struct Rect {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Ground-truth semantic region. Earlier regions take precedence.
struct Region {
  std::vector<Vec2> polygon;
  SemanticLabel label = SemanticLabel::kUnknown;
};

/// Static 2D world: obstacles block lidar beams, regions label the ground.
struct WorldModel {
  std::vector<Rect> obstacles;
  std::vector<Segment> walls;
  std::vector<Region> regions;
  Rect bounds;

  /// Distance along unit direction `dir` to the first obstacle or wall, if
  /// closer than `max_range`.
  std::optional<double> cast(Vec2 origin, Vec2 dir, double max_range) const;

  /// Label of the first region containing `p`, Unknown otherwise.
  SemanticLabel label_at(Vec2 p) const;

  /// Throws Errc::kConfigError when geometry is non-finite or out of bounds.
  void validate() const;
};

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& polygon);

/// Bucketed lookup of WorldModel::label_at with the same precedence.
class LabelIndex {
 public:
  explicit LabelIndex(const WorldModel& world, double bucket_m = 4.0);

  SemanticLabel label_at(Vec2 p) const;

 private:
  struct Entry {
    Rect box;
    const Region* region;
  };

  const WorldModel& world_;
  double bucket_;
  Vec2 origin_;
  std::int64_t cols_ = 0;
  std::int64_t rows_ = 0;
  std::vector<std::vector<Entry>> buckets_;
};

/// Parking lot (x in [0, 60]) joined to a second lot (x in [460, 520]) by a
/// 400 m two-lane road along y = 30 lined with buildings.
WorldModel default_world();

}  // namespace apgm::scenario

#endif  // APGM_SCENARIO_WORLD_HPP
