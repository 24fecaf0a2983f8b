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

#include "apgm/scenario/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "apgm/error.hpp"

namespace apgm::scenario {

namespace pt = boost::property_tree;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) {
  throw Error(Errc::kConfigError, "[" + section + "] " + key + ": " + msg);
}

// Typed access to one INI section. Keys are looked up without path
// splitting; every key read is remembered so leftovers can be reported.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

  template <typename T>
  void read(const std::string& key, T& value) {
    const auto it = tree_.find(key);
    seen_.insert(key);
    if (it == tree_.not_found()) return;
    const std::string text = it->second.data();
    if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes") {
        value = true;
      } else if (text == "false" || text == "0" || text == "no") {
        value = false;
      } else {
        fail(name_, key, "expected true or false, got '" + text + "'");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      value = text;
    } else {
      std::istringstream in(text);
      T parsed{};
      if (!(in >> parsed) || !(in >> std::ws).eof()) {
        fail(name_, key, "expected a number, got '" + text + "'");
      }
      value = parsed;
    }
  }

  void read_degrees(const std::string& key, double& radians) {
    double deg = radians / kDegToRad;
    read(key, deg);
    radians = deg * kDegToRad;
  }

  void check_unknown() const {
    for (const auto& [key, child] : tree_) {
      if (!seen_.contains(key)) fail(name_, key, "unknown key");
    }
  }

  const std::string& name() const { return name_; }
  const pt::ptree& tree() const { return tree_; }

 private:
  std::string name_;
  const pt::ptree& tree_;
  std::set<std::string> seen_;
};

void read_lidar(Section& s, LidarConfig& l) {
  s.read("offset_x", l.mount_offset.x);
  s.read("offset_y", l.mount_offset.y);
  s.read("beams", l.beams);
  s.read("max_range_m", l.max_range);
  s.read("noise_sigma_m", l.noise_sigma);
  s.check_unknown();
}

ModeLabel parse_mode(const std::string& section, const std::string& key, const std::string& text) {
  if (text == mode_name(ModeLabel::kParking)) return ModeLabel::kParking;
  if (text == mode_name(ModeLabel::kRoad)) return ModeLabel::kRoad;
  fail(section, key, "unknown mode '" + text + "'");
}

Keyframe parse_keyframe(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  Keyframe k;
  double heading_deg = 0.0;
  std::string mode;
  if (!(in >> k.time_s >> k.pose.position.x >> k.pose.position.y >> heading_deg >> mode) ||
      !(in >> std::ws).eof()) {
    fail("timeline", key, "expected 'time_s x_m y_m heading_deg mode', got '" + text + "'");
  }
  k.pose.heading = heading_deg * kDegToRad;
  k.mode = parse_mode("timeline", key, mode);
  return k;
}

RequirementProfile parking_profile() {
  RequirementProfile p;
  p.types[TypeTag::kOccupancy] = {true, 20.0, 0.1, std::nullopt};
  p.types[TypeTag::kSemantic] = {false, 40.0, 0.2, 30.0 * kDegToRad};
  return p;
}

RequirementProfile road_profile() {
  RequirementProfile p;
  p.types[TypeTag::kOccupancy] = {true, 100.0, 0.2, std::nullopt};
  p.types[TypeTag::kSemantic] = {true, 40.0, 0.2, 30.0 * kDegToRad};
  return p;
}

}  // namespace

std::size_t ScenarioScript::cycle_count() const {
  if (keyframes.empty() || !(duration_s > 0.0) || !(cycle_s > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(duration_s / cycle_s + 1e-9));
}

Pose2 ScenarioScript::pose_at(double t) const {
  if (keyframes.empty()) return {};
  if (t <= keyframes.front().time_s) return keyframes.front().pose;
  for (std::size_t i = 0; i + 1 < keyframes.size(); ++i) {
    const Keyframe& a = keyframes[i];
    const Keyframe& b = keyframes[i + 1];
    if (t < b.time_s) {
      const double f = (t - a.time_s) / (b.time_s - a.time_s);
      return {a.pose.position + f * (b.pose.position - a.pose.position), a.pose.heading};
    }
  }
  return keyframes.back().pose;
}

ModeLabel ScenarioScript::mode_at(double t) const {
  ModeLabel mode = keyframes.empty() ? ModeLabel::kParking : keyframes.front().mode;
  for (const Keyframe& k : keyframes) {
    if (k.time_s <= t + 1e-9) mode = k.mode;
  }
  return mode;
}

void ScenarioScript::validate() const {
  if (!(cycle_s > 0.0)) fail("scenario", "cycle_s", "must be positive");
  if (!(duration_s >= 0.0)) fail("scenario", "duration_s", "must not be negative");
  if (duration_s > 0.0 && keyframes.empty()) fail("timeline", "-", "no keyframes");
  if (!keyframes.empty() && keyframes.front().time_s > 0.0) {
    fail("timeline", "-", "first keyframe must be at time 0");
  }
  for (std::size_t i = 1; i < keyframes.size(); ++i) {
    if (!(keyframes[i].time_s > keyframes[i - 1].time_s)) {
      fail("timeline", "-", "keyframe times must increase");
    }
  }
}

void ScenarioConfig::validate() const {
  if (!(geometry.edge > 0.0)) fail("scenario", "edge_m", "must be positive");
  if (!std::isfinite(geometry.datum.x) || !std::isfinite(geometry.datum.y)) {
    fail("scenario", "datum", "must be finite");
  }
  if (!(temporal_alpha >= 0.0 && temporal_alpha <= 1.0)) {
    fail("scenario", "temporal_alpha", "must lie in [0, 1]");
  }
  if (fusion_threads == 0) fail("scenario", "fusion_threads", "must be at least 1");
  try {
    sensor_model.validate();
  } catch (const Error& e) {
    fail("sensor_model", "-", e.what());
  }
  for (const LidarConfig& l : lidars) {
    if (l.beams <= 0) fail(l.name, "beams", "must be positive");
    if (!(l.max_range > 0.0)) fail(l.name, "max_range_m", "must be positive");
    if (!(l.noise_sigma >= 0.0)) fail(l.name, "noise_sigma_m", "must not be negative");
  }
  if (!(camera.half_fov_rad > 0.0 && camera.half_fov_rad < std::numbers::pi)) {
    fail("camera", "half_fov_deg", "must lie in (0, 180)");
  }
  if (!(camera.range_m > 0.0)) fail("camera", "range_m", "must be positive");
  if (!(camera.range_step_m > 0.0)) fail("camera", "range_step_m", "must be positive");
  if (!(camera.angle_step_rad > 0.0)) fail("camera", "angle_step_deg", "must be positive");
  for (double c : {camera.confidence_near, camera.confidence_far}) {
    if (!(c >= 0.0 && c <= 1.0)) fail("camera", "confidence", "must lie in [0, 1]");
  }
  for (ModeLabel m : {ModeLabel::kParking, ModeLabel::kRoad}) {
    const std::string section = "mode." + std::string(mode_name(m));
    const auto it = modes.find(m);
    if (it == modes.end()) fail(section, "-", "missing profile");
    try {
      it->second.validate(geometry.edge);
    } catch (const Error& e) {
      fail(section, "-", e.what());
    }
  }
  script.validate();
  if (reference.static_cells == 0) fail("reference", "static_cells", "must be positive");
  if (reference.bytes_per_cell == 0) fail("reference", "bytes_per_cell", "must be positive");
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.lidars = {{"lidar_front", {2.0, 0.0}, 720, 120.0, 0.02},
              {"lidar_rear", {-2.0, 0.0}, 720, 120.0, 0.02}};
  c.camera.mount_offset = {1.5, 0.0};
  c.modes[ModeLabel::kParking] = parking_profile();
  c.modes[ModeLabel::kRoad] = road_profile();
  c.script.keyframes = {{0.0, {{10.0, 30.0}, 0.0}, ModeLabel::kParking},
                        {12.0, {{55.0, 30.0}, 0.0}, ModeLabel::kRoad},
                        {42.0, {{455.0, 30.0}, 0.0}, ModeLabel::kParking},
                        {60.0, {{500.0, 30.0}, 0.0}, ModeLabel::kParking}};
  return c;
}

ScenarioConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(Errc::kConfigError, std::string("malformed config: ") + e.what());
  }

  ScenarioConfig c = default_config();
  bool lidars_given = false;
  std::vector<Keyframe> keyframes;
  for (const auto& [name, body] : tree) {
    if (!body.data().empty() && body.empty()) {
      fail("-", name, "key outside of a section");
    }
    Section s(name, body);
    if (name == "scenario") {
      s.read("seed", c.seed);
      s.read("cycle_s", c.script.cycle_s);
      s.read("duration_s", c.script.duration_s);
      s.read("datum_x", c.geometry.datum.x);
      s.read("datum_y", c.geometry.datum.y);
      s.read("edge_m", c.geometry.edge);
      s.read("temporal_alpha", c.temporal_alpha);
      s.read("fusion_threads", c.fusion_threads);
      s.check_unknown();
    } else if (name == "sensor_model") {
      s.read("mu_hit", c.sensor_model.mu_hit);
      s.read("mu_free", c.sensor_model.mu_free);
      s.check_unknown();
    } else if (name.starts_with("lidar_")) {
      if (!lidars_given) c.lidars.clear();
      lidars_given = true;
      LidarConfig l;
      l.name = name;
      read_lidar(s, l);
      c.lidars.push_back(l);
    } else if (name == "camera") {
      s.read("offset_x", c.camera.mount_offset.x);
      s.read("offset_y", c.camera.mount_offset.y);
      s.read_degrees("half_fov_deg", c.camera.half_fov_rad);
      s.read("range_m", c.camera.range_m);
      s.read("range_step_m", c.camera.range_step_m);
      s.read_degrees("angle_step_deg", c.camera.angle_step_rad);
      s.read("confidence_near", c.camera.confidence_near);
      s.read("confidence_far", c.camera.confidence_far);
      s.check_unknown();
    } else if (name.starts_with("mode.")) {
      const ModeLabel m = parse_mode(name, "-", name.substr(5));
      RequirementProfile& p = c.modes[m];
      for (auto [tag, prefix] : {std::pair{TypeTag::kOccupancy, "occ"},
                                 std::pair{TypeTag::kSemantic, "sem"}}) {
        TypeRequirement& t = p.types[tag];
        const std::string pre = prefix;
        s.read(pre + "_active", t.active);
        s.read(pre + "_horizon_m", t.horizon_m);
        s.read(pre + "_cell_m", t.max_cell_size_m);
        if (body.find(pre + "_fov_half_deg") != body.not_found()) {
          double rad = 0.0;
          s.read_degrees(pre + "_fov_half_deg", rad);
          t.fov_half_angle_rad = rad;
        }
      }
      s.check_unknown();
    } else if (name == "timeline") {
      for (const auto& [key, value] : body) keyframes.push_back(parse_keyframe(key, value.data()));
    } else if (name == "reference") {
      s.read("static_cells", c.reference.static_cells);
      s.read("bytes_per_cell", c.reference.bytes_per_cell);
      s.check_unknown();
    } else {
      fail(name, "-", "unknown section");
    }
  }
  if (tree.find("timeline") != tree.not_found()) c.script.keyframes = keyframes;
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kConfigError, "cannot open " + path.string());
  return parse_config(in);
}

}  // namespace apgm::scenario
