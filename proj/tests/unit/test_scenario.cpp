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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "apgm/error.hpp"
#include "apgm/scenario/config.hpp"
#include "apgm/scenario/metrics.hpp"
#include "apgm/scenario/raster.hpp"
#include "apgm/scenario/runner.hpp"
#include "apgm/scenario/simulation.hpp"
#include "apgm/scenario/world.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace apgm;
using namespace apgm::scenario;

namespace {

ScenarioConfig short_config(double duration) {
  ScenarioConfig c = default_config();
  c.script.duration_s = duration;
  return c;
}

std::string csv_of(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  write_metrics(records, out);
  return out.str();
}

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

void check_config_error(const std::string& text) {
  try {
    parse(text);
    FAIL("expected ConfigError for: " << text);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kConfigError);
  }
}

}  // namespace

TEST_CASE("lidar simulation") {
  WorldModel empty;
  empty.bounds = {{-50.0, -50.0}, {50.0, 50.0}};
  LidarConfig cfg;
  cfg.noise_sigma = 0.0;
  CHECK(simulate_lidar(empty, {}, cfg, 1).points.empty());

  WorldModel wall = empty;
  wall.walls.push_back({{10.0, -40.0}, {10.0, 40.0}});
  const PointCloud cloud = simulate_lidar(wall, {}, cfg, 1);
  CHECK_FALSE(cloud.points.empty());
  for (const Vec2& p : cloud.points) CHECK(p.x == doctest::Approx(10.0).epsilon(1e-12));
  // beam 0 points straight at the wall
  CHECK(cloud.points.front().y == doctest::Approx(0.0));

  LidarConfig noisy;
  const PointCloud a = simulate_lidar(default_world(), {{10.0, 30.0}, 0.0}, noisy, 99);
  const PointCloud b = simulate_lidar(default_world(), {{10.0, 30.0}, 0.0}, noisy, 99);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(std::memcmp(a.points.data(), b.points.data(), a.points.size() * sizeof(Vec2)) == 0);
  const PointCloud c = simulate_lidar(default_world(), {{10.0, 30.0}, 0.0}, noisy, 100);
  CHECK(std::memcmp(a.points.data(), c.points.data(), a.points.size() * sizeof(Vec2)) != 0);
}

TEST_CASE("boxes block beams from outside only") {
  WorldModel w;
  w.bounds = {{-50.0, -50.0}, {50.0, 50.0}};
  w.obstacles.push_back({{5.0, -1.0}, {7.0, 1.0}});
  CHECK(*w.cast({0.0, 0.0}, {1.0, 0.0}, 100.0) == doctest::Approx(5.0));
  CHECK_FALSE(w.cast({0.0, 0.0}, {-1.0, 0.0}, 100.0).has_value());
  CHECK_FALSE(w.cast({0.0, 0.0}, {1.0, 0.0}, 4.0).has_value());
  CHECK_FALSE(w.cast({6.0, 0.0}, {1.0, 0.0}, 100.0).has_value());
}

TEST_CASE("camera simulation") {
  CameraConfig cfg;
  CHECK(camera_confidence(5.0, cfg) == doctest::Approx(0.8375));
  CHECK(camera_confidence(0.0, cfg) == doctest::Approx(0.9));
  CHECK(camera_confidence(40.0, cfg) == doctest::Approx(0.4));

  const WorldModel world = default_world();
  const Pose2 pose{{100.0, 30.5}, 0.0};
  const SemanticObservation obs = simulate_camera(world, pose, cfg);
  bool saw_road_at_5 = false;
  for (const LabeledPoint& p : obs.points) {
    const Vec2 d = p.position - pose.position;
    CHECK(d.x > 0.0);
    CHECK(std::abs(std::atan2(d.y, d.x)) <= cfg.half_fov_rad + 1e-9);
    CHECK(std::hypot(d.x, d.y) <= cfg.range_m + 1e-9);
    if (std::abs(std::hypot(d.x, d.y) - 5.0) < 1e-9 && std::abs(d.y) < 1e-9) {
      CHECK(p.label == SemanticLabel::kRoad);
      CHECK(p.confidence == doctest::Approx(0.8375));
      saw_road_at_5 = true;
    }
  }
  CHECK(saw_road_at_5);

  WorldModel bare;
  bare.bounds = {{-50.0, -50.0}, {50.0, 50.0}};
  for (const LabeledPoint& p : simulate_camera(bare, {}, cfg).points) {
    REQUIRE(p.label == SemanticLabel::kUnknown);
  }
}

TEST_CASE("label index agrees with the linear scan") {
  const WorldModel world = default_world();
  const LabelIndex index(world);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> x(-20.0, 540.0);
  std::uniform_real_distribution<double> y(-20.0, 80.0);
  for (int i = 0; i < 20000; ++i) {
    const Vec2 p{x(rng), y(rng)};
    REQUIRE(index.label_at(p) == world.label_at(p));
  }
  CHECK(world.label_at({100.0, 28.0}) == SemanticLabel::kRoad);
  CHECK(world.label_at({61.0, 30.0}) == SemanticLabel::kMarking);
  CHECK(world.label_at({70.0, 45.0}) == SemanticLabel::kBlocked);
  CHECK(world.label_at({100.0, 60.0}) == SemanticLabel::kUnknown);
  CHECK_NOTHROW(world.validate());
}

TEST_CASE("point in polygon") {
  const std::vector<Vec2> tri{{0.0, 0.0}, {4.0, 0.0}, {0.0, 4.0}};
  CHECK(point_in_polygon({1.0, 1.0}, tri));
  CHECK_FALSE(point_in_polygon({3.0, 3.0}, tri));
  CHECK_FALSE(point_in_polygon({-1.0, 1.0}, tri));
}

TEST_CASE("script interpolation and modes") {
  const ScenarioScript& s = default_config().script;
  CHECK(s.cycle_count() == 600);
  CHECK(s.pose_at(0.0).position == Vec2{10.0, 30.0});
  CHECK(s.pose_at(6.0).position.x == doctest::Approx(32.5));
  CHECK(s.pose_at(100.0).position == Vec2{500.0, 30.0});
  CHECK(s.mode_at(11.9) == ModeLabel::kParking);
  CHECK(s.mode_at(12.0) == ModeLabel::kRoad);
  CHECK(s.mode_at(42.0) == ModeLabel::kParking);
}

TEST_CASE("reference layouts") {
  const GridGeometry g{{0.0, 0.0}, 12.8};
  RequirementProfile p;
  p.types[TypeTag::kOccupancy] = {true, 20.0, 0.1, std::nullopt};
  p.vehicle.position = {3.3, 4.4};
  const auto refs = reference_cell_counts({}, g, p);
  REQUIRE(refs.size() == 2);
  CHECK(refs[0].cells == 640000);
  CHECK(refs[1].cells == oracle::patches_in_disc(3.3, 4.4, 20.0, 12.8) * 16384);

  p.types[TypeTag::kOccupancy].horizon_m = 0.0;
  CHECK(reference_cell_counts({}, g, p)[1].cells == 16384);
}

TEST_CASE("empty scenario") {
  const ScenarioResult r = run_scenario(short_config(0.0), default_world());
  CHECK(r.records.empty());
  CHECK(r.grid.patch_count() == 0);
  CHECK(csv_of(r.records) == "time_s,mode,horizon_m,src,type,cells,bytes,fuse_ms\n");
}

TEST_CASE("parking cycles realize the parking profile") {
  std::size_t seen = 0;
  RunOptions opts;
  opts.observer = [&](const CycleView& v) {
    ++seen;
    CHECK(v.mode == ModeLabel::kParking);
    CHECK(v.grid.cell_count(TypeTag::kSemantic) == 0);
    for (const auto& [index, patch] : v.grid.patches()) {
      const Layer* occ = patch.find(TypeTag::kOccupancy);
      REQUIRE(occ != nullptr);
      CHECK(occ->step() == 7);
      CHECK(distance_to_patch(v.grid.geometry(), index, v.profile.vehicle.position) <= 20.0 + 1e-9);
    }
  };
  const ScenarioResult r = run_scenario(short_config(0.5), default_world(), opts);
  CHECK(seen == 5);
  REQUIRE(r.records.size() == 5);
  CHECK(r.grid.patch_count() > 0);

  const std::string csv = csv_of(r.records);
  std::istringstream lines(csv);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 1 + 5 * 7);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("mode switch takes effect on the first cycle after it") {
  ScenarioConfig c = short_config(1.0);
  c.script.keyframes = {{0.0, {{10.0, 30.0}, 0.0}, ModeLabel::kParking},
                        {0.5, {{12.0, 30.0}, 0.0}, ModeLabel::kRoad}};
  RunOptions opts;
  bool checked = false;
  opts.observer = [&](const CycleView& v) {
    if (v.time_s < 0.5 - 1e-9) {
      CHECK(v.mode == ModeLabel::kParking);
      return;
    }
    CHECK(v.mode == ModeLabel::kRoad);
    CHECK(v.record.horizon_m == 100.0);
    for (const auto& [index, patch] : v.grid.patches()) {
      if (const Layer* occ = patch.find(TypeTag::kOccupancy)) CHECK(occ->step() == 6);
      if (const Layer* sem = patch.find(TypeTag::kSemantic)) CHECK(sem->step() == 6);
    }
    CHECK(v.grid.cell_count(TypeTag::kSemantic) > 0);
    checked = true;
  };
  run_scenario(c, default_world(), opts);
  CHECK(checked);
}

TEST_CASE("fused occupancy lies between the largest source and the source sum") {
  ScenarioConfig c = short_config(0.5);
  c.temporal_alpha = 0.0;
  const ScenarioResult r = run_scenario(c, default_world());
  for (const MetricsRecord& rec : r.records) {
    const std::size_t front = rec.find("lidar_front", TypeTag::kOccupancy)->cells;
    const std::size_t rear = rec.find("lidar_rear", TypeTag::kOccupancy)->cells;
    const std::size_t fused = rec.find("fused", TypeTag::kOccupancy)->cells;
    CHECK(fused >= std::max(front, rear));
    CHECK(fused <= front + rear);
  }
}

TEST_CASE("same seed, same metrics") {
  const ScenarioConfig c = short_config(0.3);
  const std::string a = csv_of(run_scenario(c, default_world()).records);
  const std::string b = csv_of(run_scenario(c, default_world()).records);
  CHECK(a == b);
  std::ostringstream timed;
  write_metrics(run_scenario(c, default_world()).records, timed, true);
  CHECK(timed.str().size() > a.size());
}

TEST_CASE("raster export") {
  const Rect region{{0.0, 0.0}, {12.8, 12.8}};
  GridMap empty;
  const Raster blank = render_raster(empty, TypeTag::kOccupancy, region);
  CHECK(blank.width == 128);
  CHECK(blank.height == 128);
  CHECK(std::ranges::all_of(blank.pixels, [](std::uint8_t v) { return v == kUnknownPixel; }));

  GridMap g;
  Layer& l = g.get_or_create_layer({0, 0}, TypeTag::kOccupancy, 7);
  l.cell(CellIndex{5, 0})[kOccupied] = 1.0F;
  const Raster r = render_raster(g, TypeTag::kOccupancy, region);
  // row 0 is the northern edge
  CHECK(r.at(5, 127) == 255);
  CHECK(r.at(6, 127) == 127);
  CHECK(r.at(5, 0) == 127);

  const auto dir = std::filesystem::temp_directory_path() / "apgm_raster_test";
  std::filesystem::create_directories(dir);
  export_raster(g, TypeTag::kOccupancy, region, dir / "r.pgm");
  std::ifstream in(dir / "r.pgm", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(bytes.rfind("P5\n128 128\n255\n", 0) == 0);
  CHECK(bytes.size() == 15 + 128 * 128);
  CHECK_THROWS_AS(export_raster(g, TypeTag::kOccupancy, region, dir / "missing" / "r.pgm"), Error);
}

TEST_CASE("merge comparison") {
  Layer layer(TypeTag::kOccupancy, 3);
  // one occupied child and three free children in the first 2x2 block
  layer.cell(CellIndex{0, 0})[kOccupied] = 0.9F;
  layer.cell(CellIndex{1, 0})[kFree] = 0.9F;
  layer.cell(CellIndex{0, 1})[kFree] = 0.9F;
  layer.cell(CellIndex{1, 1})[kFree] = 0.9F;
  // an all-free block
  for (std::uint32_t a = 2; a < 4; ++a) {
    for (std::uint32_t b = 0; b < 2; ++b) layer.cell(CellIndex{a, b})[kFree] = 0.9F;
  }
  const auto cmp = compare_resampling(layer);
  REQUIRE(cmp.size() == 2);
  CHECK(cmp[0].block == 2);
  CHECK(cmp[1].block == 8);
  const Bba measured = cmp[0].measurement.bba({0, 0});
  const Bba dempster = cmp[0].dempster.bba({0, 0});
  CHECK(measured.singleton(kOccupied) == doctest::Approx(0.9));
  CHECK(dempster.singleton(kOccupied) < 0.9);

  CHECK(cmp[0].measurement.bba({1, 0}).singleton(kFree) == doctest::Approx(0.9));
  CHECK(cmp[0].dempster.bba({1, 0}).singleton(kFree) > 0.9);
  CHECK(cmp[0].measurement.bba({3, 3}).is_vacuous());
  CHECK(cmp[0].dempster.bba({3, 3}).is_vacuous());
}

TEST_CASE("config parsing") {
  const auto path = std::filesystem::path(APGM_SOURCE_DIR) / "configs" / "default.ini";
  const ScenarioConfig file = load_config(path);
  const ScenarioConfig def = default_config();
  CHECK(file.seed == def.seed);
  CHECK(file.lidars.size() == 2);
  CHECK(file.lidars[0].name == "lidar_front");
  CHECK(file.lidars[1].mount_offset.x == -2.0);
  CHECK(file.script.keyframes.size() == def.script.keyframes.size());
  CHECK(file.camera.half_fov_rad == doctest::Approx(def.camera.half_fov_rad));
  CHECK(required_step(file.modes.at(ModeLabel::kParking), TypeTag::kOccupancy, 12.8) == 7);
  CHECK(required_step(file.modes.at(ModeLabel::kRoad), TypeTag::kOccupancy, 12.8) == 6);
  CHECK(file.modes.at(ModeLabel::kRoad).active(TypeTag::kSemantic));
  CHECK_FALSE(file.modes.at(ModeLabel::kParking).active(TypeTag::kSemantic));
  CHECK(csv_of(run_scenario(
            [&] {
              ScenarioConfig c = file;
              c.script.duration_s = 0.2;
              return c;
            }(),
            default_world())
                   .records) == csv_of(run_scenario(short_config(0.2), default_world()).records));

  CHECK(parse("[scenario]\nseed = 7\n").seed == 7);
  check_config_error("[scenario]\nseeed = 7\n");
  check_config_error("[scenario]\nseed = seven\n");
  check_config_error("[bogus]\nx = 1\n");
  check_config_error("[mode.road]\nocc_cell_m = 0.15\n");
  check_config_error("[mode.highway]\nocc_cell_m = 0.1\n");
  check_config_error("[timeline]\nk1 = 0 0 0 0 parking\nk2 = 0 1 1 0 road\n");
  check_config_error("[timeline]\nk1 = 1 0 0 0 parking\n");
  check_config_error("[timeline]\nk1 = 0 0 0 parking\n");
  check_config_error("[scenario]\ntemporal_alpha = 1.5\n");
  check_config_error("[sensor_model]\nmu_hit = 0\n");
  check_config_error("[lidar_top]\nbeams = 0\n");
  check_config_error("[mode.parking]\nsem_active = maybe\n");
  check_config_error("[scenario\nseed = 1\n");
  try {
    load_config("/nonexistent/apgm.ini");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kConfigError);
  }
}
