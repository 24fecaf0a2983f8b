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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "apgm/error.hpp"
#include "apgm/grid_map.hpp"
#include "apgm/scenario/config.hpp"
#include "apgm/scenario/metrics.hpp"
#include "apgm/scenario/raster.hpp"
#include "apgm/scenario/runner.hpp"
#include "apgm/scenario/world.hpp"

namespace fs = std::filesystem;
using namespace apgm;
using namespace apgm::scenario;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> temporal_alpha;
  bool dump_rasters = false;
  bool wall_time = false;
};

int run(const RunArgs& args) {
  ScenarioConfig config = load_config(args.config);
  if (args.seed) config.seed = *args.seed;
  if (args.temporal_alpha) config.temporal_alpha = *args.temporal_alpha;
  config.validate();

  const fs::path out(args.out);
  fs::create_directories(out);
  const ScenarioResult result = run_scenario(config, default_world());
  write_metrics(result.records, out / "metrics.csv", args.wall_time);
  {
    std::ofstream snap(out / "final.apgm", std::ios::binary);
    if (!snap) throw Error(Errc::kIoError, "cannot write " + (out / "final.apgm").string());
    write_snapshot(result.grid, snap);
  }
  if (args.dump_rasters) {
    for (TypeTag type : kAllTypes) {
      if (auto region = allocated_region(result.grid, type)) {
        export_raster(result.grid, type, *region,
                      out / (std::string("final_") + type_name(type) + ".pgm"));
      }
    }
  }

  const RunSummary s = summarize(result.records);
  std::printf("cycles               %zu\n", s.cycles);
  std::printf("fused occ cells      mean %.0f, max %zu\n", s.mean_fused_occ_cells,
              s.max_fused_occ_cells);
  std::printf("memory factor        static %.2fx, uniform patched %.2fx\n", s.factor_static,
              s.factor_uniform);
  std::printf("fusion time          mean %.2f ms, max %.2f ms\n", s.mean_fuse_ms, s.max_fuse_ms);
  std::printf("dempster conflicts   %zu\n", result.conflicts);
  return kExitOk;
}

int demo(const std::string& out) {
  const auto comparisons = compare_resampling_demo(demo_occupancy_layer(), out);
  for (const MergeComparison& m : comparisons) {
    std::size_t occupied_measurement = 0;
    std::size_t occupied_dempster = 0;
    for (std::size_t i = 0; i < m.measurement.cell_count(); ++i) {
      if (m.measurement.cell(i)[kOccupied] >= 0.5F) ++occupied_measurement;
      if (m.dempster.cell(i)[kOccupied] >= 0.5F) ++occupied_dempster;
    }
    std::printf("%dx%d merge: cells with m(O) >= 0.5: measurement %zu, dempster %zu\n", m.block,
                m.block, occupied_measurement, occupied_dempster);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive patched grid map scenario runner"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write metrics, snapshot, rasters");
  run_cmd->add_option("--config", run_args.config, "Scenario config file")->required();
  run_cmd->add_option("--out", run_args.out, "Output directory")->required();
  run_cmd->add_option("--seed", run_args.seed, "Override the noise seed");
  run_cmd->add_option("--temporal-alpha", run_args.temporal_alpha,
                      "Override the temporal discount in [0, 1]");
  run_cmd->add_flag("--dump-rasters", run_args.dump_rasters, "Write PGM rasters of the final grid");
  run_cmd->add_flag("--wall-time", run_args.wall_time,
                    "Fill the fuse_ms column (output is then not reproducible)");

  std::string demo_out;
  auto* demo_cmd = app.add_subcommand("demo-resample", "Compare cell merging operators");
  demo_cmd->add_option("--out", demo_out, "Output directory")->required();

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "Check a scenario config file");
  validate_cmd->add_option("file", validate_path, "Scenario config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*demo_cmd) return demo(demo_out);
    if (*validate_cmd) {
      load_config(validate_path);
      std::printf("%s: ok\n", validate_path.c_str());
      return kExitOk;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "apgm: %s\n", e.what());
    return e.code() == Errc::kConfigError ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "apgm: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
