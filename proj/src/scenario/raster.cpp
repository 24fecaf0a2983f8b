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

#include "apgm/scenario/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "apgm/error.hpp"
#include "apgm/fusion.hpp"
#include "apgm/resample.hpp"

namespace apgm::scenario {

namespace {

std::uint8_t pixel_of(std::span<const float> cell) {
  double committed = 0.0;
  for (float m : cell) committed += m;
  const double betp = cell[0] + std::max(0.0, 1.0 - committed) / static_cast<double>(cell.size());
  return static_cast<std::uint8_t>(std::clamp(std::floor(255.0 * betp), 0.0, 255.0));
}

bool overlaps(const GridGeometry& g, PatchIndex p, const Rect& region) {
  const Vec2 lo = patch_datum(g, p);
  return lo.x < region.max.x && lo.x + g.edge > region.min.x && lo.y < region.max.y &&
         lo.y + g.edge > region.min.y;
}

}  // namespace

Raster render_raster(const GridMap& grid, TypeTag type, const Rect& region, int fallback_step) {
  int finest = -1;
  for (const auto& [index, patch] : grid.patches()) {
    const Layer* l = patch.find(type);
    if (l && overlaps(grid.geometry(), index, region)) finest = std::max(finest, l->step());
  }
  if (finest < 0) finest = fallback_step;
  const double px = grid.edge() / cells_per_axis(finest);

  Raster r;
  r.width = static_cast<std::size_t>(std::max(0.0, std::ceil((region.max.x - region.min.x) / px - 1e-9)));
  r.height = static_cast<std::size_t>(std::max(0.0, std::ceil((region.max.y - region.min.y) / px - 1e-9)));
  r.pixels.assign(r.width * r.height, kUnknownPixel);
  for (std::size_t row = 0; row < r.height; ++row) {
    for (std::size_t col = 0; col < r.width; ++col) {
      const Vec2 p{region.min.x + (static_cast<double>(col) + 0.5) * px,
                   region.max.y - (static_cast<double>(row) + 0.5) * px};
      const PatchIndex index = grid.patch_index_of(p);
      const Layer* layer = grid.find_layer(index, type);
      if (!layer) continue;
      const CellIndex c = cell_index_of(p, grid.patch_datum(index), grid.edge(), layer->step());
      r.pixels[row * r.width + col] = pixel_of(layer->cell(c));
    }
  }
  return r;
}

void write_pgm(const Raster& raster, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << "P5\n" << raster.width << ' ' << raster.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(raster.pixels.data()),
            static_cast<std::streamsize>(raster.pixels.size()));
  if (!out) throw Error(Errc::kIoError, "write failed for " + path.string());
}

void export_raster(const GridMap& grid, TypeTag type, const Rect& region,
                   const std::filesystem::path& path) {
  write_pgm(render_raster(grid, type, region), path);
}

std::optional<Rect> allocated_region(const GridMap& grid, TypeTag type) {
  std::optional<Rect> box;
  for (const auto& [index, patch] : grid.patches()) {
    if (!patch.find(type)) continue;
    const Vec2 lo = grid.patch_datum(index);
    const Vec2 hi{lo.x + grid.edge(), lo.y + grid.edge()};
    if (!box) {
      box = Rect{lo, hi};
    } else {
      box->min = {std::min(box->min.x, lo.x), std::min(box->min.y, lo.y)};
      box->max = {std::max(box->max.x, hi.x), std::max(box->max.y, hi.y)};
    }
  }
  return box;
}

std::vector<MergeComparison> compare_resampling(const Layer& layer) {
  std::vector<MergeComparison> out;
  for (int shift : {1, 3}) {
    const int target = layer.step() - shift;
    if (target < 0) continue;
    const std::uint32_t block = 1U << shift;
    Layer dempster(layer.type(), target);
    std::vector<Bba> children;
    for (std::uint32_t b = 0; b < dempster.side(); ++b) {
      for (std::uint32_t a = 0; a < dempster.side(); ++a) {
        children.clear();
        for (std::uint32_t j = 0; j < block; ++j) {
          for (std::uint32_t i = 0; i < block; ++i) {
            children.push_back(layer.bba({a * block + i, b * block + j}));
          }
        }
        dempster.set({a, b}, fuse_cells(children).bba);
      }
    }
    out.push_back({static_cast<int>(block), resample_layer(layer, target), std::move(dempster)});
  }
  return out;
}

Layer demo_occupancy_layer() {
  Layer layer(TypeTag::kOccupancy, 7);
  auto set = [&](std::uint32_t a, std::uint32_t b, float o, float f) {
    auto cell = layer.cell(CellIndex{a, b});
    cell[kOccupied] = o;
    cell[kFree] = f;
  };
  // Observed free space everywhere except one unobserved corner.
  for (std::uint32_t b = 0; b < 128; ++b) {
    for (std::uint32_t a = 0; a < 128; ++a) {
      if (a < 24 && b > 104) continue;
      set(a, b, 0.0F, 0.9F);
    }
  }
  // Thin walls, a diagonal fence, a solid block and scattered poles.
  for (std::uint32_t a = 10; a < 118; ++a) set(a, 40, 0.9F, 0.0F);
  for (std::uint32_t b = 50; b < 120; ++b) set(100, b, 0.9F, 0.0F);
  for (std::uint32_t i = 0; i < 60; ++i) set(20 + i, 60 + i / 2, 0.9F, 0.0F);
  for (std::uint32_t b = 8; b < 16; ++b) {
    for (std::uint32_t a = 60; a < 72; ++a) set(a, b, 0.9F, 0.0F);
  }
  for (std::uint32_t k = 0; k < 8; ++k) set(30 + 9 * k, 90, 0.9F, 0.0F);
  return layer;
}

std::vector<MergeComparison> compare_resampling_demo(const Layer& layer,
                                                     const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::kIoError, "cannot create " + out_dir.string());

  auto render = [](const Layer& l) {
    GridMap g;
    g.get_or_create_layer({0, 0}, l.type(), l.step()) = l;
    return render_raster(g, l.type(), Rect{{0.0, 0.0}, {g.edge(), g.edge()}});
  };
  write_pgm(render(layer), out_dir / "source.pgm");
  std::vector<MergeComparison> result = compare_resampling(layer);
  for (const MergeComparison& m : result) {
    const std::string tag = "merge_" + std::to_string(m.block) + "x" + std::to_string(m.block);
    write_pgm(render(m.measurement), out_dir / (tag + "_measurement.pgm"));
    write_pgm(render(m.dempster), out_dir / (tag + "_dempster.pgm"));
  }
  return result;
}

}  // namespace apgm::scenario
