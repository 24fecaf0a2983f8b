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

#include <cmath>
#include <random>
#include <set>

#include "apgm/error.hpp"
#include "apgm/fusion.hpp"
#include "doctest.h"

using namespace apgm;

namespace {

Bba occ(double o, double f) { return make_bba(occupancy_frame(), {o, f}); }

Layer uniform_layer(TypeTag type, int step, std::initializer_list<float> masses) {
  Layer l(type, step);
  for (std::size_t i = 0; i < l.cell_count(); ++i) std::ranges::copy(masses, l.cell(i).begin());
  return l;
}

// Random sparse grid: patches in a 5x5 window, each with a random subset of
// types at steps 1..3, cell masses random and normalized.
GridMap random_grid(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> idx(-2, 2);
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_int_distribution<int> step(1, 3);
  std::uniform_real_distribution<float> u(0.0F, 1.0F);
  GridMap grid;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const PatchIndex p{idx(rng), idx(rng)};
    if (grid.find(p)) continue;
    for (TypeTag t : kAllTypes) {
      if (u(rng) < 0.5F) continue;
      Layer& l = grid.get_or_create_layer(p, t, step(rng));
      for (std::size_t c = 0; c < l.cell_count(); ++c) {
        auto cell = l.cell(c);
        float budget = u(rng);
        for (float& m : cell) {
          m = budget * u(rng);
          budget -= m;
        }
      }
    }
    if (!grid.find(p)) grid.get_or_create_layer(p, TypeTag::kOccupancy, step(rng));
  }
  return grid;
}

}  // namespace

TEST_CASE("fuse_cells_occ examples") {
  const Bba x = occ(0.3, 0.4);
  const Bba pair1[] = {Bba::vacuous(occupancy_frame()), x};
  const CellFusion f1 = fuse_cells_occ(pair1);
  CHECK(f1.bba.singleton(kOccupied) == doctest::Approx(0.3));
  CHECK(f1.bba.singleton(kFree) == doctest::Approx(0.4));
  CHECK(f1.conflicts == 0);

  const Bba pair2[] = {occ(0.9, 0.0), occ(0.0, 0.9)};
  const CellFusion f2 = fuse_cells_occ(pair2);
  CHECK(f2.bba.singleton(kOccupied) == doctest::Approx(0.4737).epsilon(1e-4));
  CHECK(f2.bba.singleton(kFree) == doctest::Approx(0.4737).epsilon(1e-4));
  CHECK(f2.bba.omega() == doctest::Approx(0.0526).epsilon(1e-3));

  const Bba pair3[] = {occ(1.0, 0.0), occ(0.0, 1.0)};
  const CellFusion f3 = fuse_cells_occ(pair3);
  CHECK(f3.bba.is_vacuous());
  CHECK(f3.conflicts == 1);

  const CellFusion kept = fuse_cells_occ(pair3, ConflictFallback::kKeepAccumulated);
  CHECK(kept.bba.singleton(kOccupied) == 1.0);
  CHECK(kept.conflicts == 1);

  const Bba mixed[] = {occ(0.5, 0.0), make_bba(semantic_frame(), {0.5, 0, 0, 0})};
  CHECK_THROWS_AS(fuse_cells_occ(mixed), Error);
}

TEST_CASE("fuse_layers resolution rule") {
  FusionPolicy policy;
  const Layer a(TypeTag::kOccupancy, 5);
  const Layer b(TypeTag::kOccupancy, 6);
  const Layer* ab[] = {&a, &b};
  CHECK(fuse_layers(ab, 7, policy).layer.step() == 6);
  CHECK(fuse_layers(ab, std::nullopt, policy).layer.step() == 6);

  const Layer c(TypeTag::kOccupancy, 7);
  const Layer* only_c[] = {&c};
  CHECK(fuse_layers(only_c, 6, policy).layer.step() == 6);

  Layer d = uniform_layer(TypeTag::kOccupancy, 6, {0.25F, 0.5F});
  d.cell(std::size_t{7})[kOccupied] = 0.75F;
  d.cell(std::size_t{7})[kFree] = 0.0F;
  const Layer* only_d[] = {&d};
  const FusedLayer same = fuse_layers(only_d, 6, policy);
  CHECK(std::ranges::equal(same.layer.raw(), d.raw()));

  const Layer sem(TypeTag::kSemantic, 6);
  const Layer* mixed[] = {&d, &sem};
  CHECK_THROWS_AS(fuse_layers(mixed, 6, policy), Error);

  FusionPolicy no_ops;
  no_ops.operators.clear();
  try {
    fuse_layers(only_d, 6, no_ops);
    FAIL("expected UnsupportedType");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kUnsupportedType);
  }
}

TEST_CASE("fuse_layers combines cell by cell") {
  FusionPolicy policy;
  const Layer a = uniform_layer(TypeTag::kOccupancy, 3, {0.9F, 0.0F});
  const Layer b = uniform_layer(TypeTag::kOccupancy, 3, {0.0F, 0.9F});
  const Layer* ab[] = {&a, &b};
  const FusedLayer f = fuse_layers(ab, 3, policy);
  for (std::size_t i = 0; i < f.layer.cell_count(); ++i) {
    REQUIRE(std::abs(f.layer.cell(i)[kOccupied] - 9.0 / 19.0) < 1e-6);
    REQUIRE(std::abs(f.layer.cell(i)[kFree] - 9.0 / 19.0) < 1e-6);
  }

  const Layer full_o = uniform_layer(TypeTag::kOccupancy, 2, {1.0F, 0.0F});
  const Layer full_f = uniform_layer(TypeTag::kOccupancy, 2, {0.0F, 1.0F});
  const Layer* clash[] = {&full_o, &full_f};
  const FusedLayer c = fuse_layers(clash, 2, policy);
  CHECK(c.conflicts == 16);
  CHECK(is_vacuous(c.layer.cell(std::size_t{0})));
}

TEST_CASE("fuse_patches") {
  FusionPolicy policy;
  policy.required_step[TypeTag::kOccupancy] = 7;
  Patch occ_patch({0, 0});
  occ_patch.put(Layer(TypeTag::kOccupancy, 7));
  Patch sem_patch({0, 0});
  sem_patch.put(Layer(TypeTag::kSemantic, 6));
  const Patch* both[] = {&occ_patch, &sem_patch};
  const FusedPatch f = fuse_patches(both, policy);
  CHECK(f.patch.layers().size() == 2);
  CHECK(f.patch.find(TypeTag::kSemantic)->step() == 6);

  const Patch empty({0, 0});
  const Patch* only_empty[] = {&empty};
  CHECK(fuse_patches(only_empty, policy).patch.empty());

  Patch coarse({0, 0});
  coarse.put(Layer(TypeTag::kOccupancy, 6));
  const Patch* steps[] = {&occ_patch, &coarse};
  CHECK(fuse_patches(steps, policy).patch.find(TypeTag::kOccupancy)->step() == 7);

  const Patch other({1, 0});
  const Patch* misaligned[] = {&occ_patch, &other};
  CHECK_THROWS_AS(fuse_patches(misaligned, policy), Error);
}

TEST_CASE("fuse_grids examples") {
  FusionPolicy policy;
  GridMap g;
  g.get_or_create_layer({0, 0}, TypeTag::kOccupancy, 4).cell(std::size_t{3})[kOccupied] = 0.5F;
  const GridMap* single[] = {&g};
  const FusedGrid same = fuse_grids(single, policy);
  CHECK(same.grid.patch_count() == 1);
  CHECK(std::ranges::equal(same.grid.find_layer({0, 0}, TypeTag::kOccupancy)->raw(),
                           g.find_layer({0, 0}, TypeTag::kOccupancy)->raw()));

  GridMap h;
  h.get_or_create_layer({5, 5}, TypeTag::kSemantic, 3);
  const GridMap* disjoint[] = {&g, &h};
  CHECK(fuse_grids(disjoint, policy).grid.patch_count() == 2);

  const GridMap shifted(GridGeometry{{1.0, 0.0}, 12.8});
  const GridMap* bad_datum[] = {&g, &shifted};
  try {
    fuse_grids(bad_datum, policy);
    FAIL("expected DatumMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDatumMismatch);
  }
  const GridMap wide(GridGeometry{{0.0, 0.0}, 25.6});
  const GridMap* bad_edge[] = {&g, &wide};
  try {
    fuse_grids(bad_edge, policy);
    FAIL("expected EdgeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEdgeMismatch);
  }
}

TEST_CASE("fuse_grids overlap cells are Dempster combinations") {
  FusionPolicy policy;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(0.0F, 0.5F);
  GridMap front;
  GridMap rear;
  for (PatchIndex p : {PatchIndex{0, 0}, PatchIndex{1, 0}}) {
    for (float& m : front.get_or_create_layer(p, TypeTag::kOccupancy, 3).raw()) m = u(rng);
  }
  for (PatchIndex p : {PatchIndex{1, 0}, PatchIndex{2, 0}}) {
    for (float& m : rear.get_or_create_layer(p, TypeTag::kOccupancy, 3).raw()) m = u(rng);
  }
  const GridMap* inputs[] = {&front, &rear};
  const FusedGrid fused = fuse_grids(inputs, policy);
  CHECK(fused.grid.patch_count() == 3);
  CHECK(fused.grid.cell_count() >= front.cell_count());
  CHECK(fused.grid.cell_count() >= rear.cell_count());

  const Layer& a = *front.find_layer({1, 0}, TypeTag::kOccupancy);
  const Layer& b = *rear.find_layer({1, 0}, TypeTag::kOccupancy);
  const Layer& f = *fused.grid.find_layer({1, 0}, TypeTag::kOccupancy);
  for (std::size_t i = 0; i < f.cell_count(); ++i) {
    // hand-expanded Dempster rule on {O, F}
    const double ao = a.cell(i)[0], af = a.cell(i)[1], aw = 1.0 - ao - af;
    const double bo = b.cell(i)[0], bf = b.cell(i)[1], bw = 1.0 - bo - bf;
    const double k = ao * bf + af * bo;
    const double o = (ao * bo + ao * bw + aw * bo) / (1.0 - k);
    const double fr = (af * bf + af * bw + aw * bf) / (1.0 - k);
    REQUIRE(std::abs(f.cell(i)[0] - o) < 1e-6);
    REQUIRE(std::abs(f.cell(i)[1] - fr) < 1e-6);
  }
  CHECK(std::ranges::equal(fused.grid.find_layer({0, 0}, TypeTag::kOccupancy)->raw(),
                           front.find_layer({0, 0}, TypeTag::kOccupancy)->raw()));
}

TEST_CASE("fuse_grids union semantics and order invariance") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> n_grids(1, 4);
  std::uniform_int_distribution<int> req(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GridMap> grids;
    const int n = n_grids(rng);
    for (int i = 0; i < n; ++i) grids.push_back(random_grid(rng));
    FusionPolicy policy;
    policy.required_step[TypeTag::kOccupancy] = req(rng);
    policy.threads = 1 + trial % 3;

    std::vector<const GridMap*> ptrs;
    for (const GridMap& g : grids) ptrs.push_back(&g);
    const FusedGrid fused = fuse_grids(ptrs, policy);

    std::set<PatchIndex> want_patches;
    for (const GridMap& g : grids) {
      for (const auto& [index, patch] : g.patches()) want_patches.insert(index);
    }
    std::set<PatchIndex> got_patches;
    for (const auto& [index, patch] : fused.grid.patches()) got_patches.insert(index);
    REQUIRE(got_patches == want_patches);

    for (const auto& [index, patch] : fused.grid.patches()) {
      for (TypeTag t : kAllTypes) {
        int finest = -1;
        for (const GridMap& g : grids) {
          if (const Layer* l = g.find_layer(index, t)) finest = std::max(finest, l->step());
        }
        const Layer* out = patch.find(t);
        REQUIRE((finest >= 0) == (out != nullptr));
        if (out) {
          const auto r = policy.required(t);
          REQUIRE(out->step() == (r ? std::min(*r, finest) : finest));
        }
      }
    }

    std::vector<const GridMap*> reversed(ptrs.rbegin(), ptrs.rend());
    const FusedGrid back = fuse_grids(reversed, policy);
    for (const auto& [index, patch] : fused.grid.patches()) {
      for (const auto& [t, layer] : patch.layers()) {
        const auto other = back.grid.find_layer(index, t)->raw();
        const auto mine = layer.raw();
        for (std::size_t i = 0; i < mine.size(); ++i) REQUIRE(std::abs(mine[i] - other[i]) < 1e-6);
      }
    }
  }
}

TEST_CASE("parallel fusion matches serial fusion") {
  std::mt19937_64 rng(3);
  std::vector<GridMap> grids;
  for (int i = 0; i < 3; ++i) grids.push_back(random_grid(rng));
  const GridMap* ptrs[] = {&grids[0], &grids[1], &grids[2]};
  FusionPolicy serial;
  FusionPolicy parallel;
  parallel.threads = 4;
  const FusedGrid a = fuse_grids(ptrs, serial);
  const FusedGrid b = fuse_grids(ptrs, parallel);
  REQUIRE(a.grid.patch_count() == b.grid.patch_count());
  for (const auto& [index, patch] : a.grid.patches()) {
    for (const auto& [t, layer] : patch.layers()) {
      CHECK(std::ranges::equal(layer.raw(), b.grid.find_layer(index, t)->raw()));
    }
  }
}

TEST_CASE("temporal update") {
  GridMap previous;
  previous.get_or_create_layer({0, 0}, TypeTag::kOccupancy, 2).cell(std::size_t{0})[kOccupied] = 0.9F;
  GridMap current;
  current.get_or_create_layer({0, 0}, TypeTag::kOccupancy, 2).cell(std::size_t{1})[kFree] = 0.4F;

  FusionPolicy forget;
  forget.alpha_age = 0.0;
  const FusedGrid only_current = temporal_update(previous, current, forget);
  CHECK(std::ranges::equal(only_current.grid.find_layer({0, 0}, TypeTag::kOccupancy)->raw(),
                           current.find_layer({0, 0}, TypeTag::kOccupancy)->raw()));

  FusionPolicy keep;
  keep.alpha_age = 1.0;
  const GridMap empty;
  const FusedGrid unchanged = temporal_update(previous, empty, keep);
  CHECK(std::ranges::equal(unchanged.grid.find_layer({0, 0}, TypeTag::kOccupancy)->raw(),
                           previous.find_layer({0, 0}, TypeTag::kOccupancy)->raw()));

  FusionPolicy aging;
  GridMap state = previous;
  for (int i = 0; i < 10; ++i) state = temporal_update(state, empty, aging).grid;
  CHECK(state.find_layer({0, 0}, TypeTag::kOccupancy)->cell(std::size_t{0})[kOccupied] ==
        doctest::Approx(0.9 * std::pow(0.95, 10)).epsilon(1e-5));
  CHECK(0.9 * std::pow(0.95, 10) == doctest::Approx(0.538).epsilon(1e-3));

  RequirementProfile profile;
  profile.types[TypeTag::kOccupancy] = {true, 5.0, 0.1, std::nullopt};
  profile.vehicle.position = {100.0, 100.0};
  CHECK(temporal_update(previous, current, aging, &profile).grid.patch_count() == 0);
}

TEST_CASE("discount_grid") {
  GridMap g;
  g.get_or_create_layer({0, 0}, TypeTag::kSemantic, 1).cell(std::size_t{0})[0] = 0.8F;
  const GridMap half = discount_grid(g, ReliabilityFactor(0.5));
  CHECK(half.find_layer({0, 0}, TypeTag::kSemantic)->cell(std::size_t{0})[0] == doctest::Approx(0.4));
  const GridMap none = discount_grid(g, ReliabilityFactor(0.0));
  CHECK(is_vacuous(none.find_layer({0, 0}, TypeTag::kSemantic)->cell(std::size_t{0})));
}
