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

#include "apgm/fusion.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <thread>

#include "apgm/error.hpp"

namespace apgm {

double dempster_cell_operator(std::span<double> acc, std::span<const double> incoming) {
  std::array<double, kMaxHypotheses> out{};
  const double conflict =
      detail::combine_singletons(acc, incoming, std::span<double>(out.data(), acc.size()));
  if (conflict < kTotalConflictThreshold) std::copy_n(out.begin(), acc.size(), acc.begin());
  return conflict;
}

std::optional<int> FusionPolicy::required(TypeTag type) const {
  auto it = required_step.find(type);
  if (it == required_step.end()) return std::nullopt;
  return it->second;
}

CellFusion fuse_cells(std::span<const Bba> cells, ConflictFallback fallback) {
  if (cells.empty()) throw Error(Errc::kFrameMismatch, "nothing to fuse");
  const Frame& frame = cells.front().frame();
  std::vector<double> acc(cells.front().singletons().begin(), cells.front().singletons().end());
  std::size_t conflicts = 0;
  for (const Bba& cell : cells.subspan(1)) {
    if (!(cell.frame() == frame)) throw Error(Errc::kFrameMismatch, "mixed frames in fusion");
    if (dempster_cell_operator(acc, cell.singletons()) >= kTotalConflictThreshold) {
      ++conflicts;
      if (fallback == ConflictFallback::kVacuous) std::ranges::fill(acc, 0.0);
    }
  }
  return {Bba::from_normalized(frame, acc), conflicts};
}

CellFusion fuse_cells_occ(std::span<const Bba> cells, ConflictFallback fallback) {
  for (const Bba& c : cells) {
    if (!(c.frame() == occupancy_frame())) {
      throw Error(Errc::kFrameMismatch, "expected occupancy BBAs");
    }
  }
  return fuse_cells(cells, fallback);
}

FusedLayer fuse_layers(std::span<const Layer* const> layers, std::optional<int> required_step,
                       const FusionPolicy& policy) {
  if (layers.empty()) throw Error(Errc::kUnsupportedType, "no layers to fuse");
  const TypeTag type = layers.front()->type();
  int finest = 0;
  for (const Layer* l : layers) {
    if (l->type() != type) throw Error(Errc::kFrameMismatch, "mixed layer types");
    finest = std::max(finest, l->step());
  }
  const int step = required_step ? std::min(*required_step, finest) : finest;

  const auto op_it = policy.operators.find(type);
  if (op_it == policy.operators.end() || op_it->second == nullptr) {
    throw Error(Errc::kUnsupportedType, std::string("no cell operator for ") + type_name(type));
  }
  const CellFuseFn op = op_it->second;

  // Only layers at a different step are copied for resampling.
  std::vector<Layer> resampled;
  std::vector<const Layer*> aligned;
  resampled.reserve(layers.size());
  for (const Layer* l : layers) {
    if (l->step() == step) {
      aligned.push_back(l);
    } else {
      resampled.push_back(resample_to(*l, step, *policy.registry));
      aligned.push_back(&resampled.back());
    }
  }

  FusedLayer out{*aligned.front(), 0};
  if (aligned.size() == 1) return out;

  const std::size_t stride = out.layer.hypotheses();
  std::array<double, kMaxHypotheses> acc{};
  std::array<double, kMaxHypotheses> in{};
  const std::span<double> acc_view(acc.data(), stride);
  const std::span<const double> in_view(in.data(), stride);
  for (std::size_t i = 0; i < out.layer.cell_count(); ++i) {
    auto dst = out.layer.cell(i);
    bool acc_vacuous = is_vacuous(dst);
    bool changed = false;
    std::copy(dst.begin(), dst.end(), acc.begin());
    for (std::size_t s = 1; s < aligned.size(); ++s) {
      const auto src = aligned[s]->cell(i);
      if (is_vacuous(src)) continue;
      std::copy(src.begin(), src.end(), in.begin());
      changed = true;
      if (acc_vacuous) {
        std::copy_n(in.begin(), stride, acc.begin());
        acc_vacuous = false;
        continue;
      }
      if (op(acc_view, in_view) >= kTotalConflictThreshold) {
        ++out.conflicts;
        if (policy.fallback == ConflictFallback::kVacuous) {
          std::fill_n(acc.begin(), stride, 0.0);
          acc_vacuous = true;
        }
      }
    }
    if (changed) {
      for (std::size_t h = 0; h < stride; ++h) dst[h] = static_cast<float>(acc[h]);
    }
  }
  return out;
}

FusedPatch fuse_patches(std::span<const Patch* const> patches, const FusionPolicy& policy) {
  if (patches.empty()) throw Error(Errc::kUnsupportedType, "no patches to fuse");
  const PatchIndex index = patches.front()->index();
  std::set<TypeTag> types;
  for (const Patch* p : patches) {
    if (p->index() != index) throw Error(Errc::kDatumMismatch, "patches at different indices");
    for (const auto& [type, layer] : p->layers()) types.insert(type);
  }

  FusedPatch out{Patch(index), 0};
  std::vector<const Layer*> layers;
  for (TypeTag type : types) {
    layers.clear();
    for (const Patch* p : patches) {
      if (const Layer* l = p->find(type)) layers.push_back(l);
    }
    FusedLayer fused = fuse_layers(layers, policy.required(type), policy);
    out.conflicts += fused.conflicts;
    out.patch.put(std::move(fused.layer));
  }
  return out;
}

FusedGrid fuse_grids(std::span<const GridMap* const> grids, const FusionPolicy& policy) {
  if (grids.empty()) throw Error(Errc::kDatumMismatch, "no grids to fuse");
  const GridMap& first = *grids.front();
  int max_step = 0;
  for (const GridMap* g : grids) {
    if (!(g->datum() == first.datum())) throw Error(Errc::kDatumMismatch, "grid datums differ");
    if (g->edge() != first.edge()) throw Error(Errc::kEdgeMismatch, "patch edge lengths differ");
    max_step = std::max(max_step, g->max_step());
  }

  std::set<PatchIndex> index_union;
  for (const GridMap* g : grids) {
    for (const auto& [index, patch] : g->patches()) index_union.insert(index);
  }
  const std::vector<PatchIndex> indices(index_union.begin(), index_union.end());

  std::vector<std::optional<Patch>> results(indices.size());
  auto work = [&](std::size_t begin, std::size_t end, std::size_t& conflicts) {
    std::vector<const Patch*> inputs;
    for (std::size_t i = begin; i < end; ++i) {
      inputs.clear();
      for (const GridMap* g : grids) {
        if (const Patch* p = g->find(indices[i])) inputs.push_back(p);
      }
      FusedPatch fused = fuse_patches(inputs, policy);
      conflicts += fused.conflicts;
      results[i].emplace(std::move(fused.patch));
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(policy.threads, 1, std::max<std::size_t>(1, indices.size()));
  std::vector<std::size_t> conflicts(workers, 0);
  if (workers == 1) {
    work(0, indices.size(), conflicts[0]);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (indices.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(indices.size(), w * chunk);
      const std::size_t end = std::min(indices.size(), begin + chunk);
      pool.emplace_back([&, begin, end, w] { work(begin, end, conflicts[w]); });
    }
  }

  FusedGrid out{GridMap(first.geometry(), max_step), 0};
  for (std::size_t c : conflicts) out.conflicts += c;
  for (auto& patch : results) out.grid.put_patch(std::move(*patch));
  return out;
}

GridMap discount_grid(const GridMap& grid, ReliabilityFactor alpha) {
  GridMap out = grid;
  const float a = static_cast<float>(alpha.value());
  if (alpha.value() == 1.0) return out;
  for (const auto& [index, patch] : grid.patches()) {
    Patch* dst = out.find(index);
    for (const auto& [type, layer] : patch.layers()) {
      for (float& m : dst->find(type)->raw()) m *= a;
    }
  }
  return out;
}

FusedGrid temporal_update(const GridMap& previous, const GridMap& current,
                          const FusionPolicy& policy, const RequirementProfile* profile) {
  const ReliabilityFactor alpha(policy.alpha_age);
  FusedGrid fused{GridMap(current.geometry()), 0};
  if (alpha.value() == 0.0) {
    const GridMap* inputs[] = {&current};
    fused = fuse_grids(inputs, policy);
  } else {
    const GridMap discounted = discount_grid(previous, alpha);
    const GridMap* inputs[] = {&discounted, &current};
    fused = fuse_grids(inputs, policy);
  }
  if (profile) {
    std::vector<PatchIndex> outside;
    for (const auto& [index, patch] : fused.grid.patches()) {
      const bool keep = std::ranges::any_of(kAllTypes, [&](TypeTag t) {
        return patch_in_horizon(index, fused.grid.geometry(), *profile, t);
      });
      if (!keep) outside.push_back(index);
    }
    for (PatchIndex index : outside) fused.grid.erase_patch(index);
  }
  return fused;
}

}  // namespace apgm
