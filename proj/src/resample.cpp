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

#include "apgm/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apgm/error.hpp"

namespace apgm {

void ResampleRequest::validate(int max_delta) const {
  if (source_step < 0 || target_step < 0) {
    throw Error(Errc::kInvalidResolution, "negative resolution step");
  }
  if (std::abs(delta()) > max_delta) {
    throw Error(Errc::kStepDeltaTooLarge, "step delta " + std::to_string(delta()) +
                                              " exceeds " + std::to_string(max_delta));
  }
}

namespace {

// Mean of the two middle values for even counts.
double median(std::vector<double>& values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

OccupancyMasses clip(double occupied, double free) {
  occupied = std::clamp(occupied, 0.0, 1.0);
  free = std::clamp(std::min(free, 1.0 - occupied), 0.0, 1.0);
  return {occupied, free};
}

void require_frame(const Bba& bba, const Frame& frame) {
  if (!(bba.frame() == frame)) {
    throw Error(Errc::kFrameMismatch, "operator expects frame of size " +
                                          std::to_string(frame.size()));
  }
}

OccupancyMasses to_masses(const Bba& bba) {
  return {bba.singleton(kOccupied), bba.singleton(kFree)};
}

Bba to_bba(OccupancyMasses m) {
  const double masses[2] = {m.occupied, m.free};
  return Bba::from_normalized(occupancy_frame(), masses);
}

void merge_occ_cells(std::span<const float> children, std::size_t stride, std::span<float> out) {
  const std::size_t n = children.size() / stride;
  std::vector<OccupancyMasses> masses(n);
  for (std::size_t i = 0; i < n; ++i) {
    masses[i] = {children[i * stride + kOccupied], children[i * stride + kFree]};
  }
  const OccupancyMasses merged = merge_occupancy(masses);
  out[kOccupied] = static_cast<float>(merged.occupied);
  out[kFree] = static_cast<float>(merged.free);
}

void split_occ_cell(std::span<const float> parent, std::size_t n, std::span<float> child) {
  const OccupancyMasses c = split_occupancy({parent[kOccupied], parent[kFree]}, n);
  child[kOccupied] = static_cast<float>(c.occupied);
  child[kFree] = static_cast<float>(c.free);
}

void merge_sem_cells(std::span<const float> children, std::size_t stride, std::span<float> out) {
  const std::size_t n = children.size() / stride;
  std::vector<double> mean(stride, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t h = 0; h < stride; ++h) mean[h] += children[i * stride + h];
  }
  double sum = 0.0;
  for (double& m : mean) {
    m /= static_cast<double>(n);
    sum += m;
  }
  const double scale = sum > 1.0 ? 1.0 / sum : 1.0;
  for (std::size_t h = 0; h < stride; ++h) out[h] = static_cast<float>(mean[h] * scale);
}

void split_sem_cell(std::span<const float> parent, std::size_t, std::span<float> child) {
  std::ranges::copy(parent, child.begin());
}

}  // namespace

OccupancyMasses merge_occupancy(std::span<const OccupancyMasses> children) {
  if (children.empty()) return {};
  double not_relevant = 1.0;
  std::vector<double> free(children.size());
  for (std::size_t i = 0; i < children.size(); ++i) {
    not_relevant *= 1.0 - std::clamp(children[i].occupied, 0.0, 1.0);
    free[i] = children[i].free;
  }
  return clip(1.0 - not_relevant, median(free));
}

OccupancyMasses split_occupancy(OccupancyMasses parent, std::size_t n) {
  if (n <= 1) return clip(parent.occupied, parent.free);
  const double not_relevant = 1.0 - std::clamp(parent.occupied, 0.0, 1.0);
  const double child = 1.0 - std::pow(not_relevant, 1.0 / static_cast<double>(n));
  return clip(child, parent.free);
}

Bba merge_occ(std::span<const Bba> cells) {
  std::vector<OccupancyMasses> masses;
  masses.reserve(cells.size());
  for (const Bba& c : cells) {
    require_frame(c, occupancy_frame());
    masses.push_back(to_masses(c));
  }
  return to_bba(merge_occupancy(masses));
}

std::vector<Bba> split_occ(const Bba& cell, std::size_t n) {
  require_frame(cell, occupancy_frame());
  return std::vector<Bba>(n, to_bba(split_occupancy(to_masses(cell), n)));
}

Bba merge_sem(std::span<const Bba> cells) {
  if (cells.empty()) return Bba::vacuous(semantic_frame());
  const Frame& frame = cells.front().frame();
  std::vector<double> mean(frame.size(), 0.0);
  for (const Bba& c : cells) {
    if (!(c.frame() == frame)) throw Error(Errc::kFrameMismatch, "mixed frames in merge");
    for (std::size_t h = 0; h < mean.size(); ++h) mean[h] += c.singleton(h);
  }
  for (double& m : mean) m /= static_cast<double>(cells.size());
  return Bba::from_normalized(frame, mean);
}

std::vector<Bba> split_sem(const Bba& cell, std::size_t n) {
  return std::vector<Bba>(n, cell);
}

const ResampleRegistry& default_resample_registry() {
  static const ResampleRegistry registry = {
      {TypeTag::kOccupancy, {&merge_occ_cells, &split_occ_cell}},
      {TypeTag::kSemantic, {&merge_sem_cells, &split_sem_cell}},
  };
  return registry;
}

Layer resample_layer(Layer layer, int target_step, const ResampleRegistry& registry,
                     int max_delta) {
  const ResampleRequest request{layer.step(), target_step};
  request.validate(max_delta);
  if (request.delta() == 0) return layer;

  const auto it = registry.find(layer.type());
  if (it == registry.end() || !it->second.merge || !it->second.split) {
    throw Error(Errc::kUnsupportedType,
                std::string("no resample operators for ") + type_name(layer.type()));
  }
  const ResampleOperators& ops = it->second;
  const std::size_t stride = layer.hypotheses();
  Layer out(layer.type(), target_step);

  if (request.delta() > 0) {
    const std::uint32_t k = 1U << request.delta();
    const std::size_t n = std::size_t{k} * k;
    std::vector<float> child(stride);
    for (std::uint32_t b = 0; b < layer.side(); ++b) {
      for (std::uint32_t a = 0; a < layer.side(); ++a) {
        ops.split(layer.cell(CellIndex{a, b}), n, child);
        for (std::uint32_t j = 0; j < k; ++j) {
          for (std::uint32_t i = 0; i < k; ++i) {
            std::ranges::copy(child, out.cell(CellIndex{a * k + i, b * k + j}).begin());
          }
        }
      }
    }
  } else {
    const std::uint32_t k = 1U << -request.delta();
    std::vector<float> block(std::size_t{k} * k * stride);
    for (std::uint32_t b = 0; b < out.side(); ++b) {
      for (std::uint32_t a = 0; a < out.side(); ++a) {
        auto dst = block.begin();
        for (std::uint32_t j = 0; j < k; ++j) {
          for (std::uint32_t i = 0; i < k; ++i) {
            dst = std::ranges::copy(layer.cell(CellIndex{a * k + i, b * k + j}), dst).out;
          }
        }
        ops.merge(block, stride, out.cell(CellIndex{a, b}));
      }
    }
  }
  return out;
}

}  // namespace apgm
