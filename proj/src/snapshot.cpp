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

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "apgm/error.hpp"
#include "apgm/grid_map.hpp"

namespace apgm {
namespace {

constexpr std::array<char, 5> kMagic = {'A', 'P', 'G', 'M', '\x01'};

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFFU);
  }
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
void put_f32(std::ostream& out, float v) { put_le(out, std::bit_cast<std::uint32_t>(v)); }

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(Errc::kFormatError, "truncated snapshot");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }
float get_f32(std::istream& in) { return std::bit_cast<float>(get_le<std::uint32_t>(in)); }

}  // namespace

void write_snapshot(const GridMap& grid, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_f64(out, grid.datum().x);
  put_f64(out, grid.datum().y);
  put_f64(out, grid.edge());

  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(std::size(kAllTypes)));
  for (TypeTag type : kAllTypes) {
    const Frame& frame = frame_of(type);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(type));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(frame.size()));
    for (const auto& label : frame.labels()) {
      put_le<std::uint8_t>(out, static_cast<std::uint8_t>(label.size()));
      out.write(label.data(), static_cast<std::streamsize>(label.size()));
    }
  }

  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.patch_count()));
  for (const auto& [index, patch] : grid.patches()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.x));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.y));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(patch.layers().size()));
    for (const auto& [type, layer] : patch.layers()) {
      put_le<std::uint8_t>(out, static_cast<std::uint8_t>(type));
      put_le<std::uint8_t>(out, static_cast<std::uint8_t>(layer.step()));
      for (float m : layer.raw()) put_f32(out, m);
    }
  }
  if (!out) throw Error(Errc::kIoError, "failed writing snapshot");
}

GridMap read_snapshot(std::istream& in) {
  std::array<char, kMagic.size()> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(Errc::kFormatError, "bad magic");

  GridGeometry geometry;
  geometry.datum.x = get_f64(in);
  geometry.datum.y = get_f64(in);
  geometry.edge = get_f64(in);

  const auto type_count = get_le<std::uint8_t>(in);
  for (std::uint8_t t = 0; t < type_count; ++t) {
    const auto tag = get_le<std::uint8_t>(in);
    const auto size = get_le<std::uint8_t>(in);
    std::vector<std::string> labels(size);
    for (auto& label : labels) {
      label.resize(get_le<std::uint8_t>(in));
      in.read(label.data(), static_cast<std::streamsize>(label.size()));
    }
    if (!in) throw Error(Errc::kFormatError, "truncated type table");
    if (tag >= std::size(kAllTypes) ||
        labels != frame_of(static_cast<TypeTag>(tag)).labels()) {
      throw Error(Errc::kFormatError, "type table does not match this build");
    }
  }

  GridMap grid(geometry);
  const auto patch_count = get_le<std::uint32_t>(in);
  for (std::uint32_t p = 0; p < patch_count; ++p) {
    PatchIndex index{static_cast<std::int32_t>(get_le<std::uint32_t>(in)),
                     static_cast<std::int32_t>(get_le<std::uint32_t>(in))};
    Patch patch(index);
    const auto layer_count = get_le<std::uint8_t>(in);
    for (std::uint8_t l = 0; l < layer_count; ++l) {
      const auto tag = get_le<std::uint8_t>(in);
      const auto step = get_le<std::uint8_t>(in);
      if (tag >= std::size(kAllTypes) || step > grid.max_step()) {
        throw Error(Errc::kFormatError, "bad layer header");
      }
      Layer layer(static_cast<TypeTag>(tag), step);
      for (float& m : layer.raw()) m = get_f32(in);
      if (patch.find(layer.type())) throw Error(Errc::kFormatError, "duplicate layer type");
      patch.put(std::move(layer));
    }
    if (grid.find(index)) throw Error(Errc::kFormatError, "duplicate patch index");
    grid.put_patch(std::move(patch));
  }
  return grid;
}

}  // namespace apgm
