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

#include "apgm/evidence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "apgm/error.hpp"

namespace apgm {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kNegativeMass: return "NegativeMass";
    case Errc::kMassOverflow: return "MassOverflow";
    case Errc::kUnknownHypothesis: return "UnknownHypothesis";
    case Errc::kTotalConflict: return "TotalConflict";
    case Errc::kFrameMismatch: return "FrameMismatch";
    case Errc::kInvalidFrame: return "InvalidFrame";
    case Errc::kInvalidReliability: return "InvalidReliability";
    case Errc::kCellOutOfBounds: return "CellOutOfBounds";
    case Errc::kPointOutsidePatch: return "PointOutsidePatch";
    case Errc::kResolutionConflict: return "ResolutionConflict";
    case Errc::kInvalidResolution: return "InvalidResolution";
    case Errc::kUnsupportedType: return "UnsupportedType";
    case Errc::kStepDeltaTooLarge: return "StepDeltaTooLarge";
    case Errc::kDatumMismatch: return "DatumMismatch";
    case Errc::kEdgeMismatch: return "EdgeMismatch";
    case Errc::kInvalidProfile: return "InvalidProfile";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kIoError: return "IoError";
    case Errc::kFormatError: return "FormatError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- Frame

Frame::Frame(std::vector<std::string> labels) {
  if (labels.size() < 2) {
    throw Error(Errc::kInvalidFrame, "a frame needs at least two hypotheses");
  }
  if (labels.size() > kMaxHypotheses) {
    throw Error(Errc::kInvalidFrame, "too many hypotheses");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) {
      throw Error(Errc::kInvalidFrame, "duplicate hypothesis '" + label + "'");
    }
  }
  labels_ = std::make_shared<const std::vector<std::string>>(std::move(labels));
}

std::size_t Frame::index_of(std::string_view label) const {
  const auto& l = *labels_;
  const auto it = std::find(l.begin(), l.end(), label);
  if (it == l.end()) {
    throw Error(Errc::kUnknownHypothesis, "'" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - l.begin());
}

HypothesisSet Frame::subset(std::initializer_list<std::string_view> labels) const {
  std::uint32_t bits = 0;
  for (auto label : labels) bits |= 1U << index_of(label);
  return HypothesisSet(bits);
}

HypothesisSet Frame::subset(std::span<const std::string> labels) const {
  std::uint32_t bits = 0;
  for (const auto& label : labels) bits |= 1U << index_of(label);
  return HypothesisSet(bits);
}

HypothesisSet Frame::singleton(std::size_t index) const {
  if (index >= size()) {
    throw Error(Errc::kUnknownHypothesis, "index " + std::to_string(index));
  }
  return HypothesisSet(1U << index);
}

HypothesisSet Frame::all() const {
  return HypothesisSet(size() == 32 ? ~0U : ((1U << size()) - 1U));
}

HypothesisSet Frame::complement(HypothesisSet set) const {
  return HypothesisSet(all().bits() & ~set.bits());
}

bool Frame::operator==(const Frame& other) const {
  return labels_ == other.labels_ || *labels_ == *other.labels_;
}

// ---------------------------------------------------------------- Bba

Bba make_bba(const Frame& frame, std::span<const double> masses) {
  if (masses.size() != frame.size()) {
    throw Error(Errc::kFrameMismatch, "mass vector length differs from frame size");
  }
  double sum = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw Error(Errc::kNegativeMass, std::to_string(m));
    sum += m;
  }
  if (sum > 1.0 + kNormTolerance) {
    throw Error(Errc::kMassOverflow, "singleton masses sum to " + std::to_string(sum));
  }
  const double omega = std::clamp(1.0 - sum, 0.0, 1.0);
  return Bba(frame, std::vector<double>(masses.begin(), masses.end()), omega);
}

Bba make_bba(const Frame& frame, std::initializer_list<double> masses) {
  return make_bba(frame, std::span<const double>(masses.begin(), masses.size()));
}

Bba Bba::vacuous(const Frame& frame) {
  return Bba(frame, std::vector<double>(frame.size(), 0.0), 1.0);
}

Bba Bba::from_normalized(const Frame& frame, std::span<const double> masses) {
  if (masses.size() != frame.size()) {
    throw Error(Errc::kFrameMismatch, "mass vector length differs from frame size");
  }
  std::vector<double> m(masses.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = std::max(0.0, masses[i]);
    sum += m[i];
  }
  if (sum > 1.0) {
    for (double& v : m) v /= sum;
    sum = 1.0;
  }
  return Bba(frame, std::move(m), std::max(0.0, 1.0 - sum));
}

Bba Bba::from_storage(const Frame& frame, std::span<const float> masses) {
  std::array<double, kMaxHypotheses> tmp{};
  const std::size_t n = std::min(masses.size(), kMaxHypotheses);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = masses[i];
  return from_normalized(frame, std::span<const double>(tmp.data(), masses.size()));
}

ReliabilityFactor::ReliabilityFactor(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(Errc::kInvalidReliability, std::to_string(alpha));
  }
}

// ---------------------------------------------------------------- operations

namespace {

void check_set(const Frame& frame, HypothesisSet set) {
  if ((set.bits() & ~frame.all().bits()) != 0) {
    throw Error(Errc::kUnknownHypothesis, "subset references hypotheses outside the frame");
  }
}

}  // namespace

double belief(const Bba& bba, HypothesisSet set) {
  const Frame& frame = bba.frame();
  check_set(frame, set);
  double sum = 0.0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (set.contains(i)) sum += bba.singleton(i);
  }
  if (set == frame.all()) sum += bba.omega();
  return sum;
}

double plausibility(const Bba& bba, HypothesisSet set) {
  const Frame& frame = bba.frame();
  check_set(frame, set);
  if (set.empty()) return 0.0;
  double sum = bba.omega();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (set.contains(i)) sum += bba.singleton(i);
  }
  return sum;
}

namespace detail {

double combine_singletons(std::span<const double> a, std::span<const double> b,
                          std::span<double> out) {
  const std::size_t n = a.size();
  double sum_a = 0.0;
  double sum_b = 0.0;
  double agree = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_a += a[i];
    sum_b += b[i];
    agree += a[i] * b[i];
  }
  const double omega_a = std::max(0.0, 1.0 - sum_a);
  const double omega_b = std::max(0.0, 1.0 - sum_b);
  // Pairs of distinct singletons are the only empty intersections.
  const double conflict = std::max(0.0, sum_a * sum_b - agree);
  if (conflict >= kTotalConflictThreshold) return conflict;

  std::array<double, kMaxHypotheses> joint{};
  double total = omega_a * omega_b;
  for (std::size_t i = 0; i < n; ++i) {
    joint[i] = a[i] * b[i] + a[i] * omega_b + omega_a * b[i];
    total += joint[i];
  }
  // total equals 1 - conflict analytically; dividing by the computed sum
  // keeps the result normalized.
  if (total <= 1.0 - kTotalConflictThreshold) return 1.0;
  for (std::size_t i = 0; i < n; ++i) out[i] = joint[i] / total;
  return conflict;
}

}  // namespace detail

Combination combine_dst(const Bba& a, const Bba& b) {
  if (!(a.frame() == b.frame())) {
    throw Error(Errc::kFrameMismatch, "cannot combine BBAs over different frames");
  }
  std::vector<double> out(a.frame().size(), 0.0);
  const double conflict = detail::combine_singletons(a.singletons(), b.singletons(), out);
  if (conflict >= kTotalConflictThreshold) {
    throw Error(Errc::kTotalConflict, "conflict " + std::to_string(conflict));
  }
  return {Bba::from_normalized(a.frame(), out), conflict};
}

std::vector<double> pignistic(const Bba& bba) {
  const std::size_t n = bba.frame().size();
  const double share = bba.omega() / static_cast<double>(n);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = bba.singleton(i) + share;
  return p;
}

Bba discount(const Bba& bba, ReliabilityFactor alpha) {
  const double a = alpha.value();
  if (a == 1.0) return bba;
  std::vector<double> m(bba.singletons().begin(), bba.singletons().end());
  for (double& v : m) v *= a;
  return Bba::from_normalized(bba.frame(), m);
}

}  // namespace apgm
