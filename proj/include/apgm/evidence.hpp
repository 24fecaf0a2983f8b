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

#ifndef APGM_EVIDENCE_HPP
#define APGM_EVIDENCE_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apgm {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kAlgebraTolerance = 1e-12;
inline constexpr double kTotalConflictThreshold = 1.0 - 1e-12;
inline constexpr std::size_t kMaxHypotheses = 32;

/// Subset of a frame's hypotheses as a bitmask over frame order.
class HypothesisSet {
 public:
  constexpr HypothesisSet() = default;
  constexpr explicit HypothesisSet(std::uint32_t bits) : bits_(bits) {}

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(std::size_t index) const { return (bits_ >> index) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const HypothesisSet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Frame of discernment: an ordered list of distinct hypothesis labels.
/// Cheap to copy; copies share the label table.
class Frame {
 public:
  /// Throws Errc::kInvalidFrame for fewer than two labels, duplicates or
  /// more than kMaxHypotheses labels.
  explicit Frame(std::vector<std::string> labels);
  Frame(std::initializer_list<std::string> labels)
      : Frame(std::vector<std::string>(labels)) {}

  std::size_t size() const { return labels_->size(); }
  const std::vector<std::string>& labels() const { return *labels_; }
  const std::string& label(std::size_t index) const { return labels_->at(index); }

  /// Position of `label` in frame order; throws Errc::kUnknownHypothesis.
  std::size_t index_of(std::string_view label) const;

  HypothesisSet subset(std::initializer_list<std::string_view> labels) const;
  HypothesisSet subset(std::span<const std::string> labels) const;
  HypothesisSet singleton(std::size_t index) const;
  HypothesisSet all() const;
  HypothesisSet complement(HypothesisSet set) const;

  bool operator==(const Frame& other) const;

 private:
  std::shared_ptr<const std::vector<std::string>> labels_;
};

/// Basic belief assignment with focal sets restricted to singletons and
/// the whole frame. Mass of the empty set is implicitly zero.
class Bba {
 public:
  const Frame& frame() const { return frame_; }
  std::span<const double> singletons() const { return masses_; }
  double singleton(std::size_t index) const { return masses_.at(index); }
  double singleton(std::string_view label) const { return masses_[frame_.index_of(label)]; }
  double omega() const { return omega_; }
  bool is_vacuous() const { return omega_ == 1.0; }

  static Bba vacuous(const Frame& frame);

  /// Builds a BBA from masses that are already known to be valid up to
  /// float rounding (e.g. read back from cell storage). Negative entries are
  /// clamped to zero and a sum above one is rescaled.
  static Bba from_storage(const Frame& frame, std::span<const float> masses);
  static Bba from_normalized(const Frame& frame, std::span<const double> masses);

 private:
  friend Bba make_bba(const Frame& frame, std::span<const double> masses);
  Bba(Frame frame, std::vector<double> masses, double omega)
      : frame_(std::move(frame)), masses_(std::move(masses)), omega_(omega) {}

  Frame frame_;
  std::vector<double> masses_;
  double omega_;
};

class ReliabilityFactor {
 public:
  /// Throws Errc::kInvalidReliability outside [0, 1].
  explicit ReliabilityFactor(double alpha);
  double value() const { return alpha_; }

 private:
  double alpha_;
};

struct Combination {
  Bba bba;
  double conflict;
};

/// omega = 1 - sum(masses). Throws kNegativeMass / kMassOverflow.
Bba make_bba(const Frame& frame, std::span<const double> masses);
Bba make_bba(const Frame& frame, std::initializer_list<double> masses);

double belief(const Bba& bba, HypothesisSet set);
double plausibility(const Bba& bba, HypothesisSet set);

/// Dempster's rule. Throws kFrameMismatch, or kTotalConflict when the
/// conflict reaches kTotalConflictThreshold.
Combination combine_dst(const Bba& a, const Bba& b);

std::vector<double> pignistic(const Bba& bba);

Bba discount(const Bba& bba, ReliabilityFactor alpha);

namespace detail {

/// Raw Dempster combination on singleton mass vectors with implicit omega.
/// Writes the normalized singleton masses to `out` and returns the conflict.
/// When the conflict exceeds the threshold `out` is left untouched.
double combine_singletons(std::span<const double> a, std::span<const double> b,
                          std::span<double> out);

}  // namespace detail
}  // namespace apgm

#endif  // APGM_EVIDENCE_HPP
