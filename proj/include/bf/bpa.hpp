#pragma once

// Basic probability assignments and the Dempster-Shafer calculus on them.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bf/subset.hpp"

namespace bf {

/// Tolerance on the total mass of a BPA.
inline constexpr double kMassTolerance = 1e-9;
/// Bpa::make leaves sums within this of 1 untouched.
inline constexpr double kRenormalizeThreshold = 1e-12;

/// Normalization constants at or below this are treated as total conflict.
inline constexpr double kConflictThreshold = 1e-12;

struct FocalElement {
  SubsetMask set;
  double mass;
};

enum class BpaClass { vacuous, deterministic, bayesian, consonant, general };

std::string_view to_string(BpaClass c) noexcept;

/// Immutable BPA. Focal sets are kept sorted by mask, structure-of-arrays,
/// so the kernels in bf/kernels.hpp can scan them directly.
class Bpa {
 public:
  /// Validating constructor. Masks must be nonempty, distinct and on
  /// `space`; masses strictly positive and summing to 1 within 1e-9. Sums off by
  /// more than 1e-12 are renormalized.
  static Bpa make(ProductFramePtr space, std::vector<std::pair<SubsetMask, double>> assignments);
  static Bpa make(FramePtr frame, std::vector<std::pair<SubsetMask, double>> assignments);

  static Bpa vacuous(ProductFramePtr space);
  static Bpa deterministic(const SubsetMask& focal);

  const ProductFramePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return masses_.size(); }
  std::size_t words_per_mask() const noexcept { return words_; }

  SubsetMask focal_set(std::size_t i) const;
  double mass(std::size_t i) const { return masses_.at(i); }
  std::vector<FocalElement> focal() const;

  /// Mass of `set` (0 when it is not focal).
  double mass_of(const SubsetMask& set) const;

  std::span<const std::uint64_t> focal_words() const noexcept { return words_flat_; }
  std::span<const std::uint64_t> focal_words(std::size_t i) const noexcept {
    return std::span<const std::uint64_t>(words_flat_).subspan(i * words_, words_);
  }
  std::span<const double> masses() const noexcept { return masses_; }

  friend bool operator==(const Bpa& a, const Bpa& b);

 private:
  friend class BpaBuilder;
  Bpa() = default;

  ProductFramePtr space_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> words_flat_;
  std::vector<double> masses_;
};

/// Accumulates (mask, mass) contributions; coinciding masks add up. The
/// sum for each mask is taken over its contributions sorted by value, so the
/// result does not depend on insertion order.
class BpaBuilder {
 public:
  explicit BpaBuilder(ProductFramePtr space);

  void add(Bits bits, double mass);
  void add(const SubsetMask& set, double mass);

  /// Divides every accumulated mass by `divisor` and validates the result.
  Bpa build(double divisor = 1.0) &&;

 private:
  ProductFramePtr space_;
  std::vector<std::pair<Bits, double>> parts_;
};

bool approx_equal(const Bpa& a, const Bpa& b, double tol);

double belief(const Bpa& m, const SubsetMask& a);
double plausibility(const Bpa& m, const SubsetMask& a);

struct Combination {
  Bpa bpa;
  double normalizer;  // K: one minus the mass that fell on empty intersections
};

/// Dempster's rule. Operands on different variable sets are vacuously
/// extended to the union frame first. Throws Error(total_conflict) when
/// K <= 1e-12.
Combination combine_dempster(const Bpa& m1, const Bpa& m2);

/// Left fold of combine_dempster.
Bpa combine_all(std::span<const Bpa> operands);

/// Vacuous extension of every focal set to `to`.
Bpa extend(const Bpa& m, const ProductFramePtr& to);

Bpa marginalize(const Bpa& m, std::span<const std::string> targets);
Bpa marginalize(const Bpa& m, std::initializer_list<std::string> targets);
Bpa marginalize_to(const Bpa& m, const ProductFramePtr& target_space);

/// Conditional embedding of `cond` (a BPA on Y given X = x) into `joint`:
/// focal set b becomes ({x} x b) u (complement({x}) x Omega_Y). `given`
/// must be a singleton on a frame whose variables are disjoint from
/// `cond`'s; both must be sub-frames of `joint`.
Bpa conditional_embed(const Bpa& cond, const SubsetMask& given, const ProductFramePtr& joint);

BpaClass classify(const Bpa& m);

}  // namespace bf
