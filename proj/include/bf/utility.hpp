#pragma once

// Utility assessments and the decision criteria built on them.
//
// Assessments are stored in canonical units: singleton utilities in [0, 1]
// with the best outcome at 1 and the worst at 0, and per-set reference
// triples (u_a, v_a, w_a) that are masses. An affine scale (a, b), a > 0,
// maps canonical utility values x to a*x + b on output.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bf/lottery.hpp"

namespace bf {

inline constexpr double kCompareTolerance = 1e-9;

struct AffineScale {
  double a = 1.0;
  double b = 0.0;

  double apply(double x) const noexcept { return a * x + b; }
};

struct TableEntry {
  SubsetMask set;
  ReferenceLottery triple;
};

/// Explicit (u_a, v_a, w_a) per set. Only the sets that matter need an
/// entry; singletons are always derived from the singleton utilities.
struct ExplicitTable {
  std::vector<TableEntry> entries;
};

struct IndexPair {
  std::size_t worst;
  std::size_t best;
  double alpha;
  double beta;
};

/// (alpha, beta) per (worst, best) outcome pair.
struct PairwiseIndex {
  std::vector<IndexPair> entries;
};

struct ConstantIndex {
  double alpha;
  double beta;
};

using UtilityModel = std::variant<ExplicitTable, PairwiseIndex, ConstantIndex>;

/// Raw, unvalidated assessment data.
struct AssessmentSpec {
  OutcomeOrder outcomes;
  std::vector<double> singleton_utilities;  // by outcome frame index
  UtilityModel model;
  AffineScale scale;
};

/// Validated assessment. Construction enforces u(best) = 1, u(worst) = 0,
/// singleton utilities weakly decreasing along the ranking, the simplex on
/// every table triple, w = 0 on singletons, and beta <= alpha in [0, 1] for
/// index models. Dominance between entries is left to check_consistency.
///
/// Index models read u_a = alpha*u_worst + (1-alpha)*u_best and
/// 1-v_a = beta*u_worst + (1-beta)*u_best.
class UtilityAssessment {
 public:
  explicit UtilityAssessment(AssessmentSpec spec);

  const AssessmentSpec& spec() const noexcept { return spec_; }
  const OutcomeOrder& outcomes() const noexcept { return spec_.outcomes; }
  const std::vector<double>& singleton_utilities() const noexcept {
    return spec_.singleton_utilities;
  }
  double singleton_utility(std::size_t outcome) const { return spec_.singleton_utilities.at(outcome); }
  const UtilityModel& model() const noexcept { return spec_.model; }
  const AffineScale& scale() const noexcept { return spec_.scale; }

 private:
  AssessmentSpec spec_;
};

struct UtilityInterval {
  double lo;
  double hi;
};

enum class PreferenceVerdict { strictly_preferred, strictly_dispreferred, indifferent, incomparable };

std::string_view to_string(PreferenceVerdict v) noexcept;

/// Canonical (u_a, v_a, w_a) of a nonempty outcome set.
ReferenceLottery focal_utility(const UtilityAssessment& A, const SubsetMask& a);

/// One triple per focal set of L, in focal order.
std::vector<ReferenceLottery> focal_triples(const BfLottery& L, const UtilityAssessment& A);

ReferenceLottery reduce_to_reference(const BfLottery& L, const UtilityAssessment& A);
ReferenceLottery reduce_to_reference_oracle(const BfLottery& L, const UtilityAssessment& A);

// Criteria. All values are in the assessment's scaled units.
UtilityInterval interval_utility(const BfLottery& L, const UtilityAssessment& A);
/// Requires w_a = 0 on every focal set.
double jaffray_utility(const BfLottery& L, const UtilityAssessment& A);
double choquet_lower(const BfLottery& L, const UtilityAssessment& A);
double choquet_upper(const BfLottery& L, const UtilityAssessment& A);
Bpa pignistic_transform(const Bpa& m);
double pignistic_utility(const BfLottery& L, const UtilityAssessment& A);

enum class CompareMode {
  standard,  // lo >= lo' and hi >= hi'
  strict,    // lo >= hi'
};

/// Interval order of two utility intervals with tolerance `tol`.
PreferenceVerdict compare_intervals(const UtilityInterval& x, const UtilityInterval& y, double tol,
                                    CompareMode mode = CompareMode::standard);
PreferenceVerdict compare_scalars(double x, double y, double tol);

PreferenceVerdict compare(const BfLottery& L, const BfLottery& Lp, const UtilityAssessment& A,
                          CompareMode mode = CompareMode::standard);

/// Both Choquet bounds at least as large.
PreferenceVerdict interval_bound_dominance(const BfLottery& L, const BfLottery& Lp,
                                           const UtilityAssessment& A);

enum class Criterion { interval, strict_interval, jaffray, pignistic, choquet_lower, choquet_upper, dominance };

std::string_view to_string(Criterion c) noexcept;
std::optional<Criterion> parse_criterion(std::string_view name) noexcept;

PreferenceVerdict compare_by(Criterion c, const BfLottery& L, const BfLottery& Lp,
                             const UtilityAssessment& A);

/// Composes x -> a*x + b onto the assessment's scale; a must be positive.
UtilityAssessment affine_transform(const UtilityAssessment& A, double a, double b);

/// Tolerance used for verdicts under A: 1e-9 in canonical units.
double compare_tolerance(const UtilityAssessment& A) noexcept;

}  // namespace bf
