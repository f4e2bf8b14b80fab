#pragma once

// Bundled criterion values and verdicts, as served by `bf evaluate`,
// `bf compare`, POST /evaluate and POST /compare.

#include <optional>
#include <utility>
#include <vector>

#include "bf/utility.hpp"

namespace bf {

struct Evaluation {
  ReferenceLottery reference;  // canonical units
  UtilityInterval interval;
  std::optional<double> jaffray;  // absent when some focal set has w > 0
  double pignistic;
  double choquet_lower;
  double choquet_upper;
};

Evaluation evaluate(const BfLottery& L, const UtilityAssessment& A);

struct CriterionVerdict {
  Criterion criterion;
  std::optional<PreferenceVerdict> verdict;  // absent when the criterion does not apply
};

struct Comparison {
  Evaluation left;
  Evaluation right;
  std::vector<CriterionVerdict> verdicts;
};

/// Every criterion when `only` is empty.
Comparison compare_all(const BfLottery& L, const BfLottery& Lp, const UtilityAssessment& A,
                       const std::vector<Criterion>& only = {});

std::vector<Criterion> all_criteria();

}  // namespace bf
