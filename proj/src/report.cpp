#include "bf/report.hpp"

#include "bf/error.hpp"

namespace bf {

Evaluation evaluate(const BfLottery& L, const UtilityAssessment& A) {
  Evaluation e{};
  e.reference = reduce_to_reference(L, A);
  e.interval = interval_utility(L, A);
  try {
    e.jaffray = jaffray_utility(L, A);
  } catch (const Error& err) {
    if (err.invariant() != "jaffray.no_ambiguity") throw;
  }
  e.pignistic = pignistic_utility(L, A);
  e.choquet_lower = choquet_lower(L, A);
  e.choquet_upper = choquet_upper(L, A);
  return e;
}

std::vector<Criterion> all_criteria() {
  return {Criterion::interval,      Criterion::strict_interval, Criterion::jaffray,
          Criterion::pignistic,     Criterion::choquet_lower,   Criterion::choquet_upper,
          Criterion::dominance};
}

Comparison compare_all(const BfLottery& L, const BfLottery& Lp, const UtilityAssessment& A,
                       const std::vector<Criterion>& only) {
  Comparison c{evaluate(L, A), evaluate(Lp, A), {}};
  for (Criterion k : only.empty() ? all_criteria() : only) {
    CriterionVerdict v{k, std::nullopt};
    if (k == Criterion::jaffray && (!c.left.jaffray || !c.right.jaffray)) {
      c.verdicts.push_back(v);
      continue;
    }
    v.verdict = compare_by(k, L, Lp, A);
    c.verdicts.push_back(v);
  }
  return c;
}

}  // namespace bf
