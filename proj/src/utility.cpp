#include "bf/utility.hpp"

#include <algorithm>
#include <cmath>

#include "bf/error.hpp"

namespace bf {

namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kZeroWidth = 1e-12;

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void check_indices(double alpha, double beta) {
  if (!in_unit(alpha) || !in_unit(beta)) {
    throw validation_error("index.range", "pessimism indices must lie in [0, 1]");
  }
  if (beta > alpha) {
    throw validation_error("index.order",
                           "beta must not exceed alpha (beta weights the worst outcome in the "
                           "upper bound, alpha in the lower)");
  }
}

void check_triple(const ReferenceLottery& t, const std::string& where) {
  if (!(t.u >= 0.0 && t.v >= 0.0 && t.w >= 0.0) ||
      !(std::fabs(t.u + t.v + t.w - 1.0) <= kMassTolerance)) {
    throw validation_error("entry.simplex",
                           where + ": (u, v, w) must be nonnegative and sum to 1");
  }
}

}  // namespace

UtilityAssessment::UtilityAssessment(AssessmentSpec spec) : spec_(std::move(spec)) {
  const OutcomeOrder& o = spec_.outcomes;
  const auto& u = spec_.singleton_utilities;
  const FramePtr& f = o.frame();
  if (u.size() != f->size()) {
    throw validation_error("singleton.coverage", "need one utility per outcome of '" + f->id() + "'");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!in_unit(u[i])) {
      throw validation_error("singleton.range",
                             "utility of '" + f->label(i) + "' must lie in [0, 1]");
    }
  }
  if (std::fabs(u[o.best()] - 1.0) > kUnitTolerance) {
    throw validation_error("singleton.best_is_one",
                           "utility of the best outcome '" + f->label(o.best()) + "' must be 1");
  }
  if (std::fabs(u[o.worst()]) > kUnitTolerance) {
    throw validation_error("singleton.worst_is_zero",
                           "utility of the worst outcome '" + f->label(o.worst()) + "' must be 0");
  }
  for (std::size_t r = 1; r < o.size(); ++r) {
    if (u[o.ranking()[r]] > u[o.ranking()[r - 1]]) {
      throw validation_error("singleton.monotone", "utility of '" + f->label(o.ranking()[r]) +
                                                       "' exceeds that of the higher-ranked '" +
                                                       f->label(o.ranking()[r - 1]) + "'");
    }
  }
  if (!(spec_.scale.a > 0.0) || !std::isfinite(spec_.scale.a) || !std::isfinite(spec_.scale.b)) {
    throw validation_error("scale.positive", "affine scale must have a finite a > 0");
  }

  if (auto* t = std::get_if<ExplicitTable>(&spec_.model)) {
    for (std::size_t i = 0; i < t->entries.size(); ++i) {
      const auto& e = t->entries[i];
      if (!same_space(*e.set.space(), *o.space())) {
        throw Error(ErrorCode::frame_mismatch, "table entry is not a set of outcomes of '" +
                                                   f->id() + "'");
      }
      if (e.set.is_empty()) throw validation_error("entry.nonempty", "table entry for the empty set");
      check_triple(e.triple, "table entry " + std::to_string(i));
      for (std::size_t j = 0; j < i; ++j) {
        if (t->entries[j].set == e.set) {
          throw validation_error("entry.distinct", "table lists a set twice");
        }
      }
      if (e.set.cardinality() == 1) {
        const std::size_t only = e.set.members().front();
        if (e.triple.w > kZeroWidth) {
          throw validation_error("entry.singleton_unambiguous",
                                 "singleton '" + f->label(only) + "' must have w = 0");
        }
        if (std::fabs(e.triple.u - u[only]) > kUnitTolerance) {
          throw validation_error("entry.singleton_utility",
                                 "table entry for '" + f->label(only) +
                                     "' disagrees with its singleton utility");
        }
      }
    }
  } else if (auto* p = std::get_if<PairwiseIndex>(&spec_.model)) {
    for (std::size_t i = 0; i < p->entries.size(); ++i) {
      const auto& e = p->entries[i];
      if (e.worst >= f->size() || e.best >= f->size()) {
        throw validation_error("index.pair", "index pair refers to an unknown outcome");
      }
      if (o.rank_of(e.best) >= o.rank_of(e.worst)) {
        throw validation_error("index.pair", "pair (" + f->label(e.worst) + ", " +
                                                 f->label(e.best) +
                                                 ") must list a worse outcome then a better one");
      }
      check_indices(e.alpha, e.beta);
      for (std::size_t j = 0; j < i; ++j) {
        if (p->entries[j].worst == e.worst && p->entries[j].best == e.best) {
          throw validation_error("index.distinct", "index pair listed twice");
        }
      }
    }
  } else {
    const auto& c = std::get<ConstantIndex>(spec_.model);
    check_indices(c.alpha, c.beta);
  }
}

std::string_view to_string(PreferenceVerdict v) noexcept {
  switch (v) {
    case PreferenceVerdict::strictly_preferred:
      return "strictly_preferred";
    case PreferenceVerdict::strictly_dispreferred:
      return "strictly_dispreferred";
    case PreferenceVerdict::indifferent:
      return "indifferent";
    case PreferenceVerdict::incomparable:
      return "incomparable";
  }
  return "incomparable";
}

// --- per-set utilities -------------------------------------------------------

namespace {

ReferenceLottery from_indices(double alpha, double beta, double u_worst, double u_best) {
  const double lo = alpha * u_worst + (1.0 - alpha) * u_best;
  const double hi = beta * u_worst + (1.0 - beta) * u_best;
  return ReferenceLottery{lo, 1.0 - hi, hi - lo};
}

void require_outcomes(const BfLottery& L, const UtilityAssessment& A) {
  if (!same_outcomes(L.outcomes, A.outcomes())) {
    throw Error(ErrorCode::frame_mismatch, "lottery on '" + L.outcomes.frame()->id() +
                                               "' does not share the assessment's outcome order");
  }
}

}  // namespace

ReferenceLottery focal_utility(const UtilityAssessment& A, const SubsetMask& a) {
  const OutcomeOrder& o = A.outcomes();
  const std::size_t worst = o.worst_in(a);
  const std::size_t best = o.best_in(a);
  const double uw = A.singleton_utility(worst);
  const double ub = A.singleton_utility(best);
  if (worst == best || uw == ub) return ReferenceLottery{uw, 1.0 - uw, 0.0};

  if (const auto* t = std::get_if<ExplicitTable>(&A.model())) {
    for (const auto& e : t->entries) {
      if (e.set == a) return e.triple;
    }
    std::string names;
    for (std::size_t i : a.members()) names += (names.empty() ? "" : ",") + o.frame()->label(i);
    throw Error(ErrorCode::not_found, "assessment has no entry for {" + names + "}",
                "assessment.coverage");
  }
  if (const auto* p = std::get_if<PairwiseIndex>(&A.model())) {
    for (const auto& e : p->entries) {
      if (e.worst == worst && e.best == best) return from_indices(e.alpha, e.beta, uw, ub);
    }
    throw Error(ErrorCode::not_found,
                "assessment has no indices for the pair (" + o.frame()->label(worst) + ", " +
                    o.frame()->label(best) + ")",
                "assessment.coverage");
  }
  const auto& c = std::get<ConstantIndex>(A.model());
  return from_indices(c.alpha, c.beta, uw, ub);
}

std::vector<ReferenceLottery> focal_triples(const BfLottery& L, const UtilityAssessment& A) {
  require_outcomes(L, A);
  std::vector<ReferenceLottery> out;
  out.reserve(L.m.size());
  for (std::size_t i = 0; i < L.m.size(); ++i) out.push_back(focal_utility(A, L.m.focal_set(i)));
  return out;
}

ReferenceLottery reduce_to_reference(const BfLottery& L, const UtilityAssessment& A) {
  return reduce_to_reference(L, focal_triples(L, A));
}

ReferenceLottery reduce_to_reference_oracle(const BfLottery& L, const UtilityAssessment& A) {
  return reduce_to_reference_oracle(L, focal_triples(L, A));
}

// --- criteria ----------------------------------------------------------------

UtilityInterval interval_utility(const BfLottery& L, const UtilityAssessment& A) {
  const ReferenceLottery r = reduce_to_reference(L, A);
  return UtilityInterval{A.scale().apply(r.u), A.scale().apply(r.u + r.w)};
}

double jaffray_utility(const BfLottery& L, const UtilityAssessment& A) {
  const auto triples = focal_triples(L, A);
  for (const auto& t : triples) {
    if (t.w > kZeroWidth) {
      throw validation_error("jaffray.no_ambiguity",
                             "the real-valued utility needs w_a = 0 on every focal set");
    }
  }
  return A.scale().apply(reduce_to_reference(L, triples).u);
}

namespace {

template <class Reduce>
double expectation(const BfLottery& L, const UtilityAssessment& A, Reduce reduce) {
  require_outcomes(L, A);
  double total = 0.0;
  for (std::size_t i = 0; i < L.m.size(); ++i) {
    total += L.m.mass(i) * reduce(L.m.focal_set(i));
  }
  return A.scale().apply(total);
}

}  // namespace

double choquet_lower(const BfLottery& L, const UtilityAssessment& A) {
  return expectation(L, A, [&](const SubsetMask& a) {
    return A.singleton_utility(A.outcomes().worst_in(a));
  });
}

double choquet_upper(const BfLottery& L, const UtilityAssessment& A) {
  return expectation(L, A, [&](const SubsetMask& a) {
    return A.singleton_utility(A.outcomes().best_in(a));
  });
}

Bpa pignistic_transform(const Bpa& m) {
  BpaBuilder b(m.space());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const SubsetMask a = m.focal_set(i);
    const double share = m.mass(i) / static_cast<double>(a.cardinality());
    for (std::size_t e : a.members()) b.add(SubsetMask::of(m.space(), {e}), share);
  }
  return std::move(b).build();
}

double pignistic_utility(const BfLottery& L, const UtilityAssessment& A) {
  return expectation(L, A, [&](const SubsetMask& a) {
    double s = 0.0;
    for (std::size_t e : a.members()) s += A.singleton_utility(e);
    return s / static_cast<double>(a.cardinality());
  });
}

// --- verdicts ----------------------------------------------------------------

PreferenceVerdict compare_intervals(const UtilityInterval& x, const UtilityInterval& y, double tol,
                                    CompareMode mode) {
  bool ge, le;
  if (std::fabs(x.lo - y.lo) <= tol && std::fabs(x.hi - y.hi) <= tol) {
    return PreferenceVerdict::indifferent;
  }
  if (mode == CompareMode::strict) {
    ge = x.lo >= y.hi - tol;
    le = y.lo >= x.hi - tol;
  } else {
    ge = x.lo >= y.lo - tol && x.hi >= y.hi - tol;
    le = y.lo >= x.lo - tol && y.hi >= x.hi - tol;
  }
  if (ge && le) return PreferenceVerdict::indifferent;
  if (ge) return PreferenceVerdict::strictly_preferred;
  if (le) return PreferenceVerdict::strictly_dispreferred;
  return PreferenceVerdict::incomparable;
}

PreferenceVerdict compare_scalars(double x, double y, double tol) {
  return compare_intervals({x, x}, {y, y}, tol);
}

double compare_tolerance(const UtilityAssessment& A) noexcept {
  return kCompareTolerance * A.scale().a;
}

PreferenceVerdict compare(const BfLottery& L, const BfLottery& Lp, const UtilityAssessment& A,
                          CompareMode mode) {
  return compare_intervals(interval_utility(L, A), interval_utility(Lp, A), compare_tolerance(A),
                           mode);
}

PreferenceVerdict interval_bound_dominance(const BfLottery& L, const BfLottery& Lp,
                                           const UtilityAssessment& A) {
  return compare_intervals({choquet_lower(L, A), choquet_upper(L, A)},
                           {choquet_lower(Lp, A), choquet_upper(Lp, A)}, compare_tolerance(A));
}

std::string_view to_string(Criterion c) noexcept {
  switch (c) {
    case Criterion::interval:
      return "interval";
    case Criterion::strict_interval:
      return "strict";
    case Criterion::jaffray:
      return "jaffray";
    case Criterion::pignistic:
      return "pignistic";
    case Criterion::choquet_lower:
      return "choquet";
    case Criterion::choquet_upper:
      return "choquet-upper";
    case Criterion::dominance:
      return "dominance";
  }
  return "interval";
}

std::optional<Criterion> parse_criterion(std::string_view name) noexcept {
  for (Criterion c : {Criterion::interval, Criterion::strict_interval, Criterion::jaffray,
                      Criterion::pignistic, Criterion::choquet_lower, Criterion::choquet_upper,
                      Criterion::dominance}) {
    if (to_string(c) == name) return c;
  }
  if (name == "choquet-lower") return Criterion::choquet_lower;
  return std::nullopt;
}

PreferenceVerdict compare_by(Criterion c, const BfLottery& L, const BfLottery& Lp,
                             const UtilityAssessment& A) {
  const double tol = compare_tolerance(A);
  switch (c) {
    case Criterion::interval:
      return compare(L, Lp, A);
    case Criterion::strict_interval:
      return compare(L, Lp, A, CompareMode::strict);
    case Criterion::jaffray:
      return compare_scalars(jaffray_utility(L, A), jaffray_utility(Lp, A), tol);
    case Criterion::pignistic:
      return compare_scalars(pignistic_utility(L, A), pignistic_utility(Lp, A), tol);
    case Criterion::choquet_lower:
      return compare_scalars(choquet_lower(L, A), choquet_lower(Lp, A), tol);
    case Criterion::choquet_upper:
      return compare_scalars(choquet_upper(L, A), choquet_upper(Lp, A), tol);
    case Criterion::dominance:
      return interval_bound_dominance(L, Lp, A);
  }
  return compare(L, Lp, A);
}

UtilityAssessment affine_transform(const UtilityAssessment& A, double a, double b) {
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw validation_error("affine.positive_scale", "affine transform needs a finite a > 0");
  }
  AssessmentSpec spec = A.spec();
  spec.scale = AffineScale{a * spec.scale.a, a * spec.scale.b + b};
  return UtilityAssessment(std::move(spec));
}

}  // namespace bf
