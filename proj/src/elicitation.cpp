#include "bf/elicitation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

namespace bf {

std::string_view to_string(DmResponse r) noexcept {
  switch (r) {
    case DmResponse::target_preferred:
      return "target_preferred";
    case DmResponse::incomparable:
      return "incomparable";
    case DmResponse::probe_preferred:
      return "probe_preferred";
  }
  return "incomparable";
}

std::optional<DmResponse> parse_response(std::string_view s) noexcept {
  for (DmResponse r :
       {DmResponse::target_preferred, DmResponse::incomparable, DmResponse::probe_preferred}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t query_bound(double epsilon) {
  return 2 * static_cast<std::size_t>(std::ceil(std::log2(1.0 / epsilon))) + 2;
}

// --- session -----------------------------------------------------------------

ElicitationSession::ElicitationSession(ElicitationConfig config) : config_(std::move(config)) {
  if (!(config_.epsilon > 0.0 && config_.epsilon < 1.0)) {
    throw validation_error("elicitation.epsilon", "epsilon must lie in (0, 1)");
  }
  // Validates the singleton utilities against the outcome order.
  UtilityAssessment(AssessmentSpec{config_.outcomes, config_.singleton_utilities,
                                   ExplicitTable{}, AffineScale{}});
  if (config_.targets.empty()) {
    throw validation_error("elicitation.targets", "no target sets to elicit");
  }
  for (const auto& t : config_.targets) {
    if (!same_space(*t.space(), *config_.outcomes.space())) {
      throw Error(ErrorCode::frame_mismatch, "target is not a set of outcomes of '" +
                                                 config_.outcomes.frame()->id() + "'");
    }
    if (t.cardinality() < 2) {
      throw validation_error("elicitation.target_not_singleton",
                             "targets must have at least two outcomes");
    }
    targets_.push_back(TargetState{t, {}, {}, false, false, 0});
  }
}

ElicitationSession ElicitationSession::replay(ElicitationConfig config,
                                              const std::vector<TranscriptEntry>& transcript) {
  ElicitationSession s(std::move(config));
  for (const auto& e : transcript) {
    auto q = s.next_query();
    if (!q || q->target_index != e.target_index || q->probe_u != e.probe_u) {
      throw Error(ErrorCode::stale,
                  "transcript entry " + std::to_string(s.sequence()) +
                      " does not answer the query the session would ask",
                  "elicitation.replay");
    }
    s.record_response(*q, e.response, e.timestamp);
  }
  return s;
}

std::optional<Query> ElicitationSession::next_query() const {
  const double eps = config_.epsilon;
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const TargetState& t = targets_[i];
    if (!t.probed_zero) return Query{i, t.target, 0.0};
    if (!t.probed_one) return Query{i, t.target, 1.0};
    if (t.lower.width() > eps) return Query{i, t.target, t.lower.mid()};
    if (t.upper.width() > eps) return Query{i, t.target, t.upper.mid()};
  }
  return std::nullopt;
}

namespace {

int order_of(DmResponse r) { return static_cast<int>(r); }

std::string describe(const TranscriptEntry& e) {
  return "u=" + std::to_string(e.probe_u) + " answered " + std::string(to_string(e.response));
}

}  // namespace

void ElicitationSession::record_response(const Query& q, DmResponse r, std::string timestamp) {
  const auto pending = next_query();
  if (!pending) throw Error(ErrorCode::stale, "session is complete; no query is outstanding",
                            "elicitation.outstanding_query");
  if (pending->target_index != q.target_index || pending->probe_u != q.probe_u ||
      !(pending->target == q.target)) {
    throw Error(ErrorCode::stale, "response is for a query that is not outstanding",
                "elicitation.outstanding_query");
  }
  TranscriptEntry entry{q.target_index, q.probe_u, r, std::move(timestamp)};
  const double u = q.probe_u;

  if (u == 0.0 && r != DmResponse::target_preferred) {
    throw InconsistentResponse("at u = 0 the target set can only be preferred", {entry});
  }
  if (u == 1.0 && r == DmResponse::incomparable) {
    throw InconsistentResponse("at u = 1 the probe is at least as good as any set", {entry});
  }
  for (const auto& prev : transcript_) {
    if (prev.target_index != q.target_index) continue;
    const int a = order_of(prev.response), b = order_of(r);
    const bool bad = (prev.probe_u < u && a > b) || (prev.probe_u > u && a < b) ||
                     (prev.probe_u == u && a != b);
    if (bad) {
      throw InconsistentResponse(
          "answer " + describe(entry) + " contradicts earlier " + describe(prev), {prev, entry});
    }
  }

  TargetState& t = targets_[q.target_index];
  switch (r) {
    case DmResponse::target_preferred:
      t.lower.lo = std::max(t.lower.lo, u);
      t.upper.lo = std::max(t.upper.lo, u);
      break;
    case DmResponse::incomparable:
      t.lower.hi = std::min(t.lower.hi, u);
      t.upper.lo = std::max(t.upper.lo, u);
      break;
    case DmResponse::probe_preferred:
      t.lower.hi = std::min(t.lower.hi, u);
      t.upper.hi = std::min(t.upper.hi, u);
      break;
  }
  if (u == 0.0) t.probed_zero = true;
  if (u == 1.0) t.probed_one = true;
  ++t.queries;
  transcript_.push_back(std::move(entry));
}

std::vector<TargetEstimate> ElicitationSession::estimates() const {
  std::vector<TargetEstimate> out;
  const OutcomeOrder& o = config_.outcomes;
  for (const auto& t : targets_) {
    double lo = t.lower.mid(), hi = t.upper.mid();
    if (lo > hi) lo = hi = 0.5 * (lo + hi);
    TargetEstimate e{t.target, lo, hi, std::nullopt, std::nullopt, t.queries};
    const double uw = config_.singleton_utilities[o.worst_in(t.target)];
    const double ub = config_.singleton_utilities[o.best_in(t.target)];
    if (ub > uw) {
      try {
        const Indices ix = solve_indices(lo, 1.0 - hi, uw, ub, config_.epsilon);
        e.alpha = ix.alpha;
        e.beta = ix.beta;
      } catch (const Error&) {
        // Outside the dominance bracket by more than epsilon: no indices.
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

UtilityAssessment ElicitationSession::assessment() const {
  ExplicitTable table;
  for (const auto& e : estimates()) {
    table.entries.push_back({e.target, ReferenceLottery{e.u_a, 1.0 - e.upper, e.upper - e.u_a}});
  }
  return UtilityAssessment(AssessmentSpec{config_.outcomes, config_.singleton_utilities,
                                          std::move(table), AffineScale{}});
}

// --- indices -----------------------------------------------------------------

Indices solve_indices(double u_a, double v_a, double u_worst, double u_best, double slack) {
  if (!(u_best > u_worst)) {
    throw validation_error("indices.nondegenerate_pair",
                           "worst and best utilities coincide; the indices are undetermined");
  }
  const double hi = 1.0 - v_a;
  if (u_a < u_worst - slack || hi > u_best + slack || u_a > hi + slack) {
    throw validation_error("indices.bounds",
                           "need u_worst <= u_a <= 1 - v_a <= u_best");
  }
  const double span = u_best - u_worst;
  const double alpha = std::clamp((u_best - u_a) / span, 0.0, 1.0);
  const double beta = std::clamp((u_best - hi) / span, 0.0, alpha);
  return Indices{alpha, beta};
}

// --- consistency ---------------------------------------------------------------

namespace {

std::string set_label(const OutcomeOrder& o, const SubsetMask& a) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i : a.members()) {
    if (!first) s += ',';
    s += o.frame()->label(i);
    first = false;
  }
  return s + "}";
}

struct Item {
  std::string label;
  std::size_t worst, best;
  double lo, hi;
  bool singleton;
};

}  // namespace

ConsistencyReport check_consistency(const AssessmentSpec& spec, double tol) {
  ConsistencyReport report;
  auto add = [&](std::string rule, std::string msg, std::vector<std::string> entries) {
    report.violations.push_back({std::move(rule), std::move(msg), std::move(entries)});
  };
  const OutcomeOrder& o = spec.outcomes;
  const FramePtr& f = o.frame();
  const auto& u = spec.singleton_utilities;
  if (u.size() != f->size()) {
    add("singleton.coverage", "need one utility per outcome", {});
    return report;
  }
  auto single = [&](std::size_t i) { return "{" + f->label(i) + "}"; };

  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= -tol && u[i] <= 1.0 + tol)) {
      add("singleton.range", "utility outside [0, 1]", {single(i)});
    }
  }
  if (std::fabs(u[o.best()] - 1.0) > tol) {
    add("singleton.best_is_one", "best outcome must have utility 1", {single(o.best())});
  }
  if (std::fabs(u[o.worst()]) > tol) {
    add("singleton.worst_is_zero", "worst outcome must have utility 0", {single(o.worst())});
  }
  for (std::size_t r = 1; r < o.size(); ++r) {
    const std::size_t hi = o.ranking()[r - 1], lo = o.ranking()[r];
    if (u[lo] > u[hi] + tol) {
      add("singleton.monotone", "lower-ranked outcome has the larger utility",
          {single(hi), single(lo)});
    }
  }

  std::vector<Item> items;
  for (std::size_t i = 0; i < u.size(); ++i) items.push_back({single(i), i, i, u[i], u[i], true});

  auto index_item = [&](std::size_t w, std::size_t b, double alpha, double beta) {
    const std::string label = "(" + f->label(w) + "," + f->label(b) + ")";
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
      add("index.range", "indices outside [0, 1]", {label});
    }
    if (beta > alpha + tol) add("index.order", "beta exceeds alpha", {label});
    items.push_back({label, w, b, alpha * u[w] + (1 - alpha) * u[b],
                     beta * u[w] + (1 - beta) * u[b], false});
  };

  if (const auto* t = std::get_if<ExplicitTable>(&spec.model)) {
    for (const auto& e : t->entries) {
      if (!same_space(*e.set.space(), *o.space()) || e.set.is_empty()) {
        add("entry.outcome_set", "entry is not a nonempty set of outcomes", {});
        continue;
      }
      const std::string label = set_label(o, e.set);
      const auto& tr = e.triple;
      if (tr.u < -tol || tr.v < -tol || tr.w < -tol || std::fabs(tr.u + tr.v + tr.w - 1.0) > tol) {
        add("entry.simplex", "(u, v, w) must be nonnegative and sum to 1", {label});
      }
      const bool singleton = e.set.cardinality() == 1;
      if (singleton) {
        const std::size_t only = e.set.members().front();
        if (tr.w > tol) add("entry.singleton_unambiguous", "singleton has w > 0", {label});
        if (std::fabs(tr.u - u[only]) > tol) {
          add("entry.singleton_utility", "entry disagrees with the singleton utility", {label});
        }
        continue;
      }
      items.push_back({label, o.worst_in(e.set), o.best_in(e.set), tr.u, 1.0 - tr.v, false});
    }
  } else if (const auto* p = std::get_if<PairwiseIndex>(&spec.model)) {
    for (const auto& e : p->entries) {
      if (e.worst >= u.size() || e.best >= u.size() || o.rank_of(e.best) >= o.rank_of(e.worst)) {
        add("index.pair", "pair must list a worse outcome then a better one", {});
        continue;
      }
      index_item(e.worst, e.best, e.alpha, e.beta);
    }
  } else {
    const auto& c = std::get<ConstantIndex>(spec.model);
    for (std::size_t rb = 0; rb < o.size(); ++rb) {
      for (std::size_t rw = rb + 1; rw < o.size(); ++rw) {
        index_item(o.ranking()[rw], o.ranking()[rb], c.alpha, c.beta);
      }
    }
  }

  for (std::size_t x = 0; x < items.size(); ++x) {
    for (std::size_t y = 0; y < items.size(); ++y) {
      if (x == y || (items[x].singleton && items[y].singleton)) continue;
      const Item& a = items[x];
      const Item& b = items[y];
      const bool dominates =
          o.rank_of(a.worst) <= o.rank_of(b.worst) && o.rank_of(a.best) <= o.rank_of(b.best);
      if (dominates && (a.lo < b.lo - tol || a.hi < b.hi - tol)) {
        add("dominance", a.label + " has better worst and best outcomes than " + b.label +
                             " but a smaller utility bound",
            {a.label, b.label});
      }
    }
  }
  return report;
}

// --- synthetic decision maker ----------------------------------------------------

DmResponse SyntheticDm::respond(const Query& q) const {
  const ReferenceLottery t = focal_utility(truth_, q.target);
  if (q.probe_u <= t.u) return DmResponse::target_preferred;
  if (q.probe_u >= 1.0 - t.v) return DmResponse::probe_preferred;
  return DmResponse::incomparable;
}

SyntheticRun run_synthetic(ElicitationConfig config, const SyntheticDm& dm) {
  ElicitationSession s(std::move(config));
  while (auto q = s.next_query()) s.record_response(*q, dm.respond(*q), utc_timestamp());
  auto est = s.estimates();
  auto recovered = s.assessment();
  return SyntheticRun{std::move(s), std::move(est), std::move(recovered)};
}

}  // namespace bf
