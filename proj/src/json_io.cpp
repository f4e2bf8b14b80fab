#include "bf/json_io.hpp"

#include <algorithm>
#include <cmath>

namespace bf::io {
namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::malformed, what); }

const json& field(const json& j, const char* key, std::string_view ctx) {
  if (!j.is_object()) malformed(std::string(ctx) + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string(ctx) + ": missing \"" + key + "\"");
  return *it;
}

const json* optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& j, std::string_view ctx) {
  if (!j.is_number()) malformed(std::string(ctx) + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) malformed(std::string(ctx) + ": not finite");
  return x;
}

std::string text(const json& j, std::string_view ctx) {
  if (!j.is_string()) malformed(std::string(ctx) + ": expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, std::string_view ctx) {
  if (!j.is_array()) malformed(std::string(ctx) + ": expected an array");
  return j;
}

std::size_t count(const json& j, std::string_view ctx) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    malformed(std::string(ctx) + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::vector<std::string> labels(const json& j, std::string_view ctx) {
  std::vector<std::string> out;
  for (const auto& x : array(j, ctx)) out.push_back(text(x, ctx));
  return out;
}

json interval_json(const UtilityInterval& i) { return json{{"lo", i.lo}, {"hi", i.hi}}; }

json bracket_json(const Bracket& b) { return json{{"lo", b.lo}, {"hi", b.hi}}; }

}  // namespace

// --- registry -----------------------------------------------------------------

void FrameRegistry::add(const FramePtr& f) {
  if (auto it = frames_.find(f->id()); it != frames_.end()) {
    if (it->second->labels() != f->labels()) {
      throw validation_error("registry.unique_id",
                             "frame '" + f->id() + "' is already defined with other labels");
    }
    return;
  }
  frames_.emplace(f->id(), f);
  add(ProductFrame::single(f));
}

void FrameRegistry::add(const ProductFramePtr& p) {
  if (auto it = spaces_.find(p->id()); it != spaces_.end()) {
    if (!same_space(*it->second, *p)) {
      throw validation_error("registry.unique_id",
                             "space '" + p->id() + "' is already defined differently");
    }
    return;
  }
  spaces_.emplace(p->id(), p);
  for (const auto& f : p->factors()) add(f.frame);
}

FramePtr FrameRegistry::frame(std::string_view id) const {
  auto it = frames_.find(id);
  if (it == frames_.end()) throw Error(ErrorCode::not_found, "unknown frame '" + std::string(id) + "'");
  return it->second;
}

ProductFramePtr FrameRegistry::space(std::string_view id) const {
  auto it = spaces_.find(id);
  if (it == spaces_.end()) throw Error(ErrorCode::not_found, "unknown frame '" + std::string(id) + "'");
  return it->second;
}

bool FrameRegistry::contains(std::string_view id) const { return spaces_.count(id) != 0; }

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::malformed, std::string("invalid JSON: ") + e.what(), "json.syntax");
  }
}

// --- frames and masks ---------------------------------------------------------

json to_json(const Frame& f) { return json{{"id", f.id()}, {"labels", f.labels()}}; }

json to_json(const ProductFrame& p) {
  if (p.is_single() && p.factors()[0].variable == p.factors()[0].frame->id()) {
    return to_json(*p.factors()[0].frame);
  }
  json factors = json::array();
  for (const auto& f : p.factors()) {
    factors.push_back(json{{"variable", f.variable}, {"frame", to_json(*f.frame)}});
  }
  return json{{"id", p.id()}, {"factors", factors}};
}

FramePtr frame_from_json(const json& j, FrameRegistry& reg) {
  if (j.is_string()) return reg.frame(j.get<std::string>());
  auto f = Frame::create(text(field(j, "id", "frame"), "frame.id"),
                         labels(field(j, "labels", "frame"), "frame.labels"));
  reg.add(f);
  return f;
}

ProductFramePtr space_from_json(const json& j, FrameRegistry& reg) {
  if (j.is_string()) return reg.space(j.get<std::string>());
  if (!j.is_object()) malformed("frame: expected an object or an id");
  if (!j.contains("factors")) return ProductFrame::single(frame_from_json(j, reg));
  std::vector<Factor> factors;
  for (const auto& f : array(j["factors"], "frame.factors")) {
    factors.push_back(Factor{text(field(f, "variable", "factor"), "factor.variable"),
                             frame_from_json(field(f, "frame", "factor"), reg)});
  }
  auto p = ProductFrame::create(std::move(factors));
  if (const json* id = optional_field(j, "id"); id && text(*id, "frame.id") != p->id()) {
    throw validation_error("frame.id", "product frame id '" + id->get<std::string>() +
                                           "' does not match its factors ('" + p->id() + "')");
  }
  reg.add(p);
  return p;
}

json to_json(const SubsetMask& m) {
  json out = json::array();
  const auto& space = *m.space();
  for (std::size_t e : m.members()) {
    if (space.is_single()) {
      out.push_back(space.factors()[0].frame->label(e));
      continue;
    }
    json tuple = json::array();
    const auto digits = space.decode(e);
    for (std::size_t i = 0; i < digits.size(); ++i) {
      tuple.push_back(space.factors()[i].frame->label(digits[i]));
    }
    out.push_back(tuple);
  }
  return out;
}

SubsetMask mask_from_json(const json& j, const ProductFramePtr& space) {
  Bits bits(space->size());
  for (const auto& e : array(j, "set")) {
    if (space->is_single()) {
      bits.set(space->factors()[0].frame->index_of(text(e, "set element")));
      continue;
    }
    const auto& factors = space->factors();
    if (!e.is_array() || e.size() != factors.size()) {
      malformed("set element: expected an array of " + std::to_string(factors.size()) + " labels");
    }
    std::vector<std::size_t> digits;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      digits.push_back(factors[i].frame->index_of(text(e[i], "set element")));
    }
    bits.set(space->encode(digits));
  }
  return SubsetMask(space, std::move(bits));
}

// --- BPAs and lotteries -------------------------------------------------------

json to_json(const Bpa& m) {
  json focal = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    focal.push_back(json{{"set", to_json(m.focal_set(i))}, {"mass", m.mass(i)}});
  }
  return json{{"frame", m.space()->id()}, {"focal", focal}};
}

Bpa bpa_from_json(const json& j, FrameRegistry& reg) {
  auto space = space_from_json(field(j, "frame", "bpa"), reg);
  std::vector<std::pair<SubsetMask, double>> parts;
  for (const auto& f : array(field(j, "focal", "bpa"), "bpa.focal")) {
    parts.emplace_back(mask_from_json(field(f, "set", "focal element"), space),
                       number(field(f, "mass", "focal element"), "mass"));
  }
  return Bpa::make(space, std::move(parts));
}

json to_json(const OutcomeOrder& o) {
  json ranking = json::array();
  for (std::size_t i : o.ranking()) ranking.push_back(o.frame()->label(i));
  return json{{"frame", to_json(*o.frame())}, {"ranking", ranking}};
}

OutcomeOrder outcomes_from_json(const json& j, FrameRegistry& reg) {
  auto f = frame_from_json(field(j, "frame", "outcomes"), reg);
  const json* r = optional_field(j, "ranking");
  if (!r) return OutcomeOrder::natural(f);
  auto best_first = labels(*r, "outcomes.ranking");
  return OutcomeOrder::by_labels(f, best_first);
}

json to_json(const BfLottery& L) {
  return json{{"outcomes", to_json(L.outcomes)}, {"bpa", to_json(L.m)}};
}

BfLottery lottery_from_json(const json& j, FrameRegistry& reg) {
  auto o = outcomes_from_json(field(j, "outcomes", "lottery"), reg);
  return BfLottery(o, bpa_from_json(field(j, "bpa", "lottery"), reg));
}

json to_json(const CompoundLottery& c) {
  json inner = json::array();
  for (const auto& L : c.inner) inner.push_back(to_json(L));
  return json{{"inner", inner}, {"outer", to_json(c.outer)}};
}

CompoundLottery compound_from_json(const json& j, FrameRegistry& reg) {
  std::vector<BfLottery> inner;
  for (const auto& L : array(field(j, "inner", "compound"), "compound.inner")) {
    inner.push_back(lottery_from_json(L, reg));
  }
  if (inner.empty()) throw validation_error("compound.inner_nonempty", "no inner lotteries");
  // The outer BPA names the lottery frame by id; its labels follow the inner list.
  FrameRegistry outer_reg = reg;
  outer_reg.add(lottery_frame(inner.size()));
  return CompoundLottery{std::move(inner), bpa_from_json(field(j, "outer", "compound"), outer_reg)};
}

json to_json(const ReferenceLottery& r) { return json{{"u", r.u}, {"v", r.v}, {"w", r.w}}; }

// --- assessments --------------------------------------------------------------

json to_json(const AssessmentSpec& spec) {
  const auto& o = spec.outcomes;
  json singletons = json::object();
  for (std::size_t i : o.ranking()) singletons[o.frame()->label(i)] = spec.singleton_utilities.at(i);
  json model;
  if (const auto* t = std::get_if<ExplicitTable>(&spec.model)) {
    json entries = json::array();
    for (const auto& e : t->entries) {
      entries.push_back(json{{"set", to_json(e.set)},
                             {"u", e.triple.u},
                             {"v", e.triple.v},
                             {"w", e.triple.w}});
    }
    model = json{{"kind", "table"}, {"entries", entries}};
  } else if (const auto* p = std::get_if<PairwiseIndex>(&spec.model)) {
    json entries = json::array();
    for (const auto& e : p->entries) {
      entries.push_back(json{{"worst", o.frame()->label(e.worst)},
                             {"best", o.frame()->label(e.best)},
                             {"alpha", e.alpha},
                             {"beta", e.beta}});
    }
    model = json{{"kind", "pairwise_index"}, {"entries", entries}};
  } else {
    const auto& c = std::get<ConstantIndex>(spec.model);
    model = json{{"kind", "constant_index"}, {"alpha", c.alpha}, {"beta", c.beta}};
  }
  return json{{"outcomes", to_json(o)},
              {"singleton_utilities", singletons},
              {"model", model},
              {"scale", json{{"a", spec.scale.a}, {"b", spec.scale.b}}}};
}

json to_json(const UtilityAssessment& A) { return to_json(A.spec()); }

AssessmentSpec assessment_spec_from_json(const json& j, FrameRegistry& reg,
                                         const OutcomeOrder* fallback) {
  std::optional<OutcomeOrder> o;
  if (const json* oj = j.is_object() ? optional_field(j, "outcomes") : nullptr) {
    o = outcomes_from_json(*oj, reg);
  } else if (fallback) {
    o = *fallback;
  } else {
    field(j, "outcomes", "assessment");
  }
  const auto& frame = *o->frame();

  const json& su = field(j, "singleton_utilities", "assessment");
  if (!su.is_object()) malformed("assessment.singleton_utilities: expected an object keyed by label");
  std::vector<double> u(frame.size(), std::nan(""));
  for (auto it = su.begin(); it != su.end(); ++it) {
    u[frame.index_of(it.key())] = number(it.value(), "singleton utility");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::isnan(u[i])) {
      throw validation_error("singleton.coverage", "no utility for outcome '" + frame.label(i) + "'");
    }
  }

  const json& mj = field(j, "model", "assessment");
  const std::string kind = text(field(mj, "kind", "model"), "model.kind");
  UtilityModel model;
  if (kind == "table") {
    ExplicitTable t;
    if (const json* es = optional_field(mj, "entries")) {
      for (const auto& e : array(*es, "model.entries")) {
        t.entries.push_back(TableEntry{mask_from_json(field(e, "set", "entry"), o->space()),
                                       {number(field(e, "u", "entry"), "u"),
                                        number(field(e, "v", "entry"), "v"),
                                        number(field(e, "w", "entry"), "w")}});
      }
    }
    model = std::move(t);
  } else if (kind == "pairwise_index") {
    PairwiseIndex p;
    for (const auto& e : array(field(mj, "entries", "model"), "model.entries")) {
      p.entries.push_back(IndexPair{frame.index_of(text(field(e, "worst", "entry"), "worst")),
                                    frame.index_of(text(field(e, "best", "entry"), "best")),
                                    number(field(e, "alpha", "entry"), "alpha"),
                                    number(field(e, "beta", "entry"), "beta")});
    }
    model = std::move(p);
  } else if (kind == "constant_index") {
    model = ConstantIndex{number(field(mj, "alpha", "model"), "alpha"),
                          number(field(mj, "beta", "model"), "beta")};
  } else {
    malformed("model.kind: expected table, pairwise_index or constant_index");
  }

  AffineScale scale;
  if (const json* s = optional_field(j, "scale")) {
    scale = AffineScale{number(field(*s, "a", "scale"), "scale.a"),
                        number(field(*s, "b", "scale"), "scale.b")};
  }
  return AssessmentSpec{*o, std::move(u), std::move(model), scale};
}

UtilityAssessment assessment_from_json(const json& j, FrameRegistry& reg,
                                       const OutcomeOrder* fallback) {
  return UtilityAssessment(assessment_spec_from_json(j, reg, fallback));
}

// --- reports ------------------------------------------------------------------

json to_json(PreferenceVerdict v) { return std::string(to_string(v)); }

json to_json(const Evaluation& e) {
  return json{{"reference", to_json(e.reference)},
              {"interval", interval_json(e.interval)},
              {"jaffray", e.jaffray ? json(*e.jaffray) : json(nullptr)},
              {"pignistic", e.pignistic},
              {"choquet_lower", e.choquet_lower},
              {"choquet_upper", e.choquet_upper}};
}

json to_json(const Comparison& c) {
  json verdicts = json::object();
  for (const auto& v : c.verdicts) {
    verdicts[std::string(to_string(v.criterion))] = v.verdict ? to_json(*v.verdict) : json(nullptr);
  }
  return json{{"left", to_json(c.left)}, {"right", to_json(c.right)}, {"verdicts", verdicts}};
}

// --- elicitation --------------------------------------------------------------

json to_json(const ElicitationConfig& c) {
  json singletons = json::object();
  for (std::size_t i : c.outcomes.ranking()) {
    singletons[c.outcomes.frame()->label(i)] = c.singleton_utilities.at(i);
  }
  json targets = json::array();
  for (const auto& t : c.targets) targets.push_back(to_json(t));
  return json{{"outcomes", to_json(c.outcomes)},
              {"singleton_utilities", singletons},
              {"targets", targets},
              {"epsilon", c.epsilon}};
}

ElicitationConfig elicitation_config_from_json(const json& j, FrameRegistry& reg) {
  if (!j.is_object()) malformed("session: expected an object");
  json base = json{{"outcomes", field(j, "outcomes", "session")},
                   {"singleton_utilities", field(j, "singleton_utilities", "session")},
                   {"model", json{{"kind", "table"}}}};
  auto spec = assessment_spec_from_json(base, reg);
  std::vector<SubsetMask> targets;
  for (const auto& t : array(field(j, "targets", "session"), "session.targets")) {
    targets.push_back(mask_from_json(t, spec.outcomes.space()));
  }
  double eps = kDefaultEpsilon;
  if (const json* e = optional_field(j, "epsilon")) eps = number(*e, "epsilon");
  return ElicitationConfig{spec.outcomes, spec.singleton_utilities, std::move(targets), eps};
}

json to_json(const Query& q, std::size_t sequence) {
  return json{{"sequence", sequence},
              {"target_index", q.target_index},
              {"target", to_json(q.target)},
              {"probe_u", q.probe_u}};
}

json to_json(const TranscriptEntry& e, const ElicitationSession& s, std::size_t sequence) {
  json query{{"target_index", e.target_index},
             {"target", to_json(s.config().targets.at(e.target_index))},
             {"probe_u", e.probe_u}};
  return json{{"sequence", sequence},
              {"query", query},
              {"response", std::string(to_string(e.response))},
              {"timestamp", e.timestamp}};
}

TranscriptEntry transcript_entry_from_json(const json& j) {
  const json& q = field(j, "query", "transcript entry");
  auto r = parse_response(text(field(j, "response", "transcript entry"), "response"));
  if (!r) malformed("transcript entry: unknown response");
  std::string ts;
  if (const json* t = optional_field(j, "timestamp")) ts = text(*t, "timestamp");
  return TranscriptEntry{count(field(q, "target_index", "query"), "target_index"),
                         number(field(q, "probe_u", "query"), "probe_u"), *r, ts};
}

json to_json(const TargetEstimate& e) {
  return json{{"target", to_json(e.target)},
              {"u_a", e.u_a},
              {"v_a", 1.0 - e.upper},
              {"w_a", e.upper - e.u_a},
              {"alpha", e.alpha ? json(*e.alpha) : json(nullptr)},
              {"beta", e.beta ? json(*e.beta) : json(nullptr)},
              {"queries", e.queries}};
}

json session_state(const ElicitationSession& s) {
  json targets = json::array();
  for (const auto& t : s.targets()) {
    targets.push_back(json{{"target", to_json(t.target)},
                           {"lower", bracket_json(t.lower)},
                           {"upper", bracket_json(t.upper)},
                           {"queries", t.queries}});
  }
  json estimates = json::array();
  for (const auto& e : s.estimates()) estimates.push_back(to_json(e));
  auto q = s.next_query();
  return json{{"sequence", s.sequence()},
              {"done", !q.has_value()},
              {"epsilon", s.config().epsilon},
              {"next_query", q ? to_json(*q, s.sequence()) : json(nullptr)},
              {"targets", targets},
              {"estimates", estimates}};
}

json to_json(const ConsistencyReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back(json{{"rule", v.rule}, {"message", v.message}, {"entries", v.entries}});
  }
  return json{{"ok", r.ok()}, {"violations", violations}};
}

json error_body(const std::exception& e) {
  json details = json::object();
  std::string code = "internal_error";
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    code = std::string(to_string(err->code()));
    if (!err->invariant().empty()) details["invariant"] = err->invariant();
    if (const auto* inc = dynamic_cast<const InconsistentResponse*>(&e)) {
      json entries = json::array();
      for (const auto& c : inc->conflicting()) {
        entries.push_back(json{{"target_index", c.target_index},
                               {"probe_u", c.probe_u},
                               {"response", std::string(to_string(c.response))}});
      }
      details["conflicting"] = entries;
    }
  }
  return json{{"code", code}, {"message", e.what()}, {"details", details}};
}

std::string dump(const json& j) { return j.dump(2); }

}  // namespace bf::io
