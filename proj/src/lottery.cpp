#include "bf/lottery.hpp"

#include <algorithm>
#include <cmath>

#include "bf/error.hpp"

namespace bf {

// --- OutcomeOrder ------------------------------------------------------------

OutcomeOrder::OutcomeOrder(FramePtr frame, std::vector<std::size_t> ranking)
    : frame_(std::move(frame)), ranking_(std::move(ranking)) {
  if (!frame_) throw validation_error("outcomes.frame", "outcome order has no frame");
  if (frame_->size() < 2) {
    throw validation_error("outcomes.best_above_worst",
                           "an outcome frame needs at least two outcomes");
  }
  if (ranking_.size() != frame_->size()) {
    throw validation_error("outcomes.ranking_total",
                           "ranking must list every outcome of '" + frame_->id() + "' once");
  }
  rank_.assign(frame_->size(), frame_->size());
  for (std::size_t r = 0; r < ranking_.size(); ++r) {
    const std::size_t o = ranking_[r];
    if (o >= frame_->size() || rank_[o] != frame_->size()) {
      throw validation_error("outcomes.ranking_total",
                             "ranking must list every outcome of '" + frame_->id() + "' once");
    }
    rank_[o] = r;
  }
  space_ = ProductFrame::single(frame_);
}

OutcomeOrder OutcomeOrder::by_labels(FramePtr frame, std::span<const std::string> best_first) {
  std::vector<std::size_t> ranking;
  for (const auto& l : best_first) ranking.push_back(frame->index_of(l));
  return OutcomeOrder(std::move(frame), std::move(ranking));
}

OutcomeOrder OutcomeOrder::natural(FramePtr frame) {
  std::vector<std::size_t> ranking(frame->size());
  for (std::size_t i = 0; i < ranking.size(); ++i) ranking[i] = i;
  return OutcomeOrder(std::move(frame), std::move(ranking));
}

namespace {

void require_outcome_set(const OutcomeOrder& o, const SubsetMask& a) {
  if (!same_space(*a.space(), *o.space())) {
    throw Error(ErrorCode::frame_mismatch, "set on '" + a.space()->id() +
                                               "' is not a set of outcomes of '" +
                                               o.frame()->id() + "'");
  }
  if (a.is_empty()) throw validation_error("focal.nonempty", "outcome set is empty");
}

}  // namespace

std::size_t OutcomeOrder::best_in(const SubsetMask& a) const {
  require_outcome_set(*this, a);
  std::size_t best = ranking_.size();
  a.bits().for_each_set([&](std::size_t o) { best = std::min(best, rank_[o]); });
  return ranking_[best];
}

std::size_t OutcomeOrder::worst_in(const SubsetMask& a) const {
  require_outcome_set(*this, a);
  std::size_t worst = 0;
  a.bits().for_each_set([&](std::size_t o) { worst = std::max(worst, rank_[o]); });
  return ranking_[worst];
}

bool same_outcomes(const OutcomeOrder& a, const OutcomeOrder& b) noexcept {
  return same_space(*a.space(), *b.space()) && a.ranking() == b.ranking();
}

BfLottery::BfLottery(OutcomeOrder o, Bpa bpa) : outcomes(std::move(o)), m(std::move(bpa)) {
  if (!same_space(*m.space(), *outcomes.space())) {
    throw Error(ErrorCode::frame_mismatch, "lottery BPA is on '" + m.space()->id() +
                                               "', outcomes are '" + outcomes.frame()->id() + "'");
  }
}

// --- Act ---------------------------------------------------------------------

Act::Act(FramePtr domain, const OutcomeOrder& outcomes, std::vector<SubsetMask> images)
    : domain_(std::move(domain)), outcome_space_(outcomes.space()), images_(std::move(images)) {
  if (images_.size() != domain_->size()) {
    throw validation_error("act.total", "act must map each of the " +
                                            std::to_string(domain_->size()) + " states");
  }
  for (std::size_t s = 0; s < images_.size(); ++s) {
    if (!same_space(*images_[s].space(), *outcome_space_)) {
      throw Error(ErrorCode::frame_mismatch, "image of state '" + domain_->label(s) +
                                                 "' is not on '" + outcome_space_->id() + "'");
    }
    if (images_[s].is_empty()) {
      throw validation_error("act.nonempty_image",
                             "state '" + domain_->label(s) + "' maps to no outcome");
    }
  }
}

Act Act::from_labels(FramePtr domain, const OutcomeOrder& outcomes,
                     const std::vector<std::pair<std::string, std::vector<std::string>>>& map) {
  std::vector<std::optional<SubsetMask>> slots(domain->size());
  for (const auto& [state, labels] : map) {
    const std::size_t s = domain->index_of(state);
    if (slots[s]) throw validation_error("act.function", "state '" + state + "' mapped twice");
    slots[s] = SubsetMask::of_labels(outcomes.space(), labels);
  }
  std::vector<SubsetMask> images;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (!slots[s]) {
      throw validation_error("act.total", "state '" + domain->label(s) + "' is not mapped");
    }
    images.push_back(*slots[s]);
  }
  return Act(std::move(domain), outcomes, std::move(images));
}

SubsetMask Act::image(const SubsetMask& states) const {
  SubsetMask out = SubsetMask::empty(outcome_space_);
  states.bits().for_each_set([&](std::size_t s) { out = out.unite(images_.at(s)); });
  return out;
}

bool Act::deterministic() const noexcept {
  return std::all_of(images_.begin(), images_.end(),
                     [](const SubsetMask& m) { return m.cardinality() == 1; });
}

// --- lotteries ---------------------------------------------------------------

FramePtr lottery_frame(std::size_t count) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= count; ++i) labels.push_back("L" + std::to_string(i));
  return Frame::create(kLotteryFrameId, std::move(labels));
}

BfLottery pushforward(const Bpa& m_states, const Act& act, const OutcomeOrder& outcomes) {
  if (!same_space(*m_states.space(), *ProductFrame::single(act.domain()))) {
    throw Error(ErrorCode::frame_mismatch, "state BPA is on '" + m_states.space()->id() +
                                               "', act is defined on '" + act.domain()->id() +
                                               "'");
  }
  BpaBuilder b(outcomes.space());
  for (std::size_t i = 0; i < m_states.size(); ++i) {
    b.add(act.image(m_states.focal_set(i)), m_states.mass(i));
  }
  return BfLottery(outcomes, std::move(b).build());
}

BfLottery reduce_compound(const CompoundLottery& c) {
  if (c.inner.empty()) throw validation_error("compound.inner_nonempty", "no inner lotteries");
  const OutcomeOrder& outcomes = c.inner.front().outcomes;
  for (const auto& l : c.inner) {
    if (!same_outcomes(l.outcomes, outcomes)) {
      throw Error(ErrorCode::frame_mismatch, "inner lotteries must share one outcome order");
    }
  }
  const FramePtr lf = lottery_frame(c.inner.size());
  const ProductFramePtr lspace = ProductFrame::single(lf);
  if (!same_space(*c.outer.space(), *lspace)) {
    throw Error(ErrorCode::frame_mismatch,
                "outer BPA must be on the " + std::to_string(c.inner.size()) +
                    "-element frame '" + std::string(kLotteryFrameId) + "'");
  }
  if (outcomes.frame()->id() == kLotteryFrameId) {
    throw validation_error("compound.frame_ids",
                           "outcome frame id clashes with the lottery frame id");
  }
  const ProductFramePtr joint =
      ProductFrame::create({{kLotteryFrameId, lf}, {outcomes.frame()->id(), outcomes.frame()}});

  std::vector<Bpa> pieces;
  pieces.reserve(c.inner.size() + 1);
  for (std::size_t j = 0; j < c.inner.size(); ++j) {
    pieces.push_back(conditional_embed(c.inner[j].m, SubsetMask::of(lspace, {j}), joint));
  }
  pieces.push_back(c.outer);
  return BfLottery(outcomes, marginalize_to(combine_all(pieces), outcomes.space()));
}

namespace {

void check_triples(const BfLottery& L, std::span<const ReferenceLottery> triples) {
  if (triples.size() != L.m.size()) {
    throw validation_error("reference.coverage", "need one triple per focal set (" +
                                                     std::to_string(L.m.size()) + "), got " +
                                                     std::to_string(triples.size()));
  }
  for (const auto& t : triples) {
    if (t.u < 0.0 || t.v < 0.0 || t.w < 0.0 ||
        std::fabs(t.u + t.v + t.w - 1.0) > kMassTolerance) {
      throw validation_error("reference.simplex", "triple masses must be nonnegative and sum to 1");
    }
  }
}

}  // namespace

ReferenceLottery reduce_to_reference(const BfLottery& L, std::span<const ReferenceLottery> triples) {
  check_triples(L, triples);
  ReferenceLottery r;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    r.u += L.m.mass(i) * triples[i].u;
    r.v += L.m.mass(i) * triples[i].v;
    r.w += L.m.mass(i) * triples[i].w;
  }
  return r;
}

ReferenceLottery reduce_to_reference_oracle(const BfLottery& L,
                                            std::span<const ReferenceLottery> triples) {
  check_triples(L, triples);
  const auto& o = L.outcomes;
  const std::size_t k = L.m.size();

  const FramePtr o2 = Frame::create("O2", {o.frame()->label(o.best()), o.frame()->label(o.worst())});
  const ProductFramePtr o2space = ProductFrame::single(o2);
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= k; ++i) labels.push_back("L" + std::to_string(i));
  const FramePtr lref = Frame::create("reference", std::move(labels));
  const ProductFramePtr lspace = ProductFrame::single(lref);
  const ProductFramePtr joint = ProductFrame::create({{"reference", lref}, {"O2", o2}});

  const SubsetMask best = SubsetMask::of(o2space, {0});
  const SubsetMask worst = SubsetMask::of(o2space, {1});
  const SubsetMask both = SubsetMask::full(o2space);

  // The Bayesian BPA on the reference lotteries goes first: folding it in
  // early keeps the intermediate focal-set count linear in k.
  std::vector<std::pair<SubsetMask, double>> prior;
  for (std::size_t i = 0; i < k; ++i) prior.emplace_back(SubsetMask::of(lspace, {i}), L.m.mass(i));
  std::vector<Bpa> pieces{Bpa::make(lspace, std::move(prior))};

  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::pair<SubsetMask, double>> cond;
    if (triples[i].u > 0.0) cond.emplace_back(best, triples[i].u);
    if (triples[i].v > 0.0) cond.emplace_back(worst, triples[i].v);
    if (triples[i].w > 0.0) cond.emplace_back(both, triples[i].w);
    pieces.push_back(
        conditional_embed(Bpa::make(o2space, std::move(cond)), SubsetMask::of(lspace, {i}), joint));
  }
  const Bpa reduced = marginalize_to(combine_all(pieces), o2space);
  return ReferenceLottery{reduced.mass_of(best), reduced.mass_of(worst), reduced.mass_of(both)};
}

}  // namespace bf
