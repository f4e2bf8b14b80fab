#pragma once

// Belief-function lotteries: acts, compound lotteries and reduction to a
// reference lottery on the best and worst outcomes.

#include <span>
#include <string>
#include <vector>

#include "bf/bpa.hpp"
#include "bf/subset.hpp"

namespace bf {

/// Outcome frame plus a total ranking, best first. The first outcome must be
/// strictly preferred to the last; ties in between are expressed through
/// equal singleton utilities, not through the ranking.
class OutcomeOrder {
 public:
  OutcomeOrder(FramePtr frame, std::vector<std::size_t> ranking);
  static OutcomeOrder by_labels(FramePtr frame, std::span<const std::string> best_first);
  /// Frame order taken as the ranking.
  static OutcomeOrder natural(FramePtr frame);

  const FramePtr& frame() const noexcept { return frame_; }
  const ProductFramePtr& space() const noexcept { return space_; }
  const std::vector<std::size_t>& ranking() const noexcept { return ranking_; }
  std::size_t size() const noexcept { return ranking_.size(); }

  std::size_t rank_of(std::size_t outcome) const { return rank_.at(outcome); }
  std::size_t best() const noexcept { return ranking_.front(); }
  std::size_t worst() const noexcept { return ranking_.back(); }

  /// Best and worst members of a nonempty set, by ranking position.
  std::size_t best_in(const SubsetMask& a) const;
  std::size_t worst_in(const SubsetMask& a) const;

 private:
  FramePtr frame_;
  ProductFramePtr space_;
  std::vector<std::size_t> ranking_;
  std::vector<std::size_t> rank_;
};

bool same_outcomes(const OutcomeOrder& a, const OutcomeOrder& b) noexcept;

struct BfLottery {
  OutcomeOrder outcomes;
  Bpa m;

  BfLottery(OutcomeOrder o, Bpa bpa);
};

/// Maps each state of `domain` to a nonempty set of outcomes. Singleton
/// images everywhere make the act deterministic.
class Act {
 public:
  Act(FramePtr domain, const OutcomeOrder& outcomes, std::vector<SubsetMask> images);
  /// state label -> outcome labels.
  static Act from_labels(FramePtr domain, const OutcomeOrder& outcomes,
                         const std::vector<std::pair<std::string, std::vector<std::string>>>& map);

  const FramePtr& domain() const noexcept { return domain_; }
  const SubsetMask& image(std::size_t state) const { return images_.at(state); }
  SubsetMask image(const SubsetMask& states) const;
  bool deterministic() const noexcept;

 private:
  FramePtr domain_;
  ProductFramePtr outcome_space_;
  std::vector<SubsetMask> images_;
};

/// [O2, (u, v, w)]: masses on the best outcome, the worst outcome and both.
struct ReferenceLottery {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
};

inline constexpr const char* kLotteryFrameId = "lotteries";

/// Frame {L1, ..., Ls} over which compound lotteries put their outer BPA.
FramePtr lottery_frame(std::size_t count);

struct CompoundLottery {
  std::vector<BfLottery> inner;
  Bpa outer;  // on lottery_frame(inner.size())
};

/// Each state mass moves to the image of its focal set; equal images merge.
BfLottery pushforward(const Bpa& m_states, const Act& act, const OutcomeOrder& outcomes);

/// Conditional embedding of every inner lottery onto L x O, Dempster
/// combination with the outer BPA, marginal on O. The inner and outer
/// pieces of evidence are assumed independent; that is the caller's call.
BfLottery reduce_compound(const CompoundLottery& c);

/// Closed form: (u, v, w) = sum_i m(a_i) * triples[i], with triples given in
/// the lottery's focal order.
ReferenceLottery reduce_to_reference(const BfLottery& L, std::span<const ReferenceLottery> triples);

/// The same triple through the D-S calculus: a frame of the k reference
/// lotteries, a Bayesian BPA on it, one conditional embedding per focal set
/// onto that frame x O2, their combination, and the marginal on O2.
ReferenceLottery reduce_to_reference_oracle(const BfLottery& L,
                                            std::span<const ReferenceLottery> triples);

}  // namespace bf
