#include "bf/corpus.hpp"

#include "bf/error.hpp"

namespace bf::corpus {

OutcomeOrder money() { return OutcomeOrder::natural(Frame::create("O", {"$100", "$0"})); }

UtilityAssessment money_table(double u_amb, double v_amb) {
  const OutcomeOrder o = money();
  ExplicitTable t;
  t.entries.push_back({SubsetMask::full(o.space()), ReferenceLottery{u_amb, v_amb, 1.0 - u_amb - v_amb}});
  return UtilityAssessment(AssessmentSpec{o, {1.0, 0.0}, std::move(t), AffineScale{}});
}

UtilityAssessment ellsberg_assessment() {
  return UtilityAssessment(AssessmentSpec{money(), {1.0, 0.0}, ConstantIndex{0.8, 0.7}, AffineScale{}});
}

Ellsberg ellsberg() {
  auto states = Frame::create("X", {"r", "b", "y"});
  auto s = ProductFrame::single(states);
  Bpa m_x = Bpa::make(s, {{SubsetMask::of_labels(s, {"r"}), 1.0 / 3},
                          {SubsetMask::of_labels(s, {"b", "y"}), 2.0 / 3}});
  const OutcomeOrder o = money();
  using Map = std::vector<std::pair<std::string, std::vector<std::string>>>;
  std::vector<Act> acts{
      Act::from_labels(states, o, Map{{"r", {"$100"}}, {"b", {"$0"}}, {"y", {"$0"}}}),
      Act::from_labels(states, o, Map{{"r", {"$0"}}, {"b", {"$100"}}, {"y", {"$0"}}}),
      Act::from_labels(states, o, Map{{"r", {"$100"}}, {"b", {"$0"}}, {"y", {"$100"}}}),
      Act::from_labels(states, o, Map{{"r", {"$0"}}, {"b", {"$100"}}, {"y", {"$100"}}}),
  };
  std::vector<BfLottery> lotteries;
  for (const auto& f : acts) lotteries.push_back(pushforward(m_x, f, o));
  return Ellsberg{states, m_x, std::move(acts), std::move(lotteries)};
}

OneRedBall one_red_ball(int n) {
  if (n < 2) throw validation_error("one_red_ball.n", "need at least two balls");
  auto states = Frame::create("X", {"r", "b", "g", "o", "w", "y"});
  auto s = ProductFrame::single(states);
  const double p = 1.0 / n;
  Bpa m_x = Bpa::make(s, {{SubsetMask::of_labels(s, {"r"}), p},
                          {SubsetMask::of_labels(s, {"b", "g", "o", "w", "y"}), 1.0 - p}});
  const OutcomeOrder o = money();
  using Map = std::vector<std::pair<std::string, std::vector<std::string>>>;
  Map red, blue;
  for (const auto& c : states->labels()) {
    red.push_back({c, {c == "r" ? "$100" : "$0"}});
    blue.push_back({c, {c == "b" ? "$100" : "$0"}});
  }
  return OneRedBall{states, m_x, pushforward(m_x, Act::from_labels(states, o, red), o),
                    pushforward(m_x, Act::from_labels(states, o, blue), o)};
}

ThousandBalls thousand_balls() {
  const OutcomeOrder o = money();
  auto win = SubsetMask::of_labels(o.space(), {"$100"});
  auto lose = SubsetMask::of_labels(o.space(), {"$0"});
  return ThousandBalls{BfLottery(o, Bpa::make(o.space(), {{win, 0.001}, {lose, 0.999}})),
                       BfLottery(o, Bpa::vacuous(o.space()))};
}

CompoundLottery two_urn_compound() {
  auto e = ellsberg();
  auto urn1 = Frame::create("X1", {"b", "r", "y"});
  auto s = ProductFrame::single(urn1);
  Bpa m1 = Bpa::make(s, {{SubsetMask::of_labels(s, {"b"}), 1.0 / 3},
                         {SubsetMask::of_labels(s, {"r", "y"}), 2.0 / 3}});
  const OutcomeOrder which = OutcomeOrder::natural(lottery_frame(2));
  using Map = std::vector<std::pair<std::string, std::vector<std::string>>>;
  Act f = Act::from_labels(urn1, which, Map{{"b", {"L1"}}, {"r", {"L1"}}, {"y", {"L2"}}});
  return CompoundLottery{{e.lotteries[0], e.lotteries[1]}, pushforward(m1, f, which).m};
}

ConditionalEmbedding conditional_embedding() {
  auto x = Frame::create("X", {"x", "~x"});
  auto y = Frame::create("Y", {"y", "~y"});
  auto px = ProductFrame::single(x);
  auto py = ProductFrame::single(y);
  auto joint = ProductFrame::create({{"X", x}, {"Y", y}});
  Bpa cond = Bpa::make(py, {{SubsetMask::of_labels(py, {"y"}), 0.8}, {SubsetMask::full(py), 0.2}});
  return ConditionalEmbedding{joint, std::move(cond), SubsetMask::of_labels(px, {"x"})};
}

std::vector<std::string> bundle_names() {
  return {"ellsberg", "one-red-ball", "thousand-balls", "two-urn-compound", "conditional-embedding"};
}

}  // namespace bf::corpus
