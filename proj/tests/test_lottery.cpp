#include <random>

#include "bf/corpus.hpp"
#include "bf/error.hpp"
#include "bf/lottery.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bf;

namespace {

double mass_on(const BfLottery& L, std::initializer_list<std::string> labels) {
  return L.m.mass_of(SubsetMask::of_labels(L.outcomes.space(), labels));
}

}  // namespace

TEST_CASE("outcome order") {
  auto f = Frame::create("O", {"low", "mid", "high"});
  std::vector<std::string> best_first{"high", "mid", "low"};
  auto o = OutcomeOrder::by_labels(f, best_first);
  CHECK(o.best() == 2);
  CHECK(o.worst() == 0);
  CHECK(o.rank_of(1) == 1);
  auto lm = SubsetMask::of_labels(o.space(), {"low", "mid"});
  CHECK(o.best_in(lm) == 1);
  CHECK(o.worst_in(lm) == 0);
  CHECK_THROWS_AS(OutcomeOrder(f, {0, 0, 1}), Error);
  CHECK_THROWS_AS(OutcomeOrder(f, {0, 1}), Error);
  CHECK_THROWS_AS(OutcomeOrder::natural(Frame::create("one", {"a"})), Error);
}

TEST_CASE("ellsberg lotteries by pushforward") {
  auto e = corpus::ellsberg();
  const auto& L = e.lotteries;
  CHECK(mass_on(L[0], {"$100"}) == doctest::Approx(1.0 / 3));
  CHECK(mass_on(L[0], {"$0"}) == doctest::Approx(2.0 / 3));
  CHECK(mass_on(L[1], {"$0"}) == doctest::Approx(1.0 / 3));
  CHECK(mass_on(L[1], {"$100", "$0"}) == doctest::Approx(2.0 / 3));
  CHECK(mass_on(L[2], {"$100"}) == doctest::Approx(1.0 / 3));
  CHECK(mass_on(L[2], {"$100", "$0"}) == doctest::Approx(2.0 / 3));
  CHECK(mass_on(L[3], {"$0"}) == doctest::Approx(1.0 / 3));
  CHECK(mass_on(L[3], {"$100"}) == doctest::Approx(2.0 / 3));
  CHECK(classify(L[0].m) == BpaClass::bayesian);
  CHECK(classify(L[1].m) == BpaClass::consonant);
  CHECK(e.acts[0].deterministic());
}

TEST_CASE("constant act gives a deterministic lottery") {
  auto e = corpus::ellsberg();
  auto o = corpus::money();
  using Map = std::vector<std::pair<std::string, std::vector<std::string>>>;
  auto f = Act::from_labels(e.states, o, Map{{"r", {"$0"}}, {"b", {"$0"}}, {"y", {"$0"}}});
  auto L = pushforward(e.m_x, f, o);
  CHECK(classify(L.m) == BpaClass::deterministic);
  CHECK(mass_on(L, {"$0"}) == 1.0);
}

TEST_CASE("act validation") {
  auto e = corpus::ellsberg();
  auto o = corpus::money();
  using Map = std::vector<std::pair<std::string, std::vector<std::string>>>;
  CHECK_THROWS_AS(Act::from_labels(e.states, o, Map{{"r", {"$0"}}, {"b", {"$0"}}}), Error);
  CHECK_THROWS_AS(Act::from_labels(e.states, o, Map{{"r", {}}, {"b", {"$0"}}, {"y", {"$0"}}}), Error);
  auto other = ProductFrame::single(Frame::create("Z", {"z"}));
  CHECK_THROWS_AS(pushforward(Bpa::vacuous(other), e.acts[0], o), Error);
}

TEST_CASE("pushforward preserves mass and never adds focal sets") {
  std::mt19937_64 rng(2);
  auto states = test::frame_of("S", 5);
  auto s = ProductFrame::single(states);
  auto o = OutcomeOrder::natural(test::frame_of("o", 3));
  std::uniform_int_distribution<std::size_t> pick(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SubsetMask> images;
    for (std::size_t i = 0; i < 5; ++i) {
      if (trial % 2) images.push_back(SubsetMask(o.space(), test::random_nonempty_bits(rng, 3)));
      else images.push_back(SubsetMask::of(o.space(), {pick(rng)}));
    }
    Act f(states, o, images);
    auto m = test::random_bpa(rng, s, 6);
    auto L = pushforward(m, f, o);
    double total = 0.0;
    for (double v : L.m.masses()) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(L.m.size() <= m.size());
  }
}

TEST_CASE("pushforward is invariant to refining a state under ignorance") {
  auto o = corpus::money();
  auto coarse = Frame::create("X", {"x1", "x2"});
  auto fine = Frame::create("Xr", {"x11", "x12", "x2"});
  using Map = std::vector<std::pair<std::string, std::vector<std::string>>>;
  auto f1 = Act::from_labels(coarse, o, Map{{"x1", {"$100"}}, {"x2", {"$0"}}});
  auto f2 = Act::from_labels(coarse, o, Map{{"x1", {"$0"}}, {"x2", {"$100"}}});
  auto g1 = Act::from_labels(fine, o, Map{{"x11", {"$100"}}, {"x12", {"$100"}}, {"x2", {"$0"}}});
  auto g2 = Act::from_labels(fine, o, Map{{"x11", {"$0"}}, {"x12", {"$0"}}, {"x2", {"$100"}}});
  auto vc = Bpa::vacuous(ProductFrame::single(coarse));
  auto vf = Bpa::vacuous(ProductFrame::single(fine));
  CHECK(pushforward(vc, f1, o).m == pushforward(vf, g1, o).m);
  CHECK(pushforward(vc, f2, o).m == pushforward(vf, g2, o).m);
  CHECK(pushforward(vc, f1, o).m == pushforward(vc, f2, o).m);
}

TEST_CASE("two-urn compound reduces to 1/9, 10/27, 14/27") {
  auto c = corpus::two_urn_compound();
  CHECK(c.outer.mass_of(SubsetMask::of(c.outer.space(), {0})) == doctest::Approx(1.0 / 3));
  auto r = reduce_compound(c);
  CHECK(std::fabs(mass_on(r, {"$100"}) - 1.0 / 9) <= 1e-12);
  CHECK(std::fabs(mass_on(r, {"$0"}) - 10.0 / 27) <= 1e-12);
  CHECK(std::fabs(mass_on(r, {"$100", "$0"}) - 14.0 / 27) <= 1e-12);
}

TEST_CASE("intermediate sums in the two-urn reduction") {
  auto c = corpus::two_urn_compound();
  const auto& o = c.inner[0].outcomes;
  auto lf = lottery_frame(2);
  auto ls = ProductFrame::single(lf);
  auto joint = ProductFrame::create({{kLotteryFrameId, lf}, {"O", o.frame()}});
  auto e1 = conditional_embed(c.inner[0].m, SubsetMask::of(ls, {0}), joint);
  auto e2 = conditional_embed(c.inner[1].m, SubsetMask::of(ls, {1}), joint);
  auto cell = [&](std::size_t l, std::size_t out) {
    return joint->encode(std::vector<std::size_t>{l, out});
  };
  // outcome index 0 is $100, 1 is $0
  auto s = combine_dempster(e1, e2).bpa;
  CHECK(s.mass_of(SubsetMask::of(joint, {cell(0, 0), cell(1, 1)})) == doctest::Approx(1.0 / 9));
  CHECK(s.mass_of(SubsetMask::of(joint, {cell(0, 1), cell(1, 1)})) == doctest::Approx(2.0 / 9));
  CHECK(s.mass_of(SubsetMask::of(joint, {cell(0, 0), cell(1, 0), cell(1, 1)})) ==
        doctest::Approx(2.0 / 9));
  CHECK(s.mass_of(SubsetMask::of(joint, {cell(0, 1), cell(1, 0), cell(1, 1)})) ==
        doctest::Approx(4.0 / 9));
  auto full = combine_dempster(s, c.outer).bpa;
  CHECK(full.size() == 6);
  CHECK(full.mass_of(SubsetMask::of(joint, {cell(0, 0)})) == doctest::Approx(3.0 / 27));
  CHECK(full.mass_of(SubsetMask::of(joint, {cell(0, 1), cell(1, 0), cell(1, 1)})) ==
        doctest::Approx(8.0 / 27));
}

TEST_CASE("compound reduction edge cases") {
  auto e = corpus::ellsberg();
  auto lf = ProductFrame::single(lottery_frame(1));
  CompoundLottery one{{e.lotteries[1]}, Bpa::vacuous(lf)};
  CHECK(approx_equal(reduce_compound(one).m, e.lotteries[1].m, 1e-12));

  auto l2 = ProductFrame::single(lottery_frame(2));
  CompoundLottery pick{{e.lotteries[0], e.lotteries[3]}, Bpa::deterministic(SubsetMask::of(l2, {1}))};
  CHECK(approx_equal(reduce_compound(pick).m, e.lotteries[3].m, 1e-12));

  CompoundLottery wrong{{e.lotteries[0]}, Bpa::vacuous(l2)};
  CHECK_THROWS_AS(reduce_compound(wrong), Error);
}

TEST_CASE("bayesian compounds reduce to the probability mixture") {
  std::mt19937_64 rng(17);
  auto o = OutcomeOrder::natural(test::frame_of("o", 4));
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t s = 1 + trial % 4;
    CompoundLottery c{{}, Bpa::vacuous(ProductFrame::single(lottery_frame(s)))};
    for (std::size_t j = 0; j < s; ++j) c.inner.emplace_back(o, test::random_bayesian(rng, o.space()));
    c.outer = test::random_bayesian(rng, ProductFrame::single(lottery_frame(s)));
    auto r = reduce_compound(c);
    REQUIRE(classify(r.m) == BpaClass::bayesian);
    for (std::size_t i = 0; i < 4; ++i) {
      double expect = 0.0;
      for (std::size_t j = 0; j < s; ++j) {
        expect += c.outer.mass_of(SubsetMask::of(c.outer.space(), {j})) *
                  c.inner[j].m.mass_of(SubsetMask::of(o.space(), {i}));
      }
      REQUIRE(std::fabs(r.m.mass_of(SubsetMask::of(o.space(), {i})) - expect) <= 1e-12);
    }
  }
}

TEST_CASE("reference reduction: closed form and D-S construction") {
  auto e = corpus::ellsberg();
  std::vector<ReferenceLottery> t2{{0.0, 1.0, 0.0}, {0.2, 0.7, 0.1}};
  // focal order of L2 is by mask: {$0} (bit 1) sorts before {$100,$0}
  REQUIRE(e.lotteries[1].m.focal_set(0).cardinality() == 1);
  auto r = reduce_to_reference(e.lotteries[1], t2);
  CHECK(r.u == doctest::Approx(2.0 / 15));
  CHECK(r.v == doctest::Approx(0.8));
  CHECK(r.w == doctest::Approx(1.0 / 15));
  auto oracle = reduce_to_reference_oracle(e.lotteries[1], t2);
  CHECK(std::fabs(oracle.u - r.u) <= 1e-12);
  CHECK(std::fabs(oracle.v - r.v) <= 1e-12);
  CHECK(std::fabs(oracle.w - r.w) <= 1e-12);

  auto o = corpus::money();
  BfLottery det(o, Bpa::vacuous(o.space()));
  std::vector<ReferenceLottery> one{{0.3, 0.5, 0.2}};
  auto d = reduce_to_reference_oracle(det, one);
  CHECK(d.u == doctest::Approx(0.3));
  CHECK(d.v == doctest::Approx(0.5));
  CHECK(d.w == doctest::Approx(0.2));

  std::vector<ReferenceLottery> short_list{{0.3, 0.5, 0.2}};
  CHECK_THROWS_AS(reduce_to_reference(e.lotteries[1], short_list), Error);
}
