#include <cmath>
#include <random>

#include "bf/corpus.hpp"
#include "bf/elicitation.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bf;

namespace {

ElicitationConfig money_config(double eps) {
  auto o = corpus::money();
  return ElicitationConfig{o, {1.0, 0.0}, {SubsetMask::full(o.space())}, eps};
}

}  // namespace

TEST_CASE("first probes sit on the boundary") {
  ElicitationSession s(money_config(0.01));
  auto q = s.next_query();
  REQUIRE(q);
  CHECK(q->probe_u == 0.0);
  s.record_response(*q, DmResponse::target_preferred);
  q = s.next_query();
  REQUIRE(q);
  CHECK(q->probe_u == 1.0);
  s.record_response(*q, DmResponse::probe_preferred);
  q = s.next_query();
  REQUIRE(q);
  CHECK(q->probe_u == 0.5);
  CHECK(s.sequence() == 2);
}

TEST_CASE("responses tighten the documented brackets") {
  ElicitationSession s(money_config(0.01));
  SyntheticDm dm(corpus::money_table(0.2, 0.7));
  for (int i = 0; i < 3; ++i) {
    auto q = *s.next_query();
    s.record_response(q, dm.respond(q));
  }
  // 0 -> target, 1 -> probe, 0.5 -> probe (0.5 >= 0.3)
  const auto& t = s.targets()[0];
  CHECK(s.transcript()[2].response == DmResponse::probe_preferred);
  CHECK(t.upper.hi == 0.5);
  CHECK(t.lower.hi == 0.5);
  auto q = *s.next_query();
  CHECK(q.probe_u == 0.25);
  CHECK(dm.respond(q) == DmResponse::incomparable);
  s.record_response(q, DmResponse::incomparable);
  CHECK(s.targets()[0].lower.hi == 0.25);
  CHECK(s.targets()[0].upper.lo == 0.25);
  q = *s.next_query();
  CHECK(q.probe_u == 0.125);
  CHECK(dm.respond(q) == DmResponse::target_preferred);
  s.record_response(q, DmResponse::target_preferred);
  CHECK(s.targets()[0].lower.lo == 0.125);
}

TEST_CASE("consistent answers in the intermediate region are accepted") {
  ElicitationSession t(money_config(0.01));
  t.record_response(*t.next_query(), DmResponse::target_preferred);
  t.record_response(*t.next_query(), DmResponse::probe_preferred);
  t.record_response(*t.next_query(), DmResponse::probe_preferred);  // 0.5
  auto q = *t.next_query();                                          // 0.25
  CHECK(q.probe_u == 0.25);
  CHECK_NOTHROW(t.record_response(q, DmResponse::probe_preferred));
  q = *t.next_query();
  CHECK(q.probe_u == 0.125);
  CHECK_NOTHROW(t.record_response(q, DmResponse::target_preferred));
  q = *t.next_query();
  CHECK(q.probe_u == 0.1875);
  CHECK_NOTHROW(t.record_response(q, DmResponse::incomparable));
}

TEST_CASE("inconsistency carries the conflicting entries") {
  ElicitationSession s(money_config(0.01));
  s.record_response(*s.next_query(), DmResponse::target_preferred);
  s.record_response(*s.next_query(), DmResponse::probe_preferred);
  s.record_response(*s.next_query(), DmResponse::incomparable);  // 0.5
  auto q = *s.next_query();                                       // 0.25
  s.record_response(q, DmResponse::target_preferred);
  q = *s.next_query();  // 0.375
  try {
    s.record_response(q, DmResponse::probe_preferred);
    FAIL("expected an inconsistency");
  } catch (const InconsistentResponse& e) {
    CHECK(e.code() == ErrorCode::inconsistent);
    REQUIRE(e.conflicting().size() == 2);
    CHECK(e.conflicting()[0].probe_u == 0.5);
    CHECK(e.conflicting()[0].response == DmResponse::incomparable);
    CHECK(e.conflicting()[1].probe_u == 0.375);
  }
  CHECK(s.sequence() == 4);
}

TEST_CASE("boundary answers") {
  ElicitationSession s(money_config(0.01));
  CHECK_THROWS_AS(s.record_response(*s.next_query(), DmResponse::incomparable), InconsistentResponse);
  s.record_response(*s.next_query(), DmResponse::target_preferred);
  CHECK_THROWS_AS(s.record_response(*s.next_query(), DmResponse::incomparable), InconsistentResponse);
}

TEST_CASE("stale queries are rejected") {
  ElicitationSession s(money_config(0.01));
  auto q0 = *s.next_query();
  s.record_response(q0, DmResponse::target_preferred);
  try {
    s.record_response(q0, DmResponse::target_preferred);
    FAIL("expected stale");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::stale);
  }
}

TEST_CASE("synthetic recovery of (0.2, 0.7)") {
  const double eps = 0.005;
  auto run = run_synthetic(money_config(eps), SyntheticDm(corpus::money_table(0.2, 0.7)));
  REQUIRE(run.estimates.size() == 1);
  const auto& e = run.estimates[0];
  CHECK(std::fabs(e.u_a - 0.2) <= eps);
  CHECK(std::fabs(e.upper - 0.3) <= eps);
  CHECK(e.queries <= query_bound(eps));
  CHECK(query_bound(eps) == 18);
  REQUIRE(e.alpha);
  CHECK(std::fabs(*e.alpha - 0.8) <= 0.02);
  CHECK(std::fabs(*e.beta - 0.7) <= 0.02);
  CHECK(run.session.done());
  CHECK(check_consistency(run.recovered.spec(), eps).ok());
}

TEST_CASE("degenerate truth makes the two boundaries coincide") {
  const double eps = 0.01;
  auto run = run_synthetic(money_config(eps), SyntheticDm(corpus::money_table(0.4, 0.6)));
  const auto& e = run.estimates[0];
  CHECK(std::fabs(e.u_a - 0.4) <= eps);
  CHECK(std::fabs(e.upper - 0.4) <= eps);
  CHECK(e.upper - e.u_a <= 2 * eps);
}

TEST_CASE("constant-index truth on four outcomes") {
  auto o = OutcomeOrder::natural(Frame::create("O4", {"$100", "$50", "$10", "$0"}));
  std::vector<double> u{1.0, 0.7, 0.3, 0.0};
  UtilityAssessment truth(AssessmentSpec{o, u, ConstantIndex{0.8, 0.6}, AffineScale{}});
  ElicitationConfig cfg{o, u,
                        {SubsetMask::full(o.space()), SubsetMask::of(o.space(), {1, 2}),
                         SubsetMask::of(o.space(), {0, 2})},
                        0.005};
  auto run = run_synthetic(cfg, SyntheticDm(truth));
  for (const auto& e : run.estimates) {
    REQUIRE(e.alpha);
    CHECK(std::fabs(*e.alpha - 0.8) <= 0.02);
    CHECK(std::fabs(*e.beta - 0.6) <= 0.02);
    CHECK(e.queries <= query_bound(0.005));
  }
  CHECK(check_consistency(run.recovered.spec(), 0.005).ok());
}

TEST_CASE("random truths are recovered within epsilon") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = unit(rng), b = unit(rng);
    if (a > b) std::swap(a, b);
    const double eps = trial % 2 ? 0.01 : 0.003;
    auto run = run_synthetic(money_config(eps), SyntheticDm(corpus::money_table(a, 1.0 - b)));
    const auto& e = run.estimates[0];
    REQUIRE(std::fabs(e.u_a - a) <= eps);
    REQUIRE(std::fabs(e.upper - b) <= eps);
    REQUIRE(e.queries <= query_bound(eps));
  }
}

TEST_CASE("replay rebuilds the same state") {
  auto run = run_synthetic(money_config(0.01), SyntheticDm(corpus::money_table(0.2, 0.7)));
  auto again = ElicitationSession::replay(run.session.config(), run.session.transcript());
  CHECK(again.sequence() == run.session.sequence());
  CHECK(again.targets()[0].lower.lo == run.session.targets()[0].lower.lo);
  CHECK(again.targets()[0].upper.hi == run.session.targets()[0].upper.hi);
  auto broken = run.session.transcript();
  broken[3].probe_u = 0.123;
  CHECK_THROWS_AS(ElicitationSession::replay(run.session.config(), broken), Error);
}

TEST_CASE("solve indices") {
  auto ix = solve_indices(0.2, 0.7, 0.0, 1.0);
  CHECK(ix.alpha == doctest::Approx(0.8));
  CHECK(ix.beta == doctest::Approx(0.7));
  auto spread = solve_indices(0.0, 0.0, 0.0, 1.0);
  CHECK(spread.alpha == 1.0);
  CHECK(spread.beta == 0.0);
  auto top = solve_indices(1.0, 0.0, 0.0, 1.0);
  CHECK(top.alpha == 0.0);
  CHECK(top.beta == 0.0);
  CHECK_THROWS_AS(solve_indices(0.2, 0.7, 0.5, 0.5), Error);
  CHECK_THROWS_AS(solve_indices(0.1, 0.7, 0.2, 1.0), Error);
}

TEST_CASE("consistency checks") {
  auto ok = corpus::money_table(0.2, 0.7);
  CHECK(check_consistency(ok.spec()).ok());

  auto f = Frame::create("O3", {"a", "b", "c"});
  auto o = OutcomeOrder::natural(f);
  AssessmentSpec bent{o, {1.0, 1.2, 0.0}, ExplicitTable{}, AffineScale{}};
  auto r = check_consistency(bent);
  REQUIRE_FALSE(r.ok());
  bool monotone = false;
  for (const auto& v : r.violations) monotone = monotone || v.rule == "singleton.monotone";
  CHECK(monotone);

  ExplicitTable t;
  // {a,c} has better-or-equal worst and best than {b,c} but a smaller lower utility.
  t.entries.push_back({SubsetMask::of(o.space(), {0, 2}), {0.1, 0.5, 0.4}});
  t.entries.push_back({SubsetMask::of(o.space(), {1, 2}), {0.3, 0.6, 0.1}});
  auto d = check_consistency(AssessmentSpec{o, {1.0, 0.5, 0.0}, t, AffineScale{}});
  REQUIRE_FALSE(d.ok());
  CHECK(d.violations[0].rule == "dominance");
  CHECK(d.violations[0].entries == std::vector<std::string>{"{a,c}", "{b,c}"});

  ExplicitTable amb;
  amb.entries.push_back({SubsetMask::of(o.space(), {1}), {0.5, 0.3, 0.2}});
  auto s = check_consistency(AssessmentSpec{o, {1.0, 0.5, 0.0}, amb, AffineScale{}});
  REQUIRE_FALSE(s.ok());
  CHECK(s.violations[0].rule == "entry.singleton_unambiguous");
}
