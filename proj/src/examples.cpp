#include "bf/examples.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bf/corpus.hpp"
#include "bf/store.hpp"

namespace bf::examples {
namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string interval_text(const UtilityInterval& i) { return "[" + num(i.lo) + ", " + num(i.hi) + "]"; }

Check number_check(std::string name, double expected, double actual, double tol) {
  return {std::move(name), num(expected), num(actual), std::fabs(expected - actual) <= tol};
}

Check interval_check(std::string name, UtilityInterval expected, UtilityInterval actual, double tol) {
  const bool pass = std::fabs(expected.lo - actual.lo) <= tol && std::fabs(expected.hi - actual.hi) <= tol;
  return {std::move(name), interval_text(expected), interval_text(actual), pass};
}

Check verdict_check(std::string name, PreferenceVerdict expected, PreferenceVerdict actual) {
  return {std::move(name), std::string(to_string(expected)), std::string(to_string(actual)),
          expected == actual};
}

Check flag_check(std::string name, bool expected, bool actual) {
  return {std::move(name), expected ? "yes" : "no", actual ? "yes" : "no", expected == actual};
}

// --- bundles ------------------------------------------------------------------

BundleRun run_ellsberg() {
  auto e = corpus::ellsberg();
  auto A = corpus::ellsberg_assessment();
  BundleRun run{"ellsberg", {}};
  const double third = 1.0 / 3, two = 2.0 / 3;
  const UtilityInterval expect[4] = {{third, third},
                                     {two * 0.2, two * 0.3},
                                     {third + two * 0.2, third + two * 0.3},
                                     {two, two}};
  for (int i = 0; i < 4; ++i) {
    run.checks.push_back(interval_check("[u](L" + std::to_string(i + 1) + ")", expect[i],
                                        interval_utility(e.lotteries[i], A), 1e-12));
  }
  const auto& L = e.lotteries;
  run.checks.push_back(verdict_check("L1 vs L2 (interval)", PreferenceVerdict::strictly_preferred,
                                     compare(L[0], L[1], A)));
  run.checks.push_back(verdict_check("L4 vs L3 (interval)", PreferenceVerdict::strictly_preferred,
                                     compare(L[3], L[2], A)));
  run.checks.push_back(verdict_check("L1 vs L2 (pignistic)", PreferenceVerdict::indifferent,
                                     compare_by(Criterion::pignistic, L[0], L[1], A)));
  run.checks.push_back(verdict_check("L4 vs L3 (pignistic)", PreferenceVerdict::indifferent,
                                     compare_by(Criterion::pignistic, L[3], L[2], A)));
  return run;
}

PreferenceVerdict one_red_ball_rule(int n, double u, double h) {
  const double t = 1.0 / (n - 1);
  if (u > t) return PreferenceVerdict::strictly_preferred;
  if (h < t) return PreferenceVerdict::strictly_dispreferred;
  return PreferenceVerdict::incomparable;
}

BundleRun run_one_red_ball(int n) {
  auto b = corpus::one_red_ball(n);
  BundleRun run{"one-red-ball", {}};
  int expected[3] = {0, 0, 0};
  int agree[3] = {0, 0, 0};
  for (int i = 0; i < 10; ++i) {
    for (int j = i; j < 10; ++j) {
      const double u = 0.04 + 0.1 * i, h = 0.04 + 0.1 * j;
      auto A = corpus::money_table(u, 1.0 - h);
      const auto want = one_red_ball_rule(n, u, h);
      const int k = want == PreferenceVerdict::strictly_preferred     ? 0
                    : want == PreferenceVerdict::strictly_dispreferred ? 1
                                                                       : 2;
      ++expected[k];
      if (compare(b.other, b.red, A) == want) ++agree[k];
    }
  }
  const char* names[3] = {"blue over red when u_a > 1/(n-1)", "red over blue when 1-v_a < 1/(n-1)",
                          "incomparable otherwise"};
  for (int k = 0; k < 3; ++k) {
    run.checks.push_back({names[k], std::to_string(expected[k]) + " cases",
                          std::to_string(agree[k]) + " cases", expected[k] == agree[k]});
  }
  auto A = corpus::money_table(0.3, 0.4);
  run.checks.push_back(verdict_check("blue vs red under (0.3, 0.4, 0.3)", one_red_ball_rule(n, 0.3, 0.6),
                                     compare(b.other, b.red, A)));
  return run;
}

BundleRun run_thousand_balls() {
  auto t = corpus::thousand_balls();
  BundleRun run{"thousand-balls", {}};
  run.checks.push_back(interval_check("[u](L1)", {0.001, 0.001},
                                      interval_utility(t.urn1, corpus::money_table(0.3, 0.4)), 1e-12));
  for (double u : {0.0, 0.0005, 0.001, 0.0015, 0.01, 0.5}) {
    auto A = corpus::money_table(u, 0.4);
    const auto v = compare(t.urn2, t.urn1, A);
    const bool weak = v == PreferenceVerdict::strictly_preferred || v == PreferenceVerdict::indifferent;
    run.checks.push_back(flag_check("L2 >= L1 at u = " + num(u), u >= 0.001, weak));
  }
  return run;
}

BundleRun run_two_urn() {
  auto c = corpus::two_urn_compound();
  auto L = reduce_compound(c);
  auto s = L.outcomes.space();
  BundleRun run{"two-urn-compound", {}};
  run.checks.push_back(number_check("m'({$100})", 1.0 / 9, L.m.mass_of(SubsetMask::of_labels(s, {"$100"})), 1e-12));
  run.checks.push_back(number_check("m'({$0})", 10.0 / 27, L.m.mass_of(SubsetMask::of_labels(s, {"$0"})), 1e-12));
  run.checks.push_back(number_check("m'({$100,$0})", 14.0 / 27, L.m.mass_of(SubsetMask::full(s)), 1e-12));
  run.checks.push_back(number_check("focal sets", 3, static_cast<double>(L.m.size()), 0.0));
  return run;
}

BundleRun run_conditional_embedding() {
  auto c = corpus::conditional_embedding();
  auto e = conditional_embed(c.cond, c.given, c.joint);
  auto code = [&](std::size_t i, std::size_t j) { return c.joint->encode(std::vector<std::size_t>{i, j}); };
  BundleRun run{"conditional-embedding", {}};
  run.checks.push_back(number_check("m({(x,y),(~x,y),(~x,~y)})", 0.8,
                                    e.mass_of(SubsetMask::of(c.joint, {code(0, 0), code(1, 0), code(1, 1)})),
                                    1e-12));
  run.checks.push_back(number_check("m(X x Y)", 0.2, e.mass_of(SubsetMask::full(c.joint)), 1e-12));
  run.checks.push_back(flag_check("marginal on X is vacuous", true,
                                  classify(marginalize(e, {"X"})) == BpaClass::vacuous));
  run.checks.push_back(flag_check("marginal on Y is vacuous", true,
                                  classify(marginalize(e, {"Y"})) == BpaClass::vacuous));
  auto back = marginalize(combine_dempster(e, Bpa::deterministic(c.given)).bpa, {"Y"});
  run.checks.push_back(flag_check("conditioning on {x} recovers the conditional", true,
                                  approx_equal(back, c.cond, 1e-12)));
  return run;
}

io::json act_json(const Act& f) {
  io::json map = io::json::object();
  for (std::size_t s = 0; s < f.domain()->size(); ++s) {
    map[f.domain()->label(s)] = io::to_json(f.image(s));
  }
  return map;
}

io::json manifest(const std::string& name, const std::vector<BundleFile>& files) {
  io::json list = io::json::array();
  for (const auto& f : files) list.push_back(io::json{{"path", f.path}, {"kind", f.kind}});
  std::string description;
  for (const auto& b : bundles()) {
    if (b.name == name) description = b.description;
  }
  return io::json{{"schema", io::kSchemaVersion}, {"bundle", name}, {"description", description}, {"files", list}};
}

}  // namespace

bool BundleRun::ok() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

std::vector<BundleInfo> bundles() {
  return {
      {"ellsberg", "Three-colour urn: four acts under 1/3 red and 2/3 black-or-yellow"},
      {"one-red-ball", "One red ball among n, the rest of unknown colours (--n, default 5)"},
      {"thousand-balls", "One winning ball in a thousand against a vacuous urn"},
      {"two-urn-compound", "A first draw picks one of two Ellsberg lotteries"},
      {"conditional-embedding", "A conditional BPA on Y given x embedded into X x Y"},
  };
}

BundleRun run_bundle(const std::string& name, int n) {
  if (name == "ellsberg") return run_ellsberg();
  if (name == "one-red-ball") return run_one_red_ball(n);
  if (name == "thousand-balls") return run_thousand_balls();
  if (name == "two-urn-compound") return run_two_urn();
  if (name == "conditional-embedding") return run_conditional_embedding();
  throw Error(ErrorCode::not_found, "unknown example bundle '" + name + "'");
}

std::vector<BundleFile> bundle_files(const std::string& name) {
  std::vector<BundleFile> files;
  if (name == "ellsberg") {
    auto e = corpus::ellsberg();
    auto o = corpus::money();
    io::json acts = io::json::array();
    for (std::size_t i = 0; i < e.acts.size(); ++i) {
      acts.push_back(io::json{{"name", "f" + std::to_string(i + 1)}, {"map", act_json(e.acts[i])}});
    }
    files.push_back({"states.json", "states",
                     io::json{{"frame", io::to_json(*e.states)},
                              {"outcomes", io::to_json(o)},
                              {"m_x", io::to_json(e.m_x)},
                              {"acts", acts}}});
    for (std::size_t i = 0; i < e.lotteries.size(); ++i) {
      files.push_back({"L" + std::to_string(i + 1) + ".json", "lottery", io::to_json(e.lotteries[i])});
    }
    files.push_back({"assessment.json", "assessment", io::to_json(corpus::ellsberg_assessment())});
  } else if (name == "one-red-ball") {
    auto b = corpus::one_red_ball(5);
    files.push_back({"red.json", "lottery", io::to_json(b.red)});
    files.push_back({"blue.json", "lottery", io::to_json(b.other)});
    files.push_back({"assessment.json", "assessment", io::to_json(corpus::money_table(0.3, 0.4))});
  } else if (name == "thousand-balls") {
    auto t = corpus::thousand_balls();
    files.push_back({"urn1.json", "lottery", io::to_json(t.urn1)});
    files.push_back({"urn2.json", "lottery", io::to_json(t.urn2)});
    files.push_back({"assessment.json", "assessment", io::to_json(corpus::money_table(0.002, 0.4))});
  } else if (name == "two-urn-compound") {
    files.push_back({"compound.json", "compound", io::to_json(corpus::two_urn_compound())});
    files.push_back({"assessment.json", "assessment", io::to_json(corpus::ellsberg_assessment())});
  } else if (name == "conditional-embedding") {
    auto c = corpus::conditional_embedding();
    files.push_back({"embedding.json", "embedding",
                     io::json{{"joint", io::to_json(*c.joint)},
                              {"conditional", io::to_json(c.cond)},
                              {"given", io::json{{"frame", c.given.space()->id()}, {"set", io::to_json(c.given)}}}}});
  } else {
    throw Error(ErrorCode::not_found, "unknown example bundle '" + name + "'");
  }
  files.insert(files.begin(), BundleFile{"manifest.json", "manifest", manifest(name, files)});
  return files;
}

std::vector<std::filesystem::path> export_bundle(const std::string& name, const std::filesystem::path& dir) {
  const auto root = dir / name;
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create '" + root.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& f : bundle_files(name)) {
    write_file_atomic(root / f.path, io::dump(f.doc) + "\n");
    written.push_back(root / f.path);
  }
  return written;
}

void validate_file(const std::string& kind, const io::json& doc) try {
  io::FrameRegistry reg;
  if (kind == "lottery") {
    io::lottery_from_json(doc, reg);
  } else if (kind == "assessment") {
    io::assessment_from_json(doc, reg);
  } else if (kind == "compound") {
    io::compound_from_json(doc, reg);
  } else if (kind == "states") {
    auto f = io::frame_from_json(doc.at("frame"), reg);
    auto o = io::outcomes_from_json(doc.at("outcomes"), reg);
    io::bpa_from_json(doc.at("m_x"), reg);
    for (const auto& a : doc.at("acts")) {
      std::vector<std::pair<std::string, std::vector<std::string>>> map;
      for (auto it = a.at("map").begin(); it != a.at("map").end(); ++it) {
        map.emplace_back(it.key(), it.value().get<std::vector<std::string>>());
      }
      Act::from_labels(f, o, map);
    }
  } else if (kind == "embedding") {
    auto joint = io::space_from_json(doc.at("joint"), reg);
    auto cond = io::bpa_from_json(doc.at("conditional"), reg);
    auto given_space = io::space_from_json(doc.at("given").at("frame"), reg);
    conditional_embed(cond, io::mask_from_json(doc.at("given").at("set"), given_space), joint);
  } else if (kind == "manifest") {
    if (doc.value("schema", "") != io::kSchemaVersion) {
      throw validation_error("manifest.schema", "manifest schema must be bf/1");
    }
  } else {
    throw Error(ErrorCode::malformed, "unknown bundle file kind '" + kind + "'");
  }
} catch (const io::json::exception& e) {
  throw Error(ErrorCode::malformed, kind + " file: " + e.what());
}

io::json to_json(const BundleRun& run) {
  io::json checks = io::json::array();
  for (const auto& c : run.checks) {
    checks.push_back(io::json{{"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"pass", c.pass}});
  }
  return io::json{{"bundle", run.bundle}, {"ok", run.ok()}, {"checks", checks}};
}

}  // namespace bf::examples
