#include <atomic>
#include <fstream>
#include <random>
#include <thread>

#include "httplib.h"

#include "bf/corpus.hpp"
#include "bf/service.hpp"
#include "doctest.h"

using namespace bf;
using io::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_store() {
  static std::mt19937_64 rng{std::random_device{}()};
  auto p = fs::temp_directory_path() / ("bf-store-" + std::to_string(rng()));
  fs::create_directories(p);
  return p;
}

/// A service on an ephemeral port for the lifetime of the object.
struct Running {
  SessionService service;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit Running(const fs::path& dir) : service(dir) {
    service.install(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Running() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }
};

struct Reply {
  int status;
  std::string body;
  json doc() const { return body.empty() ? json() : json::parse(body); }
};

Reply post(const Running& r, const std::string& path, const std::string& body) {
  auto c = r.client();
  auto res = c.Post(path, body, "application/json");
  REQUIRE(res);
  return {res->status, res->body};
}

Reply put(const Running& r, const std::string& path, const std::string& body) {
  auto c = r.client();
  auto res = c.Put(path, body, "application/json");
  REQUIRE(res);
  return {res->status, res->body};
}

Reply get(const Running& r, const std::string& path) {
  auto c = r.client();
  auto res = c.Get(path);
  REQUIRE(res);
  return {res->status, res->body};
}

Reply del(const Running& r, const std::string& path) {
  auto c = r.client();
  auto res = c.Delete(path);
  REQUIRE(res);
  return {res->status, res->body};
}

json money_session_body(double eps) {
  auto o = corpus::money();
  ElicitationConfig cfg{o, {1.0, 0.0}, {SubsetMask::full(o.space())}, eps};
  json j = io::to_json(cfg);
  j["owner"] = "tester";
  return j;
}

DmResponse parse_resp(const json& q, const SyntheticDm& dm) {
  auto o = corpus::money();
  Query query{q["target_index"].get<std::size_t>(), SubsetMask::full(o.space()),
              q["probe_u"].get<double>()};
  return dm.respond(query);
}

/// Answers until done; returns the number of responses posted.
int drive(const Running& r, const std::string& id, const SyntheticDm& dm, int limit = 1000) {
  int n = 0;
  while (n < limit) {
    auto nq = get(r, "/sessions/" + id + "/next-query").doc();
    if (nq["done"].get<bool>()) break;
    json body{{"sequence", nq["sequence"]},
              {"response", std::string(to_string(parse_resp(nq["query"], dm)))}};
    auto rep = post(r, "/sessions/" + id + "/responses", body.dump());
    REQUIRE(rep.status == 200);
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("health") {
  Running r(temp_store());
  auto h = get(r, "/health");
  CHECK(h.status == 200);
  CHECK(h.doc()["schema"] == "bf/1");
}

TEST_CASE("evaluate the thousand-balls urn") {
  Running r(temp_store());
  auto tb = corpus::thousand_balls();
  auto A = corpus::money_table(0.0005, 0.5);
  json body{{"lottery", io::to_json(tb.urn1)}, {"assessment", io::to_json(A)}};
  auto rep = post(r, "/evaluate", body.dump());
  REQUIRE(rep.status == 200);
  auto doc = rep.doc();
  CHECK(doc["interval"]["lo"].get<double>() == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(doc["interval"]["hi"].get<double>() == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(rep.body == io::to_json(evaluate(tb.urn1, A)).dump());
}

TEST_CASE("reduce the two-urn compound") {
  Running r(temp_store());
  auto c = corpus::two_urn_compound();
  auto rep = post(r, "/reduce", io::to_json(c).dump());
  REQUIRE(rep.status == 200);
  CHECK(rep.body == io::to_json(reduce_compound(c)).dump());
  io::FrameRegistry reg;
  auto L = io::lottery_from_json(rep.doc(), reg);
  auto s = L.outcomes.space();
  CHECK(L.m.mass_of(SubsetMask::of_labels(s, {"$100"})) == doctest::Approx(1.0 / 9).epsilon(1e-12));
  CHECK(L.m.mass_of(SubsetMask::of_labels(s, {"$0"})) == doctest::Approx(10.0 / 27).epsilon(1e-12));
  CHECK(L.m.mass_of(SubsetMask::full(s)) == doctest::Approx(14.0 / 27).epsilon(1e-12));
  auto wrapped = post(r, "/reduce", json{{"compound", io::to_json(c)}}.dump());
  CHECK(wrapped.body == rep.body);
}

TEST_CASE("compare with stored documents") {
  Running r(temp_store());
  auto e = corpus::ellsberg();
  for (int i = 0; i < 4; ++i) {
    json doc = io::to_json(e.lotteries[i]);
    doc["id"] = "L" + std::to_string(i + 1);
    CHECK(post(r, "/lotteries", doc.dump()).status == 201);
  }
  json A = io::to_json(corpus::ellsberg_assessment());
  A["id"] = "averse";
  CHECK(post(r, "/assessments", A.dump()).status == 201);
  auto rep = post(r, "/compare", R"({"left":"L1","right":"L2","assessment":"averse"})");
  REQUIRE(rep.status == 200);
  CHECK(rep.doc()["verdicts"]["interval"] == "strictly_preferred");
  CHECK(rep.doc()["verdicts"]["pignistic"] == "indifferent");
  CHECK(rep.body ==
        io::to_json(compare_all(e.lotteries[0], e.lotteries[1], corpus::ellsberg_assessment())).dump());
  auto only = post(r, "/compare", R"({"left":"L4","right":"L3","assessment":"averse","criteria":["interval"]})");
  CHECK(only.doc()["verdicts"].size() == 1);
  CHECK(only.doc()["verdicts"]["interval"] == "strictly_preferred");
  CHECK(post(r, "/compare", R"({"left":"L4","right":"L9","assessment":"averse"})").status == 404);
  CHECK(post(r, "/compare", R"({"left":"L4","right":"L3","assessment":"averse","criteria":["vibes"]})")
            .status == 400);
}

TEST_CASE("document CRUD") {
  Running r(temp_store());
  auto f = post(r, "/frames", R"({"id":"O","labels":["$100","$50","$0"]})");
  CHECK(f.status == 201);
  CHECK(f.doc()["id"] == "O");
  CHECK(post(r, "/frames", R"({"id":"O","labels":["$100","$50","$0"]})").status == 409);
  CHECK(put(r, "/frames/Q", R"({"id":"O","labels":["a","b"]})").status == 422);
  CHECK(get(r, "/frames").doc()["ids"] == json::array({"O"}));

  // A lottery referring to the stored frame by id is stored self-contained.
  auto L = post(r, "/lotteries",
                R"({"id":"mid","outcomes":{"frame":"O"},"bpa":{"frame":"O","focal":[{"set":["$50"],"mass":1}]}})");
  REQUIRE(L.status == 201);
  auto doc = get(r, "/lotteries/mid").doc();
  CHECK(doc["outcomes"]["frame"]["labels"].size() == 3);
  CHECK(doc["outcomes"]["ranking"] == json::array({"$100", "$50", "$0"}));

  auto bad = post(r, "/lotteries",
                  R"({"outcomes":{"frame":"O"},"bpa":{"frame":"O","focal":[{"set":["$50"],"mass":0.4}]}})");
  CHECK(bad.status == 422);
  CHECK(bad.doc()["code"] == "validation_error");
  CHECK(bad.doc()["details"]["invariant"] == "bpa.mass_sum");

  auto clash = post(r, "/lotteries", io::to_json(corpus::thousand_balls().urn2).dump());
  CHECK(clash.status == 422);
  CHECK(clash.doc()["details"]["invariant"] == "registry.unique_id");
  auto gen = post(r, "/lotteries",
                  R"({"outcomes":{"frame":{"id":"P","labels":["a","b"]}},"bpa":{"frame":"P","focal":[{"set":["a","b"],"mass":1}]}})");
  CHECK(gen.status == 201);
  CHECK(gen.doc()["id"].get<std::string>().rfind("L-", 0) == 0);

  CHECK(del(r, "/lotteries/mid").status == 204);
  CHECK(get(r, "/lotteries/mid").status == 404);
  CHECK(del(r, "/lotteries/mid").status == 404);
  CHECK(put(r, "/assessments/x", R"({"model":{"kind":"table"}})").status == 400);
}

TEST_CASE("error classes") {
  Running r(temp_store());
  auto nf = get(r, "/sessions/s-nope");
  CHECK(nf.status == 404);
  CHECK(nf.doc()["code"] == "not_found");
  CHECK(nf.doc().contains("message"));
  CHECK(nf.doc().contains("details"));
  auto mal = post(r, "/evaluate", "{not json");
  CHECK(mal.status == 400);
  CHECK(mal.doc()["code"] == "malformed_input");
  CHECK(mal.doc()["details"]["invariant"] == "json.syntax");
  auto missing = post(r, "/evaluate", "{}");
  CHECK(missing.status == 400);
  auto route = get(r, "/nowhere");
  CHECK(route.status == 404);
  CHECK(route.doc()["code"] == "not_found");
  json eps = money_session_body(0.01);
  eps["epsilon"] = 2.0;
  auto v = post(r, "/sessions", eps.dump());
  CHECK(v.status == 422);
  CHECK(v.doc()["details"]["invariant"] == "elicitation.epsilon");
}

TEST_CASE("session flow, sequence conflicts and restart durability") {
  const auto dir = temp_store();
  std::string id;
  json before;
  SyntheticDm dm(corpus::money_table(0.2, 0.7));
  {
    Running r(dir);
    auto created = post(r, "/sessions", money_session_body(0.005).dump());
    REQUIRE(created.status == 201);
    id = created.doc()["id"];
    CHECK(created.doc()["owner"] == "tester");
    CHECK(created.doc()["state"]["sequence"] == 0);

    auto nq = get(r, "/sessions/" + id + "/next-query").doc();
    CHECK(nq["query"]["probe_u"] == 0.0);
    auto first = post(r, "/sessions/" + id + "/responses",
                      R"({"sequence":0,"response":"target_preferred"})");
    CHECK(first.status == 200);
    auto dup = post(r, "/sessions/" + id + "/responses",
                    R"({"sequence":0,"response":"target_preferred"})");
    CHECK(dup.status == 409);
    CHECK(dup.doc()["code"] == "sequence_conflict");
    CHECK(post(r, "/sessions/" + id + "/responses", R"({"sequence":1,"response":"maybe"})").status == 400);

    drive(r, id, dm, 5);
    before = get(r, "/sessions/" + id).doc();
    CHECK(before["state"]["sequence"] == 6);
  }
  {
    Running r(dir);
    auto after = get(r, "/sessions/" + id).doc();
    CHECK(after["state"] == before["state"]);
    CHECK(get(r, "/sessions/" + id + "/transcript").doc()["entries"].size() == 6);
    drive(r, id, dm);
    auto a = get(r, "/sessions/" + id + "/assessment").doc();
    CHECK(a["done"] == true);
    CHECK(a["consistency"]["ok"] == true);
    const auto& e = a["estimates"][0];
    CHECK(std::fabs(e["u_a"].get<double>() - 0.2) <= 0.005);
    CHECK(std::fabs(e["v_a"].get<double>() - 0.7) <= 0.005);
    CHECK(std::fabs(e["alpha"].get<double>() - 0.8) <= 0.02);
    CHECK(std::fabs(e["beta"].get<double>() - 0.7) <= 0.02);
    CHECK(e["queries"].get<std::size_t>() <= query_bound(0.005));
    auto closed = post(r, "/sessions/" + id + "/responses",
                       json{{"sequence", a["estimates"][0]["queries"]}, {"response", "incomparable"}}.dump());
    CHECK(closed.status == 409);
    auto list = get(r, "/sessions").doc();
    REQUIRE(list["sessions"].size() == 1);
    CHECK(list["sessions"][0]["done"] == true);
  }
}

TEST_CASE("inconsistent answers are rejected and not persisted") {
  const auto dir = temp_store();
  Running r(dir);
  std::string id = post(r, "/sessions", money_session_body(0.01).dump()).doc()["id"];
  const char* answers[] = {"target_preferred", "probe_preferred", "incomparable", "target_preferred"};
  for (int i = 0; i < 4; ++i) {
    REQUIRE(post(r, "/sessions/" + id + "/responses",
                 json{{"sequence", i}, {"response", answers[i]}}.dump())
                .status == 200);
  }
  // u = 0.375 lies below an "incomparable" at 0.5; "probe preferred" contradicts it.
  auto bad = post(r, "/sessions/" + id + "/responses", R"({"sequence":4,"response":"probe_preferred"})");
  CHECK(bad.status == 422);
  CHECK(bad.doc()["code"] == "inconsistent_response");
  CHECK(bad.doc()["details"]["conflicting"].size() == 2);
  CHECK(get(r, "/sessions/" + id).doc()["state"]["sequence"] == 4);
  SessionService reloaded(dir);
  CHECK(reloaded.session_record(id)["state"]["sequence"] == 4);
}

TEST_CASE("a torn final transcript line is not a committed response") {
  const auto dir = temp_store();
  std::string id;
  {
    SessionService s(dir);
    id = s.create_session(money_session_body(0.01))["id"];
    s.post_response(id, json{{"sequence", 0}, {"response", "target_preferred"}});
  }
  {
    std::ofstream out(dir / "sessions" / encode_id(id) / "transcript.jsonl", std::ios::app);
    out << R"({"sequence":1,"query":{"target_ind)";
  }
  SessionService s(dir);
  CHECK(s.session_record(id)["state"]["sequence"] == 1);
}

TEST_CASE("concurrent double submission commits once") {
  Running r(temp_store());
  std::string id = post(r, "/sessions", money_session_body(0.01).dump()).doc()["id"];
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      auto c = r.client();
      auto res = c.Post("/sessions/" + id + "/responses", R"({"sequence":0,"response":"target_preferred"})",
                        "application/json");
      if (res && res->status == 200) ++ok;
      if (res && res->status == 409) ++conflict;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflict == 7);
  CHECK(get(r, "/sessions/" + id + "/transcript").doc()["entries"].size() == 1);
}

TEST_CASE("independent sessions") {
  Running r(temp_store());
  std::string a = post(r, "/sessions", money_session_body(0.01).dump()).doc()["id"];
  std::string b = post(r, "/sessions", money_session_body(0.01).dump()).doc()["id"];
  CHECK(a != b);
  std::thread ta([&] { drive(r, a, SyntheticDm(corpus::money_table(0.2, 0.7))); });
  std::thread tb([&] { drive(r, b, SyntheticDm(corpus::money_table(0.4, 0.4))); });
  ta.join();
  tb.join();
  auto ea = get(r, "/sessions/" + a + "/assessment").doc()["estimates"][0];
  auto eb = get(r, "/sessions/" + b + "/assessment").doc()["estimates"][0];
  CHECK(std::fabs(ea["u_a"].get<double>() - 0.2) <= 0.01);
  CHECK(std::fabs(eb["u_a"].get<double>() - 0.4) <= 0.01);
  CHECK(del(r, "/sessions/" + a).status == 204);
  CHECK(get(r, "/sessions/" + a).status == 404);
}

TEST_CASE("store ids with unusual characters") {
  WorkspaceStore s(temp_store());
  s.put(DocumentKind::frame, "../$weird id", json{{"x", 1}});
  CHECK(s.list(DocumentKind::frame) == std::vector<std::string>{"../$weird id"});
  CHECK((*s.get(DocumentKind::frame, "../$weird id"))["x"] == 1);
  CHECK(decode_id(encode_id("a%b/c")) == "a%b/c");
}
