#include "bf/service.hpp"

#include <atomic>
#include <iostream>
#include <random>

#include "httplib.h"

namespace bf {
namespace {

std::string random_id(const char* prefix) {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  static const char* hex = "0123456789abcdef";
  std::string id = prefix;
  std::uint64_t x = rng();
  for (int i = 0; i < 12; ++i, x >>= 4) id.push_back(hex[x & 15]);
  return id;
}

const io::json& member(const io::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::malformed, std::string("request body: missing \"") + key + "\"");
  }
  return j.at(key);
}

io::json body_of(const httplib::Request& req) { return io::parse(req.body); }

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::malformed:
      return 400;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::stale:
    case ErrorCode::conflict_state:
      return 409;
    case ErrorCode::validation:
    case ErrorCode::frame_mismatch:
    case ErrorCode::total_conflict:
    case ErrorCode::inconsistent:
      return 422;
    case ErrorCode::io:
      return 500;
  }
  return 500;
}

struct SessionService::Snapshot {
  std::string id;
  std::string owner;
  std::string created;
  std::string updated;
  ElicitationSession session;
};

struct SessionService::Slot {
  std::mutex write_mu;
  std::shared_ptr<const Snapshot> snap;

  std::shared_ptr<const Snapshot> load() const { return std::atomic_load(&snap); }
  void store(std::shared_ptr<const Snapshot> s) { std::atomic_store(&snap, std::move(s)); }
};

SessionService::SessionService(std::filesystem::path store_dir) : store_(std::move(store_dir)) {
  for (const auto& id : store_.sessions()) {
    try {
      auto meta = *store_.session_meta(id);
      io::FrameRegistry reg;
      auto config = io::elicitation_config_from_json(meta.at("config"), reg);
      std::vector<TranscriptEntry> entries;
      for (const auto& line : store_.transcript(id)) {
        entries.push_back(io::transcript_entry_from_json(line));
      }
      auto session = ElicitationSession::replay(std::move(config), entries);
      std::string updated = entries.empty() ? meta.value("created", "") : entries.back().timestamp;
      auto slot = std::make_shared<Slot>();
      slot->store(std::make_shared<const Snapshot>(
          Snapshot{id, meta.value("owner", ""), meta.value("created", ""), updated, std::move(session)}));
      sessions_.emplace(id, std::move(slot));
    } catch (const std::exception& e) {
      std::cerr << "bf: skipping session '" << id << "': " << e.what() << "\n";
    }
  }
}

SessionService::~SessionService() = default;

std::shared_ptr<SessionService::Slot> SessionService::slot(const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::not_found, "unknown session '" + id + "'");
  return it->second;
}

io::json SessionService::record_json(const Snapshot& s) {
  return io::json{{"id", s.id},
                  {"owner", s.owner},
                  {"created", s.created},
                  {"updated", s.updated},
                  {"config", io::to_json(s.session.config())},
                  {"state", io::session_state(s.session)}};
}

// --- sessions -----------------------------------------------------------------

io::json SessionService::create_session(const io::json& body) {
  auto reg = registry();
  auto config = io::elicitation_config_from_json(body, reg);
  ElicitationSession session(config);
  std::string owner;
  if (body.contains("owner")) {
    if (!body["owner"].is_string()) throw Error(ErrorCode::malformed, "owner: expected a string");
    owner = body["owner"].get<std::string>();
  }
  const std::string id = random_id("s-");
  const std::string now = utc_timestamp();
  store_.create_session(id, io::json{{"id", id},
                                     {"owner", owner},
                                     {"created", now},
                                     {"config", io::to_json(session.config())}});
  auto slot = std::make_shared<Slot>();
  auto snap = std::make_shared<const Snapshot>(Snapshot{id, owner, now, now, std::move(session)});
  slot->store(snap);
  {
    std::unique_lock lock(sessions_mu_);
    sessions_.emplace(id, slot);
  }
  return record_json(*snap);
}

io::json SessionService::session_record(const std::string& id) const {
  return record_json(*slot(id)->load());
}

io::json SessionService::list_sessions() const {
  std::vector<std::shared_ptr<Slot>> slots;
  {
    std::shared_lock lock(sessions_mu_);
    for (const auto& [id, s] : sessions_) slots.push_back(s);
  }
  io::json out = io::json::array();
  for (const auto& s : slots) {
    auto snap = s->load();
    out.push_back(io::json{{"id", snap->id},
                           {"owner", snap->owner},
                           {"created", snap->created},
                           {"updated", snap->updated},
                           {"sequence", snap->session.sequence()},
                           {"done", snap->session.done()}});
  }
  return io::json{{"sessions", out}};
}

io::json SessionService::next_query(const std::string& id) const {
  auto snap = slot(id)->load();
  const auto& s = snap->session;
  auto q = s.next_query();
  return io::json{{"sequence", s.sequence()},
                  {"done", !q.has_value()},
                  {"query", q ? io::to_json(*q, s.sequence()) : io::json(nullptr)}};
}

io::json SessionService::post_response(const std::string& id, const io::json& body) {
  const io::json& seq_j = member(body, "sequence");
  if (!seq_j.is_number_integer()) throw Error(ErrorCode::malformed, "sequence: expected an integer");
  const io::json& resp_j = member(body, "response");
  auto response = resp_j.is_string() ? parse_response(resp_j.get<std::string>()) : std::nullopt;
  if (!response) {
    throw Error(ErrorCode::malformed,
                "response: expected target_preferred, incomparable or probe_preferred");
  }

  auto sl = slot(id);
  std::lock_guard lock(sl->write_mu);
  auto cur = sl->load();
  const long long expected = static_cast<long long>(cur->session.sequence());
  if (seq_j.get<long long>() != expected) {
    throw Error(ErrorCode::conflict_state,
                "sequence " + std::to_string(seq_j.get<long long>()) + " does not match; expected " +
                    std::to_string(expected),
                "session.sequence");
  }
  auto q = cur->session.next_query();
  if (!q) throw Error(ErrorCode::stale, "session '" + id + "' is complete", "session.open");

  ElicitationSession next = cur->session;
  const std::string now = utc_timestamp();
  next.record_response(*q, *response, now);
  store_.append_transcript(id, io::to_json(next.transcript().back(), next, static_cast<std::size_t>(expected)));
  auto snap = std::make_shared<const Snapshot>(
      Snapshot{cur->id, cur->owner, cur->created, now, std::move(next)});
  sl->store(snap);
  return record_json(*snap);
}

io::json SessionService::session_assessment(const std::string& id) const {
  auto snap = slot(id)->load();
  const auto& s = snap->session;
  auto A = s.assessment();
  io::json estimates = io::json::array();
  for (const auto& e : s.estimates()) estimates.push_back(io::to_json(e));
  return io::json{{"done", s.done()},
                  {"assessment", io::to_json(A)},
                  {"estimates", estimates},
                  {"consistency", io::to_json(check_consistency(A.spec(), s.config().epsilon))}};
}

io::json SessionService::session_transcript(const std::string& id) const {
  auto snap = slot(id)->load();
  const auto& s = snap->session;
  io::json entries = io::json::array();
  for (std::size_t i = 0; i < s.transcript().size(); ++i) {
    entries.push_back(io::to_json(s.transcript()[i], s, i));
  }
  return io::json{{"entries", entries}};
}

void SessionService::delete_session(const std::string& id) {
  std::unique_lock lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::not_found, "unknown session '" + id + "'");
  std::lock_guard wl(it->second->write_mu);
  store_.remove_session(id);
  sessions_.erase(it);
}

// --- evaluation ---------------------------------------------------------------

io::FrameRegistry SessionService::registry() const {
  io::FrameRegistry reg;
  for (const auto& id : store_.list(DocumentKind::frame)) {
    if (auto doc = store_.get(DocumentKind::frame, id)) io::space_from_json(*doc, reg);
  }
  return reg;
}

BfLottery SessionService::resolve_lottery(const io::json& j, io::FrameRegistry& reg) const {
  if (j.is_string()) {
    auto doc = store_.get(DocumentKind::lottery, j.get<std::string>());
    if (!doc) throw Error(ErrorCode::not_found, "unknown lottery '" + j.get<std::string>() + "'");
    return io::lottery_from_json(*doc, reg);
  }
  return io::lottery_from_json(j, reg);
}

UtilityAssessment SessionService::resolve_assessment(const io::json& j, io::FrameRegistry& reg,
                                                     const OutcomeOrder& fallback) const {
  if (j.is_string()) {
    auto doc = store_.get(DocumentKind::assessment, j.get<std::string>());
    if (!doc) throw Error(ErrorCode::not_found, "unknown assessment '" + j.get<std::string>() + "'");
    return io::assessment_from_json(*doc, reg, &fallback);
  }
  return io::assessment_from_json(j, reg, &fallback);
}

io::json SessionService::evaluate(const io::json& body) const {
  auto reg = registry();
  auto L = resolve_lottery(member(body, "lottery"), reg);
  auto A = resolve_assessment(member(body, "assessment"), reg, L.outcomes);
  return io::to_json(bf::evaluate(L, A));
}

io::json SessionService::compare(const io::json& body) const {
  auto reg = registry();
  auto L = resolve_lottery(member(body, "left"), reg);
  auto R = resolve_lottery(member(body, "right"), reg);
  auto A = resolve_assessment(member(body, "assessment"), reg, L.outcomes);
  std::vector<Criterion> only;
  if (body.contains("criteria")) {
    if (!body["criteria"].is_array()) throw Error(ErrorCode::malformed, "criteria: expected an array");
    for (const auto& c : body["criteria"]) {
      auto k = c.is_string() ? parse_criterion(c.get<std::string>()) : std::nullopt;
      if (!k) throw Error(ErrorCode::malformed, "criteria: unknown criterion " + c.dump());
      only.push_back(*k);
    }
  }
  return io::to_json(compare_all(L, R, A, only));
}

io::json SessionService::reduce(const io::json& body) const {
  auto reg = registry();
  const io::json& c = body.is_object() && body.contains("compound") ? body["compound"] : body;
  return io::to_json(reduce_compound(io::compound_from_json(c, reg)));
}

// --- documents ----------------------------------------------------------------

io::json SessionService::put_document(DocumentKind kind, std::optional<std::string> id,
                                      const io::json& body, bool must_be_new) {
  auto reg = registry();
  io::json doc;
  std::string key;
  if (kind == DocumentKind::frame) {
    io::FrameRegistry fresh;
    auto space = io::space_from_json(body, fresh);
    key = space->id();
    if (id && *id != key) {
      throw validation_error("store.id_matches", "frame id '" + key + "' does not match the path");
    }
    doc = io::to_json(*space);
  } else {
    io::json content = body;
    if (content.is_object() && content.contains("id")) {
      if (!content["id"].is_string()) throw Error(ErrorCode::malformed, "id: expected a string");
      if (id && *id != content["id"].get<std::string>()) {
        throw validation_error("store.id_matches", "document id does not match the path");
      }
      id = content["id"].get<std::string>();
      content.erase("id");
    }
    key = id ? *id : random_id(kind == DocumentKind::lottery ? "L-" : "A-");
    doc = kind == DocumentKind::lottery ? io::to_json(io::lottery_from_json(content, reg))
                                        : io::to_json(io::assessment_from_json(content, reg));
  }
  std::lock_guard lock(docs_mu_);
  if (must_be_new && store_.get(kind, key)) {
    throw Error(ErrorCode::conflict_state,
                std::string(to_string(kind)) + " '" + key + "' already exists", "store.unique_id");
  }
  store_.put(kind, key, doc);
  return io::json{{"id", key}, {"document", doc}};
}

io::json SessionService::get_document(DocumentKind kind, const std::string& id) const {
  auto doc = store_.get(kind, id);
  if (!doc) throw Error(ErrorCode::not_found, "unknown " + std::string(to_string(kind)) + " '" + id + "'");
  return *doc;
}

io::json SessionService::list_documents(DocumentKind kind) const {
  return io::json{{"ids", store_.list(kind)}};
}

void SessionService::delete_document(DocumentKind kind, const std::string& id) {
  std::lock_guard lock(docs_mu_);
  if (!store_.remove(kind, id)) {
    throw Error(ErrorCode::not_found, "unknown " + std::string(to_string(kind)) + " '" + id + "'");
  }
}

// --- routes -------------------------------------------------------------------

namespace {

using Handler = std::function<io::json(const httplib::Request&)>;

httplib::Server::Handler guarded(Handler fn, int ok_status = 200) {
  return [fn = std::move(fn), ok_status](const httplib::Request& req, httplib::Response& res) {
    try {
      io::json out = fn(req);
      res.status = ok_status;
      if (ok_status != 204) res.set_content(out.dump(), "application/json");
    } catch (const Error& e) {
      res.status = http_status(e.code());
      res.set_content(io::error_body(e).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(io::error_body(e).dump(), "application/json");
    }
  };
}

}  // namespace

void SessionService::install(httplib::Server& srv) {
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    Error e(res.status == 404 ? ErrorCode::not_found : ErrorCode::malformed,
            "no route for " + req.method + " " + req.path);
    res.set_content(io::error_body(e).dump(), "application/json");
  });

  srv.Get("/health", guarded([](const httplib::Request&) {
            return io::json{{"status", "ok"}, {"schema", io::kSchemaVersion}};
          }));

  srv.Post("/sessions", guarded([this](const httplib::Request& r) { return create_session(body_of(r)); }, 201));
  srv.Get("/sessions", guarded([this](const httplib::Request&) { return list_sessions(); }));
  srv.Get(R"(/sessions/([^/]+))",
          guarded([this](const httplib::Request& r) { return session_record(r.matches[1]); }));
  srv.Delete(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& r) {
               delete_session(r.matches[1]);
               return io::json();
             }, 204));
  srv.Get(R"(/sessions/([^/]+)/next-query)",
          guarded([this](const httplib::Request& r) { return next_query(r.matches[1]); }));
  srv.Post(R"(/sessions/([^/]+)/responses)", guarded([this](const httplib::Request& r) {
             return post_response(r.matches[1], body_of(r));
           }));
  srv.Get(R"(/sessions/([^/]+)/assessment)",
          guarded([this](const httplib::Request& r) { return session_assessment(r.matches[1]); }));
  srv.Get(R"(/sessions/([^/]+)/transcript)",
          guarded([this](const httplib::Request& r) { return session_transcript(r.matches[1]); }));

  srv.Post("/evaluate", guarded([this](const httplib::Request& r) { return evaluate(body_of(r)); }));
  srv.Post("/compare", guarded([this](const httplib::Request& r) { return compare(body_of(r)); }));
  srv.Post("/reduce", guarded([this](const httplib::Request& r) { return reduce(body_of(r)); }));

  for (DocumentKind kind : {DocumentKind::frame, DocumentKind::lottery, DocumentKind::assessment}) {
    const std::string base = "/" + std::string(to_string(kind));
    const std::string item = base + "/([^/]+)";
    srv.Get(base, guarded([this, kind](const httplib::Request&) { return list_documents(kind); }));
    srv.Post(base, guarded([this, kind](const httplib::Request& r) {
               return put_document(kind, std::nullopt, body_of(r), true);
             }, 201));
    srv.Get(item, guarded([this, kind](const httplib::Request& r) {
              return get_document(kind, r.matches[1]);
            }));
    srv.Put(item, guarded([this, kind](const httplib::Request& r) {
              return put_document(kind, std::string(r.matches[1]), body_of(r), false);
            }));
    srv.Delete(item, guarded([this, kind](const httplib::Request& r) {
                 delete_document(kind, r.matches[1]);
                 return io::json();
               }, 204));
  }
}

int serve(const ServeOptions& options) {
  SessionService service(options.store);
  httplib::Server srv;
  service.install(srv);
  if (!srv.bind_to_port(options.host, options.port)) {
    std::cerr << R"({"code":"io_error","message":"cannot bind )" << options.host << ":" << options.port
              << R"(","details":{}})" << "\n";
    return 1;
  }
  std::cerr << "bf: serving " << options.store.string() << " on http://" << options.host << ":"
            << options.port << "\n";
  return srv.listen_after_bind() ? 0 : 1;
}

}  // namespace bf
