#pragma once

// HTTP/JSON front end over a WorkspaceStore. Route list: docs/openapi.yaml.
//
// Each session is single-writer: a per-session mutex serializes responses,
// and the sequence number in every POST must equal the number of responses
// already committed. Readers take the current immutable snapshot without
// waiting on writers.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "bf/store.hpp"

namespace httplib {
class Server;
}

namespace bf {

/// Status class for an error code: 400, 404, 409, 422 or 500.
int http_status(ErrorCode code) noexcept;

class SessionService {
 public:
  /// Loads every stored session by replaying its transcript.
  explicit SessionService(std::filesystem::path store_dir);
  ~SessionService();

  void install(httplib::Server& server);

  WorkspaceStore& store() noexcept { return store_; }

  // Route bodies, callable without HTTP. Each returns the response document
  // and throws bf::Error on failure.
  io::json create_session(const io::json& body);
  io::json session_record(const std::string& id) const;
  io::json list_sessions() const;
  io::json next_query(const std::string& id) const;
  io::json post_response(const std::string& id, const io::json& body);
  io::json session_assessment(const std::string& id) const;
  io::json session_transcript(const std::string& id) const;
  void delete_session(const std::string& id);

  io::json evaluate(const io::json& body) const;
  io::json compare(const io::json& body) const;
  io::json reduce(const io::json& body) const;

  io::json put_document(DocumentKind kind, std::optional<std::string> id, const io::json& body,
                        bool must_be_new);
  io::json get_document(DocumentKind kind, const std::string& id) const;
  io::json list_documents(DocumentKind kind) const;
  void delete_document(DocumentKind kind, const std::string& id);

 private:
  struct Snapshot;
  struct Slot;

  std::shared_ptr<Slot> slot(const std::string& id) const;
  io::FrameRegistry registry() const;
  BfLottery resolve_lottery(const io::json& j, io::FrameRegistry& reg) const;
  UtilityAssessment resolve_assessment(const io::json& j, io::FrameRegistry& reg,
                                       const OutcomeOrder& fallback) const;
  static io::json record_json(const Snapshot& s);

  WorkspaceStore store_;
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::mutex docs_mu_;
};

struct ServeOptions {
  std::filesystem::path store;
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Blocks until the server stops. Returns nonzero if it could not bind.
int serve(const ServeOptions& options);

}  // namespace bf
