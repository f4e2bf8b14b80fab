#pragma once

// Directory-backed JSON document store.
//
//   <root>/frames/<id>.json
//   <root>/lotteries/<id>.json
//   <root>/assessments/<id>.json
//   <root>/sessions/<id>/session.json      config, owner, creation time
//   <root>/sessions/<id>/transcript.jsonl  one committed response per line
//
// Ids are percent-encoded into file names, so any id is safe. Documents are
// replaced by write-temp-then-rename; transcript lines are appended and
// fsynced before append_transcript returns.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bf/json_io.hpp"

namespace bf {

enum class DocumentKind { frame, lottery, assessment };

std::string_view to_string(DocumentKind k) noexcept;  // the directory name

class WorkspaceStore {
 public:
  /// Creates the directory layout if missing; throws Error(io) if it cannot.
  explicit WorkspaceStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  void put(DocumentKind kind, const std::string& id, const io::json& doc);
  std::optional<io::json> get(DocumentKind kind, const std::string& id) const;
  bool remove(DocumentKind kind, const std::string& id);
  std::vector<std::string> list(DocumentKind kind) const;

  /// Fails with Error(conflict_state) if the session already exists.
  void create_session(const std::string& id, const io::json& meta);
  std::optional<io::json> session_meta(const std::string& id) const;
  void append_transcript(const std::string& id, const io::json& line);
  /// Committed lines. A torn final line (no newline, unparseable) is ignored.
  std::vector<io::json> transcript(const std::string& id) const;
  bool remove_session(const std::string& id);
  std::vector<std::string> sessions() const;

 private:
  std::filesystem::path doc_path(DocumentKind kind, const std::string& id) const;
  std::filesystem::path session_dir(const std::string& id) const;

  std::filesystem::path root_;
};

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Appends `line` and a newline, then fsyncs.
void append_line_durable(const std::filesystem::path& path, const std::string& line);

/// Parsed lines of a JSON-lines file; a torn final line is dropped.
std::vector<io::json> read_jsonl(const std::filesystem::path& path);

std::string encode_id(std::string_view id);
std::string decode_id(std::string_view name);

}  // namespace bf
