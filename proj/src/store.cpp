#include "bf/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace bf {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_failure(const std::string& what, const fs::path& p) {
  throw Error(ErrorCode::io, what + " '" + p.string() + "': " + std::strerror(errno));
}

void fsync_path(const fs::path& p, int flags) {
  const int fd = ::open(p.c_str(), flags);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) io_failure("cannot read", p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_id(const std::string& id) {
  if (id.empty() || id.size() > 200) {
    throw validation_error("store.id", "ids must have 1 to 200 characters");
  }
}

}  // namespace

std::string_view to_string(DocumentKind k) noexcept {
  switch (k) {
    case DocumentKind::frame:
      return "frames";
    case DocumentKind::lottery:
      return "lotteries";
    case DocumentKind::assessment:
      return "assessments";
  }
  return "documents";
}

std::string encode_id(std::string_view id) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '-' || c == '_') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

std::string decode_id(std::string_view name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    unsigned value = 0;
    if (name[i] == '%' && i + 2 < name.size() &&
        std::sscanf(std::string(name.substr(i + 1, 2)).c_str(), "%2x", &value) == 1) {
      out.push_back(static_cast<char>(value));
      i += 2;
    } else {
      out.push_back(name[i]);
    }
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  const fs::path tmp = path.string() + ".tmp" + std::to_string(rng() % 1000000000);
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) io_failure("cannot create", tmp);
  std::size_t off = 0;
  while (off < content.size()) {
    const ssize_t n = ::write(fd, content.data() + off, content.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      ::unlink(tmp.c_str());
      io_failure("cannot write", tmp);
    }
    off += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    ::unlink(tmp.c_str());
    io_failure("cannot rename onto", path);
  }
  fsync_path(path.parent_path(), O_RDONLY | O_DIRECTORY);
}

WorkspaceStore::WorkspaceStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  for (auto sub : {"frames", "lotteries", "assessments", "sessions"}) {
    fs::create_directories(root_ / sub, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create store directory '" + (root_ / sub).string() + "': " + ec.message());
  }
}

fs::path WorkspaceStore::doc_path(DocumentKind kind, const std::string& id) const {
  check_id(id);
  return root_ / std::string(to_string(kind)) / (encode_id(id) + ".json");
}

fs::path WorkspaceStore::session_dir(const std::string& id) const {
  check_id(id);
  return root_ / "sessions" / encode_id(id);
}

void WorkspaceStore::put(DocumentKind kind, const std::string& id, const io::json& doc) {
  write_file_atomic(doc_path(kind, id), io::dump(doc) + "\n");
}

std::optional<io::json> WorkspaceStore::get(DocumentKind kind, const std::string& id) const {
  const auto p = doc_path(kind, id);
  if (!fs::exists(p)) return std::nullopt;
  return io::parse(read_file(p));
}

bool WorkspaceStore::remove(DocumentKind kind, const std::string& id) {
  std::error_code ec;
  return fs::remove(doc_path(kind, id), ec);
}

std::vector<std::string> WorkspaceStore::list(DocumentKind kind) const {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(root_ / std::string(to_string(kind)))) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && e.path().extension() == ".json") {
      ids.push_back(decode_id(name.substr(0, name.size() - 5)));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void WorkspaceStore::create_session(const std::string& id, const io::json& meta) {
  const auto dir = session_dir(id);
  std::error_code ec;
  if (!fs::create_directory(dir, ec)) {
    if (ec) throw Error(ErrorCode::io, "cannot create '" + dir.string() + "': " + ec.message());
    throw Error(ErrorCode::conflict_state, "session '" + id + "' already exists");
  }
  write_file_atomic(dir / "session.json", io::dump(meta) + "\n");
  fsync_path(dir.parent_path(), O_RDONLY | O_DIRECTORY);
}

std::optional<io::json> WorkspaceStore::session_meta(const std::string& id) const {
  const auto p = session_dir(id) / "session.json";
  if (!fs::exists(p)) return std::nullopt;
  return io::parse(read_file(p));
}

void WorkspaceStore::append_transcript(const std::string& id, const io::json& line) {
  append_line_durable(session_dir(id) / "transcript.jsonl", line.dump());
}

std::vector<io::json> WorkspaceStore::transcript(const std::string& id) const {
  return read_jsonl(session_dir(id) / "transcript.jsonl");
}

void append_line_durable(const fs::path& path, const std::string& line) {
  const std::string text = line + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) io_failure("cannot open", path);
  const ssize_t n = ::write(fd, text.data(), text.size());
  if (n != static_cast<ssize_t>(text.size())) {
    ::close(fd);
    io_failure("short write to", path);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_failure("cannot sync", path);
  }
  ::close(fd);
}

std::vector<io::json> read_jsonl(const fs::path& path) {
  std::vector<io::json> out;
  if (!fs::exists(path)) return out;
  const std::string text = read_file(path);
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    if (nl == std::string::npos) {
      try {
        out.push_back(io::parse(line));
      } catch (const Error&) {
        // torn final write: never acknowledged
      }
      break;
    }
    if (!line.empty()) out.push_back(io::parse(line));
    start = nl + 1;
  }
  return out;
}

bool WorkspaceStore::remove_session(const std::string& id) {
  std::error_code ec;
  return fs::remove_all(session_dir(id), ec) > 0;
}

std::vector<std::string> WorkspaceStore::sessions() const {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(root_ / "sessions")) {
    if (e.is_directory() && fs::exists(e.path() / "session.json")) {
      ids.push_back(decode_id(e.path().filename().string()));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace bf
