#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bf {

enum class ErrorCode {
  malformed,       // unparseable input or a document of the wrong shape
  validation,      // an invariant of a domain type would be violated
  not_found,       // unknown id, label or variable
  frame_mismatch,  // operands live on different frames
  total_conflict,  // Dempster normalization constant is (numerically) zero
  inconsistent,    // elicitation answers contradict each other
  stale,           // response to a query that is not outstanding
  conflict_state,  // optimistic-concurrency sequence mismatch
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for the library. `invariant()` names the violated rule
/// when there is one, so callers (the HTTP service, the CLI) can report it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string invariant = {})
      : std::runtime_error(message), code_(code), invariant_(std::move(invariant)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  ErrorCode code_;
  std::string invariant_;
};

inline Error validation_error(const std::string& invariant, const std::string& message) {
  return Error(ErrorCode::validation, message, invariant);
}

}  // namespace bf
