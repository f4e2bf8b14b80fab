#include "bf/error.hpp"

namespace bf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::malformed:
      return "malformed_input";
    case ErrorCode::validation:
      return "validation_error";
    case ErrorCode::not_found:
      return "not_found";
    case ErrorCode::frame_mismatch:
      return "frame_mismatch";
    case ErrorCode::total_conflict:
      return "total_conflict";
    case ErrorCode::inconsistent:
      return "inconsistent_response";
    case ErrorCode::stale:
      return "stale_query";
    case ErrorCode::conflict_state:
      return "sequence_conflict";
    case ErrorCode::io:
      return "io_error";
  }
  return "error";
}

}  // namespace bf
