#pragma once

// Bisection elicitation of (u_a, v_a) for deterministic lotteries on sets of
// outcomes, by comparing each set against probabilistic reference lotteries
// [O2, (u, 1-u)].
//
// Per target two brackets are kept: [lo, hi] around u_a (target preferred
// below, not above) and around 1 - v_a (probe preferred above, not below).
// The first two probes are u = 0 and u = 1; after that the lower bracket is
// halved until its width is at most epsilon, then the upper one.

#include <optional>
#include <string>
#include <vector>

#include "bf/error.hpp"
#include "bf/utility.hpp"

namespace bf {

enum class DmResponse { target_preferred, incomparable, probe_preferred };

std::string_view to_string(DmResponse r) noexcept;
std::optional<DmResponse> parse_response(std::string_view s) noexcept;

struct Query {
  std::size_t target_index;
  SubsetMask target;
  double probe_u;
};

struct TranscriptEntry {
  std::size_t target_index;
  double probe_u;
  DmResponse response;
  std::string timestamp;
};

/// Raised when an answer contradicts an earlier one; carries both.
class InconsistentResponse : public Error {
 public:
  InconsistentResponse(const std::string& message, std::vector<TranscriptEntry> conflicting)
      : Error(ErrorCode::inconsistent, message, "elicitation.monotone_responses"),
        conflicting_(std::move(conflicting)) {}

  const std::vector<TranscriptEntry>& conflicting() const noexcept { return conflicting_; }

 private:
  std::vector<TranscriptEntry> conflicting_;
};

struct Bracket {
  double lo = 0.0;
  double hi = 1.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
};

struct TargetState {
  SubsetMask target;
  Bracket lower;  // around u_a
  Bracket upper;  // around 1 - v_a
  bool probed_zero = false;
  bool probed_one = false;
  std::size_t queries = 0;
};

inline constexpr double kDefaultEpsilon = 0.01;

struct ElicitationConfig {
  OutcomeOrder outcomes;
  std::vector<double> singleton_utilities;  // by outcome frame index
  std::vector<SubsetMask> targets;          // non-singleton outcome sets
  double epsilon = kDefaultEpsilon;
};

struct TargetEstimate {
  SubsetMask target;
  double u_a;
  double upper;  // 1 - v_a
  std::optional<double> alpha;  // absent when worst and best are tied
  std::optional<double> beta;
  std::size_t queries;
};

class ElicitationSession {
 public:
  explicit ElicitationSession(ElicitationConfig config);

  /// Rebuilds a session by re-recording every entry; throws like
  /// record_response on a corrupt transcript.
  static ElicitationSession replay(ElicitationConfig config,
                                   const std::vector<TranscriptEntry>& transcript);

  const ElicitationConfig& config() const noexcept { return config_; }
  const std::vector<TargetState>& targets() const noexcept { return targets_; }
  const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }

  /// Number of recorded responses; the expected sequence number of the next.
  std::size_t sequence() const noexcept { return transcript_.size(); }

  /// Empty once every bracket is at most epsilon wide.
  std::optional<Query> next_query() const;
  bool done() const { return !next_query().has_value(); }

  /// `q` must be the outstanding query (Error(stale) otherwise).
  void record_response(const Query& q, DmResponse r, std::string timestamp = {});

  /// Bracket midpoints; if they cross, both collapse to their mean.
  std::vector<TargetEstimate> estimates() const;

  /// Explicit-table assessment built from the estimates.
  UtilityAssessment assessment() const;

 private:
  ElicitationConfig config_;
  std::vector<TargetState> targets_;
  std::vector<TranscriptEntry> transcript_;
};

/// Query count bound per target: 2*ceil(log2(1/epsilon)) + 2.
std::size_t query_bound(double epsilon);

struct Indices {
  double alpha;
  double beta;
};

/// Inverts u_a = alpha*u_worst + (1-alpha)*u_best and the same with beta for
/// 1 - v_a. Values up to `slack` outside [u_worst, u_best] are clamped.
Indices solve_indices(double u_a, double v_a, double u_worst, double u_best, double slack = 1e-9);

struct Violation {
  std::string rule;
  std::string message;
  std::vector<std::string> entries;  // the entries responsible, by set label
};

struct ConsistencyReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Monotone singleton utilities, per-set simplex, w = 0 on singletons and
/// dominance between entries: if worst(a) >= worst(b) and best(a) >= best(b)
/// in the ranking then u_a >= u_b and 1-v_a >= 1-v_b (within `tol`).
ConsistencyReport check_consistency(const AssessmentSpec& spec, double tol = 1e-9);

/// Answers queries from a hidden assessment: target preferred when
/// u <= u_a, probe preferred when u >= 1 - v_a, incomparable otherwise.
class SyntheticDm {
 public:
  explicit SyntheticDm(UtilityAssessment truth) : truth_(std::move(truth)) {}
  DmResponse respond(const Query& q) const;
  const UtilityAssessment& truth() const noexcept { return truth_; }

 private:
  UtilityAssessment truth_;
};

struct SyntheticRun {
  ElicitationSession session;
  std::vector<TargetEstimate> estimates;
  UtilityAssessment recovered;
};

SyntheticRun run_synthetic(ElicitationConfig config, const SyntheticDm& dm);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace bf
