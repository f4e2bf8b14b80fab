#pragma once

// JSON encoding of frames, BPAs, lotteries, assessments, elicitation state
// and reports.
//
// Masks travel as label lists in frame order (any order is accepted on
// input). Joint states of a product frame are arrays of per-factor labels.
// Wherever a frame is expected, either an inline frame object or the id of a
// frame known to the registry may appear. Shape errors raise
// Error(malformed); domain invariants raise Error(validation) as usual.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "bf/elicitation.hpp"
#include "bf/report.hpp"

namespace bf::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "bf/1";

/// Named frames and product frames seen so far. Registering a different
/// frame under a known id is a validation error.
class FrameRegistry {
 public:
  void add(const FramePtr& f);
  void add(const ProductFramePtr& p);
  FramePtr frame(std::string_view id) const;               // throws not_found
  ProductFramePtr space(std::string_view id) const;        // throws not_found
  bool contains(std::string_view id) const;

 private:
  std::map<std::string, FramePtr, std::less<>> frames_;
  std::map<std::string, ProductFramePtr, std::less<>> spaces_;
};

/// Parses text; syntax errors raise Error(malformed).
json parse(std::string_view text);

json to_json(const Frame& f);
json to_json(const ProductFrame& p);
FramePtr frame_from_json(const json& j, FrameRegistry& reg);
/// Accepts a plain frame (lifted) or a product frame.
ProductFramePtr space_from_json(const json& j, FrameRegistry& reg);

json to_json(const SubsetMask& m);
SubsetMask mask_from_json(const json& j, const ProductFramePtr& space);

/// {"frame": id, "focal": [{"set", "mass"}]}.
json to_json(const Bpa& m);
Bpa bpa_from_json(const json& j, FrameRegistry& reg);

json to_json(const OutcomeOrder& o);
OutcomeOrder outcomes_from_json(const json& j, FrameRegistry& reg);

json to_json(const BfLottery& L);
BfLottery lottery_from_json(const json& j, FrameRegistry& reg);

json to_json(const CompoundLottery& c);
CompoundLottery compound_from_json(const json& j, FrameRegistry& reg);

json to_json(const ReferenceLottery& r);

json to_json(const AssessmentSpec& spec);
json to_json(const UtilityAssessment& A);
/// "outcomes" may be omitted when `fallback` supplies them.
AssessmentSpec assessment_spec_from_json(const json& j, FrameRegistry& reg,
                                         const OutcomeOrder* fallback = nullptr);
UtilityAssessment assessment_from_json(const json& j, FrameRegistry& reg,
                                       const OutcomeOrder* fallback = nullptr);

json to_json(const Evaluation& e);
json to_json(const Comparison& c);
json to_json(PreferenceVerdict v);

json to_json(const ElicitationConfig& c);
ElicitationConfig elicitation_config_from_json(const json& j, FrameRegistry& reg);
json to_json(const Query& q, std::size_t sequence);
/// One transcript line: {"sequence", "query", "response", "timestamp"}.
json to_json(const TranscriptEntry& e, const ElicitationSession& s, std::size_t sequence);
TranscriptEntry transcript_entry_from_json(const json& j);
json to_json(const TargetEstimate& e);
/// Brackets, estimates and the outstanding query.
json session_state(const ElicitationSession& s);
json to_json(const ConsistencyReport& r);

/// Error body {code, message, details}.
json error_body(const std::exception& e);

/// Stable text form: two-space indent, keys in insertion order.
std::string dump(const json& j);

}  // namespace bf::io
