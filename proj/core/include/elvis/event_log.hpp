#pragma once

// Line-delimited JSON session logs. The first line is a header carrying the
// schema version, the run's config (and its hash) and the root seed; then,
// per session, a "session" line, one "event" line per DialogEvent, a
// "survey" line and a "record" line.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elvis/dialog.hpp"
#include "elvis/paradise.hpp"

namespace elvis {

inline constexpr const char* kLogSchema = "elvis-log/1";

struct LogHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  nlohmann::json config;  // canonical config document, null for chat logs
};

struct SessionLog {
  SessionInfo info;
  std::uint64_t seed = 0;
  std::vector<DialogEvent> events;
  SurveyScores survey;
  SessionRecord record;
};

struct ExperimentLog {
  LogHeader header;
  std::vector<SessionLog> sessions;
};

nlohmann::json frame_to_json(const SemanticFrame& frame);
SemanticFrame frame_from_json(const nlohmann::json& j);

nlohmann::json event_to_json(const DialogEvent& event);
DialogEvent event_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const SessionRecord& record);
SessionRecord record_from_json(const nlohmann::json& j);

void write_log(std::ostream& out, const ExperimentLog& log);
/// Throws LogFormatError naming the offending line.
ExperimentLog read_log(std::istream& in);

}  // namespace elvis
