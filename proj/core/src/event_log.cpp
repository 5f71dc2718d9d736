#include "elvis/event_log.hpp"

#include <istream>
#include <ostream>

#include "elvis/error.hpp"

namespace elvis {

using nlohmann::json;

json frame_to_json(const SemanticFrame& frame) {
  json j;
  j["action"] = frame.action ? json(*frame.action) : json(nullptr);
  j["slots"] = json::object();
  for (const auto& [slot, value] : frame.slot_values) j["slots"][slot] = value;
  return j;
}

SemanticFrame frame_from_json(const json& j) {
  SemanticFrame f;
  if (!j.at("action").is_null()) f.action = j.at("action").get<std::string>();
  for (const auto& [slot, value] : j.at("slots").items()) f.slot_values[slot] = value.get<std::string>();
  return f;
}

namespace {

struct PayloadToJson {
  json& j;
  void operator()(const event::AgentPrompt& e) const {
    j["state"] = e.state;
    j["text"] = e.text;
  }
  void operator()(const event::UserUtterance& e) const {
    j["state"] = e.state;
    j["text"] = e.text;
    j["intended"] = frame_to_json(e.intended);
    j["recognized"] = e.recognized ? frame_to_json(*e.recognized) : json(nullptr);
    j["concept_accuracy"] = e.concept_accuracy;
  }
  void operator()(const event::Timeout& e) const {
    j["state"] = e.state;
    j["consecutive"] = e.consecutive;
  }
  void operator()(const event::AsrRejection& e) const {
    j["state"] = e.state;
    j["consecutive"] = e.consecutive;
  }
  void operator()(const event::HelpRequest& e) const { j["state"] = e.state; }
  void operator()(const event::BargeIn& e) const {
    j["state"] = e.state;
    j["word_offset"] = e.word_offset;
  }
  void operator()(const event::AppAccess& e) const {
    j["operation"] = e.operation;
    j["ok"] = e.ok;
  }
  void operator()(const event::TaskEnd& e) const {
    j["status"] = e.status;
    j["observed_avm"] = e.observed_avm;
  }
};

}  // namespace

json event_to_json(const DialogEvent& event) {
  json j;
  j["type"] = "event";
  j["tick"] = event.tick;
  j["kind"] = std::string(to_string(event.kind()));
  std::visit(PayloadToJson{j}, event.payload);
  return j;
}

DialogEvent event_from_json(const json& j) {
  const auto kind = parse_event_kind(j.at("kind").get<std::string>());
  if (!kind) throw LogFormatError("unknown event kind '" + j.at("kind").get<std::string>() + "'");
  DialogEvent e;
  e.tick = j.at("tick").get<std::uint64_t>();
  switch (*kind) {
    case EventKind::kAgentPrompt:
      e.payload = event::AgentPrompt{j.at("state").get<std::string>(), j.at("text").get<std::string>()};
      break;
    case EventKind::kUserUtterance: {
      event::UserUtterance u;
      u.state = j.at("state").get<std::string>();
      u.text = j.at("text").get<std::string>();
      u.intended = frame_from_json(j.at("intended"));
      if (!j.at("recognized").is_null()) u.recognized = frame_from_json(j.at("recognized"));
      u.concept_accuracy = j.at("concept_accuracy").get<double>();
      e.payload = std::move(u);
      break;
    }
    case EventKind::kTimeout:
      e.payload = event::Timeout{j.at("state").get<std::string>(), j.at("consecutive").get<int>()};
      break;
    case EventKind::kAsrRejection:
      e.payload = event::AsrRejection{j.at("state").get<std::string>(), j.at("consecutive").get<int>()};
      break;
    case EventKind::kHelpRequest:
      e.payload = event::HelpRequest{j.at("state").get<std::string>()};
      break;
    case EventKind::kBargeIn:
      e.payload = event::BargeIn{j.at("state").get<std::string>(), j.at("word_offset").get<std::size_t>()};
      break;
    case EventKind::kAppAccess:
      e.payload = event::AppAccess{j.at("operation").get<std::string>(), j.at("ok").get<bool>()};
      break;
    case EventKind::kTaskEnd:
      e.payload = event::TaskEnd{j.at("status").get<std::string>(),
                                 j.at("observed_avm").get<std::map<std::string, std::string>>()};
      break;
  }
  return e;
}

json record_to_json(const SessionRecord& r) {
  json j;
  j["type"] = "record";
  j["strategy"] = std::string(to_string(r.strategy));
  j["task"] = r.task;
  j["subject"] = r.subject;
  j["scenarios"] = r.scenarios;
  j["end_status"] = r.end_status;
  j["user_turns"] = r.user_turns;
  j["system_turns"] = r.system_turns;
  j["elapsed_ticks"] = r.elapsed_ticks;
  j["timeout_prompts"] = r.timeout_prompts;
  j["asr_rejections"] = r.asr_rejections;
  j["help_requests"] = r.help_requests;
  j["barge_ins"] = r.barge_ins;
  j["mean_recognition"] = r.mean_recognition ? json(*r.mean_recognition) : json(nullptr);
  j["observed_avm"] = r.observed_avm;
  j["attributes_total"] = r.attributes_total;
  j["attributes_agreed"] = r.attributes_agreed;
  j["survey"] = r.survey.scores;
  j["cumulative_satisfaction"] = r.cumulative_satisfaction;
  return j;
}

SessionRecord record_from_json(const json& j) {
  SessionRecord r;
  const auto strategy = parse_strategy(j.at("strategy").get<std::string>());
  if (!strategy) throw LogFormatError("unknown strategy '" + j.at("strategy").get<std::string>() + "'");
  r.strategy = *strategy;
  r.task = j.at("task").get<int>();
  r.subject = j.at("subject").get<std::string>();
  r.scenarios = j.at("scenarios").get<std::vector<std::string>>();
  r.end_status = j.at("end_status").get<std::string>();
  r.user_turns = j.at("user_turns").get<int>();
  r.system_turns = j.at("system_turns").get<int>();
  r.elapsed_ticks = j.at("elapsed_ticks").get<std::uint64_t>();
  r.timeout_prompts = j.at("timeout_prompts").get<int>();
  r.asr_rejections = j.at("asr_rejections").get<int>();
  r.help_requests = j.at("help_requests").get<int>();
  r.barge_ins = j.at("barge_ins").get<int>();
  if (!j.at("mean_recognition").is_null()) r.mean_recognition = j.at("mean_recognition").get<double>();
  r.observed_avm = j.at("observed_avm").get<std::map<std::string, std::string>>();
  r.attributes_total = j.at("attributes_total").get<int>();
  r.attributes_agreed = j.at("attributes_agreed").get<int>();
  r.survey.scores = j.at("survey").get<std::array<int, kSurveyQuestions>>();
  r.cumulative_satisfaction = j.at("cumulative_satisfaction").get<int>();
  if (r.cumulative_satisfaction != r.survey.cumulative()) {
    throw LogFormatError("cumulative satisfaction does not match the survey scores");
  }
  return r;
}

void write_log(std::ostream& out, const ExperimentLog& log) {
  json header;
  header["type"] = "header";
  header["schema"] = kLogSchema;
  header["config_hash"] = log.header.config_hash;
  header["seed"] = log.header.seed;
  header["config"] = log.header.config;
  out << header.dump() << '\n';
  for (const auto& s : log.sessions) {
    json session;
    session["type"] = "session";
    session["strategy"] = std::string(to_string(s.info.strategy));
    session["task"] = s.info.task;
    session["subject"] = s.info.subject;
    session["scenarios"] = s.info.scenarios;
    session["seed"] = s.seed;
    out << session.dump() << '\n';
    for (const auto& e : s.events) out << event_to_json(e).dump() << '\n';
    json survey;
    survey["type"] = "survey";
    survey["scores"] = s.survey.scores;
    out << survey.dump() << '\n';
    out << record_to_json(s.record).dump() << '\n';
  }
}

ExperimentLog read_log(std::istream& in) {
  ExperimentLog log;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  SessionLog* current = nullptr;
  enum class Expect { kSession, kEventOrSurvey, kRecord } expect = Expect::kSession;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") throw LogFormatError("expected a header line");
        if (j.at("schema").get<std::string>() != kLogSchema) {
          throw LogFormatError("unsupported schema '" + j.at("schema").get<std::string>() + "'");
        }
        log.header.config_hash = j.at("config_hash").get<std::string>();
        log.header.seed = j.at("seed").get<std::uint64_t>();
        log.header.config = j.at("config");
        have_header = true;
        continue;
      }
      if (type == "session") {
        if (expect != Expect::kSession) throw LogFormatError("session line before the previous record");
        SessionLog s;
        const auto strategy = parse_strategy(j.at("strategy").get<std::string>());
        if (!strategy) throw LogFormatError("unknown strategy");
        s.info.strategy = *strategy;
        s.info.task = j.at("task").get<int>();
        s.info.subject = j.at("subject").get<std::string>();
        s.info.scenarios = j.at("scenarios").get<std::vector<std::string>>();
        s.seed = j.at("seed").get<std::uint64_t>();
        log.sessions.push_back(std::move(s));
        current = &log.sessions.back();
        expect = Expect::kEventOrSurvey;
      } else if (type == "event") {
        if (expect != Expect::kEventOrSurvey) throw LogFormatError("event outside a session");
        current->events.push_back(event_from_json(j));
      } else if (type == "survey") {
        if (expect != Expect::kEventOrSurvey) throw LogFormatError("survey outside a session");
        current->survey.scores = j.at("scores").get<std::array<int, kSurveyQuestions>>();
        expect = Expect::kRecord;
      } else if (type == "record") {
        if (expect != Expect::kRecord) throw LogFormatError("record without a survey");
        current->record = record_from_json(j);
        expect = Expect::kSession;
      } else {
        throw LogFormatError("unknown line type '" + type + "'");
      }
    } catch (const LogFormatError& e) {
      throw LogFormatError(where + e.what());
    } catch (const json::exception& e) {
      throw LogFormatError(where + e.what());
    }
  }
  if (!have_header) throw LogFormatError("log is empty");
  if (expect != Expect::kSession) throw LogFormatError("log ends inside a session");
  return log;
}

}  // namespace elvis
