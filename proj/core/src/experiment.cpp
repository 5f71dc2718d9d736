#include "elvis/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "elvis/error.hpp"
#include "elvis/machine_io.hpp"
#include "elvis/paradise.hpp"
#include "json_util.hpp"

namespace elvis {

using nlohmann::json;
using detail::Node;

std::vector<ScenarioKey> ExperimentConfig::scenario_keys() const {
  std::vector<ScenarioKey> keys;
  for (const auto& t : tasks) keys.insert(keys.end(), t.scenarios.begin(), t.scenarios.end());
  return keys;
}

namespace {

int positive_int(const Node& n) {
  const long long v = n.integer();
  if (v < 1 || v > 1'000'000) n.fail("must be a positive integer");
  return static_cast<int>(v);
}

double finite(const Node& n) {
  const double v = n.number();
  if (!std::isfinite(v)) n.fail("must be finite");
  return v;
}

double positive(const Node& n) {
  const double v = finite(n);
  if (!(v > 0.0)) n.fail("must be positive");
  return v;
}

double non_negative(const Node& n) {
  const double v = finite(n);
  if (v < 0.0) n.fail("must be non-negative");
  return v;
}

RecognitionRates parse_rates(const Node& n) {
  return {n.at("concept_error_rate").probability(), n.at("rejection_rate").probability()};
}

json rates_to_json(const RecognitionRates& r) {
  return {{"concept_error_rate", r.concept_error_rate}, {"rejection_rate", r.rejection_rate}};
}

ScenarioKey parse_scenario(const Node& n) {
  ScenarioKey k;
  k.id = n.at("id").str();
  if (k.id.empty()) n.at("id").fail("must not be empty");
  for (const auto& term : n.at("selection").items()) {
    SelectionTerm t{term.at("field").str(), term.at("value").str()};
    if (t.field != "sender" && t.field != "subject") term.at("field").fail("must be \"sender\" or \"subject\"");
    if (t.value.empty()) term.at("value").fail("must not be empty");
    k.selection.push_back(std::move(t));
  }
  if (k.selection.empty()) n.at("selection").fail("needs at least one selection criterion");
  for (const auto& [name, value] : n.at("targets").members()) {
    k.targets[name] = value.str();
    if (k.targets[name].empty()) value.fail("must not be empty");
  }
  if (k.targets.empty()) n.at("targets").fail("needs at least one target attribute");
  return k;
}

SubjectProfile parse_profile(const Node& n) {
  SubjectProfile p;
  p.id = n.at("id").str();
  if (p.id.empty()) n.at("id").fail("must not be empty");
  p.base_expertise = n.at("base_expertise").probability();
  p.learning_rate = n.at("learning_rate").probability();
  p.barge_in_propensity = n.at("barge_in_propensity").probability();
  p.hesitation = n.at("hesitation").probability();
  p.satisfaction_bias = finite(n.at("satisfaction_bias"));
  return p;
}

}  // namespace

ExperimentConfig parse_config(const json& doc, std::filesystem::path base_dir) {
  const Node root(doc, "");
  if (!doc.is_object()) root.fail("expected an object");
  static const std::set<std::string> kKnown{"seed", "turn_cap", "strategies", "ticks", "asr", "user_model",
                                            "survey_model", "chance", "tasks", "arms", "output"};
  for (const auto& [key, node] : root.members()) {
    if (!kKnown.count(key)) node.fail("unknown field");
  }

  ExperimentConfig c;
  c.base_dir = std::move(base_dir);
  c.seed = root.at("seed").unsigned_integer();
  c.turn_cap = positive_int(root.at("turn_cap"));

  if (root.has("strategies")) {
    for (const auto& [name, path] : root.at("strategies").members()) {
      if (!parse_strategy(name)) path.fail("strategy must be \"SI\" or \"MI\"");
      c.strategies[std::string(to_string(*parse_strategy(name)))] = path.str();
    }
  }

  const Node ticks = root.at("ticks");
  c.ticks.prompt = ticks.at("prompt").unsigned_integer();
  c.ticks.app_access = ticks.at("app_access").unsigned_integer();
  c.ticks.user_utterance = ticks.at("user_utterance").unsigned_integer();
  c.ticks.timeout_wait = ticks.at("timeout_wait").unsigned_integer();

  const Node asr = root.at("asr");
  c.asr.seed = asr.at("seed").unsigned_integer();
  c.asr.expertise_sensitivity = non_negative(asr.at("expertise_sensitivity"));
  c.asr.fallback = parse_rates(asr.at("fallback"));
  for (const auto& [id, rates] : asr.at("grammars").members()) c.asr.rates[id] = parse_rates(rates);

  const Node user = root.at("user_model");
  c.user.expertise_bump = user.at("expertise_bump").probability();
  c.user.help_propensity = user.at("help_propensity").probability();
  c.user.help_task_decay = user.at("help_task_decay").probability();
  c.user.si_explicit_silence_scale = user.at("si_explicit_silence_scale").probability();
  c.user.sender_preference = user.at("sender_preference").probability();
  c.user.patience_turns = positive_int(user.at("patience_turns"));
  c.user.recall_rate = user.at("recall_rate").probability();
  c.user.max_repeats = static_cast<int>(user.at("max_repeats").unsigned_integer());
  c.user.max_failed_reads = positive_int(user.at("max_failed_reads"));
  c.user.exploration = user.at("exploration").boolean();
  c.user.exploration_rate = user.at("exploration_rate").probability();

  const Node survey = root.at("survey_model");
  c.survey.recognition_mean = finite(survey.at("recognition_mean"));
  c.survey.recognition_sd = positive(survey.at("recognition_sd"));
  c.survey.turns_mean = finite(survey.at("turns_mean"));
  c.survey.turns_sd = positive(survey.at("turns_sd"));
  c.survey.pace_mean = finite(survey.at("pace_mean"));
  c.survey.pace_sd = positive(survey.at("pace_sd"));
  c.survey.noise_sd = non_negative(survey.at("noise_sd"));

  if (root.has("chance")) {
    for (const auto& [attribute, dist] : root.at("chance").members()) {
      std::vector<double> freq;
      double total = 0.0;
      for (const auto& f : dist.items()) {
        freq.push_back(non_negative(f));
        total += freq.back();
      }
      if (freq.empty() || !(total > 0.0)) dist.fail("needs at least one positive frequency");
      c.chance[attribute] = std::move(freq);
    }
  }

  std::set<int> numbers;
  std::set<std::string> scenario_ids;
  for (const auto& t : root.at("tasks").items()) {
    TaskSpec task;
    task.number = positive_int(t.at("task"));
    if (!numbers.insert(task.number).second) t.at("task").fail("duplicate task number");
    task.mailbox = t.at("mailbox").str();
    for (const auto& s : t.at("scenarios").items()) {
      task.scenarios.push_back(parse_scenario(s));
      if (!scenario_ids.insert(task.scenarios.back().id).second) s.at("id").fail("duplicate scenario id");
    }
    if (task.scenarios.empty()) t.at("scenarios").fail("needs at least one scenario");
    c.tasks.push_back(std::move(task));
  }
  if (c.tasks.empty()) root.at("tasks").fail("needs at least one task");

  std::set<std::string> subject_ids;
  std::set<StrategyKind> seen_arms;
  for (const auto& a : root.at("arms").items()) {
    ArmConfig arm;
    const auto kind = parse_strategy(a.at("strategy").str());
    if (!kind) a.at("strategy").fail("must be \"SI\" or \"MI\"");
    if (!seen_arms.insert(*kind).second) a.at("strategy").fail("duplicate arm");
    arm.strategy = *kind;
    for (const auto& s : a.at("subjects").items()) {
      arm.subjects.push_back(parse_profile(s));
      if (!subject_ids.insert(arm.subjects.back().id).second) s.at("id").fail("duplicate subject id");
    }
    if (arm.subjects.empty()) a.at("subjects").fail("needs at least one subject");
    c.arms.push_back(std::move(arm));
  }
  if (c.arms.empty()) root.at("arms").fail("needs at least one arm");

  if (root.has("output")) {
    const Node out = root.at("output");
    c.output.log = out.str_or("log", c.output.log);
    c.output.report = out.str_or("report", c.output.report);
    c.output.csv = out.str_or("csv", c.output.csv);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  return parse_config(doc, path.parent_path());
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["turn_cap"] = c.turn_cap;
  j["strategies"] = c.strategies;
  j["ticks"] = {{"prompt", c.ticks.prompt},
                {"app_access", c.ticks.app_access},
                {"user_utterance", c.ticks.user_utterance},
                {"timeout_wait", c.ticks.timeout_wait}};
  json grammars = json::object();
  for (const auto& [id, r] : c.asr.rates) grammars[id] = rates_to_json(r);
  j["asr"] = {{"seed", c.asr.seed},
              {"expertise_sensitivity", c.asr.expertise_sensitivity},
              {"fallback", rates_to_json(c.asr.fallback)},
              {"grammars", grammars}};
  j["user_model"] = {{"expertise_bump", c.user.expertise_bump},
                     {"help_propensity", c.user.help_propensity},
                     {"help_task_decay", c.user.help_task_decay},
                     {"si_explicit_silence_scale", c.user.si_explicit_silence_scale},
                     {"sender_preference", c.user.sender_preference},
                     {"patience_turns", c.user.patience_turns},
                     {"recall_rate", c.user.recall_rate},
                     {"max_repeats", c.user.max_repeats},
                     {"max_failed_reads", c.user.max_failed_reads},
                     {"exploration", c.user.exploration},
                     {"exploration_rate", c.user.exploration_rate}};
  j["survey_model"] = {{"recognition_mean", c.survey.recognition_mean}, {"recognition_sd", c.survey.recognition_sd},
                       {"turns_mean", c.survey.turns_mean},             {"turns_sd", c.survey.turns_sd},
                       {"pace_mean", c.survey.pace_mean},               {"pace_sd", c.survey.pace_sd},
                       {"noise_sd", c.survey.noise_sd}};
  j["chance"] = json::object();
  for (const auto& [attribute, freq] : c.chance) j["chance"][attribute] = freq;
  j["tasks"] = json::array();
  for (const auto& t : c.tasks) {
    json task{{"task", t.number}, {"mailbox", t.mailbox}, {"scenarios", json::array()}};
    for (const auto& k : t.scenarios) {
      json sel = json::array();
      for (const auto& s : k.selection) sel.push_back({{"field", s.field}, {"value", s.value}});
      task["scenarios"].push_back({{"id", k.id}, {"selection", sel}, {"targets", k.targets}});
    }
    j["tasks"].push_back(std::move(task));
  }
  j["arms"] = json::array();
  for (const auto& a : c.arms) {
    json arm{{"strategy", std::string(to_string(a.strategy))}, {"subjects", json::array()}};
    for (const auto& p : a.subjects) {
      arm["subjects"].push_back({{"id", p.id},
                                 {"base_expertise", p.base_expertise},
                                 {"learning_rate", p.learning_rate},
                                 {"barge_in_propensity", p.barge_in_propensity},
                                 {"hesitation", p.hesitation},
                                 {"satisfaction_bias", p.satisfaction_bias}});
    }
    j["arms"].push_back(std::move(arm));
  }
  j["output"] = {{"log", c.output.log}, {"report", c.output.report}, {"csv", c.output.csv}};
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  return fmt::format("{:016x}", fnv1a64(config_to_json(config).dump()));
}

std::uint64_t session_seed(std::uint64_t root, StrategyKind strategy, const std::string& subject, int task) {
  return Rng(root).derive(fmt::format("session|{}|{}|{}", to_string(strategy), subject, task)).seed();
}

namespace {

std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string first_words(const std::vector<std::string>& w, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n && i < w.size(); ++i) out += (i ? " " : "") + w[i];
  return out;
}

}  // namespace

SessionLog simulate_session(const SessionSetup& setup) {
  if (!setup.machine) throw PreconditionError("session setup has no strategy machine");
  DialogSession session(*setup.machine, setup.mailbox, setup.options);
  SimulatedUser user(setup.strategy, setup.profile, setup.task, setup.scenarios, setup.user);
  const Rng base(setup.seed);
  Rng channel = base.derive("channel").derive(setup.asr.seed);
  Rng user_rng = base.derive("user");
  Rng barge = base.derive("barge");
  Rng survey_rng = base.derive("survey");
  Rng recall = base.derive("recall");

  AgentTurn turn = session.start();
  std::string status;
  while (true) {
    AgentTurn heard = turn;
    std::optional<std::size_t> cut;
    if (!turn.finished) {
      const auto w = words(turn.text);
      // Nobody cuts off the message they are listening to.
      const bool message = turn.cause == AgentTurn::Cause::kResponse && turn.operation_ok &&
                           (turn.operation == "read" || turn.operation == "next" || turn.operation == "previous" ||
                            turn.operation == "repeat");
      cut = maybe_barge_in(w.size(), turn.barge_in_enabled && !message, setup.profile.barge_in_propensity, barge);
      if (cut) heard.text = first_words(w, *cut);
    }
    user.hear(heard, &recall);
    if (session.finished()) break;
    const UserAction action = user.next_action(heard, user_rng);
    if (action.kind == UserAction::Kind::kHangUp) {
      status = "hang-up";
      break;
    }
    // A barge-in is logged only when the user goes on to speak.
    if (cut && action.kind != UserAction::Kind::kSilence) session.barge_in(*cut);
    if (action.kind == UserAction::Kind::kSilence) {
      turn = session.silence();
    } else if (action.kind == UserAction::Kind::kHelp) {
      turn = session.help();
    } else {
      const auto& grammar = session.state_spec().grammar;
      const std::string text = realize(action.frame, grammar);
      RecognitionResult result;  // out-of-grammar speech is rejected
      if (conforms(action.frame, grammar)) {
        result = recognize(action.frame, grammar, session.vocabulary(), setup.asr, channel, user.expertise());
      }
      turn = session.utter(text, action.frame, result);
    }
  }
  session.close(user.observed_avm(), status);

  SessionLog log;
  log.info = SessionInfo{setup.strategy, setup.task, setup.profile.id, {}};
  for (const auto& k : setup.scenarios) log.info.scenarios.push_back(k.id);
  log.seed = setup.seed;
  log.events = session.events();
  SessionRecord record = extract_record(log.info, log.events, SurveyScores{}, setup.scenarios);

  SessionMetrics m;
  m.mean_recognition = record.mean_recognition.value_or(0.0);
  m.user_turns = record.user_turns;
  m.asr_rejections = record.asr_rejections;
  m.timeout_prompts = record.timeout_prompts;
  m.help_requests = record.help_requests;
  m.elapsed_ticks = record.elapsed_ticks;
  m.task_completion = record.task_success();
  m.expertise = user.mean_expertise();
  log.survey = survey(m, setup.profile, setup.survey, survey_rng);
  record.survey = log.survey;
  record.cumulative_satisfaction = log.survey.cumulative();
  log.record = std::move(record);
  return log;
}

StrategyMachine strategy_for(const ExperimentConfig& config, StrategyKind kind) {
  auto it = config.strategies.find(std::string(to_string(kind)));
  if (it == config.strategies.end()) return build_strategy(kind);
  return load_machine(config.base_dir / it->second);
}

ExperimentLog run_experiment(const ExperimentConfig& config, std::optional<StrategyKind> arm_filter) {
  ExperimentLog out;
  out.header.config = config_to_json(config);
  out.header.config_hash = config_hash(config);
  out.header.seed = config.seed;

  std::map<int, std::vector<Message>> mailboxes;
  for (const auto& t : config.tasks) mailboxes[t.number] = load_mailbox(config.base_dir / t.mailbox);

  struct Pending {
    std::string subject;
    int task;
    SessionSetup setup;
  };
  std::vector<Pending> pending;
  std::map<StrategyKind, StrategyMachine> machines;
  for (const auto& arm : config.arms) {
    if (arm_filter && arm.strategy != *arm_filter) continue;
    machines.emplace(arm.strategy, strategy_for(config, arm.strategy));
  }
  for (const auto& arm : config.arms) {
    if (arm_filter && arm.strategy != *arm_filter) continue;
    for (const auto& profile : arm.subjects) {
      for (const auto& task : config.tasks) {
        SessionSetup s;
        s.machine = &machines.at(arm.strategy);
        s.strategy = arm.strategy;
        s.profile = profile;
        s.task = task.number;
        s.scenarios = task.scenarios;
        s.mailbox = mailboxes.at(task.number);
        s.asr = config.asr;
        s.user = config.user;
        s.survey = config.survey;
        s.options.turn_cap = config.turn_cap;
        s.options.ticks = config.ticks;
        s.seed = session_seed(config.seed, arm.strategy, profile.id, task.number);
        pending.push_back({profile.id, task.number, std::move(s)});
      }
    }
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.subject, a.task) < std::tie(b.subject, b.task);
  });
  for (const auto& p : pending) out.sessions.push_back(simulate_session(p.setup));
  return out;
}

}  // namespace elvis
