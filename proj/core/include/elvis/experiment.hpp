#pragma once

// Experiment configuration and the batch runner: every subject of every arm
// performs every task once, each session seeded from the root seed.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elvis/channel.hpp"
#include "elvis/emai.hpp"
#include "elvis/event_log.hpp"
#include "elvis/session.hpp"
#include "elvis/simuser.hpp"
#include "elvis/strategies.hpp"

namespace elvis {

struct TaskSpec {
  int number = 1;
  std::string mailbox;  // path, relative to the config file
  std::vector<ScenarioKey> scenarios;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct ArmConfig {
  StrategyKind strategy = StrategyKind::kSystemInitiative;
  std::vector<SubjectProfile> subjects;

  friend bool operator==(const ArmConfig&, const ArmConfig&) = default;
};

struct OutputPaths {
  std::string log = "elvis-log.jsonl";
  std::string report = "report.txt";
  std::string csv = "report.csv";

  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  int turn_cap = 100;
  std::map<std::string, std::string> strategies;  // "SI"/"MI" -> strategy document path
  TickCosts ticks;
  AsrModel asr;
  UserModel user;
  SurveyModel survey;
  /// Per-attribute value distributions for chance agreement.
  std::map<std::string, std::vector<double>> chance;
  std::vector<TaskSpec> tasks;
  std::vector<ArmConfig> arms;
  OutputPaths output;
  /// Directory relative paths resolve against; not part of the document.
  std::filesystem::path base_dir;

  std::vector<ScenarioKey> scenario_keys() const;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.seed == b.seed && a.turn_cap == b.turn_cap && a.strategies == b.strategies && a.ticks == b.ticks &&
           a.asr == b.asr && a.user == b.user && a.survey == b.survey && a.chance == b.chance &&
           a.tasks == b.tasks && a.arms == b.arms && a.output == b.output;
  }
};

/// Validates while parsing; throws ConfigError naming the JSON path.
ExperimentConfig parse_config(const nlohmann::json& doc, std::filesystem::path base_dir = {});
/// Reads a config file; comments are allowed.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every field written explicitly, defaults included.
nlohmann::json config_to_json(const ExperimentConfig& config);
/// FNV-1a of the canonical document, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Everything one simulated conversation needs.
struct SessionSetup {
  const StrategyMachine* machine = nullptr;
  StrategyKind strategy = StrategyKind::kSystemInitiative;
  SubjectProfile profile;
  int task = 1;
  std::vector<ScenarioKey> scenarios;
  std::vector<Message> mailbox;
  AsrModel asr;
  UserModel user;
  SurveyModel survey;
  SessionOptions options;
  std::uint64_t seed = 0;
};

SessionLog simulate_session(const SessionSetup& setup);

/// Seed of the session for (strategy, subject, task) under a root seed.
std::uint64_t session_seed(std::uint64_t root, StrategyKind strategy, const std::string& subject, int task);

/// Strategy machine for an arm: the configured document if any, else the
/// built-in definition.
StrategyMachine strategy_for(const ExperimentConfig& config, StrategyKind kind);

/// Runs every (subject, task) pair, optionally for one arm only. Sessions
/// are ordered by subject id, then task.
ExperimentLog run_experiment(const ExperimentConfig& config, std::optional<StrategyKind> arm = std::nullopt);

}  // namespace elvis
