#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "elvis/error.hpp"
#include "elvis/experiment.hpp"
#include "elvis/report.hpp"
#include "paths.hpp"

using namespace elvis;

namespace {

nlohmann::json default_doc() { return config_to_json(load_config(test::default_config())); }

std::string config_error_path(const nlohmann::json& doc) {
  try {
    parse_config(doc, test::config_dir());
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "(no error)";
}

}  // namespace

TEST(Config, ShippedConfigLoads) {
  const auto c = load_config(test::default_config());
  EXPECT_EQ(c.tasks.size(), 3u);
  EXPECT_EQ(c.arms.size(), 2u);
  EXPECT_EQ(c.scenario_keys().size(), 6u);
  for (const auto& arm : c.arms) EXPECT_EQ(arm.subjects.size(), 6u);
}

TEST(Config, CanonicalRoundTrip) {
  const auto c = load_config(test::default_config());
  const auto doc = config_to_json(c);
  const auto back = parse_config(doc, c.base_dir);
  EXPECT_EQ(back, c);
  EXPECT_EQ(config_to_json(back), doc);
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);
  auto other = c;
  other.seed += 1;
  EXPECT_NE(config_hash(other), config_hash(c));
}

TEST(Config, ErrorsNameTheField) {
  auto doc = default_doc();
  doc.erase("turn_cap");
  EXPECT_EQ(config_error_path(doc), "/turn_cap");

  doc = default_doc();
  doc["arms"][1]["subjects"][2]["learning_rate"] = -0.5;
  EXPECT_EQ(config_error_path(doc), "/arms/1/subjects/2/learning_rate");

  doc = default_doc();
  doc["asr"]["grammars"]["mi"]["rejection_rate"] = 1.5;
  EXPECT_EQ(config_error_path(doc), "/asr/grammars/mi/rejection_rate");

  doc = default_doc();
  doc["tasks"][0]["scenarios"][1]["selection"][0]["field"] = "colour";
  EXPECT_EQ(config_error_path(doc), "/tasks/0/scenarios/1/selection/0/field");

  doc = default_doc();
  doc["surprise"] = 1;
  EXPECT_EQ(config_error_path(doc), "/surprise");

  doc = default_doc();
  doc["arms"][1]["strategy"] = "SI";
  EXPECT_EQ(config_error_path(doc), "/arms/1/strategy");
}

TEST(Config, CommentsAreAllowedAndMissingFilesReported) {
  EXPECT_THROW(load_config(test::config_dir() / "no-such-file.jsonc"), ConfigError);
}

TEST(Experiment, SessionSeedsAreStableAndDistinct) {
  const auto a = session_seed(1, StrategyKind::kSystemInitiative, "S1", 1);
  EXPECT_EQ(a, session_seed(1, StrategyKind::kSystemInitiative, "S1", 1));
  EXPECT_NE(a, session_seed(1, StrategyKind::kMixedInitiative, "S1", 1));
  EXPECT_NE(a, session_seed(1, StrategyKind::kSystemInitiative, "S1", 2));
  EXPECT_NE(a, session_seed(2, StrategyKind::kSystemInitiative, "S1", 1));
}

TEST(Experiment, FullRunShape) {
  const auto c = load_config(test::default_config());
  const auto log = run_experiment(c);
  ASSERT_EQ(log.sessions.size(), 36u);
  EXPECT_EQ(log.sessions.front().info.subject, "M1");
  EXPECT_EQ(log.sessions.back().info.subject, "S6");
  for (const auto& s : log.sessions) {
    EXPECT_EQ(s.info.scenarios.size(), 2u);
    EXPECT_EQ(s.events.back().kind(), EventKind::kTaskEnd);
    EXPECT_LE(s.record.user_turns, c.turn_cap);
    for (int v : s.survey.scores) {
      EXPECT_GE(v, 1);
      EXPECT_LE(v, 5);
    }
    EXPECT_EQ(s.record.cumulative_satisfaction, s.survey.cumulative());
  }
}

TEST(Experiment, OneArmIsASubsetOfTheFullRun) {
  const auto c = load_config(test::default_config());
  const auto full = run_experiment(c);
  const auto si = run_experiment(c, StrategyKind::kSystemInitiative);
  ASSERT_EQ(si.sessions.size(), 18u);
  for (std::size_t i = 0; i < si.sessions.size(); ++i) {
    EXPECT_EQ(si.sessions[i].record, full.sessions[18 + i].record);
  }
}

TEST(Report, SectionsAndCsv) {
  const auto c = load_config(test::default_config());
  const auto log = run_experiment(c);
  const auto r = make_report(log);
  for (const char* heading : {"Means by strategy and task", "Task success (kappa)", "ANOVA", "Performance function"}) {
    EXPECT_NE(r.text.find(heading), std::string::npos) << heading;
  }
  std::istringstream csv(r.csv);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "section,measure,group,statistic,value");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_GE(std::count(line.begin(), line.end(), ','), 4) << line;
  }
  EXPECT_GT(rows, 100);
}

TEST(Report, WarnsOnTooFewRecords) {
  const auto c = load_config(test::default_config());
  auto log = run_experiment(c, StrategyKind::kMixedInitiative);
  log.sessions.resize(1);
  const auto r = make_report(log);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.front().find("fewer than two records"), std::string::npos);
  log.sessions.resize(2);
  log.sessions[1] = log.sessions[0];
  EXPECT_NO_THROW(make_report(log));
}
