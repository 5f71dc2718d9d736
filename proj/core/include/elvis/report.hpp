#pragma once

// Plain-text and CSV reports over a session log: group means, kappa, ANOVA
// tables and the fitted performance function.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elvis/event_log.hpp"
#include "elvis/paradise.hpp"

namespace elvis {

/// Records, scenario keys and chance agreement recovered from a log.
struct Corpus {
  std::vector<SessionRecord> records;
  std::vector<ScenarioKey> keys;  // empty when the log carries no config
  double p_e = 0.5;
  std::optional<KappaResult> kappa;
  std::optional<KappaResult> kappa_for(std::optional<StrategyKind> strategy) const;
  std::vector<Agreement> agreements(std::optional<StrategyKind> strategy = std::nullopt) const;
};

Corpus load_corpus(const ExperimentLog& log);

/// Mean of a measure over the records matching the strategy and task
/// filters; nullopt when no record has a value.
std::optional<double> group_mean(std::span<const SessionRecord> records, std::string_view measure,
                                 std::optional<StrategyKind> strategy, std::optional<int> task, double p_e);

/// Measures listed in the means table: the objective ones, then the survey.
const std::vector<std::string>& report_measures();

struct Report {
  std::string text;
  std::string csv;
  std::vector<std::string> warnings;
};

Report make_report(const ExperimentLog& log);

}  // namespace elvis
