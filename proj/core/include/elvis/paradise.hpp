#pragma once

// Evaluation toolkit: per-session records from event logs, kappa task
// success, z-normalization, least squares, the performance function and a
// main-effects ANOVA for the strategy x task x subject design.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elvis/dialog.hpp"
#include "elvis/simuser.hpp"
#include "elvis/strategies.hpp"

namespace elvis {

using Avm = std::map<std::string, std::string>;

// --- Records -------------------------------------------------------------------

struct SessionInfo {
  StrategyKind strategy = StrategyKind::kSystemInitiative;
  int task = 1;
  std::string subject;
  std::vector<std::string> scenarios;  // ScenarioKey ids
};

struct SessionRecord {
  StrategyKind strategy = StrategyKind::kSystemInitiative;
  int task = 1;
  std::string subject;
  std::vector<std::string> scenarios;
  std::string end_status;
  int user_turns = 0;
  int system_turns = 0;
  std::uint64_t elapsed_ticks = 0;
  int timeout_prompts = 0;
  int asr_rejections = 0;
  int help_requests = 0;
  int barge_ins = 0;
  std::optional<double> mean_recognition;  // absent when the user never spoke
  Avm observed_avm;
  int attributes_total = 0;
  int attributes_agreed = 0;
  SurveyScores survey;
  int cumulative_satisfaction = 0;

  double task_success() const;  // agreed / total, 0 when there are no attributes

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

/// Counts are taken from the event trace: system turns are agent prompts;
/// user turns are utterances plus help requests; elapsed time is the tick of
/// the last event. Throws LogFormatError unless the trace ends in task-end.
SessionRecord extract_record(const SessionInfo& info, std::span<const DialogEvent> events,
                             const SurveyScores& survey, std::span<const ScenarioKey> keys);

// --- Task success --------------------------------------------------------------

struct Agreement {
  std::vector<std::string> attributes;
  std::vector<bool> agree;

  std::size_t agreed() const;
  double proportion() const;
};

/// Per-attribute agreement between what was reported and the key.
/// Comparison uses normalize_value (case, punctuation). Missing attributes
/// disagree; an observed attribute the key lacks is a SchemaError.
Agreement task_success(const Avm& observed, const ScenarioKey& key);

/// The slice of a session AVM ("<scenario>:<attribute>") for one scenario.
Avm observed_for(const Avm& session_avm, const std::string& scenario_id);

struct KappaResult {
  double p_a = 0.0;
  double p_e = 0.0;
  double kappa = 0.0;
};

/// Throws UndefinedMetricError when p_e >= 1, PreconditionError for
/// probabilities outside [0, 1].
KappaResult kappa(double p_a, double p_e);

/// Sum of squared relative frequencies.
double chance_agreement(std::span<const double> frequencies);

/// Chance agreement averaged over the attributes of the corpus, weighting by
/// how often each attribute occurs. Attributes without an entry in
/// `distributions` fall back to a uniform agree/disagree split (0.5).
double corpus_chance_agreement(std::span<const Agreement> corpus,
                               const std::map<std::string, std::vector<double>>& distributions);

/// P(A) over every attribute of the corpus. Throws PreconditionError on an
/// empty corpus.
KappaResult kappa(std::span<const Agreement> corpus, double p_e);

// --- Normalization and regression ----------------------------------------------

struct Normalization {
  double mean = 0.0;
  double sd = 1.0;

  double apply(double x) const { return (x - mean) / sd; }
};

struct ZScored {
  std::vector<double> values;
  Normalization norm;
};

/// Population standard deviation. Throws NormalizationError for fewer than
/// two values or zero variance.
ZScored zscore(std::span<const double> values);

struct OlsFit {
  std::vector<std::string> names;
  std::vector<double> weights;
  double intercept = 0.0;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  double intercept_std_error = 0.0;
  double r_squared = 0.0;
  double sse = 0.0;
  std::size_t df_residual = 0;
};

/// Least squares with an intercept. `columns[j][i]` is predictor j on row i.
/// Solves the normal equations by Gauss-Jordan elimination with partial
/// pivoting; a column whose pivot vanishes is a linear combination of the
/// ones before it and is named in the SingularDesignError.
OlsFit ols_fit(const std::vector<std::vector<double>>& columns, std::span<const double> response,
               const std::vector<std::string>& names);

struct PerformanceModel {
  std::vector<std::string> factors;
  std::vector<Normalization> norms;
  std::vector<double> weights;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> t_stats;
  std::vector<double> p_values;
};

/// sum_i weight_i * N(x_i) + intercept. Throws SchemaError when a factor is
/// missing from `values`.
double apply_performance(const PerformanceModel& model, const std::map<std::string, double>& values);

/// Objective measures available as performance factors, in report order.
const std::vector<std::string>& objective_measures();

/// Value of a named measure ("Mean Recognition", "User Turns", "Kappa", ...)
/// for one record. Kappa uses the given chance agreement. nullopt when the
/// record has no value (mean recognition of a silent session).
std::optional<double> measure_value(const SessionRecord& record, std::string_view name, double p_e);

struct PerformanceFit {
  PerformanceModel model;
  std::vector<std::string> dropped;  // near-constant factors, with the reason
};

/// Regresses z-scored Cumulative Satisfaction on the z-scored factors.
/// Records missing any factor value are skipped. Factors whose standard
/// deviation is below `min_sd` are dropped and listed.
PerformanceFit fit_performance(std::span<const SessionRecord> records, const std::vector<std::string>& factors,
                               double p_e, double min_sd = 1e-6);

struct TwoStepFit {
  PerformanceFit full;
  std::optional<PerformanceFit> selected;  // nullopt when nothing is significant
  std::vector<std::string> significant;
};

/// Fit every factor, keep those with p < alpha, refit on the survivors.
TwoStepFit fit_two_step(std::span<const SessionRecord> records, const std::vector<std::string>& factors,
                        double p_e, double alpha = 0.05);

// --- ANOVA ---------------------------------------------------------------------

enum class AnovaFactor { kStrategy, kTask, kSubject };
std::string_view to_string(AnovaFactor factor);

struct AnovaObservation {
  std::string strategy;
  int task = 1;
  std::string subject;
  double value = 0.0;
};

struct AnovaResult {
  AnovaFactor factor = AnovaFactor::kStrategy;
  int df = 0;
  double ss = 0.0;
  double f_value = 0.0;
  double p_value = 1.0;
};

struct AnovaTable {
  std::vector<AnovaResult> effects;  // strategy, task, subject
  int df_residual = 0;
  double ss_residual = 0.0;
  double ss_total = 0.0;

  const AnovaResult& effect(AnovaFactor factor) const;
};

/// Main effects of strategy, task and subject (nested within strategy) with
/// no interaction terms. Requires a balanced design: every strategy has the
/// same number of subjects and every subject has the same number of
/// observations in every task. Throws UnbalancedDesignError otherwise, and
/// PreconditionError for fewer than two levels of a factor or no residual
/// degrees of freedom.
AnovaTable anova_main_effects(std::span<const AnovaObservation> observations);

/// One row of the table for a record measure. Records without a value for
/// the measure are dropped together with the rest of their subject's rows so
/// the design stays balanced.
AnovaResult anova_main_effects(std::span<const SessionRecord> records, std::string_view measure,
                               AnovaFactor factor, double p_e = 0.5);
AnovaTable anova_table(std::span<const SessionRecord> records, std::string_view measure, double p_e = 0.5);

/// Classic one-way ANOVA across groups.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

}  // namespace elvis
