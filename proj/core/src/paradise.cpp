#include "elvis/paradise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "elvis/channel.hpp"
#include "elvis/error.hpp"
#include "elvis/stats.hpp"

namespace elvis {

double SessionRecord::task_success() const {
  return attributes_total == 0 ? 0.0 : static_cast<double>(attributes_agreed) / attributes_total;
}

// --- Task success --------------------------------------------------------------

std::size_t Agreement::agreed() const {
  return static_cast<std::size_t>(std::count(agree.begin(), agree.end(), true));
}

double Agreement::proportion() const {
  return agree.empty() ? 0.0 : static_cast<double>(agreed()) / static_cast<double>(agree.size());
}

Agreement task_success(const Avm& observed, const ScenarioKey& key) {
  for (const auto& [attribute, value] : observed) {
    if (!key.targets.count(attribute)) {
      throw SchemaError("observed attribute '" + attribute + "' is not part of scenario " + key.id);
    }
  }
  Agreement out;
  for (const auto& [attribute, expected] : key.targets) {
    out.attributes.push_back(attribute);
    auto it = observed.find(attribute);
    out.agree.push_back(it != observed.end() && normalize_value(it->second) == normalize_value(expected));
  }
  return out;
}

Avm observed_for(const Avm& session_avm, const std::string& scenario_id) {
  Avm out;
  const std::string prefix = scenario_id + ":";
  for (const auto& [name, value] : session_avm) {
    if (name.starts_with(prefix)) out.emplace(name.substr(prefix.size()), value);
  }
  return out;
}

KappaResult kappa(double p_a, double p_e) {
  if (!(p_a >= 0.0 && p_a <= 1.0) || !(p_e >= 0.0 && p_e <= 1.0)) {
    throw PreconditionError("kappa needs probabilities in [0, 1]");
  }
  if (p_e >= 1.0) throw UndefinedMetricError("kappa is undefined when chance agreement is 1");
  return {p_a, p_e, (p_a - p_e) / (1.0 - p_e)};
}

double chance_agreement(std::span<const double> frequencies) {
  double total = 0.0;
  for (double f : frequencies) {
    if (f < 0.0) throw PreconditionError("frequencies must be non-negative");
    total += f;
  }
  if (total <= 0.0) throw PreconditionError("chance agreement needs a non-empty distribution");
  double sum = 0.0;
  for (double f : frequencies) sum += (f / total) * (f / total);
  return sum;
}

double corpus_chance_agreement(std::span<const Agreement> corpus,
                               const std::map<std::string, std::vector<double>>& distributions) {
  static const std::vector<double> kBinary{1.0, 1.0};
  double weighted = 0.0;
  std::size_t n = 0;
  for (const auto& a : corpus) {
    for (const auto& attribute : a.attributes) {
      auto it = distributions.find(attribute);
      weighted += chance_agreement(it == distributions.end() ? kBinary : it->second);
      ++n;
    }
  }
  if (n == 0) throw PreconditionError("chance agreement needs at least one attribute");
  return weighted / static_cast<double>(n);
}

KappaResult kappa(std::span<const Agreement> corpus, double p_e) {
  std::size_t agreed = 0;
  std::size_t total = 0;
  for (const auto& a : corpus) {
    agreed += a.agreed();
    total += a.agree.size();
  }
  if (total == 0) throw PreconditionError("kappa needs a non-empty corpus");
  return kappa(static_cast<double>(agreed) / static_cast<double>(total), p_e);
}

// --- Records -------------------------------------------------------------------

SessionRecord extract_record(const SessionInfo& info, std::span<const DialogEvent> events,
                             const SurveyScores& survey, std::span<const ScenarioKey> keys) {
  if (events.empty() || events.back().kind() != EventKind::kTaskEnd) {
    throw LogFormatError("session trace for " + info.subject + " task " + std::to_string(info.task) +
                         " does not end with task-end");
  }
  SessionRecord r;
  r.strategy = info.strategy;
  r.task = info.task;
  r.subject = info.subject;
  r.scenarios = info.scenarios;
  for (const auto& e : events) {
    switch (e.kind()) {
      case EventKind::kAgentPrompt: ++r.system_turns; break;
      case EventKind::kUserUtterance: ++r.user_turns; break;
      case EventKind::kHelpRequest:
        ++r.user_turns;
        ++r.help_requests;
        break;
      case EventKind::kTimeout: ++r.timeout_prompts; break;
      case EventKind::kAsrRejection: ++r.asr_rejections; break;
      case EventKind::kBargeIn: ++r.barge_ins; break;
      case EventKind::kAppAccess: break;
      case EventKind::kTaskEnd: {
        const auto& end = std::get<event::TaskEnd>(e.payload);
        r.end_status = end.status;
        r.observed_avm = end.observed_avm;
        break;
      }
    }
  }
  r.elapsed_ticks = events.back().tick;
  try {
    r.mean_recognition = mean_recognition(events);
  } catch (const UndefinedMetricError&) {
    r.mean_recognition.reset();
  }
  for (const auto& id : info.scenarios) {
    auto key = std::find_if(keys.begin(), keys.end(), [&](const ScenarioKey& k) { return k.id == id; });
    if (key == keys.end()) throw SchemaError("unknown scenario '" + id + "'");
    const Agreement a = task_success(observed_for(r.observed_avm, id), *key);
    r.attributes_total += static_cast<int>(a.agree.size());
    r.attributes_agreed += static_cast<int>(a.agreed());
  }
  r.survey = survey;
  r.cumulative_satisfaction = survey.cumulative();
  return r;
}

// --- Normalization and regression ----------------------------------------------

ZScored zscore(std::span<const double> values) {
  if (values.size() < 2) throw NormalizationError("z-score needs at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0) || sd <= 1e-12 * std::max(1.0, std::fabs(mean))) {
    throw NormalizationError("cannot normalize a series with zero variance");
  }
  ZScored out;
  out.norm = {mean, sd};
  out.values.reserve(values.size());
  for (double v : values) out.values.push_back((v - mean) / sd);
  return out;
}

OlsFit ols_fit(const std::vector<std::vector<double>>& columns, std::span<const double> response,
               const std::vector<std::string>& names) {
  const std::size_t n = response.size();
  const std::size_t p = columns.size();
  if (names.size() != p) throw PreconditionError("ols_fit needs one name per column");
  for (const auto& c : columns) {
    if (c.size() != n) throw PreconditionError("ols_fit columns must match the response length");
  }
  if (n < p + 1) throw PreconditionError("ols_fit needs at least as many rows as columns plus one");

  // Design with a leading column of ones.
  const std::size_t k = p + 1;
  auto x = [&](std::size_t i, std::size_t j) { return j == 0 ? 1.0 : columns[j - 1][i]; };
  std::vector<std::vector<double>> a(k, std::vector<double>(2 * k, 0.0));
  std::vector<double> xty(k, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x(i, r) * x(i, c);
      a[r][c] = s;
    }
    a[r][k + r] = 1.0;
    for (std::size_t i = 0; i < n; ++i) xty[r] += x(i, r) * response[i];
  }
  std::vector<double> diag(k);
  for (std::size_t j = 0; j < k; ++j) diag[j] = a[j][j];

  // Gauss-Jordan with partial pivoting; the row used for each pivot column
  // is recorded so a missing pivot identifies a dependent column.
  std::vector<bool> used(k, false);
  std::vector<std::size_t> pivot_row(k, k);
  std::vector<std::string> dependent;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t best = k;
    double best_abs = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      if (!used[r] && std::fabs(a[r][col]) > best_abs) {
        best_abs = std::fabs(a[r][col]);
        best = r;
      }
    }
    if (best == k || best_abs <= 1e-10 * std::max(1.0, diag[col])) {
      dependent.push_back(col == 0 ? "(intercept)" : names[col - 1]);
      continue;
    }
    used[best] = true;
    pivot_row[col] = best;
    const double piv = a[best][col];
    for (auto& v : a[best]) v /= piv;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == best) continue;
      const double factor = a[r][col];
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < 2 * k; ++c) a[r][c] -= factor * a[best][c];
    }
  }
  if (!dependent.empty()) {
    std::string list;
    for (const auto& d : dependent) list += (list.empty() ? "" : ", ") + d;
    throw SingularDesignError("design matrix is rank deficient; dependent columns: " + list, dependent);
  }

  // inverse row for coefficient j is the pivot row of column j
  std::vector<std::vector<double>> inv(k, std::vector<double>(k));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < k; ++c) inv[j][c] = a[pivot_row[j]][k + c];
  }
  std::vector<double> beta(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < k; ++c) beta[j] += inv[j][c] * xty[c];
  }

  const double mean_y = std::accumulate(response.begin(), response.end(), 0.0) / static_cast<double>(n);
  double sse = 0.0;
  double sst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fitted = 0.0;
    for (std::size_t j = 0; j < k; ++j) fitted += beta[j] * x(i, j);
    sse += (response[i] - fitted) * (response[i] - fitted);
    sst += (response[i] - mean_y) * (response[i] - mean_y);
  }
  if (!(sst > 0.0)) throw UndefinedMetricError("R squared is undefined for a constant response");

  OlsFit fit;
  fit.names = names;
  fit.intercept = beta[0];
  fit.weights.assign(beta.begin() + 1, beta.end());
  fit.sse = sse;
  fit.df_residual = n - k;
  fit.r_squared = std::clamp(1.0 - sse / sst, 0.0, 1.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double sigma2 = fit.df_residual > 0 ? sse / static_cast<double>(fit.df_residual) : nan;
  auto se = [&](std::size_t j) { return std::sqrt(sigma2 * std::max(0.0, inv[j][j])); };
  fit.intercept_std_error = se(0);
  for (std::size_t j = 1; j < k; ++j) {
    const double s = se(j);
    fit.std_errors.push_back(s);
    double t = nan;
    double pv = nan;
    if (fit.df_residual > 0) {
      t = s > 0.0 ? beta[j] / s : (beta[j] == 0.0 ? 0.0 : std::copysign(INFINITY, beta[j]));
      pv = std::isnan(t) ? 1.0 : stats::t_two_sided(t, static_cast<double>(fit.df_residual));
    }
    fit.t_stats.push_back(t);
    fit.p_values.push_back(pv);
  }
  return fit;
}

double apply_performance(const PerformanceModel& model, const std::map<std::string, double>& values) {
  double score = model.intercept;
  for (std::size_t i = 0; i < model.factors.size(); ++i) {
    auto it = values.find(model.factors[i]);
    if (it == values.end()) throw SchemaError("record lacks performance factor '" + model.factors[i] + "'");
    score += model.weights[i] * model.norms[i].apply(it->second);
  }
  return score;
}

const std::vector<std::string>& objective_measures() {
  static const std::vector<std::string> kMeasures{
      "Kappa",           "Mean Recognition", "User Turns",    "System Turns", "Elapsed Time",
      "Timeout Prompts", "ASR Rejections",   "Help Requests", "Barge Ins",
  };
  return kMeasures;
}

std::optional<double> measure_value(const SessionRecord& r, std::string_view name, double p_e) {
  if (name == "Kappa") return kappa(r.task_success(), p_e).kappa;
  if (name == "Task Success") return r.task_success();
  if (name == "Mean Recognition") return r.mean_recognition;
  if (name == "User Turns") return r.user_turns;
  if (name == "System Turns") return r.system_turns;
  if (name == "Elapsed Time") return static_cast<double>(r.elapsed_ticks);
  if (name == "Timeout Prompts") return r.timeout_prompts;
  if (name == "ASR Rejections") return r.asr_rejections;
  if (name == "Help Requests") return r.help_requests;
  if (name == "Barge Ins") return r.barge_ins;
  if (name == "Cumulative Satisfaction") return r.cumulative_satisfaction;
  for (std::size_t q = 0; q < kSurveyQuestions; ++q) {
    if (name == to_string(static_cast<SurveyQuestion>(q))) return r.survey.scores[q];
  }
  throw SchemaError("unknown measure '" + std::string(name) + "'");
}

PerformanceFit fit_performance(std::span<const SessionRecord> records, const std::vector<std::string>& factors,
                               double p_e, double min_sd) {
  std::vector<std::vector<double>> raw(factors.size());
  std::vector<double> response;
  for (const auto& r : records) {
    std::vector<double> row;
    for (const auto& f : factors) {
      auto v = measure_value(r, f, p_e);
      if (!v) break;
      row.push_back(*v);
    }
    if (row.size() != factors.size()) continue;
    for (std::size_t j = 0; j < factors.size(); ++j) raw[j].push_back(row[j]);
    response.push_back(r.cumulative_satisfaction);
  }

  PerformanceFit out;
  std::vector<std::vector<double>> columns;
  std::vector<std::string> kept;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    try {
      ZScored z = zscore(raw[j]);
      if (z.norm.sd < min_sd) throw NormalizationError("near-zero variance");
      columns.push_back(std::move(z.values));
      out.model.norms.push_back(z.norm);
      kept.push_back(factors[j]);
    } catch (const NormalizationError&) {
      out.dropped.push_back(factors[j] + " (no variance)");
    }
  }
  const ZScored y = zscore(response);
  // Exactly dependent measures (System Turns is often User Turns plus
  // Timeout Prompts plus one) are dropped one at a time, last first.
  std::optional<OlsFit> fit;
  while (!fit) {
    try {
      fit = ols_fit(columns, y.values, kept);
    } catch (const SingularDesignError& e) {
      const auto& cols = e.columns();
      auto it = cols.empty() ? kept.end() : std::find(kept.begin(), kept.end(), cols.back());
      if (it == kept.end()) throw;
      const auto j = static_cast<std::size_t>(it - kept.begin());
      out.dropped.push_back(kept[j] + " (linearly dependent)");
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(j));
      columns.erase(columns.begin() + static_cast<std::ptrdiff_t>(j));
      out.model.norms.erase(out.model.norms.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
  out.model.factors = kept;
  out.model.weights = fit->weights;
  out.model.intercept = fit->intercept;
  out.model.r_squared = fit->r_squared;
  out.model.t_stats = fit->t_stats;
  out.model.p_values = fit->p_values;
  return out;
}

TwoStepFit fit_two_step(std::span<const SessionRecord> records, const std::vector<std::string>& factors,
                        double p_e, double alpha) {
  TwoStepFit out{fit_performance(records, factors, p_e), std::nullopt, {}};
  const auto& m = out.full.model;
  for (std::size_t j = 0; j < m.factors.size(); ++j) {
    if (m.p_values[j] < alpha) out.significant.push_back(m.factors[j]);
  }
  if (!out.significant.empty()) out.selected = fit_performance(records, out.significant, p_e);
  return out;
}

// --- ANOVA ---------------------------------------------------------------------

std::string_view to_string(AnovaFactor factor) {
  switch (factor) {
    case AnovaFactor::kStrategy: return "strategy";
    case AnovaFactor::kTask: return "task";
    case AnovaFactor::kSubject: return "subject";
  }
  return "?";
}

const AnovaResult& AnovaTable::effect(AnovaFactor factor) const {
  for (const auto& e : effects) {
    if (e.factor == factor) return e;
  }
  throw PreconditionError("ANOVA table has no row for " + std::string(to_string(factor)));
}

namespace {

struct GroupSums {
  double sum = 0.0;
  std::size_t n = 0;
  double mean() const { return sum / static_cast<double>(n); }
};

double between_ss(const std::map<std::string, GroupSums>& groups, double grand) {
  double ss = 0.0;
  for (const auto& [_, g] : groups) ss += static_cast<double>(g.n) * (g.mean() - grand) * (g.mean() - grand);
  return ss;
}

AnovaResult make_row(AnovaFactor f, double ss, int df, double ms_resid, int df_resid) {
  AnovaResult r;
  r.factor = f;
  r.df = df;
  r.ss = ss;
  const double ms = ss / df;
  if (ms_resid > 0.0) {
    r.f_value = ms / ms_resid;
  } else {
    r.f_value = ms > 0.0 ? INFINITY : 0.0;
  }
  r.p_value = stats::f_upper_tail(r.f_value, df, df_resid);
  return r;
}

}  // namespace

AnovaTable anova_main_effects(std::span<const AnovaObservation> obs) {
  if (obs.empty()) throw UnbalancedDesignError("ANOVA needs observations");
  std::map<std::string, GroupSums> by_strategy;
  std::map<std::string, GroupSums> by_task;
  std::map<std::string, GroupSums> by_subject;
  std::map<std::string, std::string> strategy_of;
  std::map<std::string, std::set<std::string>> subjects_of;
  std::map<std::pair<std::string, int>, std::size_t> cell;
  std::set<int> tasks;
  double total = 0.0;
  for (const auto& o : obs) {
    auto [it, fresh] = strategy_of.emplace(o.subject, o.strategy);
    if (!fresh && it->second != o.strategy) {
      throw UnbalancedDesignError("subject " + o.subject + " appears under more than one strategy");
    }
    subjects_of[o.strategy].insert(o.subject);
    by_strategy[o.strategy].sum += o.value;
    ++by_strategy[o.strategy].n;
    const std::string task = std::to_string(o.task);
    by_task[task].sum += o.value;
    ++by_task[task].n;
    by_subject[o.subject].sum += o.value;
    ++by_subject[o.subject].n;
    ++cell[{o.subject, o.task}];
    tasks.insert(o.task);
    total += o.value;
  }
  if (by_strategy.size() < 2 || tasks.size() < 2) {
    throw PreconditionError("ANOVA needs at least two strategies and two tasks");
  }
  const std::size_t per_strategy = subjects_of.begin()->second.size();
  for (const auto& [s, subjects] : subjects_of) {
    if (subjects.size() != per_strategy) throw UnbalancedDesignError("strategy " + s + " has a different number of subjects");
  }
  const std::size_t per_cell = cell.begin()->second;
  for (const auto& [subject, _] : by_subject) {
    for (int t : tasks) {
      auto it = cell.find({subject, t});
      if (it == cell.end()) {
        throw UnbalancedDesignError("empty cell: subject " + subject + ", task " + std::to_string(t));
      }
      if (it->second != per_cell) {
        throw UnbalancedDesignError("cell sizes differ: subject " + subject + ", task " + std::to_string(t));
      }
    }
  }
  if (per_strategy < 2) throw PreconditionError("ANOVA needs at least two subjects per strategy");

  const double n = static_cast<double>(obs.size());
  const double grand = total / n;
  double ss_total = 0.0;
  for (const auto& o : obs) ss_total += (o.value - grand) * (o.value - grand);
  const double ss_strategy = between_ss(by_strategy, grand);
  const double ss_task = between_ss(by_task, grand);
  // Subjects nested in strategy: deviation of each subject mean from its
  // strategy mean.
  double ss_subject = 0.0;
  for (const auto& [subject, g] : by_subject) {
    const double d = g.mean() - by_strategy.at(strategy_of.at(subject)).mean();
    ss_subject += static_cast<double>(g.n) * d * d;
  }
  const int df_strategy = static_cast<int>(by_strategy.size()) - 1;
  const int df_task = static_cast<int>(tasks.size()) - 1;
  const int df_subject = static_cast<int>(by_strategy.size() * (per_strategy - 1));
  const int df_resid = static_cast<int>(obs.size()) - 1 - df_strategy - df_task - df_subject;
  if (df_resid <= 0) throw PreconditionError("ANOVA has no residual degrees of freedom");

  AnovaTable table;
  table.ss_total = ss_total;
  table.ss_residual = std::max(0.0, ss_total - ss_strategy - ss_task - ss_subject);
  table.df_residual = df_resid;
  const double ms_resid = table.ss_residual / df_resid;
  // Guard against rounding residue when the model explains everything.
  const double ms_eff = ms_resid <= 1e-12 * std::max(1.0, ss_total) ? 0.0 : ms_resid;
  table.effects.push_back(make_row(AnovaFactor::kStrategy, ss_strategy, df_strategy, ms_eff, df_resid));
  table.effects.push_back(make_row(AnovaFactor::kTask, ss_task, df_task, ms_eff, df_resid));
  table.effects.push_back(make_row(AnovaFactor::kSubject, ss_subject, df_subject, ms_eff, df_resid));
  return table;
}

AnovaTable anova_table(std::span<const SessionRecord> records, std::string_view measure, double p_e) {
  std::set<std::string> incomplete;
  for (const auto& r : records) {
    if (!measure_value(r, measure, p_e)) incomplete.insert(r.subject);
  }
  std::vector<AnovaObservation> obs;
  for (const auto& r : records) {
    if (incomplete.count(r.subject)) continue;
    obs.push_back({std::string(to_string(r.strategy)), r.task, r.subject, *measure_value(r, measure, p_e)});
  }
  return anova_main_effects(obs);
}

AnovaResult anova_main_effects(std::span<const SessionRecord> records, std::string_view measure,
                               AnovaFactor factor, double p_e) {
  return anova_table(records, measure, p_e).effect(factor);
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw PreconditionError("one-way ANOVA needs at least two groups");
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw UnbalancedDesignError("every group needs at least two observations");
    for (double v : g) total += v;
    n += g.size();
  }
  const double grand = total / static_cast<double>(n);
  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ss_within += (v - m) * (v - m);
  }
  const int df_b = static_cast<int>(groups.size()) - 1;
  const int df_w = static_cast<int>(n - groups.size());
  return make_row(AnovaFactor::kStrategy, ss_between, df_b, ss_within / df_w, df_w);
}

}  // namespace elvis
