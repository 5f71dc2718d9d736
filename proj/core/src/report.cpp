#include "elvis/report.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "elvis/error.hpp"
#include "elvis/experiment.hpp"

namespace elvis {

std::vector<Agreement> Corpus::agreements(std::optional<StrategyKind> strategy) const {
  std::vector<Agreement> out;
  for (const auto& r : records) {
    if (strategy && r.strategy != *strategy) continue;
    for (const auto& id : r.scenarios) {
      auto key = std::find_if(keys.begin(), keys.end(), [&](const ScenarioKey& k) { return k.id == id; });
      if (key == keys.end()) continue;
      out.push_back(task_success(observed_for(r.observed_avm, id), *key));
    }
  }
  return out;
}

std::optional<KappaResult> Corpus::kappa_for(std::optional<StrategyKind> strategy) const {
  const auto a = agreements(strategy);
  if (a.empty()) return std::nullopt;
  return elvis::kappa(a, p_e);
}

Corpus load_corpus(const ExperimentLog& log) {
  Corpus c;
  for (const auto& s : log.sessions) c.records.push_back(s.record);
  if (log.header.config.is_object()) {
    const ExperimentConfig config = parse_config(log.header.config);
    c.keys = config.scenario_keys();
    const auto all = c.agreements();
    if (!all.empty()) {
      c.p_e = corpus_chance_agreement(all, config.chance);
      c.kappa = kappa(all, c.p_e);
    }
  }
  return c;
}

std::optional<double> group_mean(std::span<const SessionRecord> records, std::string_view measure,
                                 std::optional<StrategyKind> strategy, std::optional<int> task, double p_e) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (strategy && r.strategy != *strategy) continue;
    if (task && r.task != *task) continue;
    if (auto v = measure_value(r, measure, p_e)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

const std::vector<std::string>& report_measures() {
  static const std::vector<std::string> kMeasures = [] {
    std::vector<std::string> m = objective_measures();
    m.insert(m.begin() + 1, "Task Success");
    for (std::size_t q = 0; q < kSurveyQuestions; ++q) m.emplace_back(to_string(static_cast<SurveyQuestion>(q)));
    m.emplace_back("Cumulative Satisfaction");
    return m;
  }();
  return kMeasures;
}

namespace {

std::string num(double v) { return fmt::format("{:.4f}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : "n/a"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

struct Writer {
  std::ostringstream text;
  std::ostringstream csv;

  void row(const std::string& section, const std::string& measure, const std::string& group,
           const std::string& statistic, const std::string& value) {
    csv << csv_field(section) << ',' << csv_field(measure) << ',' << csv_field(group) << ','
        << csv_field(statistic) << ',' << value << '\n';
  }
};

std::map<std::string, double> factor_values(const SessionRecord& r, const PerformanceModel& m, double p_e) {
  std::map<std::string, double> out;
  for (const auto& f : m.factors) {
    if (auto v = measure_value(r, f, p_e)) out[f] = *v;
  }
  return out;
}

std::string performance_formula(const PerformanceModel& m) {
  std::string out = "Performance =";
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    const double w = m.weights[i];
    out += fmt::format(" {}{:.3f} * N({})", i == 0 ? (w < 0 ? "-" : "") : (w < 0 ? "- " : "+ "), std::abs(w),
                       m.factors[i]);
  }
  return out;
}

void write_model(Writer& w, const std::string& label, const PerformanceModel& m) {
  w.text << label << " (R^2 = " << num(m.r_squared) << ", intercept " << num(m.intercept) << ")\n";
  w.text << fmt::format("  {:<24} {:>9} {:>9} {:>9}\n", "factor", "weight", "t", "p");
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    w.text << fmt::format("  {:<24} {:>9} {:>9} {:>9}\n", m.factors[i], num(m.weights[i]), num(m.t_stats[i]),
                          num(m.p_values[i]));
    w.row("performance", m.factors[i], label, "weight", num(m.weights[i]));
    w.row("performance", m.factors[i], label, "t", num(m.t_stats[i]));
    w.row("performance", m.factors[i], label, "p", num(m.p_values[i]));
  }
  w.row("performance", "(model)", label, "r_squared", num(m.r_squared));
  w.row("performance", "(model)", label, "intercept", num(m.intercept));
}

}  // namespace

Report make_report(const ExperimentLog& log) {
  Report report;
  const Corpus corpus = load_corpus(log);
  const auto& records = corpus.records;
  Writer w;
  w.csv << "section,measure,group,statistic,value\n";

  std::set<StrategyKind> strategies;
  std::set<int> tasks;
  for (const auto& r : records) {
    strategies.insert(r.strategy);
    tasks.insert(r.task);
  }
  int subtasks = 0;
  int completed = 0;
  for (const auto& a : corpus.agreements()) {
    ++subtasks;
    if (a.agreed() == a.agree.size()) ++completed;
  }

  w.text << "Elvis experiment report\n";
  w.text << "config hash: " << log.header.config_hash << "\n";
  w.text << "root seed: " << log.header.seed << "\n";
  w.text << "sessions: " << records.size() << ", subtasks: " << subtasks << ", completed: " << completed << "\n\n";
  w.row("run", "config_hash", "all", "value", log.header.config_hash);
  w.row("run", "seed", "all", "value", std::to_string(log.header.seed));
  w.row("run", "sessions", "all", "count", std::to_string(records.size()));

  if (records.size() < 2) {
    report.warnings.push_back("fewer than two records; nothing to summarize");
    w.text << "warning: " << report.warnings.back() << "\n";
    report.text = w.text.str();
    report.csv = w.csv.str();
    return report;
  }

  // Means.
  std::vector<std::pair<std::string, std::pair<std::optional<StrategyKind>, std::optional<int>>>> groups;
  for (auto s : strategies) groups.push_back({std::string(to_string(s)), {s, std::nullopt}});
  for (auto s : strategies) {
    for (int t : tasks) groups.push_back({fmt::format("{} task {}", to_string(s), t), {s, t}});
  }
  w.text << "Means by strategy and task\n";
  w.text << fmt::format("  {:<24}", "measure");
  for (const auto& g : groups) w.text << fmt::format(" {:>10}", g.first);
  w.text << "\n";
  for (const auto& m : report_measures()) {
    w.text << fmt::format("  {:<24}", m);
    for (const auto& [label, filter] : groups) {
      const auto v = group_mean(records, m, filter.first, filter.second, corpus.p_e);
      w.text << fmt::format(" {:>10}", num(v));
      w.row("means", m, label, "mean", num(v));
    }
    w.text << "\n";
  }
  w.text << "\n";

  // Kappa.
  if (corpus.kappa) {
    w.text << "Task success (kappa)\n";
    auto line = [&](const std::string& label, const KappaResult& k) {
      w.text << fmt::format("  {:<8} P(A) = {}  P(E) = {}  kappa = {}\n", label, num(k.p_a), num(k.p_e),
                            num(k.kappa));
      w.row("kappa", "Kappa", label, "p_a", num(k.p_a));
      w.row("kappa", "Kappa", label, "p_e", num(k.p_e));
      w.row("kappa", "Kappa", label, "kappa", num(k.kappa));
    };
    line("all", *corpus.kappa);
    for (auto s : strategies) {
      if (auto k = corpus.kappa_for(s)) line(std::string(to_string(s)), *k);
    }
    w.text << "\n";
  } else {
    report.warnings.push_back("log has no scenario keys; kappa skipped");
  }

  // ANOVA.
  w.text << "ANOVA (main effects: strategy, task, subject within strategy)\n";
  w.text << fmt::format("  {:<24} {:<9} {:>4} {:>10} {:>9}\n", "measure", "factor", "df", "F", "p");
  for (const auto& m : report_measures()) {
    if (m == "Task Success") continue;
    try {
      const AnovaTable t = anova_table(records, m, corpus.p_e);
      for (const auto& e : t.effects) {
        w.text << fmt::format("  {:<24} {:<9} {:>4} {:>10} {:>9}\n", m, to_string(e.factor), e.df, num(e.f_value),
                              num(e.p_value));
        const std::string factor(to_string(e.factor));
        w.row("anova", m, factor, "df", std::to_string(e.df));
        w.row("anova", m, factor, "F", num(e.f_value));
        w.row("anova", m, factor, "p", num(e.p_value));
      }
      w.row("anova", m, "residual", "df", std::to_string(t.df_residual));
    } catch (const Error& e) {
      report.warnings.push_back(fmt::format("ANOVA skipped for {}: {}", m, e.what()));
      w.text << fmt::format("  {:<24} skipped: {}\n", m, e.what());
    }
  }
  w.text << "\n";

  // Performance function.
  w.text << "Performance function (z-scored Cumulative Satisfaction on z-scored measures)\n";
  const auto& factors = objective_measures();
  try {
    if (records.size() < factors.size() + 2) {
      throw PreconditionError(fmt::format("{} records are too few for {} factors", records.size(), factors.size()));
    }
    const TwoStepFit fit = fit_two_step(records, factors, corpus.p_e);
    for (const auto& d : fit.full.dropped) {
      report.warnings.push_back("factor dropped: " + d);
      w.text << "  dropped: " << d << "\n";
    }
    write_model(w, "all measures", fit.full.model);
    const PerformanceModel* chosen = &fit.full.model;
    if (fit.selected) {
      write_model(w, "significant measures", fit.selected->model);
      chosen = &fit.selected->model;
    } else {
      w.text << "  no measure is significant at p < .05\n";
    }
    w.text << "  " << performance_formula(*chosen) << "\n";
    w.text << "  mean performance:";
    for (const auto& [label, filter] : groups) {
      double sum = 0.0;
      int n = 0;
      for (const auto& r : records) {
        if (filter.first && r.strategy != *filter.first) continue;
        if (filter.second && r.task != *filter.second) continue;
        const auto values = factor_values(r, *chosen, corpus.p_e);
        if (values.size() != chosen->factors.size()) continue;
        sum += apply_performance(*chosen, values);
        ++n;
      }
      if (n == 0) continue;
      w.text << fmt::format(" {} {}", label, num(sum / n)) << ";";
      w.row("performance", "score", label, "mean", num(sum / n));
    }
    w.text << "\n";
  } catch (const Error& e) {
    report.warnings.push_back(std::string("regression skipped: ") + e.what());
    w.text << "  skipped: " << e.what() << "\n";
  }

  if (!report.warnings.empty()) {
    w.text << "\nWarnings\n";
    for (const auto& warn : report.warnings) w.text << "  " << warn << "\n";
  }
  report.text = w.text.str();
  report.csv = w.csv.str();
  return report;
}

}  // namespace elvis
