// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "elvis/error.hpp"
#include "elvis/event_log.hpp"
#include "elvis/experiment.hpp"
#include "elvis/machine_io.hpp"
#include "elvis/paradise.hpp"
#include "elvis/report.hpp"
#include "elvis/session.hpp"
#include "oracles.hpp"
#include "paths.hpp"

using namespace elvis;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

constexpr auto SI = StrategyKind::kSystemInitiative;
constexpr auto MI = StrategyKind::kMixedInitiative;

double mean_of(const std::vector<SessionRecord>& rs, std::string_view measure, std::optional<StrategyKind> s,
               std::optional<int> task = std::nullopt) {
  return group_mean(rs, measure, s, task, 0.5).value_or(NAN);
}

std::vector<SessionRecord> records_of(const ExperimentLog& log) {
  std::vector<SessionRecord> out;
  for (const auto& s : log.sessions) out.push_back(s.record);
  return out;
}

// --- 1 -------------------------------------------------------------------------

Outcome kappa_exactness() {
  Outcome o;
  const double k = kappa(0.95, 0.50).kappa;
  o.check(std::abs(k - 0.9) <= 1e-12, fmt::format("kappa = {:.17g}", k));
  o.note(fmt::format("kappa(.95, .50) = {:.15f}", k));
  return o;
}

// --- 2 -------------------------------------------------------------------------

Outcome regression_oracle() {
  Outcome o;
  const std::vector<double> truth{1.5, -2.0, 0.75};
  const double intercept = 4.0;
  auto dataset = [&](Rng& rng, double noise) {
    std::vector<std::vector<double>> cols(truth.size());
    std::vector<double> y;
    for (int i = 0; i < 12; ++i) {
      double v = intercept;
      for (std::size_t j = 0; j < truth.size(); ++j) {
        cols[j].push_back(rng.normal(0.0, 1.0));
        v += truth[j] * cols[j].back();
      }
      y.push_back(v + (noise > 0.0 ? rng.normal(0.0, noise) : 0.0));
    }
    return std::make_pair(cols, y);
  };
  const std::vector<std::string> names{"a", "b", "c"};

  Rng exact_rng(1);
  const auto [cols, y] = dataset(exact_rng, 0.0);
  const auto exact = ols_fit(cols, y, names);
  double worst = std::abs(exact.intercept - intercept);
  for (std::size_t j = 0; j < truth.size(); ++j) worst = std::max(worst, std::abs(exact.weights[j] - truth[j]));
  o.check(worst <= 1e-9, fmt::format("noiseless max error {:.3g}", worst));
  o.check(std::abs(exact.r_squared - 1.0) <= 1e-12, fmt::format("noiseless R^2 {:.15f}", exact.r_squared));

  // Every per-seed estimate is compared with the truth in units of its own
  // standard error; the 100-seed average is compared in units of the
  // standard error of the average.
  int inside = 0;
  int checks = 0;
  std::vector<double> sum(truth.size(), 0.0);
  std::vector<double> sum_sq(truth.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng = Rng(2000).derive(seed);
    const auto [c, v] = dataset(rng, 0.1);
    const auto fit = ols_fit(c, v, names);
    const auto oracle = test::ols_oracle(c, v);
    for (std::size_t j = 0; j < truth.size(); ++j) {
      o.check(std::abs(fit.weights[j] - oracle.weights[j]) <= 1e-9, "weights disagree with the Eigen oracle");
      ++checks;
      if (std::abs(fit.weights[j] - truth[j]) <= 3.0 * fit.std_errors[j]) ++inside;
      sum[j] += fit.weights[j];
      sum_sq[j] += fit.weights[j] * fit.weights[j];
    }
  }
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double mean = sum[j] / 100.0;
    const double sd = std::sqrt(std::max(0.0, sum_sq[j] / 100.0 - mean * mean));
    o.check(std::abs(mean - truth[j]) <= 3.0 * sd / 10.0,
            fmt::format("average weight {} = {:.5f}, outside 3 SE of {}", names[j], mean, truth[j]));
  }
  const double coverage = static_cast<double>(inside) / checks;
  o.check(coverage >= 0.95, fmt::format("3-SE coverage {:.3f}", coverage));
  o.note(fmt::format("noiseless max error {:.2g}, sigma=.1 3-SE coverage {}/{}", worst, inside, checks));
  return o;
}

// --- 3 -------------------------------------------------------------------------

Outcome scale_invariance(const std::vector<SessionRecord>& corpus) {
  Outcome o;
  std::vector<std::string> factors;
  for (const auto& f : objective_measures()) {
    // System Turns is User Turns plus Timeout Prompts plus one; rescaling
    // one of them breaks that identity, so it stays out of this check.
    if (f != "System Turns") factors.push_back(f);
  }
  auto scaled = corpus;
  for (auto& r : scaled) r.user_turns *= 60;
  const auto a = fit_performance(corpus, factors, 0.5);
  const auto b = fit_performance(scaled, factors, 0.5);
  o.check(a.model.factors == b.model.factors, "different factors survived");
  double worst = 0.0;
  for (std::size_t j = 0; j < std::min(a.model.weights.size(), b.model.weights.size()); ++j) {
    worst = std::max(worst, std::abs(a.model.weights[j] - b.model.weights[j]));
  }
  worst = std::max(worst, std::abs(a.model.intercept - b.model.intercept));
  o.check(worst <= 1e-9, fmt::format("max weight change {:.3g}", worst));
  o.note(fmt::format("{} factors, max weight change {:.2g}", a.model.factors.size(), worst));
  return o;
}

// --- 4 -------------------------------------------------------------------------

Outcome anova_oracle() {
  Outcome o;
  Rng rng(4040);
  double worst_f = 0.0;
  double worst_p = 0.0;
  const int designs = 500;
  for (int i = 0; i < designs; ++i) {
    const auto obs = test::random_design(rng);
    const auto want = test::anova_oracle(obs);
    const auto got = anova_main_effects(obs);
    const std::pair<AnovaFactor, std::pair<double, int>> rows[] = {
        {AnovaFactor::kStrategy, {want.ss_strategy, want.df_strategy}},
        {AnovaFactor::kTask, {want.ss_task, want.df_task}},
        {AnovaFactor::kSubject, {want.ss_subject, want.df_subject}},
    };
    for (const auto& [factor, ss_df] : rows) {
      const auto& e = got.effect(factor);
      const double f = want.f(ss_df.first, ss_df.second);
      const double p = test::f_tail_oracle(f, ss_df.second, want.df_residual);
      worst_f = std::max(worst_f, std::abs(e.f_value - f) / std::max(1.0, f));
      worst_p = std::max(worst_p, std::abs(e.p_value - p));
      o.check(e.df == ss_df.second, "degrees of freedom differ");
    }
  }
  o.check(worst_f <= 1e-9, fmt::format("F error {:.3g}", worst_f));
  o.check(worst_p <= 1e-8, fmt::format("p error {:.3g}", worst_p));
  o.note(fmt::format("{} designs, max F error {:.2g}, max p error {:.2g}", designs, worst_f, worst_p));
  return o;
}

// --- 5 -------------------------------------------------------------------------

struct Target {
  const char* measure;
  double si;
  double mi;
};

const Target kTargets[] = {
    {"Mean Recognition", 0.90, 0.72},
    {"User Turns", 21.9, 15.33},
    {"Timeout Prompts", 0.94, 4.2},
    {"ASR Rejections", 0.44, 1.33},
};

constexpr int kCalibrationSeeds = 20;

Outcome calibrated_replication(const ExperimentConfig& config, const std::vector<SessionRecord>& corpus) {
  Outcome o;
  o.check(corpus.size() == 36, fmt::format("{} sessions", corpus.size()));
  const double rec_si = mean_of(corpus, "Mean Recognition", SI);
  const double rec_mi = mean_of(corpus, "Mean Recognition", MI);
  o.check(rec_si - rec_mi >= 0.10, fmt::format("recognition gap {:.3f}", rec_si - rec_mi));
  const char* more_for_mi[] = {"Timeout Prompts", "ASR Rejections"};
  o.check(mean_of(corpus, "User Turns", MI) < mean_of(corpus, "User Turns", SI), "MI user turns not below SI");
  for (const char* m : more_for_mi) o.check(mean_of(corpus, m, MI) > mean_of(corpus, m, SI), std::string(m) + " not higher for MI");

  std::string fixed = "fixed seed SI/MI:";
  for (const auto& t : kTargets) {
    fixed += fmt::format(" {} {:.3f}/{:.3f}", t.measure, mean_of(corpus, t.measure, SI), mean_of(corpus, t.measure, MI));
  }
  o.note(fixed);

  // Count measures average about one event per dialog, so 18 dialogs per arm
  // carry more sampling noise than the band allows. The band is checked on
  // the expected means: the same model averaged over derived seeds.
  std::map<std::string, std::pair<double, double>> avg;
  Rng seeds = Rng(config.seed).derive("calibration");
  for (int i = 0; i < kCalibrationSeeds; ++i) {
    ExperimentConfig c = config;
    c.seed = seeds.next_u64();
    const auto rs = records_of(run_experiment(c));
    for (const auto& t : kTargets) {
      avg[t.measure].first += mean_of(rs, t.measure, SI) / kCalibrationSeeds;
      avg[t.measure].second += mean_of(rs, t.measure, MI) / kCalibrationSeeds;
    }
  }
  std::string band = fmt::format("{}-seed means SI/MI:", kCalibrationSeeds);
  for (const auto& t : kTargets) {
    const auto [si, mi] = avg[t.measure];
    band += fmt::format(" {} {:.3f}/{:.3f}", t.measure, si, mi);
    o.check(std::abs(si - t.si) <= 0.2 * t.si, fmt::format("SI {} {:.3f} outside 20% of {}", t.measure, si, t.si));
    o.check(std::abs(mi - t.mi) <= 0.2 * t.mi, fmt::format("MI {} {:.3f} outside 20% of {}", t.measure, mi, t.mi));
  }
  o.note(band);
  return o;
}

// --- 6 -------------------------------------------------------------------------

Outcome learning_effect(const std::vector<SessionRecord>& corpus) {
  Outcome o;
  const double r1 = mean_of(corpus, "Mean Recognition", MI, 1);
  const double r3 = mean_of(corpus, "Mean Recognition", MI, 3);
  const double e1 = mean_of(corpus, "User Expertise", MI, 1);
  const double e3 = mean_of(corpus, "User Expertise", MI, 3);
  o.check(r1 <= r3, fmt::format("MI recognition {:.3f} -> {:.3f}", r1, r3));
  o.check(e1 <= e3, fmt::format("MI User Expertise {:.3f} -> {:.3f}", e1, e3));
  double help[4] = {0, 0, 0, 0};
  for (int t = 1; t <= 3; ++t) help[t] = mean_of(corpus, "Help Requests", std::nullopt, t);
  o.check(help[1] > 0.0, "nobody asked for help on task 1");
  o.check(help[1] > 2.0 * help[2] && help[1] > 2.0 * help[3], "help requests not concentrated in task 1");
  o.note(fmt::format("MI recognition {:.3f} -> {:.3f}, MI User Expertise {:.2f} -> {:.2f}, help per dialog {:.2f}/{:.2f}/{:.2f}",
                     r1, r3, e1, e3, help[1], help[2], help[3]));
  return o;
}

// --- 7 -------------------------------------------------------------------------

Outcome performance_ordering(const std::vector<SessionRecord>& corpus) {
  Outcome o;
  const auto fit = fit_performance(corpus, {"Mean Recognition", "User Turns"}, 0.5);
  const auto& m = fit.model;
  o.check(m.factors.size() == 2, "a factor was dropped");
  if (m.factors.size() != 2) return o;
  o.check(m.weights[0] > 0.0, fmt::format("recognition weight {:.3f}", m.weights[0]));
  o.check(m.weights[1] < 0.0, fmt::format("user-turns weight {:.3f}", m.weights[1]));
  auto score = [&](std::optional<StrategyKind> s, std::optional<int> task) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : corpus) {
      if ((s && r.strategy != *s) || (task && r.task != *task) || !r.mean_recognition) continue;
      sum += apply_performance(m, {{"Mean Recognition", *r.mean_recognition}, {"User Turns", r.user_turns}});
      ++n;
    }
    return sum / n;
  };
  const double si = score(SI, std::nullopt);
  const double mi = score(MI, std::nullopt);
  const double mi1 = score(MI, 1);
  const double mi3 = score(MI, 3);
  o.check(si > mi, fmt::format("SI {:.3f} not above MI {:.3f}", si, mi));
  o.check(mi1 < mi3, fmt::format("MI task 1 {:.3f} not below task 3 {:.3f}", mi1, mi3));
  o.note(fmt::format("N(rec) {:+.3f}, N(turns) {:+.3f}, R^2 {:.2f}; SI {:+.3f} > MI {:+.3f}; MI task 1 {:+.3f} -> task 3 {:+.3f}",
                     m.weights[0], m.weights[1], m.r_squared, si, mi, mi1, mi3));
  return o;
}

// --- 8 -------------------------------------------------------------------------

Outcome functional_equivalence(const ExperimentConfig& config) {
  Outcome o;
  SubjectProfile expert;
  expert.id = "expert";
  expert.base_expertise = 1.0;
  UserModel user = config.user;
  user.help_propensity = 0.0;
  user.exploration = false;
  user.recall_rate = 1.0;
  AsrModel clean;
  std::map<StrategyKind, StrategyMachine> machines{{SI, strategy_for(config, SI)}, {MI, strategy_for(config, MI)}};
  std::map<StrategyKind, std::vector<Agreement>> agreements;
  std::string turns;
  for (const auto& task : config.tasks) {
    const auto mailbox = load_mailbox(config.base_dir / task.mailbox);
    for (const auto& key : task.scenarios) {
      std::map<StrategyKind, int> used;
      for (auto kind : {SI, MI}) {
        SessionSetup s;
        s.machine = &machines.at(kind);
        s.strategy = kind;
        s.profile = expert;
        s.task = task.number;
        s.scenarios = {key};
        s.mailbox = mailbox;
        s.asr = clean;
        s.user = user;
        s.survey = config.survey;
        s.options.turn_cap = config.turn_cap;
        s.options.ticks = config.ticks;
        s.seed = session_seed(config.seed, kind, "expert-" + key.id, task.number);
        const auto log = simulate_session(s);
        used[kind] = log.record.user_turns;
        o.check(log.record.end_status == "completed",
                fmt::format("{} {} ended '{}'", to_string(kind), key.id, log.record.end_status));
        agreements[kind].push_back(task_success(observed_for(log.record.observed_avm, key.id), key));
      }
      o.check(used[MI] < used[SI], fmt::format("scenario {}: MI {} turns, SI {}", key.id, used[MI], used[SI]));
      turns += fmt::format(" {} {}/{}", key.id, used[SI], used[MI]);
    }
  }
  for (auto kind : {SI, MI}) {
    const double p_a = kappa(agreements[kind], 0.5).p_a;
    o.check(p_a == 1.0, fmt::format("{} P(A) = {:.3f}", to_string(kind), p_a));
  }
  o.note("P(A) = 1 for both; user turns SI/MI:" + turns);
  return o;
}

// --- 9 -------------------------------------------------------------------------

Outcome golden_transcripts() {
  Outcome o;
  const auto mailbox = load_mailbox(test::data_dir() / "mailboxes" / "task1.mbox");
  const std::string kim = "The message from Kim is about Meeting Tomorrow. The meeting tomorrow is at 10:30 in 2D-516.";
  const std::vector<std::string> d1{
      "Hi, Elvis here. You have 5 new and 0 unread messages in your inbox. Say Repeat to repeat this message, or "
      "say Read, Summarize, or I'm done here.",
      "Select by Content or Position?",
      "Select by Sender or Subject?",
      "Which Sender?",
      kim,
  };
  const std::vector<std::string> d2{"Hi, Elvis here. I've got your mail.", kim};

  const auto si = load_machine(test::data_dir() / "strategies" / "si.json");
  DialogSession s1(si, mailbox);
  const auto got1 = play_script(s1, {"Read", "Content", "Sender", "Kim"});
  o.check(got1 == d1, "SI transcript differs");
  const auto mi = load_machine(test::data_dir() / "strategies" / "mi.json");
  DialogSession s2(mi, mailbox);
  const auto got2 = play_script(s2, {"Read me my messages from Kim."});
  o.check(got2 == d2, "MI transcript differs");
  if (!o.pass) {
    for (const auto& line : got1) o.note("SI: " + line);
    for (const auto& line : got2) o.note("MI: " + line);
  } else {
    o.note(fmt::format("SI {} agent lines, MI {} agent lines verbatim", got1.size(), got2.size()));
  }
  return o;
}

// --- 10 ------------------------------------------------------------------------

Outcome determinism(const ExperimentConfig& config) {
  Outcome o;
  auto render = [&] {
    const auto log = run_experiment(config);
    std::ostringstream out;
    write_log(out, log);
    return std::make_pair(out.str(), make_report(log).text + make_report(log).csv);
  };
  const auto a = render();
  const auto b = render();
  o.check(a.first == b.first, "session logs differ");
  o.check(a.second == b.second, "reports differ");
  o.note(fmt::format("log {} bytes, report {} bytes, identical", a.first.size(), a.second.size()));
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int n, const std::function<Outcome()>& criterion) {
    Outcome o;
    try {
      o = criterion();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("Criterion %d: %s (%s)\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };

  const ExperimentConfig config = load_config(test::default_config());
  const auto corpus = records_of(run_experiment(config));

  report(1, kappa_exactness);
  report(2, regression_oracle);
  report(3, [&] { return scale_invariance(corpus); });
  report(4, anova_oracle);
  report(5, [&] { return calibrated_replication(config, corpus); });
  report(6, [&] { return learning_effect(corpus); });
  report(7, [&] { return performance_ordering(corpus); });
  report(8, [&] { return functional_equivalence(config); });
  report(9, golden_transcripts);
  report(10, [&] { return determinism(config); });
  return failures == 0 ? 0 : 1;
}
