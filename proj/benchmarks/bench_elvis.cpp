#include <benchmark/benchmark.h>

#include <filesystem>

#include "elvis/experiment.hpp"
#include "elvis/paradise.hpp"
#include "elvis/rng.hpp"

using namespace elvis;

namespace {

const ExperimentConfig& config() {
  static const ExperimentConfig c = load_config(std::filesystem::path(ELVIS_CONFIG_DIR) / "experiment.jsonc");
  return c;
}

void BM_SimulateSession(benchmark::State& state) {
  const auto kind = state.range(0) == 0 ? StrategyKind::kSystemInitiative : StrategyKind::kMixedInitiative;
  const StrategyMachine machine = strategy_for(config(), kind);
  SessionSetup s;
  s.machine = &machine;
  s.strategy = kind;
  s.profile = config().arms.front().subjects.front();
  s.task = 1;
  s.scenarios = config().tasks.front().scenarios;
  s.mailbox = load_mailbox(config().base_dir / config().tasks.front().mailbox);
  s.asr = config().asr;
  s.user = config().user;
  s.survey = config().survey;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    s.seed = ++seed;
    benchmark::DoNotOptimize(simulate_session(s));
  }
}
BENCHMARK(BM_SimulateSession)->Arg(0)->Arg(1);

void BM_RunExperiment(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(config()));
}
BENCHMARK(BM_RunExperiment)->Unit(benchmark::kMillisecond);

void BM_OlsFit(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<std::vector<double>> cols(8, std::vector<double>(rows));
  std::vector<double> y(rows);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    names.push_back("x" + std::to_string(j));
    for (auto& v : cols[j]) v = rng.normal();
  }
  for (auto& v : y) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(ols_fit(cols, y, names));
}
BENCHMARK(BM_OlsFit)->Arg(36)->Arg(1000);

void BM_AnovaTable(benchmark::State& state) {
  const auto log = run_experiment(config());
  std::vector<SessionRecord> records;
  for (const auto& s : log.sessions) records.push_back(s.record);
  for (auto _ : state) benchmark::DoNotOptimize(anova_table(records, "Mean Recognition"));
}
BENCHMARK(BM_AnovaTable);

}  // namespace

BENCHMARK_MAIN();
