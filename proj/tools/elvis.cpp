// elvis: run simulated experiments, report on session logs, and talk to the
// dialog strategies from a console.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "elvis/error.hpp"
#include "elvis/event_log.hpp"
#include "elvis/experiment.hpp"
#include "elvis/machine_io.hpp"
#include "elvis/report.hpp"
#include "elvis/session.hpp"
#include "elvis/strategies.hpp"

namespace fs = std::filesystem;
using namespace elvis;

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;

StrategyKind strategy_arg(const std::string& name) {
  auto kind = parse_strategy(name);
  if (!kind) throw CLI::ValidationError("--strategy", "must be SI or MI");
  return *kind;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string arm;
  bool quiet = false;
};

int cmd_run(const RunArgs& a) {
  ExperimentConfig config = load_config(a.config);
  if (a.seed) config.seed = *a.seed;
  std::optional<StrategyKind> arm;
  if (!a.arm.empty()) arm = strategy_arg(a.arm);

  const ExperimentLog log = run_experiment(config, arm);
  const fs::path out(a.out);
  std::ostringstream buf;
  write_log(buf, log);
  write_file(out / config.output.log, buf.str());
  const Report report = make_report(log);
  write_file(out / config.output.report, report.text);
  write_file(out / config.output.csv, report.csv);
  if (!a.quiet) std::cout << report.text;
  std::cerr << fmt::format("wrote {} sessions to {}\n", log.sessions.size(), (out / config.output.log).string());
  return 0;
}

int cmd_report(const std::string& log_path, const std::string& out_dir) {
  std::ifstream in(log_path);
  if (!in) throw Error("cannot open " + log_path);
  const ExperimentLog log = read_log(in);
  const Report report = make_report(log);
  std::cout << report.text;
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "report.txt", report.text);
    write_file(fs::path(out_dir) / "report.csv", report.csv);
  }
  return 0;
}

struct ChatArgs {
  std::string strategy = "SI";
  std::string strategy_file;
  std::string mailbox;
  int task = 1;
  std::string config;
  std::string scenario;
  std::string asr = "off";
  std::uint64_t seed = 1;
  std::string log;
};

int cmd_chat(const ChatArgs& a) {
  const StrategyKind kind = strategy_arg(a.strategy);
  const fs::path data(ELVIS_DATA_DIR);

  std::optional<ExperimentConfig> config;
  if (!a.config.empty()) config = load_config(a.config);

  StrategyMachine machine = [&] {
    if (!a.strategy_file.empty()) return load_machine(a.strategy_file);
    if (config) return strategy_for(*config, kind);
    return load_machine(data / "strategies" / (kind == StrategyKind::kSystemInitiative ? "si.json" : "mi.json"));
  }();

  fs::path mailbox = data / "mailboxes" / fmt::format("task{}.mbox", a.task);
  std::vector<ScenarioKey> keys;
  if (config) {
    for (const auto& t : config->tasks) {
      if (t.number == a.task) mailbox = config->base_dir / t.mailbox;
      for (const auto& k : t.scenarios) {
        if (k.id == a.scenario || (a.scenario.empty() && t.number == a.task)) keys.push_back(k);
      }
    }
    if (!a.scenario.empty() && keys.empty()) throw Error("no scenario '" + a.scenario + "' in the config");
  }
  if (!a.mailbox.empty()) mailbox = a.mailbox;

  RecognitionRates noise;
  const bool noisy = a.asr == "noisy";
  if (noisy) {
    const std::string family = kind == StrategyKind::kSystemInitiative ? "si" : "mi";
    noise = config ? config->asr.rates_for(family) : RecognitionRates{0.1, 0.05};
  } else if (a.asr != "off") {
    throw CLI::ValidationError("--asr", "must be off or noisy");
  }

  const bool interactive = isatty(fileno(stdin));
  if (interactive) {
    std::cerr << "Type what you would say. 'help' asks for help, an empty line is a silence, Ctrl-D hangs up.\n";
    for (const auto& k : keys) {
      std::cerr << fmt::format("Scenario {}: find", k.id);
      for (const auto& [attribute, _] : k.targets) std::cerr << ' ' << attribute;
      std::cerr << " in the message";
      for (std::size_t i = 0; i < k.selection.size(); ++i) {
        std::cerr << (i ? " or" : "") << (k.selection[i].field == "sender" ? " from " : " about ")
                  << k.selection[i].value;
      }
      std::cerr << ".\n";
    }
  }

  DialogSession session(machine, load_mailbox(mailbox));
  Rng rng(a.seed);
  std::cout << "A: " << session.start().text << std::endl;
  std::string line;
  while (!session.finished()) {
    if (interactive) std::cerr << "U: " << std::flush;
    if (!std::getline(std::cin, line)) break;
    const AgentTurn turn = respond(session, line, noisy ? &noise : nullptr, &rng);
    std::cout << "A: " << turn.text << std::endl;
  }
  session.close({}, session.end_reason().empty() ? "eof" : "");

  if (!a.log.empty()) {
    ExperimentLog log;
    log.header.seed = a.seed;
    SessionLog s;
    s.info = SessionInfo{kind, a.task, "console", {}};
    for (const auto& k : keys) s.info.scenarios.push_back(k.id);
    s.seed = a.seed;
    s.events = session.events();
    s.record = extract_record(s.info, s.events, s.survey, keys);
    log.sessions.push_back(std::move(s));
    std::ostringstream buf;
    write_log(buf, log);
    write_file(a.log, buf.str());
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  const ExperimentConfig config = load_config(path);
  std::size_t subjects = 0;
  for (const auto& arm : config.arms) subjects += arm.subjects.size();
  std::cout << fmt::format("config ok: {} arms, {} subjects, {} tasks, seed {}, hash {}\n", config.arms.size(),
                           subjects, config.tasks.size(), config.seed, config_hash(config));
  return 0;
}

int cmd_strategy_dump(const std::string& strategy, const std::string& out) {
  const auto doc = machine_to_json(build_strategy(strategy_arg(strategy))).dump(2) + "\n";
  if (out.empty()) {
    std::cout << doc;
  } else {
    write_file(out, doc);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation lab for system- and mixed-initiative voice email dialogs"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate every subject on every task and write log and report");
  run_cmd->add_option("-c,--config", run.config, "Experiment config (JSON with comments)")->required();
  run_cmd->add_option("-s,--seed", run.seed, "Override the root seed");
  run_cmd->add_option("-o,--out", run.out, "Output directory");
  run_cmd->add_option("-a,--arm", run.arm, "Run one arm only (SI or MI)");
  run_cmd->add_flag("-q,--quiet", run.quiet, "Do not print the report");

  std::string log_path;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Summarize a session log");
  report_cmd->add_option("-l,--log", log_path, "Session log")->required();
  report_cmd->add_option("-o,--out", report_out, "Also write report.txt and report.csv here");

  ChatArgs chat;
  auto* chat_cmd = app.add_subcommand("chat", "Talk to a strategy from the console");
  chat_cmd->add_option("--strategy", chat.strategy, "SI or MI");
  chat_cmd->add_option("--strategy-file", chat.strategy_file, "Strategy document to load");
  chat_cmd->add_option("--mailbox", chat.mailbox, "Mailbox fixture");
  chat_cmd->add_option("--task", chat.task, "Task whose mailbox to use")->check(CLI::Range(1, 99));
  chat_cmd->add_option("-c,--config", chat.config, "Experiment config for mailboxes, scenarios and ASR rates");
  chat_cmd->add_option("--scenario", chat.scenario, "Scenario id to show (needs --config)");
  chat_cmd->add_option("--asr", chat.asr, "off or noisy");
  chat_cmd->add_option("-s,--seed", chat.seed, "Seed for the noisy channel");
  chat_cmd->add_option("--log", chat.log, "Write the session log here");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "Check a config file");
  validate_cmd->add_option("-c,--config", validate_path, "Experiment config")->required();

  std::string dump_strategy = "SI";
  std::string dump_out;
  auto* dump_cmd = app.add_subcommand("strategy-dump", "Write a built-in strategy as a JSON document");
  dump_cmd->add_option("--strategy", dump_strategy, "SI or MI");
  dump_cmd->add_option("-o,--out", dump_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*report_cmd) return cmd_report(log_path, report_out);
    if (*chat_cmd) return cmd_chat(chat);
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*dump_cmd) return cmd_strategy_dump(dump_strategy, dump_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
