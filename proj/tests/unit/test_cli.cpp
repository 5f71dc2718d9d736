#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "paths.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result sh(const std::string& command) {
  Result r;
  FILE* p = popen(command.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string cli() { return ELVIS_CLI; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("elvis-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, ChatPlaysTheSystemInitiativeScript) {
  const auto r = sh("printf 'Read\\nContent\\nSender\\nKim\\n' | " + cli() + " chat --strategy SI");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out,
            "A: Hi, Elvis here. You have 5 new and 0 unread messages in your inbox. Say Repeat to repeat this "
            "message, or say Read, Summarize, or I'm done here.\n"
            "A: Select by Content or Position?\n"
            "A: Select by Sender or Subject?\n"
            "A: Which Sender?\n"
            "A: The message from Kim is about Meeting Tomorrow. The meeting tomorrow is at 10:30 in 2D-516.\n");
}

TEST(Cli, ChatWritesALog) {
  const auto dir = scratch("chat");
  const auto r = sh("printf 'Read me my messages from Kim.\\nI'\"'\"'m done here\\nI'\"'\"'m done here\\n' | " + cli() +
                    " chat --strategy MI -c " + elvis::test::default_config().string() + " --scenario 1.1 --log " +
                    (dir / "chat.jsonl").string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("A: Goodbye."), std::string::npos) << r.out;
  const auto report = sh(cli() + " report -l " + (dir / "chat.jsonl").string());
  EXPECT_EQ(report.status, 0);
  EXPECT_NE(report.out.find("fewer than two records"), std::string::npos);
}

TEST(Cli, ValidateConfig) {
  const auto ok = sh(cli() + " validate-config -c " + elvis::test::default_config().string());
  EXPECT_EQ(ok.status, 0);
  EXPECT_NE(ok.out.find("config ok: 2 arms, 12 subjects, 3 tasks"), std::string::npos) << ok.out;
  const auto dir = scratch("validate");
  std::ofstream(dir / "bad.json") << "{\"seed\": 1}";
  const auto bad = sh(cli() + " validate-config -c " + (dir / "bad.json").string() + " 2>&1");
  EXPECT_EQ(bad.status, 2);
  EXPECT_NE(bad.out.find("/turn_cap"), std::string::npos) << bad.out;
}

TEST(Cli, RunIsDeterministicAndReportReproduces) {
  const auto a = scratch("run-a");
  const auto b = scratch("run-b");
  const std::string config = elvis::test::default_config().string();
  ASSERT_EQ(sh(cli() + " run -q -c " + config + " -o " + a.string() + " 2>/dev/null").status, 0);
  ASSERT_EQ(sh(cli() + " run -q -c " + config + " -o " + b.string() + " 2>/dev/null").status, 0);
  for (const char* f : {"elvis-log.jsonl", "report.txt", "report.csv"}) {
    EXPECT_FALSE(slurp(a / f).empty()) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto again = sh(cli() + " report -l " + (a / "elvis-log.jsonl").string());
  EXPECT_EQ(again.status, 0);
  EXPECT_EQ(again.out, slurp(a / "report.txt"));
  const auto other = scratch("run-c");
  ASSERT_EQ(sh(cli() + " run -q -s 5 -c " + config + " -o " + other.string() + " 2>/dev/null").status, 0);
  EXPECT_NE(slurp(other / "elvis-log.jsonl"), slurp(a / "elvis-log.jsonl"));
}

TEST(Cli, StrategyDumpMatchesTheFixtures) {
  const auto si = sh(cli() + " strategy-dump --strategy SI");
  EXPECT_EQ(si.out, slurp(elvis::test::data_dir() / "strategies" / "si.json"));
  const auto mi = sh(cli() + " strategy-dump --strategy MI");
  EXPECT_EQ(mi.out, slurp(elvis::test::data_dir() / "strategies" / "mi.json"));
  EXPECT_NE(sh(cli() + " strategy-dump --strategy XI 2>/dev/null").status, 0);
}
