#include <gtest/gtest.h>

#include <filesystem>

#include "elvis/emai.hpp"
#include "elvis/error.hpp"
#include "elvis/machine_io.hpp"
#include "elvis/session.hpp"
#include "elvis/strategies.hpp"
#include "paths.hpp"

using namespace elvis;

namespace {

std::vector<Message> task1() { return load_mailbox(test::data_dir() / "mailboxes" / "task1.mbox"); }

const char* kKimMessage =
    "The message from Kim is about Meeting Tomorrow. The meeting tomorrow is at 10:30 in 2D-516.";

}  // namespace

TEST(SystemInitiative, OneIncrementPerState) {
  const auto si = build_si();
  EXPECT_EQ(si.input_states().size(), 8u);
  for (const auto& id : si.input_states()) {
    EXPECT_EQ(si.state(id).grammar.max_slots_per_utterance, 1) << id;
    EXPECT_LE(si.state(id).grammar.slots.size(), 1u) << id;
  }
}

TEST(MixedInitiative, SingleStateSupersetOfSystemInitiative) {
  const auto si = build_si();
  const auto mi = build_mi();
  ASSERT_EQ(mi.input_states(), std::vector<std::string>{mi::kMain});
  const Grammar& g = mi.state(mi::kMain).grammar;
  EXPECT_EQ(g.max_slots_per_utterance, 3);
  for (const auto& id : si.input_states()) {
    for (const auto& a : si.state(id).grammar.actions) EXPECT_TRUE(g.actions.count(a)) << a;
    for (const auto& s : si.state(id).grammar.slots) EXPECT_TRUE(g.slots.count(s)) << s;
  }
  std::set<std::string> si_ops;
  std::set<std::string> mi_ops;
  for (const auto& t : si.transitions()) {
    if (t.action.kind == AgentAction::Kind::kAppRequest) si_ops.insert(t.action.operation);
  }
  for (const auto& t : mi.transitions()) {
    if (t.action.kind == AgentAction::Kind::kAppRequest) mi_ops.insert(t.action.operation);
  }
  EXPECT_TRUE(std::includes(mi_ops.begin(), mi_ops.end(), si_ops.begin(), si_ops.end()));
}

TEST(SystemInitiative, GoldenWalk) {
  const auto si = build_si();
  DialogSession s(si, task1());
  const auto lines = play_script(s, {"Read", "Content", "Sender", "Kim"});
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0],
            "Hi, Elvis here. You have 5 new and 0 unread messages in your inbox. Say Repeat to repeat this "
            "message, or say Read, Summarize, or I'm done here.");
  EXPECT_EQ(lines[1], "Select by Content or Position?");
  EXPECT_EQ(lines[2], "Select by Sender or Subject?");
  EXPECT_EQ(lines[3], "Which Sender?");
  EXPECT_EQ(lines[4], kKimMessage);
  EXPECT_EQ(s.state(), si::kMessageContext);
}

TEST(MixedInitiative, GoldenWalk) {
  const auto mi = build_mi();
  DialogSession s(mi, task1());
  const auto lines = play_script(s, {"Read me my messages from Kim."});
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "Hi, Elvis here. I've got your mail.");
  EXPECT_EQ(lines[1], kKimMessage);
}

TEST(MixedInitiative, TimeoutPromptTeachesTheGrammar) {
  const auto mi = build_mi();
  DialogSession s(mi, task1());
  s.start();
  EXPECT_EQ(s.silence().text.rfind("You can access messages using values from the sender or the subject field.", 0),
            0u);
}

TEST(Strategies, DoneAtTheTopEndsTheSession) {
  for (auto kind : {StrategyKind::kSystemInitiative, StrategyKind::kMixedInitiative}) {
    const auto m = build_strategy(kind);
    DialogSession s(m, task1());
    play_script(s, {"I'm done here"});
    EXPECT_TRUE(s.finished()) << to_string(kind);
    EXPECT_EQ(s.end_reason(), "completed");
    EXPECT_TRUE(m.is_terminal(s.state()));
  }
}

TEST(Strategies, NamesParse) {
  EXPECT_EQ(parse_strategy("SI"), StrategyKind::kSystemInitiative);
  EXPECT_EQ(parse_strategy("MI"), StrategyKind::kMixedInitiative);
  EXPECT_FALSE(parse_strategy("XI"));
  EXPECT_EQ(to_string(StrategyKind::kMixedInitiative), "MI");
}

TEST(MachineIo, RoundTripPreservesEverything) {
  for (auto kind : {StrategyKind::kSystemInitiative, StrategyKind::kMixedInitiative}) {
    const auto m = build_strategy(kind);
    const auto doc = machine_to_json(m);
    const auto back = machine_from_json(doc);
    EXPECT_EQ(machine_to_json(back), doc);
  }
}

TEST(MachineIo, ShippedFixturesMatchTheBuiltIns) {
  EXPECT_EQ(machine_to_json(load_machine(test::data_dir() / "strategies" / "si.json")), machine_to_json(build_si()));
  EXPECT_EQ(machine_to_json(load_machine(test::data_dir() / "strategies" / "mi.json")), machine_to_json(build_mi()));
}

TEST(MachineIo, SaveThenLoad) {
  const auto path = std::filesystem::temp_directory_path() / "elvis-test-mi.json";
  save_machine(build_mi(), path);
  EXPECT_EQ(machine_to_json(load_machine(path)), machine_to_json(build_mi()));
  std::filesystem::remove(path);
}

TEST(MachineIo, MalformedDocumentsAreRejected) {
  auto doc = machine_to_json(build_si());
  auto wrong_schema = doc;
  wrong_schema["schema"] = "something-else";
  EXPECT_THROW(machine_from_json(wrong_schema), ConfigError);
  auto no_states = doc;
  no_states.erase("states");
  EXPECT_THROW(machine_from_json(no_states), ConfigError);
  auto bad_target = doc;
  bad_target["transitions"][0]["to"] = "nowhere";
  EXPECT_THROW(machine_from_json(bad_target), MachineDefinitionError);
}
