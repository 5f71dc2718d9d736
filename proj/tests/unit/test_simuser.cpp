#include <gtest/gtest.h>

#include <numeric>

#include "elvis/rng.hpp"
#include "elvis/simuser.hpp"
#include "elvis/strategies.hpp"

using namespace elvis;

namespace {

ScenarioKey kim_key() {
  return ScenarioKey{"1.1", {{"sender", "Kim"}, {"subject", "Meeting Tomorrow"}}, {{"time", "10:30"}, {"place", "2D516"}}};
}

SubjectProfile expert() {
  SubjectProfile p;
  p.id = "X";
  p.base_expertise = 1.0;
  return p;
}

UserModel decisive() {
  UserModel m;
  m.help_propensity = 0.0;
  m.sender_preference = 1.0;
  return m;
}

AgentTurn turn_at(std::string state, std::string text = "", std::size_t depth = 1) {
  AgentTurn t;
  t.state = std::move(state);
  t.text = std::move(text);
  t.folder_depth = depth;
  return t;
}

}  // namespace

TEST(Normalize, PunctuationAndCaseDoNotMatter) {
  EXPECT_EQ(normalize_value("2D-516."), normalize_value("2D516"));
  EXPECT_EQ(normalize_value("10:30."), "10:30");
  EXPECT_EQ(normalize_value("  Dave   BRENNAN "), "dave brennan");
}

TEST(Absorb, WholeTokenRunsOnly) {
  GoalState g{kim_key(), {}, false};
  g = absorb(g, "The meeting is at 10:30.");
  EXPECT_EQ(g.acquired.count("time"), 1u);
  EXPECT_FALSE(g.done);
  g = absorb(g, "Room 2D516X is closed.");
  EXPECT_EQ(g.acquired.count("place"), 0u);
  g = absorb(g, "It is in 2D-516.");
  EXPECT_TRUE(g.done);
}

TEST(Realize, RoundTripsThroughTheGrammar) {
  const auto mi = build_mi();
  const Grammar& g = mi.state(mi::kMain).grammar;
  SlotVocabulary vocab = mi.static_vocabulary();
  vocab["sender"] = {"Kim", "Lee"};
  vocab["subject"] = {"Meeting Tomorrow", "Budget"};
  SemanticFrame f;
  f.action = "read";
  f.slot_values = {{"sender", "Kim"}, {"subject", "Budget"}};
  const auto parsed = interpret(realize(f, g), g, vocab);
  ASSERT_TRUE(parsed);
  EXPECT_EQ(*parsed, f);
  SemanticFrame done;
  done.action = "done";
  EXPECT_EQ(realize(done, g), "i'm done here");
}

TEST(Expertise, GrowsWithTasksAndCaps) {
  SubjectProfile p;
  p.base_expertise = 0.5;
  p.learning_rate = 0.3;
  EXPECT_DOUBLE_EQ(p.expertise_after(0), 0.5);
  EXPECT_DOUBLE_EQ(p.expertise_after(1), 0.8);
  EXPECT_DOUBLE_EQ(p.expertise_after(5), 1.0);
}

TEST(NextAction, MixedInitiativeAsksForEverythingAtOnce) {
  SimulatedUser u(StrategyKind::kMixedInitiative, expert(), 1, {kim_key()}, decisive());
  Rng rng(1);
  const auto a = u.next_action(turn_at("main", "Hi, Elvis here. I've got your mail."), rng);
  ASSERT_EQ(a.kind, UserAction::Kind::kUtterance);
  EXPECT_EQ(a.frame.action, std::optional<std::string>("read"));
  EXPECT_EQ(a.frame.slot_values, (std::map<std::string, std::string>{{"sender", "Kim"}}));
}

TEST(NextAction, SystemInitiativeFollowsThePrompts) {
  SimulatedUser u(StrategyKind::kSystemInitiative, expert(), 1, {kim_key()}, decisive());
  Rng rng(1);
  EXPECT_EQ(u.next_action(turn_at("top"), rng).frame.action, std::optional<std::string>("read"));
  EXPECT_EQ(u.next_action(turn_at("select-method"), rng).frame.action, std::optional<std::string>("content"));
  EXPECT_EQ(u.next_action(turn_at("select-field"), rng).frame.action, std::optional<std::string>("by-sender"));
  const auto name = u.next_action(turn_at("which-sender"), rng);
  EXPECT_EQ(name.frame.slot_values.at("sender"), "Kim");
}

TEST(NextAction, LeavesOnceTheGoalIsMet) {
  SimulatedUser u(StrategyKind::kMixedInitiative, expert(), 1, {kim_key()}, decisive());
  Rng rng(1);
  AgentTurn msg = turn_at("main",
                          "The message from Kim is about Meeting Tomorrow. The meeting tomorrow is at 10:30 in 2D-516.",
                          2);
  msg.cause = AgentTurn::Cause::kResponse;
  msg.operation = "read";
  u.hear(msg);
  EXPECT_TRUE(u.all_done());
  EXPECT_EQ(u.observed_avm(), (std::map<std::string, std::string>{{"1.1:place", "2D516"}, {"1.1:time", "10:30"}}));
  EXPECT_EQ(u.next_action(msg, rng).frame.action, std::optional<std::string>("done"));
  AgentTurn end = turn_at("goodbye", "Goodbye.");
  end.finished = true;
  EXPECT_EQ(u.next_action(end, rng).kind, UserAction::Kind::kHangUp);
}

TEST(NextAction, RepeatsWhenTheTargetSlipped) {
  UserModel m = decisive();
  m.recall_rate = 0.0;
  SimulatedUser u(StrategyKind::kMixedInitiative, expert(), 1, {kim_key()}, m);
  Rng rng(1);
  Rng recall(2);
  AgentTurn msg = turn_at("main",
                          "The message from Kim is about Meeting Tomorrow. The meeting tomorrow is at 10:30 in 2D-516.",
                          2);
  msg.cause = AgentTurn::Cause::kResponse;
  msg.operation = "read";
  u.hear(msg, &recall);
  EXPECT_FALSE(u.all_done());
  EXPECT_EQ(u.next_action(msg, rng).frame.action, std::optional<std::string>("repeat"));
}

TEST(NextAction, FailedLookupsSwitchCriterionThenAbandon) {
  UserModel m = decisive();
  m.max_failed_reads = 2;
  SimulatedUser u(StrategyKind::kMixedInitiative, expert(), 1, {kim_key()}, m);
  Rng rng(1);
  const auto first = u.next_action(turn_at("main"), rng);
  EXPECT_EQ(first.frame.slot_values.count("sender"), 1u);
  AgentTurn fail = turn_at("main", "There are no messages from Kim.");
  fail.cause = AgentTurn::Cause::kResponse;
  fail.operation = "read";
  fail.operation_ok = false;
  u.hear(fail);
  const auto second = u.next_action(fail, rng);
  EXPECT_EQ(second.frame.slot_values.count("subject"), 1u);
  u.hear(fail);
  EXPECT_TRUE(u.goals()[0].abandoned);
  EXPECT_TRUE(u.all_done());
  EXPECT_EQ(u.next_action(fail, rng).frame.action, std::optional<std::string>("done"));
}

TEST(NextAction, PatienceRunsOut) {
  UserModel m = decisive();
  m.patience_turns = 3;
  SimulatedUser u(StrategyKind::kSystemInitiative, expert(), 1, {kim_key()}, m);
  Rng rng(1);
  for (int i = 0; i < 3; ++i) EXPECT_NE(u.next_action(turn_at("top"), rng).kind, UserAction::Kind::kHangUp);
  EXPECT_EQ(u.next_action(turn_at("top"), rng).kind, UserAction::Kind::kHangUp);
}

TEST(Survey, ScoresStayOnTheScale) {
  Rng rng(4);
  const SurveyModel model;
  for (int i = 0; i < 2000; ++i) {
    SessionMetrics m;
    m.mean_recognition = rng.uniform();
    m.user_turns = static_cast<int>(rng.index(80));
    m.asr_rejections = static_cast<int>(rng.index(10));
    m.timeout_prompts = static_cast<int>(rng.index(10));
    m.help_requests = static_cast<int>(rng.index(5));
    m.elapsed_ticks = rng.index(1000);
    m.task_completion = rng.uniform();
    m.expertise = rng.uniform();
    SubjectProfile p;
    p.satisfaction_bias = rng.normal(0.0, 2.0);
    const auto s = survey(m, p, model, rng);
    for (int v : s.scores) {
      ASSERT_GE(v, 1);
      ASSERT_LE(v, 5);
    }
    for (auto q : {SurveyQuestion::kExpectedBehavior, SurveyQuestion::kFutureUse}) {
      const int v = s[q];
      EXPECT_TRUE(v == 1 || v == 3 || v == 5) << v;
    }
    EXPECT_EQ(s.cumulative(), std::accumulate(s.scores.begin(), s.scores.end(), 0));
  }
}

TEST(Survey, MonotoneInBiasAndRecognition) {
  const SurveyModel model;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SessionMetrics m;
    m.user_turns = 15;
    m.elapsed_ticks = 90;
    m.mean_recognition = 0.7;
    SubjectProfile low;
    SubjectProfile high;
    high.satisfaction_bias = 0.5;
    Rng a(seed);
    Rng b(seed);
    EXPECT_LE(survey(m, low, model, a).cumulative(), survey(m, high, model, b).cumulative());
    SessionMetrics better = m;
    better.mean_recognition = 0.95;
    Rng c(seed);
    Rng d(seed);
    EXPECT_LE(survey(m, low, model, c).cumulative(), survey(better, low, model, d).cumulative());
  }
}
