#include "elvis/strategies.hpp"

#include <utility>

namespace elvis {

std::string_view to_string(StrategyKind kind) {
  return kind == StrategyKind::kSystemInitiative ? "SI" : "MI";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  if (name == "SI" || name == "si") return StrategyKind::kSystemInitiative;
  if (name == "MI" || name == "mi") return StrategyKind::kMixedInitiative;
  return std::nullopt;
}

namespace {

using Def = StrategyMachine::Definition;

constexpr const char* kDoneHere = "i'm done here";

Grammar grammar(std::string id, std::set<std::string> actions, std::set<std::string> slots,
                int max_slots, std::map<std::string, std::string> phrases) {
  Grammar g;
  g.id = std::move(id);
  g.actions = std::move(actions);
  g.slots = std::move(slots);
  g.max_slots_per_utterance = max_slots;
  g.phrases = std::move(phrases);
  return g;
}

DialogStateSpec input_state(std::string id, std::string prompt, std::string help,
                            std::vector<std::string> rejections, std::vector<std::string> timeouts,
                            Grammar g, bool barge_in = true) {
  DialogStateSpec s;
  s.id = std::move(id);
  s.initial_prompt = std::move(prompt);
  s.barge_in_enabled = barge_in;
  s.help_prompt = std::move(help);
  s.rejection_prompts = std::move(rejections);
  s.timeout_prompts = std::move(timeouts);
  s.grammar = std::move(g);
  return s;
}

DialogStateSpec output_state(std::string id, std::string prompt) {
  DialogStateSpec s;
  s.id = id;
  s.initial_prompt = std::move(prompt);
  s.barge_in_enabled = false;
  s.grammar.id = std::move(id);
  return s;
}

FramePattern when_action(std::string action) {
  FramePattern p;
  p.action = std::move(action);
  return p;
}

FramePattern when_slot(const std::string& slot) {
  FramePattern p;
  p.slots[slot] = SlotRequirement::kRequired;
  return p;
}

Transition say(std::string from, FramePattern when, std::string to, std::string text = "") {
  Transition t;
  t.from = std::move(from);
  t.pattern = std::move(when);
  t.to = std::move(to);
  t.action.kind = AgentAction::Kind::kPrompt;
  t.action.say = std::move(text);
  return t;
}

Transition app(std::string from, FramePattern when, std::string to, std::string operation,
               std::string on_failure = "", std::string on_exit = "") {
  Transition t;
  t.from = std::move(from);
  t.pattern = std::move(when);
  t.to = std::move(to);
  t.action.kind = AgentAction::Kind::kAppRequest;
  t.action.operation = std::move(operation);
  t.on_failure = std::move(on_failure);
  t.on_exit = std::move(on_exit);
  return t;
}

void add(Def& def, DialogStateSpec s) {
  std::string id = s.id;
  def.states.emplace(std::move(id), std::move(s));
}

}  // namespace

StrategyMachine build_si() {
  using namespace si;
  Def def;
  def.name = "SI";
  def.initial_state = kGreeting;
  def.terminal_states = {kGoodbye};
  def.passthrough = {{kGreeting, kTop}};
  def.static_vocabulary["position"] = {"first", "second", "third", "fourth", "fifth",
                                       "last",  "next",   "previous"};

  add(def, output_state(kGreeting,
                        "Hi, Elvis here. You have {new} new and {unread} unread messages in your inbox."));
  add(def, output_state(kGoodbye, "Goodbye."));

  add(def, input_state(
               kTop, "{response} Say Repeat to repeat this message, or say Read, Summarize, or I'm done here.",
               "You are at the top of your inbox. Say Read to hear a message, Summarize to hear a list of "
               "your messages, Repeat to hear the last message again, or I'm done here to hang up.",
               {"I didn't understand you. Say Read, Summarize, Repeat, or I'm done here.",
                "Sorry, I still didn't get that. Please say one of Read, Summarize, Repeat, or I'm done "
                "here."},
               {"Say Read, Summarize, Repeat, or I'm done here.",
                "You can say Read to hear a message, Summarize to list your messages, or I'm done here to "
                "hang up."},
               grammar("si.top", {"read", "summarize", "repeat", "done"}, {}, 1,
                       {{"read", "read"},
                        {"summarize", "summarize"},
                        {"repeat", "repeat"},
                        {"done", "done"},
                        {kDoneHere, "done"}})));

  add(def, input_state(kSelectMethod, "Select by Content or Position?",
                       "Say Content to pick a message by its sender or subject, or Position to pick it by "
                       "where it is in the folder. Say I'm done here to go back.",
                       {"I didn't understand. Say Content or Position.", "Please say Content or Position."},
                       {"Say Content or Position.",
                        "Say Content to choose by sender or subject, or Position to choose by first, next, "
                        "or last."},
                       grammar("si.select-method", {"content", "position", "done"}, {}, 1,
                               {{"content", "content"},
                                {"position", "position"},
                                {"done", "done"},
                                {kDoneHere, "done"}})));

  add(def, input_state(kSelectField, "Select by Sender or Subject?",
                       "Say Sender to pick a message by who sent it, or Subject to pick it by what it is "
                       "about. Say I'm done here to go back.",
                       {"I didn't understand. Say Sender or Subject.", "Please say Sender or Subject."},
                       {"Say Sender or Subject.",
                        "Say Sender to choose by who sent the message, or Subject to choose by what it is "
                        "about."},
                       grammar("si.select-field", {"by-sender", "by-subject", "done"}, {}, 1,
                               {{"sender", "by-sender"},
                                {"subject", "by-subject"},
                                {"done", "done"},
                                {kDoneHere, "done"}})));

  add(def, input_state(kWhichSender, "Which Sender?",
                       "Say the name of the person who sent the message. Your messages are from {senders}. "
                       "Say I'm done here to go back.",
                       {"I didn't understand. Please say the name of a sender.",
                        "Sorry, I still didn't get that. Your messages are from {senders}."},
                       {"Please say the name of a sender.", "Say one of {senders}."},
                       grammar("si.which-sender", {"done"}, {"sender"}, 1,
                               {{"done", "done"}, {kDoneHere, "done"}})));

  add(def, input_state(kWhichSubject, "Which Subject?",
                       "Say the subject of the message. Your messages are about {subjects}. Say I'm done "
                       "here to go back.",
                       {"I didn't understand. Please say a subject.",
                        "Sorry, I still didn't get that. Your messages are about {subjects}."},
                       {"Please say a subject.", "Say one of {subjects}."},
                       grammar("si.which-subject", {"done"}, {"subject"}, 1,
                               {{"done", "done"}, {kDoneHere, "done"}})));

  add(def, input_state(kWhichPosition, "Which position? Say First, Last, Next, or Previous.",
                       "Say First or Last to pick a message by where it is in the folder, or Next or "
                       "Previous to move from the current one. Say I'm done here to go back.",
                       {"I didn't understand. Say First, Last, Next, or Previous.",
                        "Please say First, Last, Next, or Previous."},
                       {"Say First, Last, Next, or Previous.",
                        "Say First or Last, or say I'm done here to go back."},
                       grammar("si.which-position", {"done"}, {"position"}, 1,
                               {{"done", "done"}, {kDoneHere, "done"}})));

  add(def, input_state(kMessageContext, "{response}",
                       "You are listening to a message. Say Repeat to hear it again, Next or Previous to "
                       "move to another message in this folder, Delete to delete it, or I'm done here to "
                       "leave this folder.",
                       {"I didn't understand. Say Repeat, Next, Previous, Delete, or I'm done here.",
                        "Sorry, I still didn't get that. Say Repeat, Next, Previous, Delete, or I'm done "
                        "here."},
                       {"Say Repeat, Next, Previous, Delete, or I'm done here.",
                        "To leave this folder, say I'm done here. To hear the message again, say Repeat."},
                       grammar("si.message-context", {"repeat", "next", "previous", "delete", "done"}, {}, 1,
                               {{"repeat", "repeat"},
                                {"next", "next"},
                                {"previous", "previous"},
                                {"delete", "delete"},
                                {"done", "done"},
                                {kDoneHere, "done"}})));

  add(def, input_state(kFolderSummary, "{response} Say Read to pick a message, or I'm done here.",
                       "You just heard a summary of this folder. Say Read to pick a message, Repeat to "
                       "hear the summary again, or I'm done here to go back.",
                       {"I didn't understand. Say Read, Repeat, or I'm done here.",
                        "Please say Read, Repeat, or I'm done here."},
                       {"Say Read, Repeat, or I'm done here.",
                        "Say Read to pick a message, or I'm done here to go back."},
                       grammar("si.folder-summary", {"read", "repeat", "done"}, {}, 1,
                               {{"read", "read"},
                                {"repeat", "repeat"},
                                {"done", "done"},
                                {kDoneHere, "done"}})));

  auto& t = def.transitions;
  t.push_back(say(kTop, when_action("read"), kSelectMethod));
  t.push_back(app(kTop, when_action("summarize"), kFolderSummary, op::kSummarize));
  t.push_back(app(kTop, when_action("repeat"), kTop, op::kRepeat));
  t.push_back(say(kTop, when_action("done"), kGoodbye));

  t.push_back(say(kSelectMethod, when_action("content"), kSelectField));
  t.push_back(say(kSelectMethod, when_action("position"), kWhichPosition));
  t.push_back(say(kSelectMethod, when_action("done"), kTop));

  t.push_back(say(kSelectField, when_action("by-sender"), kWhichSender));
  t.push_back(say(kSelectField, when_action("by-subject"), kWhichSubject));
  t.push_back(say(kSelectField, when_action("done"), kTop));

  t.push_back(app(kWhichSender, when_slot("sender"), kMessageContext, op::kRead));
  t.push_back(say(kWhichSender, when_action("done"), kTop));
  t.push_back(app(kWhichSubject, when_slot("subject"), kMessageContext, op::kRead));
  t.push_back(say(kWhichSubject, when_action("done"), kTop));
  t.push_back(app(kWhichPosition, when_slot("position"), kMessageContext, op::kRead));
  t.push_back(say(kWhichPosition, when_action("done"), kTop));

  t.push_back(app(kMessageContext, when_action("repeat"), kMessageContext, op::kRepeat));
  t.push_back(app(kMessageContext, when_action("next"), kMessageContext, op::kNext));
  t.push_back(app(kMessageContext, when_action("previous"), kMessageContext, op::kPrevious));
  t.push_back(app(kMessageContext, when_action("delete"), kMessageContext, op::kDelete));
  t.push_back(app(kMessageContext, when_action("done"), kTop, op::kDone));

  t.push_back(say(kFolderSummary, when_action("read"), kSelectMethod));
  t.push_back(app(kFolderSummary, when_action("repeat"), kFolderSummary, op::kRepeat));
  t.push_back(say(kFolderSummary, when_action("done"), kTop));

  return StrategyMachine::create(std::move(def));
}

StrategyMachine build_mi() {
  using namespace mi;
  Def def;
  def.name = "MI";
  def.initial_state = kGreeting;
  def.terminal_states = {kGoodbye};
  def.passthrough = {{kGreeting, kMain}};
  def.static_vocabulary["position"] = {"first", "second", "third", "fourth", "fifth", "last"};

  add(def, output_state(kGreeting, "Hi, Elvis here. I've got your mail."));
  add(def, output_state(kGoodbye, "Goodbye."));

  Grammar g = grammar("mi.main",
                      {"read", "summarize", "repeat", "next", "previous", "delete", "done", "list-senders",
                       "list-subjects", "content", "position", "by-sender", "by-subject"},
                      {"sender", "subject", "position"}, 3,
                      {{"read", "read"},
                       {"summarize", "summarize"},
                       {"summary", "summarize"},
                       {"repeat", "repeat"},
                       {"next", "next"},
                       {"previous", "previous"},
                       {"delete", "delete"},
                       {"done", "done"},
                       {kDoneHere, "done"},
                       {"list senders", "list-senders"},
                       {"list subjects", "list-subjects"},
                       {"content", "content"},
                       {"position", "position"},
                       {"sender", "by-sender"},
                       {"subject", "by-subject"}});
  g.slot_cues = {{"from", "sender"}, {"about", "subject"}};

  add(def, input_state(
               kMain, "{response}",
               "You can read, summarize, or delete messages, and move to the next or previous message. "
               "Pick messages by sender or subject, for example, Read my messages from Kim. Say 'List "
               "senders' or 'List subjects' to hear who wrote to you and about what. Say 'I'm done here' to "
               "leave the current folder, or to hang up from your inbox.",
               {"Sorry, I didn't understand you.",
                "Sorry, I still didn't understand. Say Help to hear what you can say."},
               {"You can access messages using values from the sender or the subject field. If you need "
                "to know a list of senders or subjects, say 'List senders', or 'List subjects'. If you want "
                "to exit the current folder, say 'I'm done here'.",
                "You can say things like Read my messages from Kim, or Summarize my messages. Say 'I'm "
                "done here' to exit the current folder."},
               std::move(g)));

  auto& t = def.transitions;
  t.push_back(app(kMain, when_action("read"), kMain, op::kRead));
  t.push_back(app(kMain, FramePattern{}, kMain, op::kRead));  // bare slot values
  t.push_back(app(kMain, when_action("summarize"), kMain, op::kSummarize));
  t.push_back(app(kMain, when_action("repeat"), kMain, op::kRepeat));
  t.push_back(app(kMain, when_action("next"), kMain, op::kNext));
  t.push_back(app(kMain, when_action("previous"), kMain, op::kPrevious));
  t.push_back(app(kMain, when_action("delete"), kMain, op::kDelete));
  t.push_back(app(kMain, when_action("done"), kMain, op::kDone, "", kGoodbye));
  t.push_back(app(kMain, when_action("list-senders"), kMain, op::kListSenders));
  t.push_back(app(kMain, when_action("list-subjects"), kMain, op::kListSubjects));
  t.push_back(app(kMain, when_action("by-sender"), kMain, op::kListSenders));
  t.push_back(app(kMain, when_action("by-subject"), kMain, op::kListSubjects));
  t.push_back(say(kMain, when_action("content"), kMain,
                  "You can pick messages by sender or subject. For example, say Read my messages from "
                  "Kim."));
  t.push_back(say(kMain, when_action("position"), kMain,
                  "You can pick a message by position. For example, say Read the last message."));

  return StrategyMachine::create(std::move(def));
}

StrategyMachine build_strategy(StrategyKind kind) {
  return kind == StrategyKind::kSystemInitiative ? build_si() : build_mi();
}

}  // namespace elvis
