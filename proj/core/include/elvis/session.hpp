#pragma once

// One conversation: runs a StrategyMachine against a session copy of the
// mailbox, executes application requests, keeps the timeout/rejection
// counters and writes the event trace.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elvis/channel.hpp"
#include "elvis/dialog.hpp"
#include "elvis/emai.hpp"
#include "elvis/simuser.hpp"

namespace elvis {

struct TickCosts {
  std::uint64_t prompt = 1;
  std::uint64_t app_access = 10;
  std::uint64_t user_utterance = 1;
  std::uint64_t timeout_wait = 5;

  friend bool operator==(const TickCosts&, const TickCosts&) = default;
};

struct SessionOptions {
  /// User inputs (utterances, silences, help requests) before the session is
  /// forced to end.
  int turn_cap = 100;
  TickCosts ticks;
};

class DialogSession {
 public:
  DialogSession(const StrategyMachine& machine, std::vector<Message> mailbox, SessionOptions options = {});

  /// Plays the initial prompt (and any passthrough states).
  AgentTurn start();
  /// The user said nothing.
  AgentTurn silence();
  /// The user asked for help.
  AgentTurn help();
  /// A recognized (or rejected) utterance. `intended` is what the user meant.
  AgentTurn utter(const std::string& text, const SemanticFrame& intended, const RecognitionResult& result);
  /// Typed input: interprets the text against the active grammar. A no-parse
  /// is handled like a rejection. With `noise`, the interpreted frame passes
  /// through the recognizer first.
  AgentTurn say(std::string_view text, const RecognitionRates* noise = nullptr, Rng* rng = nullptr);
  /// Records that the user cut into the last prompt after `word_offset` words.
  void barge_in(std::size_t word_offset);

  /// True once a terminal state was reached, the turn cap fired, or close()
  /// was called.
  bool finished() const { return finished_; }
  /// Why the dialog stopped on its own ("completed", "turn-cap"); empty while running.
  const std::string& end_reason() const { return end_reason_; }
  /// Appends task-end. Allowed once; `status` defaults to end_reason().
  void close(std::map<std::string, std::string> observed_avm, std::string status = "");
  bool closed() const { return closed_; }

  const std::string& state() const { return state_; }
  const DialogStateSpec& state_spec() const { return machine_->state(state_); }
  const SlotVocabulary& vocabulary() const { return vocabulary_; }
  const FolderStack& folders() const { return folders_; }
  const std::vector<DialogEvent>& events() const { return events_; }
  std::uint64_t tick() const { return tick_; }
  int user_inputs() const { return inputs_; }

 private:
  struct OpResult {
    bool ok = true;
    bool session_end = false;
    std::string text;
  };

  void log(EventPayload payload, std::uint64_t cost);
  std::map<std::string, std::string> prompt_vars(const std::string& response) const;
  std::string render(const std::string& templ, const std::string& response) const;
  AgentTurn prompt(const std::string& text, AgentTurn::Cause cause);
  AgentTurn enter(std::string target, const std::string& response, AgentTurn::Cause cause,
                  const std::string& operation = "", bool ok = true);
  OpResult run(const std::string& operation, const SemanticFrame& frame);
  void count_input();
  void require_input_state() const;

  const StrategyMachine* machine_;
  SessionOptions options_;
  FolderStack folders_;
  SlotVocabulary vocabulary_;
  std::string state_;
  std::vector<DialogEvent> events_;
  std::uint64_t tick_ = 0;
  int inputs_ = 0;
  int timeouts_ = 0;
  int rejections_ = 0;
  std::string last_response_;
  std::string end_reason_;
  bool started_ = false;
  bool finished_ = false;
  bool closed_ = false;
};

/// Console input: "help" asks for help, an empty line or "/silence" is a
/// silence, anything else is speech.
AgentTurn respond(DialogSession& session, std::string_view line, const RecognitionRates* noise = nullptr,
                  Rng* rng = nullptr);

/// Agent lines of a scripted conversation: the opening prompt, then one
/// reply per input line. Stops early when the dialog ends.
std::vector<std::string> play_script(DialogSession& session, const std::vector<std::string>& lines,
                                     const RecognitionRates* noise = nullptr, Rng* rng = nullptr);

}  // namespace elvis
