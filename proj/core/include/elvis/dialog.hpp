#pragma once

// Finite-state dialog engine. A StrategyMachine is a set of DialogStateSpecs
// plus frame-pattern transitions; interpretation of user input is keyword and
// slot-value spotting against the active state's grammar.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace elvis {

/// What the user may say in one state.
struct Grammar {
  std::string id;
  std::set<std::string> actions;
  std::set<std::string> slots;
  int max_slots_per_utterance = 1;
  /// Surface phrase (lowercase tokens separated by single spaces) -> action.
  std::map<std::string, std::string> phrases;
  /// Cue word -> slot, used when one value belongs to several slot
  /// vocabularies ("from" -> sender, "about" -> subject).
  std::map<std::string, std::string> slot_cues;

  bool accepts_input() const { return !actions.empty() || !slots.empty(); }
};

/// Slot name -> admissible values. Sender and subject vocabularies are bound
/// from the mailbox at session start; static ones come from the machine.
using SlotVocabulary = std::map<std::string, std::vector<std::string>>;

struct SemanticFrame {
  std::optional<std::string> action;
  std::map<std::string, std::string> slot_values;

  bool empty() const { return !action && slot_values.empty(); }
  /// Action plus slot values; the unit of concept accuracy.
  std::size_t concept_count() const { return (action ? 1 : 0) + slot_values.size(); }
  bool has_slot(const std::string& slot) const { return slot_values.count(slot) != 0; }

  friend bool operator==(const SemanticFrame&, const SemanticFrame&) = default;
};

std::string to_string(const SemanticFrame& frame);

/// Lowercased tokens with surrounding punctuation stripped. Internal
/// apostrophes, colons and hyphens survive ("i'm", "10:30", "2d-516").
std::vector<std::string> tokenize(std::string_view text);

/// Keyword/slot spotting. Returns nullopt (no-parse) when nothing licensed by
/// the grammar is found. Longest phrase wins; the first action wins; at most
/// max_slots_per_utterance slots are kept, in utterance order.
std::optional<SemanticFrame> interpret(std::string_view utterance, const Grammar& grammar,
                                       const SlotVocabulary& vocabulary);

/// True when every concept in the frame is licensed by the grammar.
bool conforms(const SemanticFrame& frame, const Grammar& grammar);

struct DialogStateSpec {
  std::string id;
  std::string initial_prompt;
  bool barge_in_enabled = true;
  std::string help_prompt;
  std::vector<std::string> rejection_prompts;
  std::vector<std::string> timeout_prompts;
  Grammar grammar;

  bool accepts_input() const { return grammar.accepts_input(); }
};

enum class SlotRequirement { kRequired, kForbidden };

/// Exact action match plus slot-presence predicates. Slots not mentioned are
/// unconstrained. An absent action matches only frames without an action.
struct FramePattern {
  std::optional<std::string> action;
  std::map<std::string, SlotRequirement> slots;

  bool matches(const SemanticFrame& frame) const;
  /// Whether some frame could satisfy both patterns.
  bool overlaps(const FramePattern& other) const;
};

struct AgentAction {
  enum class Kind { kPrompt, kAppRequest };
  Kind kind = Kind::kPrompt;
  /// Application operation for kAppRequest ("read", "summarize", "done", ...).
  std::string operation;
  /// Response text spoken before the target state's prompt (kPrompt only).
  std::string say;

  friend bool operator==(const AgentAction&, const AgentAction&) = default;
};

struct Transition {
  std::string from;
  FramePattern pattern;
  std::string to;
  AgentAction action;
  /// Target when an application request fails; empty means stay in `from`.
  std::string on_failure;
  /// Target when the application ends the session (leaving the top folder);
  /// empty means the first terminal state.
  std::string on_exit;
};

/// Immutable after construction; `create` validates every structural
/// invariant, so a machine in hand is well-formed.
class StrategyMachine {
 public:
  struct Definition {
    std::string name;
    std::map<std::string, DialogStateSpec> states;
    std::string initial_state;
    std::vector<Transition> transitions;
    std::set<std::string> terminal_states;
    /// Non-input states that move on immediately (greetings).
    std::map<std::string, std::string> passthrough;
    /// Vocabularies that do not depend on the mailbox (e.g. positions).
    SlotVocabulary static_vocabulary;
  };

  /// Throws MachineDefinitionError naming the offending state/transition.
  static StrategyMachine create(Definition definition);

  const std::string& name() const { return def_.name; }
  const std::string& initial_state() const { return def_.initial_state; }
  const std::map<std::string, DialogStateSpec>& states() const { return def_.states; }
  const std::vector<Transition>& transitions() const { return def_.transitions; }
  const std::set<std::string>& terminal_states() const { return def_.terminal_states; }
  const std::map<std::string, std::string>& passthrough() const { return def_.passthrough; }
  const SlotVocabulary& static_vocabulary() const { return def_.static_vocabulary; }
  const Definition& definition() const { return def_; }

  const DialogStateSpec& state(const std::string& id) const;
  bool is_terminal(const std::string& id) const { return def_.terminal_states.count(id) != 0; }
  /// States that take user input (neither terminal nor passthrough).
  std::vector<std::string> input_states() const;
  const Transition* find_transition(const std::string& state, const SemanticFrame& frame) const;

 private:
  explicit StrategyMachine(Definition def) : def_(std::move(def)) {}
  Definition def_;
};

struct Step {
  std::string next;
  AgentAction action;
  std::string on_failure;
  std::string on_exit;
};

/// Throws UnmatchedFrameError when no transition matches (a strategy bug) and
/// PreconditionError when `current` is terminal or unknown.
Step advance(const StrategyMachine& machine, const std::string& current, const SemanticFrame& frame);

/// timeout_prompts[min(n, size) - 1]; n must be >= 1.
const std::string& on_silence(const DialogStateSpec& state, int consecutive_timeouts);
const std::string& on_rejection(const DialogStateSpec& state, int consecutive_rejections);
/// Throws PreconditionError for states without input (terminal/passthrough).
const std::string& on_help(const DialogStateSpec& state);

/// Every frame the grammar can produce: each action (or none) combined with
/// each subset of slots up to the slot cap, ignoring concrete values.
std::vector<SemanticFrame> frame_shapes(const Grammar& grammar);

/// Prompt text with {response} and {name} placeholders filled. Runs of
/// whitespace left by empty substitutions collapse to one space.
std::string render_prompt(std::string_view templ, const std::map<std::string, std::string>& vars);

// --- Session event log -------------------------------------------------------

enum class EventKind {
  kAgentPrompt,
  kUserUtterance,
  kTimeout,
  kAsrRejection,
  kHelpRequest,
  kBargeIn,
  kAppAccess,
  kTaskEnd,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

namespace event {

struct AgentPrompt {
  std::string state;
  std::string text;
};
struct UserUtterance {
  std::string state;
  std::string text;
  SemanticFrame intended;
  std::optional<SemanticFrame> recognized;  // absent when rejected
  double concept_accuracy = 0.0;
};
struct Timeout {
  std::string state;
  int consecutive = 1;
};
struct AsrRejection {
  std::string state;
  int consecutive = 1;
};
struct HelpRequest {
  std::string state;
};
struct BargeIn {
  std::string state;
  std::size_t word_offset = 0;
};
struct AppAccess {
  std::string operation;
  bool ok = true;
};
struct TaskEnd {
  std::string status;  // "completed", "hang-up", "turn-cap", "eof"
  std::map<std::string, std::string> observed_avm;
};

}  // namespace event

using EventPayload = std::variant<event::AgentPrompt, event::UserUtterance, event::Timeout,
                                  event::AsrRejection, event::HelpRequest, event::BargeIn,
                                  event::AppAccess, event::TaskEnd>;

struct DialogEvent {
  std::uint64_t tick = 0;
  EventPayload payload;

  EventKind kind() const { return static_cast<EventKind>(payload.index()); }
};

}  // namespace elvis
