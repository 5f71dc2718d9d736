#pragma once

// Goal-driven simulated subject. A user carries the scenario keys of one
// conversation, decides what to say from the agent's last turn, learns from
// help and timeout prompts, and fills in the post-task survey.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elvis/dialog.hpp"
#include "elvis/rng.hpp"
#include "elvis/strategies.hpp"

namespace elvis {

struct SelectionTerm {
  std::string field;  // "sender" or "subject"
  std::string value;

  friend bool operator==(const SelectionTerm&, const SelectionTerm&) = default;
};

/// Attribute-value matrix of one subtask: how the message can be found (any
/// one of the terms) and what must be learned from it.
struct ScenarioKey {
  std::string id;  // "1.1"
  std::vector<SelectionTerm> selection;
  std::map<std::string, std::string> targets;

  friend bool operator==(const ScenarioKey&, const ScenarioKey&) = default;
};

struct SubjectProfile {
  std::string id;
  double base_expertise = 0.5;
  double learning_rate = 0.1;
  double barge_in_propensity = 0.0;
  double hesitation = 0.0;
  double satisfaction_bias = 0.0;

  /// min(1, base + tasks_done * learning_rate)
  double expertise_after(int tasks_done) const;

  friend bool operator==(const SubjectProfile&, const SubjectProfile&) = default;
};

struct GoalState {
  ScenarioKey key;
  std::map<std::string, std::string> acquired;
  bool done = false;
  /// Given up after too many failed lookups; whatever was acquired is reported.
  bool abandoned = false;
  int failed_reads = 0;
};

/// Canonical form used to decide whether a value was heard: lowercase
/// tokens with everything but letters, digits and ':' removed, so "2D-516."
/// and "2D516" compare equal.
std::string normalize_value(std::string_view text);

/// Marks every target attribute whose value occurs (as a whole-token run,
/// after normalization) in the spoken text.
GoalState absorb(GoalState goal, std::string_view spoken);

/// Surface words for a frame under a grammar; interpret() maps them back.
std::string realize(const SemanticFrame& frame, const Grammar& grammar);

struct UserModel {
  /// Expertise gained on hearing a help or timeout prompt.
  double expertise_bump = 0.25;
  /// Help probability is help_propensity * (1 - expertise) * help_task_decay^(task - 1).
  double help_propensity = 0.3;
  double help_task_decay = 0.1;
  /// SI silence probability is hesitation * (1 - expertise), scaled by this
  /// factor when the prompt spells out what to say.
  double si_explicit_silence_scale = 0.1;
  /// Chance of picking the sender rather than the subject as the criterion.
  double sender_preference = 0.7;
  int patience_turns = 60;
  /// Chance that a target value is retained on one hearing. Values that slip
  /// are caught on a repeat.
  double recall_rate = 1.0;
  /// Repeats the user will ask for before giving up on a message.
  int max_repeats = 2;
  /// Failed lookups before a subtask is abandoned. Each failure switches to
  /// the next selection criterion of the key.
  int max_failed_reads = 3;
  /// Exploratory summarize/repeat requests, weighted by the Wizard-of-Oz
  /// function counts (Summarization 20, Repeat 4). Off by default.
  bool exploration = false;
  double exploration_rate = 0.1;

  friend bool operator==(const UserModel&, const UserModel&) = default;
};

/// What the user perceives of the agent's last turn.
struct AgentTurn {
  enum class Cause { kEntry, kResponse, kTimeout, kRejection, kHelp };

  std::string state;
  std::string text;  // as delivered (truncated on barge-in)
  Cause cause = Cause::kEntry;
  std::string operation;  // application operation behind a kResponse turn
  bool operation_ok = true;
  std::size_t folder_depth = 1;
  bool barge_in_enabled = true;
  bool finished = false;
};

struct UserAction {
  enum class Kind { kUtterance, kSilence, kHelp, kHangUp };
  Kind kind = Kind::kSilence;
  SemanticFrame frame;  // kUtterance only
};

class SimulatedUser {
 public:
  SimulatedUser(StrategyKind strategy, SubjectProfile profile, int task, std::vector<ScenarioKey> scenarios,
                UserModel model = {});

  /// Absorbs attribute values and updates beliefs and expertise. Without an
  /// rng every value heard is retained.
  void hear(const AgentTurn& turn, Rng* rng = nullptr);
  UserAction next_action(const AgentTurn& turn, Rng& rng);

  double expertise() const { return expertise_; }
  const std::vector<GoalState>& goals() const { return goals_; }
  bool all_done() const;
  /// "<scenario>:<attribute>" -> value as reported on the task form.
  std::map<std::string, std::string> observed_avm() const;
  int turns_taken() const { return turns_; }
  /// Expertise averaged over the user's decisions (initial value before any).
  double mean_expertise() const { return decisions_ ? expertise_sum_ / decisions_ : expertise_; }

 private:
  GoalState* current_goal();
  const SelectionTerm& criterion_for(std::size_t goal, Rng& rng);
  SemanticFrame intended_frame(const AgentTurn& turn, Rng& rng);
  std::optional<SemanticFrame> follow_up_in_folder(std::size_t goal_index);
  bool prompt_is_explicit(const AgentTurn& turn) const;

  StrategyKind strategy_;
  SubjectProfile profile_;
  int task_;
  UserModel model_;
  std::vector<GoalState> goals_;
  std::map<std::size_t, std::size_t> criterion_;  // goal -> index into selection
  double expertise_;
  int turns_ = 0;
  double expertise_sum_ = 0.0;
  int decisions_ = 0;

  // Beliefs about the last message heard.
  bool heard_target_ = false;  // header named the current goal's criterion
  bool heard_several_ = false;  // agent announced more than one match
  int repeats_ = 0;
};

// --- Survey --------------------------------------------------------------------

enum class SurveyQuestion {
  kTtsPerformance,
  kAsrPerformance,
  kTaskEase,
  kInteractionPace,
  kUserExpertise,
  kSystemResponse,
  kExpectedBehavior,
  kComparableInterface,
  kFutureUse,
};

inline constexpr std::size_t kSurveyQuestions = 9;
std::string_view to_string(SurveyQuestion q);

struct SurveyScores {
  std::array<int, kSurveyQuestions> scores{};

  int operator[](SurveyQuestion q) const { return scores[static_cast<std::size_t>(q)]; }
  int cumulative() const;

  friend bool operator==(const SurveyScores&, const SurveyScores&) = default;
};

/// Objective measures the subject reacts to.
struct SessionMetrics {
  double mean_recognition = 1.0;
  int user_turns = 0;
  int asr_rejections = 0;
  int timeout_prompts = 0;
  int help_requests = 0;
  std::uint64_t elapsed_ticks = 0;
  double task_completion = 1.0;  // fraction of attributes reported correctly
  double expertise = 1.0;        // at the end of the session
};

/// Reference points for the z-scores inside the satisfaction generator.
struct SurveyModel {
  double recognition_mean = 0.81;
  double recognition_sd = 0.12;
  double turns_mean = 18.6;
  double turns_sd = 6.0;
  double pace_mean = 6.0;  // elapsed ticks per user turn
  double pace_sd = 2.0;
  double noise_sd = 0.5;

  friend bool operator==(const SurveyModel&, const SurveyModel&) = default;
};

/// Nine scores in 1..5. Each question is a linear function of the z-scored
/// recognition score and user turns plus one question-specific driver,
/// shifted by the subject's bias, perturbed by Gaussian noise, rounded and
/// clamped. Yes/no/maybe questions map to {1, 3, 5}.
SurveyScores survey(const SessionMetrics& metrics, const SubjectProfile& profile, const SurveyModel& model,
                    Rng& rng);

}  // namespace elvis
