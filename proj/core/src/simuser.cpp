#include "elvis/simuser.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace elvis {

double SubjectProfile::expertise_after(int tasks_done) const {
  return std::min(1.0, base_expertise + std::max(0, tasks_done) * learning_rate);
}

namespace {

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (std::isalnum(c) || ch == ':') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  // A trailing ':' is punctuation, not part of a time.
  for (auto& t : out) {
    while (!t.empty() && t.back() == ':') t.pop_back();
  }
  std::erase_if(out, [](const std::string& t) { return t.empty(); });
  return out;
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

bool mentions(std::string_view text, std::string_view value) {
  return contains_run(normalized_tokens(text), normalized_tokens(value));
}

}  // namespace

std::string normalize_value(std::string_view text) {
  std::string out;
  for (const auto& t : normalized_tokens(text)) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

GoalState absorb(GoalState goal, std::string_view spoken) {
  const auto heard = normalized_tokens(spoken);
  for (const auto& [attribute, value] : goal.key.targets) {
    if (goal.acquired.count(attribute)) continue;
    if (contains_run(heard, normalized_tokens(value))) goal.acquired[attribute] = value;
  }
  if (goal.acquired.size() == goal.key.targets.size()) goal.done = true;
  return goal;
}

std::string realize(const SemanticFrame& frame, const Grammar& grammar) {
  std::ostringstream out;
  if (frame.action) {
    // Longest phrase for the action, so "done" comes out as "i'm done here".
    std::string best;
    for (const auto& [phrase, action] : grammar.phrases) {
      if (action == *frame.action && phrase.size() > best.size()) best = phrase;
    }
    out << (best.empty() ? *frame.action : best);
  }
  auto cue_for = [&](const std::string& slot) -> std::string {
    for (const auto& [cue, s] : grammar.slot_cues) {
      if (s == slot) return cue + " ";
    }
    return "";
  };
  for (const auto& [slot, value] : frame.slot_values) {
    if (out.tellp() > 0) out << ' ';
    out << cue_for(slot) << value;
  }
  return out.str();
}

SimulatedUser::SimulatedUser(StrategyKind strategy, SubjectProfile profile, int task,
                             std::vector<ScenarioKey> scenarios, UserModel model)
    : strategy_(strategy), profile_(std::move(profile)), task_(task), model_(model) {
  for (auto& key : scenarios) goals_.push_back(GoalState{std::move(key), {}, false});
  expertise_ = profile_.expertise_after(task_ - 1);
}

bool SimulatedUser::all_done() const {
  return std::all_of(goals_.begin(), goals_.end(), [](const GoalState& g) { return g.done || g.abandoned; });
}

std::map<std::string, std::string> SimulatedUser::observed_avm() const {
  std::map<std::string, std::string> avm;
  for (const auto& g : goals_) {
    for (const auto& [attribute, value] : g.acquired) avm[g.key.id + ":" + attribute] = value;
  }
  return avm;
}

GoalState* SimulatedUser::current_goal() {
  for (auto& g : goals_) {
    if (!g.done && !g.abandoned) return &g;
  }
  return nullptr;
}

const SelectionTerm& SimulatedUser::criterion_for(std::size_t goal, Rng& rng) {
  const auto& terms = goals_[goal].key.selection;
  auto it = criterion_.find(goal);
  if (it == criterion_.end()) {
    std::size_t pick = 0;
    if (terms.size() > 1) {
      std::vector<std::size_t> senders;
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < terms.size(); ++i) (terms[i].field == "sender" ? senders : others).push_back(i);
      const bool by_sender = !senders.empty() && (others.empty() || rng.bernoulli(model_.sender_preference));
      const auto& pool = by_sender ? senders : others;
      pick = pool[rng.index(pool.size())];
    }
    it = criterion_.emplace(goal, pick).first;
  }
  return terms[it->second];
}

void SimulatedUser::hear(const AgentTurn& turn, Rng* rng) {
  for (auto& g : goals_) {
    if (g.done) continue;
    GoalState next = absorb(g, turn.text);
    if (rng && model_.recall_rate < 1.0) {
      for (const auto& [attribute, value] : next.key.targets) {
        if (next.acquired.count(attribute) && !g.acquired.count(attribute) && !rng->bernoulli(model_.recall_rate)) {
          next.acquired.erase(attribute);
        }
      }
      next.done = next.acquired.size() == next.key.targets.size();
    }
    g = std::move(next);
  }
  if (turn.cause == AgentTurn::Cause::kTimeout || turn.cause == AgentTurn::Cause::kHelp) {
    expertise_ = std::min(1.0, expertise_ + model_.expertise_bump);
  }
  if (turn.folder_depth <= 1) {
    heard_target_ = false;
    heard_several_ = false;
    repeats_ = 0;
  }
  if (turn.cause == AgentTurn::Cause::kResponse && !turn.operation_ok && turn.operation == "read") {
    if (GoalState* g = current_goal()) {
      const auto gi = static_cast<std::size_t>(g - goals_.data());
      if (++g->failed_reads >= model_.max_failed_reads) {
        g->abandoned = true;
      } else if (auto it = criterion_.find(gi); it != criterion_.end()) {
        it->second = (it->second + 1) % g->key.selection.size();
      }
    }
  }
  if (turn.cause != AgentTurn::Cause::kResponse || !turn.operation_ok) {
    if (turn.operation == "next") heard_several_ = false;
    return;
  }
  const auto& op = turn.operation;
  if (op == "read" || op == "next" || op == "previous" || op == "repeat") {
    if (op == "read" && mentions(turn.text, "matching messages")) heard_several_ = true;
    if (op != "repeat") repeats_ = 0;
    heard_target_ = false;
    if (auto* g = current_goal()) {
      heard_target_ = std::all_of(g->key.selection.begin(), g->key.selection.end(),
                                  [&](const SelectionTerm& t) { return mentions(turn.text, t.value); });
    }
  }
}

std::optional<SemanticFrame> SimulatedUser::follow_up_in_folder(std::size_t goal_index) {
  SemanticFrame f;
  if (goal_index >= goals_.size() || goals_[goal_index].done || goals_[goal_index].abandoned) {
    f.action = "done";
  } else if (heard_target_ && repeats_ < model_.max_repeats) {
    f.action = "repeat";
  } else if (!heard_target_ && heard_several_) {
    f.action = "next";
  } else {
    f.action = "done";
  }
  return f;
}

bool SimulatedUser::prompt_is_explicit(const AgentTurn& turn) const {
  return mentions(turn.text, "say") || turn.text.find('?') != std::string::npos;
}

SemanticFrame SimulatedUser::intended_frame(const AgentTurn& turn, Rng& rng) {
  GoalState* goal = current_goal();
  const std::size_t gi = goal ? static_cast<std::size_t>(goal - goals_.data()) : goals_.size();
  SemanticFrame f;
  auto action = [&](const char* a) {
    f.action = a;
    return f;
  };

  const bool at_top = strategy_ == StrategyKind::kMixedInitiative ? turn.folder_depth <= 1 : turn.state == "top";
  if (model_.exploration && goal && at_top && rng.bernoulli(model_.exploration_rate)) {
    // Relative frequencies of summarization and repeat requests.
    return action(rng.index(24) < 20 ? "summarize" : "repeat");
  }

  if (strategy_ == StrategyKind::kMixedInitiative) {
    if (turn.folder_depth > 1) return *follow_up_in_folder(gi);
    if (!goal) return action("done");
    const auto& term = criterion_for(gi, rng);
    f.action = "read";
    f.slot_values[term.field] = term.value;
    return f;
  }

  const std::string& s = turn.state;
  if (s == "top" || s == "folder-summary") return action(goal ? "read" : "done");
  if (s == "select-method") return action(goal ? "content" : "done");
  if (!goal) return action("done");
  const auto& term = criterion_for(gi, rng);
  if (s == "select-field") return action(term.field == "sender" ? "by-sender" : "by-subject");
  if (s == "which-sender" || s == "which-subject") {
    const std::string field = s == "which-sender" ? "sender" : "subject";
    // Answer what was asked when the key allows it.
    for (const auto& t : goal->key.selection) {
      if (t.field == field) {
        f.slot_values[field] = t.value;
        return f;
      }
    }
    return action("done");
  }
  if (s == "message-context") return *follow_up_in_folder(gi);
  return action("done");
}

UserAction SimulatedUser::next_action(const AgentTurn& turn, Rng& rng) {
  UserAction out;
  if (turn.finished) {
    out.kind = UserAction::Kind::kHangUp;
    return out;
  }
  if (turns_ >= model_.patience_turns) {
    out.kind = UserAction::Kind::kHangUp;
    return out;
  }
  ++turns_;
  expertise_sum_ += expertise_;
  ++decisions_;
  const double novice = 1.0 - expertise_;
  const double help_p = model_.help_propensity * novice * std::pow(model_.help_task_decay, task_ - 1);
  if (turn.cause != AgentTurn::Cause::kHelp && rng.bernoulli(help_p)) {
    out.kind = UserAction::Kind::kHelp;
    return out;
  }

  SemanticFrame frame = intended_frame(turn, rng);
  if (frame.action == "repeat" && turn.folder_depth > 1) ++repeats_;

  double silence_p;
  if (strategy_ == StrategyKind::kMixedInitiative) {
    silence_p = novice;
  } else {
    silence_p = profile_.hesitation * novice;
    if (prompt_is_explicit(turn)) silence_p *= model_.si_explicit_silence_scale;
  }
  if (rng.bernoulli(silence_p)) {
    out.kind = UserAction::Kind::kSilence;
    return out;
  }
  out.kind = UserAction::Kind::kUtterance;
  out.frame = std::move(frame);
  return out;
}

// --- Survey ---------------------------------------------------------------------

std::string_view to_string(SurveyQuestion q) {
  switch (q) {
    case SurveyQuestion::kTtsPerformance: return "TTS Performance";
    case SurveyQuestion::kAsrPerformance: return "ASR Performance";
    case SurveyQuestion::kTaskEase: return "Task Ease";
    case SurveyQuestion::kInteractionPace: return "Interaction Pace";
    case SurveyQuestion::kUserExpertise: return "User Expertise";
    case SurveyQuestion::kSystemResponse: return "System Response";
    case SurveyQuestion::kExpectedBehavior: return "Expected Behavior";
    case SurveyQuestion::kComparableInterface: return "Comparable Interface";
    case SurveyQuestion::kFutureUse: return "Future Use";
  }
  return "?";
}

int SurveyScores::cumulative() const {
  int sum = 0;
  for (int s : scores) sum += s;
  return sum;
}

namespace {

int likert(double raw) { return static_cast<int>(std::clamp(std::lround(raw), 1L, 5L)); }

// no / maybe / yes
int yes_no_maybe(double latent) {
  if (latent > 0.5) return 5;
  if (latent < -0.5) return 1;
  return 3;
}

}  // namespace

SurveyScores survey(const SessionMetrics& m, const SubjectProfile& profile, const SurveyModel& model, Rng& rng) {
  const double zr = (m.mean_recognition - model.recognition_mean) / model.recognition_sd;
  const double zt = (m.user_turns - model.turns_mean) / model.turns_sd;
  const double pace =
      m.user_turns > 0 ? static_cast<double>(m.elapsed_ticks) / m.user_turns : model.pace_mean;
  const double zp = (pace - model.pace_mean) / model.pace_sd;
  const double bias = profile.satisfaction_bias;
  // One noise draw per question, in question order.
  auto noise = [&] { return model.noise_sd > 0.0 ? rng.normal(0.0, model.noise_sd) : 0.0; };

  SurveyScores s;
  auto set = [&](SurveyQuestion q, int v) { s.scores[static_cast<std::size_t>(q)] = v; };
  const double prompts_heard = m.timeout_prompts + m.help_requests;
  set(SurveyQuestion::kTtsPerformance, likert(4.0 + 0.3 * zr - 0.15 * (prompts_heard - 1.0) + bias + noise()));
  set(SurveyQuestion::kAsrPerformance, likert(3.5 + 1.0 * zr - 0.3 * (m.asr_rejections - 1.0) + bias + noise()));
  set(SurveyQuestion::kTaskEase,
      likert(3.5 + 0.4 * zr - 0.6 * zt + 1.5 * (m.task_completion - 1.0) + bias + noise()));
  set(SurveyQuestion::kInteractionPace, likert(3.8 + 0.2 * zr - 0.5 * zt - 0.6 * zp + bias + noise()));
  set(SurveyQuestion::kUserExpertise, likert(1.0 + 3.5 * m.expertise + 0.2 * zr - 0.2 * zt + bias + noise()));
  set(SurveyQuestion::kSystemResponse, likert(3.5 + 0.3 * zr - 0.3 * zt - 0.3 * zp + bias + noise()));
  set(SurveyQuestion::kExpectedBehavior, yes_no_maybe(0.6 * zr - 0.4 * zt + bias + noise()));
  set(SurveyQuestion::kComparableInterface, likert(3.0 + 0.4 * zr - 0.4 * zt + bias + noise()));
  set(SurveyQuestion::kFutureUse,
      yes_no_maybe(0.5 * zr - 0.4 * zt + 1.0 * (m.task_completion - 1.0) + bias + noise()));
  return s;
}

}  // namespace elvis
