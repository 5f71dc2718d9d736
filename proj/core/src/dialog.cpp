#include "elvis/dialog.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <sstream>

#include "elvis/error.hpp"

namespace elvis {

std::string to_string(const SemanticFrame& frame) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  if (frame.action) {
    out << "action: " << *frame.action;
    first = false;
  }
  for (const auto& [slot, value] : frame.slot_values) {
    if (!first) out << ", ";
    out << slot << ": " << value;
    first = false;
  }
  out << '}';
  return out.str();
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_inner_char(char c) { return c == '\'' || c == ':' || c == '-'; }

struct Candidate {
  std::vector<std::string> tokens;
  bool is_action = false;
  std::string target;  // action name, or the canonical slot value
  std::vector<std::string> slots;  // every slot whose vocabulary holds this value
};

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    // Strip leading/trailing non-alphanumerics; inner ones stay.
    std::size_t b = 0;
    std::size_t e = current.size();
    while (b < e && !is_word_char(current[b])) ++b;
    while (e > b && !is_word_char(current[e - 1])) --e;
    if (e > b) tokens.push_back(current.substr(b, e - b));
    current.clear();
  };
  for (char c : text) {
    if (is_word_char(c) || is_inner_char(c)) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::optional<SemanticFrame> interpret(std::string_view utterance, const Grammar& grammar,
                                       const SlotVocabulary& vocabulary) {
  const std::vector<std::string> tokens = tokenize(utterance);
  if (tokens.empty()) return std::nullopt;

  std::vector<Candidate> candidates;
  for (const auto& [phrase, action] : grammar.phrases) {
    if (grammar.actions.count(action) == 0) continue;
    Candidate c;
    c.tokens = tokenize(phrase);
    c.is_action = true;
    c.target = action;
    if (!c.tokens.empty()) candidates.push_back(std::move(c));
  }
  std::map<std::string, std::size_t> value_index;  // joined tokens -> candidate
  for (const auto& slot : grammar.slots) {
    auto it = vocabulary.find(slot);
    if (it == vocabulary.end()) continue;
    for (const auto& value : it->second) {
      auto value_tokens = tokenize(value);
      if (value_tokens.empty()) continue;
      const std::string key = join_tokens(value_tokens);
      auto found = value_index.find(key);
      if (found != value_index.end()) {
        candidates[found->second].slots.push_back(slot);
        continue;
      }
      Candidate c;
      c.tokens = std::move(value_tokens);
      c.target = value;
      c.slots.push_back(slot);
      value_index.emplace(key, candidates.size());
      candidates.push_back(std::move(c));
    }
  }

  SemanticFrame frame;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const Candidate* best = nullptr;
    for (const auto& c : candidates) {
      if (c.tokens.size() > tokens.size() - i) continue;
      if (!std::equal(c.tokens.begin(), c.tokens.end(), tokens.begin() + static_cast<long>(i))) {
        continue;
      }
      // Longest match; on equal length an action phrase beats a slot value.
      if (!best || c.tokens.size() > best->tokens.size() ||
          (c.tokens.size() == best->tokens.size() && c.is_action && !best->is_action)) {
        best = &c;
      }
    }
    if (!best) {
      ++i;
      continue;
    }
    if (best->is_action) {
      if (!frame.action) frame.action = best->target;
    } else {
      std::string slot = best->slots.front();
      if (best->slots.size() > 1) {
        // Nearest preceding cue word decides between candidate slots.
        for (std::size_t j = i; j-- > 0;) {
          auto cue = grammar.slot_cues.find(tokens[j]);
          if (cue != grammar.slot_cues.end() &&
              std::find(best->slots.begin(), best->slots.end(), cue->second) != best->slots.end()) {
            slot = cue->second;
            break;
          }
        }
      }
      if (!frame.has_slot(slot) &&
          static_cast<int>(frame.slot_values.size()) < grammar.max_slots_per_utterance) {
        frame.slot_values.emplace(slot, best->target);
      }
    }
    i += best->tokens.size();
  }
  if (frame.empty()) return std::nullopt;
  return frame;
}

bool conforms(const SemanticFrame& frame, const Grammar& grammar) {
  if (frame.empty()) return false;
  if (frame.action && grammar.actions.count(*frame.action) == 0) return false;
  if (static_cast<int>(frame.slot_values.size()) > grammar.max_slots_per_utterance) return false;
  return std::all_of(frame.slot_values.begin(), frame.slot_values.end(),
                     [&](const auto& kv) { return grammar.slots.count(kv.first) != 0; });
}

bool FramePattern::matches(const SemanticFrame& frame) const {
  if (action != frame.action) return false;
  for (const auto& [slot, req] : slots) {
    const bool present = frame.has_slot(slot);
    if ((req == SlotRequirement::kRequired) != present) return false;
  }
  return true;
}

bool FramePattern::overlaps(const FramePattern& other) const {
  if (action != other.action) return false;
  for (const auto& [slot, req] : slots) {
    auto it = other.slots.find(slot);
    if (it != other.slots.end() && it->second != req) return false;
  }
  return true;
}

std::vector<SemanticFrame> frame_shapes(const Grammar& grammar) {
  std::vector<std::optional<std::string>> actions{std::nullopt};
  for (const auto& a : grammar.actions) actions.emplace_back(a);
  const std::vector<std::string> slots(grammar.slots.begin(), grammar.slots.end());
  const std::size_t n = slots.size();

  std::vector<SemanticFrame> shapes;
  for (const auto& action : actions) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      SemanticFrame f;
      f.action = action;
      for (std::size_t b = 0; b < n; ++b) {
        if (mask & (std::size_t{1} << b)) f.slot_values.emplace(slots[b], "*");
      }
      if (f.empty()) continue;
      if (static_cast<int>(f.slot_values.size()) > grammar.max_slots_per_utterance) continue;
      shapes.push_back(std::move(f));
    }
  }
  return shapes;
}

// --- StrategyMachine ---------------------------------------------------------

namespace {

[[noreturn]] void bad_machine(const std::string& machine, const std::string& what) {
  throw MachineDefinitionError("strategy '" + machine + "': " + what);
}

}  // namespace

StrategyMachine StrategyMachine::create(Definition def) {
  const std::string& name = def.name;
  if (def.states.count(def.initial_state) == 0) {
    bad_machine(name, "initial state '" + def.initial_state + "' is not defined");
  }
  for (const auto& [id, spec] : def.states) {
    if (spec.id != id) bad_machine(name, "state key '" + id + "' holds spec '" + spec.id + "'");
  }
  for (const auto& t : def.terminal_states) {
    if (def.states.count(t) == 0) bad_machine(name, "terminal state '" + t + "' is not defined");
  }
  for (const auto& [from, to] : def.passthrough) {
    if (def.states.count(from) == 0 || def.states.count(to) == 0) {
      bad_machine(name, "passthrough " + from + " -> " + to + " names an undefined state");
    }
    if (def.states.at(from).accepts_input()) {
      bad_machine(name, "passthrough state '" + from + "' must not accept input");
    }
    if (def.terminal_states.count(from)) {
      bad_machine(name, "state '" + from + "' is both terminal and passthrough");
    }
  }

  std::map<std::string, std::vector<const Transition*>> outgoing;
  for (const auto& t : def.transitions) {
    const std::string where = "transition " + t.from + " -> " + t.to;
    if (def.states.count(t.from) == 0) bad_machine(name, where + ": unknown source state");
    if (def.states.count(t.to) == 0) bad_machine(name, where + ": unknown target state");
    if (!t.on_failure.empty() && def.states.count(t.on_failure) == 0) {
      bad_machine(name, where + ": unknown failure target '" + t.on_failure + "'");
    }
    if (!t.on_exit.empty() && def.terminal_states.count(t.on_exit) == 0) {
      bad_machine(name, where + ": exit target '" + t.on_exit + "' is not terminal");
    }
    if (def.terminal_states.count(t.from) || def.passthrough.count(t.from)) {
      bad_machine(name, where + ": source state takes no input");
    }
    const Grammar& g = def.states.at(t.from).grammar;
    if (t.pattern.action && g.actions.count(*t.pattern.action) == 0) {
      bad_machine(name, where + ": action '" + *t.pattern.action + "' is not in grammar " + g.id);
    }
    for (const auto& [slot, req] : t.pattern.slots) {
      (void)req;
      if (g.slots.count(slot) == 0) {
        bad_machine(name, where + ": slot '" + slot + "' is not in grammar " + g.id);
      }
    }
    if (t.action.kind == AgentAction::Kind::kAppRequest && t.action.operation.empty()) {
      bad_machine(name, where + ": application request without an operation");
    }
    outgoing[t.from].push_back(&t);
  }

  for (const auto& [id, spec] : def.states) {
    if (def.terminal_states.count(id) || def.passthrough.count(id)) continue;
    const Grammar& g = spec.grammar;
    if (!g.accepts_input()) bad_machine(name, "state '" + id + "' accepts no input");
    if (g.max_slots_per_utterance < 1) bad_machine(name, "grammar " + g.id + ": slot cap below 1");
    if (spec.help_prompt.empty()) bad_machine(name, "state '" + id + "' has no help prompt");
    if (spec.rejection_prompts.empty()) bad_machine(name, "state '" + id + "' has no rejection prompts");
    if (spec.timeout_prompts.empty()) bad_machine(name, "state '" + id + "' has no timeout prompts");
    for (const auto& [phrase, action] : g.phrases) {
      if (g.actions.count(action) == 0) {
        bad_machine(name, "grammar " + g.id + ": phrase '" + phrase + "' maps to unknown action '" +
                              action + "'");
      }
    }
    for (const auto& action : g.actions) {
      const bool sayable = std::any_of(g.phrases.begin(), g.phrases.end(),
                                       [&](const auto& kv) { return kv.second == action; });
      if (!sayable) bad_machine(name, "grammar " + g.id + ": action '" + action + "' has no phrase");
    }
    const auto& outs = outgoing[id];
    if (outs.empty()) bad_machine(name, "state '" + id + "' has no outgoing transition");
    for (std::size_t a = 0; a < outs.size(); ++a) {
      for (std::size_t b = a + 1; b < outs.size(); ++b) {
        if (outs[a]->pattern.overlaps(outs[b]->pattern)) {
          bad_machine(name, "state '" + id + "': transitions to '" + outs[a]->to + "' and '" +
                                outs[b]->to + "' can match the same frame");
        }
      }
    }
    for (const auto& shape : frame_shapes(g)) {
      const bool covered = std::any_of(outs.begin(), outs.end(),
                                       [&](const Transition* t) { return t->pattern.matches(shape); });
      if (!covered) {
        bad_machine(name, "state '" + id + "': no transition for frame shape " + to_string(shape));
      }
    }
  }

  // Reachability from the initial state.
  std::set<std::string> seen{def.initial_state};
  std::queue<std::string> work;
  work.push(def.initial_state);
  while (!work.empty()) {
    const std::string s = work.front();
    work.pop();
    auto visit = [&](const std::string& next) {
      if (!next.empty() && seen.insert(next).second) work.push(next);
    };
    if (auto p = def.passthrough.find(s); p != def.passthrough.end()) visit(p->second);
    for (const Transition* t : outgoing[s]) {
      visit(t->to);
      visit(t->on_failure);
      visit(t->on_exit);
    }
  }
  for (const auto& [id, spec] : def.states) {
    (void)spec;
    if (seen.count(id) == 0) bad_machine(name, "state '" + id + "' is unreachable");
  }
  if (def.terminal_states.empty()) bad_machine(name, "no terminal state");

  return StrategyMachine(std::move(def));
}

const DialogStateSpec& StrategyMachine::state(const std::string& id) const {
  auto it = def_.states.find(id);
  if (it == def_.states.end()) throw PreconditionError("unknown state '" + id + "'");
  return it->second;
}

std::vector<std::string> StrategyMachine::input_states() const {
  std::vector<std::string> out;
  for (const auto& [id, spec] : def_.states) {
    (void)spec;
    if (!is_terminal(id) && def_.passthrough.count(id) == 0) out.push_back(id);
  }
  return out;
}

const Transition* StrategyMachine::find_transition(const std::string& state,
                                                   const SemanticFrame& frame) const {
  for (const auto& t : def_.transitions) {
    if (t.from == state && t.pattern.matches(frame)) return &t;
  }
  return nullptr;
}

Step advance(const StrategyMachine& machine, const std::string& current, const SemanticFrame& frame) {
  const DialogStateSpec& spec = machine.state(current);
  if (machine.is_terminal(current) || !spec.accepts_input()) {
    throw PreconditionError("state '" + current + "' takes no input");
  }
  const Transition* t = machine.find_transition(current, frame);
  if (!t) {
    throw UnmatchedFrameError("strategy '" + machine.name() + "', state '" + current +
                              "': no transition for " + to_string(frame));
  }
  return Step{t->to, t->action, t->on_failure.empty() ? current : t->on_failure, t->on_exit};
}

namespace {

const std::string& saturating(const std::vector<std::string>& prompts, int n, const char* what,
                              const std::string& state) {
  if (n < 1) throw PreconditionError(std::string(what) + " count must be >= 1");
  if (prompts.empty()) throw PreconditionError("state '" + state + "' has no " + what + " prompts");
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(n), prompts.size()) - 1;
  return prompts[idx];
}

}  // namespace

const std::string& on_silence(const DialogStateSpec& state, int consecutive_timeouts) {
  return saturating(state.timeout_prompts, consecutive_timeouts, "timeout", state.id);
}

const std::string& on_rejection(const DialogStateSpec& state, int consecutive_rejections) {
  return saturating(state.rejection_prompts, consecutive_rejections, "rejection", state.id);
}

const std::string& on_help(const DialogStateSpec& state) {
  if (!state.accepts_input() || state.help_prompt.empty()) {
    throw PreconditionError("help requested in state '" + state.id + "', which takes no input");
  }
  return state.help_prompt;
}

std::string render_prompt(std::string_view templ, const std::map<std::string, std::string>& vars) {
  std::string filled;
  std::size_t i = 0;
  while (i < templ.size()) {
    if (templ[i] == '{') {
      const auto close = templ.find('}', i);
      if (close != std::string_view::npos) {
        const std::string key(templ.substr(i + 1, close - i - 1));
        if (auto it = vars.find(key); it != vars.end()) {
          filled += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    filled += templ[i++];
  }
  std::string out;
  bool pending_space = false;
  for (char c : filled) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

namespace {

constexpr std::string_view kEventNames[] = {
    "agent-prompt", "user-utterance", "timeout", "asr-rejection",
    "help-request", "barge-in",       "app-access", "task-end",
};

}  // namespace

std::string_view to_string(EventKind kind) { return kEventNames[static_cast<std::size_t>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kEventNames); ++i) {
    if (kEventNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

}  // namespace elvis
