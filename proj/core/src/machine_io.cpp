#include "elvis/machine_io.hpp"

#include <fstream>

#include "json_util.hpp"

namespace elvis {

using nlohmann::json;
using detail::Node;

namespace {

json grammar_to_json(const Grammar& g) {
  json j;
  j["id"] = g.id;
  j["actions"] = g.actions;
  j["slots"] = g.slots;
  j["max_slots"] = g.max_slots_per_utterance;
  j["phrases"] = g.phrases;
  if (!g.slot_cues.empty()) j["slot_cues"] = g.slot_cues;
  return j;
}

Grammar grammar_from(const Node& n) {
  Grammar g;
  g.id = n.at("id").str();
  for (auto& a : n.at("actions").strings()) g.actions.insert(a);
  for (auto& s : n.at("slots").strings()) g.slots.insert(s);
  g.max_slots_per_utterance = static_cast<int>(n.at("max_slots").integer());
  for (const auto& [phrase, action] : n.at("phrases").members()) g.phrases[phrase] = action.str();
  if (n.has("slot_cues")) {
    for (const auto& [cue, slot] : n.at("slot_cues").members()) g.slot_cues[cue] = slot.str();
  }
  return g;
}

json state_to_json(const DialogStateSpec& s, bool takes_input) {
  json j;
  j["id"] = s.id;
  j["initial_prompt"] = s.initial_prompt;
  if (takes_input) {
    j["barge_in"] = s.barge_in_enabled;
    j["help_prompt"] = s.help_prompt;
    j["rejection_prompts"] = s.rejection_prompts;
    j["timeout_prompts"] = s.timeout_prompts;
    j["grammar"] = grammar_to_json(s.grammar);
  }
  return j;
}

DialogStateSpec state_from(const Node& n) {
  DialogStateSpec s;
  s.id = n.at("id").str();
  s.initial_prompt = n.at("initial_prompt").str();
  s.barge_in_enabled = n.boolean_or("barge_in", true);
  s.help_prompt = n.str_or("help_prompt", "");
  if (n.has("rejection_prompts")) s.rejection_prompts = n.at("rejection_prompts").strings();
  if (n.has("timeout_prompts")) s.timeout_prompts = n.at("timeout_prompts").strings();
  if (n.has("grammar")) {
    s.grammar = grammar_from(n.at("grammar"));
  } else {
    s.grammar.id = s.id;
  }
  return s;
}

json pattern_to_json(const FramePattern& p) {
  json j;
  j["action"] = p.action ? json(*p.action) : json(nullptr);
  if (!p.slots.empty()) {
    json slots = json::object();
    for (const auto& [slot, req] : p.slots) {
      slots[slot] = req == SlotRequirement::kRequired ? "required" : "forbidden";
    }
    j["slots"] = slots;
  }
  return j;
}

FramePattern pattern_from(const Node& n) {
  FramePattern p;
  const Node action = n.at("action");
  if (!action.value().is_null()) p.action = action.str();
  if (n.has("slots")) {
    for (const auto& [slot, req] : n.at("slots").members()) {
      const std::string r = req.str();
      if (r == "required") {
        p.slots[slot] = SlotRequirement::kRequired;
      } else if (r == "forbidden") {
        p.slots[slot] = SlotRequirement::kForbidden;
      } else {
        req.fail("expected \"required\" or \"forbidden\"");
      }
    }
  }
  return p;
}

}  // namespace

json machine_to_json(const StrategyMachine& machine) {
  const auto& def = machine.definition();
  json j;
  j["schema"] = kStrategySchema;
  j["name"] = def.name;
  j["initial_state"] = def.initial_state;
  j["terminal_states"] = def.terminal_states;
  j["passthrough"] = def.passthrough;
  j["static_vocabulary"] = def.static_vocabulary;
  json states = json::array();
  for (const auto& [id, spec] : def.states) {
    const bool takes_input = !def.terminal_states.count(id) && !def.passthrough.count(id);
    states.push_back(state_to_json(spec, takes_input));
  }
  j["states"] = std::move(states);
  json transitions = json::array();
  for (const auto& t : def.transitions) {
    json tj;
    tj["from"] = t.from;
    tj["when"] = pattern_to_json(t.pattern);
    tj["to"] = t.to;
    if (t.action.kind == AgentAction::Kind::kAppRequest) {
      tj["app"] = t.action.operation;
    } else {
      tj["say"] = t.action.say;
    }
    if (!t.on_failure.empty()) tj["on_failure"] = t.on_failure;
    if (!t.on_exit.empty()) tj["on_exit"] = t.on_exit;
    transitions.push_back(std::move(tj));
  }
  j["transitions"] = std::move(transitions);
  return j;
}

StrategyMachine machine_from_json(const json& doc) {
  const Node root(doc, "");
  const std::string schema = root.at("schema").str();
  if (schema != kStrategySchema) root.at("schema").fail("unsupported schema '" + schema + "'");

  StrategyMachine::Definition def;
  def.name = root.at("name").str();
  def.initial_state = root.at("initial_state").str();
  for (auto& t : root.at("terminal_states").strings()) def.terminal_states.insert(t);
  if (root.has("passthrough")) {
    for (const auto& [from, to] : root.at("passthrough").members()) def.passthrough[from] = to.str();
  }
  if (root.has("static_vocabulary")) {
    for (const auto& [slot, values] : root.at("static_vocabulary").members()) {
      def.static_vocabulary[slot] = values.strings();
    }
  }
  for (const auto& sn : root.at("states").items()) {
    DialogStateSpec s = state_from(sn);
    const std::string id = s.id;
    if (!def.states.emplace(id, std::move(s)).second) sn.at("id").fail("duplicate state id");
  }
  for (const auto& tn : root.at("transitions").items()) {
    Transition t;
    t.from = tn.at("from").str();
    t.pattern = pattern_from(tn.at("when"));
    t.to = tn.at("to").str();
    if (tn.has("app") == tn.has("say")) tn.fail("exactly one of \"app\" or \"say\" is required");
    if (tn.has("app")) {
      t.action.kind = AgentAction::Kind::kAppRequest;
      t.action.operation = tn.at("app").str();
    } else {
      t.action.kind = AgentAction::Kind::kPrompt;
      t.action.say = tn.at("say").str();
    }
    t.on_failure = tn.str_or("on_failure", "");
    t.on_exit = tn.str_or("on_exit", "");
    def.transitions.push_back(std::move(t));
  }
  return StrategyMachine::create(std::move(def));
}

StrategyMachine load_machine(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open strategy document");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  return machine_from_json(doc);
}

void save_machine(const StrategyMachine& machine, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string(), "cannot write strategy document");
  out << machine_to_json(machine).dump(2) << '\n';
}

}  // namespace elvis
