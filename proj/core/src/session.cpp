#include "elvis/session.hpp"

#include <cctype>
#include <sstream>

#include "elvis/error.hpp"
#include "elvis/strategies.hpp"

namespace elvis {

namespace {

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += items.size() == 2 ? " and " : (i + 1 == items.size() ? ", and " : ", ");
    out += items[i];
  }
  return out;
}

std::size_t word_count(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

}  // namespace

DialogSession::DialogSession(const StrategyMachine& machine, std::vector<Message> mailbox, SessionOptions options)
    : machine_(&machine),
      options_(options),
      folders_(std::move(mailbox)),
      vocabulary_(machine.static_vocabulary()),
      state_(machine.initial_state()) {
  vocabulary_["sender"] = folders_.senders();
  vocabulary_["subject"] = folders_.subjects();
}

void DialogSession::log(EventPayload payload, std::uint64_t cost) {
  events_.push_back(DialogEvent{tick_, std::move(payload)});
  tick_ += cost;
}

std::map<std::string, std::string> DialogSession::prompt_vars(const std::string& response) const {
  return {
      {"response", response},
      {"new", std::to_string(folders_.count(MessageStatus::kNew))},
      // Nothing in the status lattice is seen-but-unopened.
      {"unread", "0"},
      {"senders", join_list(folders_.senders())},
      {"subjects", join_list(folders_.subjects())},
  };
}

std::string DialogSession::render(const std::string& templ, const std::string& response) const {
  if (response.empty() || templ.find("{response}") != std::string::npos) {
    return render_prompt(templ, prompt_vars(response));
  }
  return render_prompt(response + " " + templ, prompt_vars(""));
}

AgentTurn DialogSession::prompt(const std::string& text, AgentTurn::Cause cause) {
  log(event::AgentPrompt{state_, text}, options_.ticks.prompt);
  AgentTurn turn;
  turn.state = state_;
  turn.text = text;
  turn.cause = cause;
  turn.folder_depth = folders_.depth();
  turn.barge_in_enabled = machine_->state(state_).barge_in_enabled && word_count(text) > 1;
  turn.finished = finished_;
  return turn;
}

AgentTurn DialogSession::enter(std::string target, const std::string& response, AgentTurn::Cause cause,
                               const std::string& operation, bool ok) {
  std::string text = render(machine_->state(target).initial_prompt, response);
  const auto& through = machine_->passthrough();
  for (auto it = through.find(target); it != through.end(); it = through.find(target)) {
    target = it->second;
    const std::string more = render(machine_->state(target).initial_prompt, "");
    if (!more.empty()) text += (text.empty() ? "" : " ") + more;
  }
  state_ = std::move(target);
  if (machine_->is_terminal(state_)) {
    finished_ = true;
    end_reason_ = "completed";
  }
  AgentTurn turn = prompt(text, cause);
  turn.operation = operation;
  turn.operation_ok = ok;
  return turn;
}

void DialogSession::require_input_state() const {
  if (!started_) throw PreconditionError("session has not started");
  if (finished_) throw PreconditionError("session is over");
}

void DialogSession::count_input() { ++inputs_; }

AgentTurn DialogSession::start() {
  if (started_) throw PreconditionError("session already started");
  started_ = true;
  return enter(state_, "", AgentTurn::Cause::kEntry);
}

namespace {

AgentTurn cap(AgentTurn turn, int inputs, int cap, bool& finished, std::string& reason) {
  if (!finished && inputs >= cap) {
    finished = true;
    reason = "turn-cap";
  }
  turn.finished = finished;
  return turn;
}

}  // namespace

AgentTurn DialogSession::silence() {
  require_input_state();
  count_input();
  ++timeouts_;
  log(event::Timeout{state_, timeouts_}, options_.ticks.timeout_wait);
  const auto& text = on_silence(machine_->state(state_), timeouts_);
  return cap(prompt(render(text, ""), AgentTurn::Cause::kTimeout), inputs_, options_.turn_cap, finished_,
             end_reason_);
}

AgentTurn DialogSession::help() {
  require_input_state();
  count_input();
  log(event::HelpRequest{state_}, options_.ticks.user_utterance);
  const auto& text = on_help(machine_->state(state_));
  return cap(prompt(render(text, ""), AgentTurn::Cause::kHelp), inputs_, options_.turn_cap, finished_,
             end_reason_);
}

AgentTurn DialogSession::utter(const std::string& text, const SemanticFrame& intended,
                               const RecognitionResult& result) {
  require_input_state();
  count_input();
  log(event::UserUtterance{state_, text, intended, result.accepted ? result.frame : std::nullopt,
                           result.accepted ? result.concept_accuracy : 0.0},
      options_.ticks.user_utterance);
  if (!result.accepted || !result.frame) {
    ++rejections_;
    log(event::AsrRejection{state_, rejections_}, 0);
    const auto& reply = on_rejection(machine_->state(state_), rejections_);
    return cap(prompt(render(reply, ""), AgentTurn::Cause::kRejection), inputs_, options_.turn_cap, finished_,
               end_reason_);
  }
  timeouts_ = 0;
  rejections_ = 0;
  const Step step = advance(*machine_, state_, *result.frame);
  AgentTurn turn;
  if (step.action.kind == AgentAction::Kind::kAppRequest) {
    const OpResult r = run(step.action.operation, *result.frame);
    log(event::AppAccess{step.action.operation, r.ok}, options_.ticks.app_access);
    std::string target = step.next;
    if (r.session_end) {
      target = step.on_exit.empty() ? *machine_->terminal_states().begin() : step.on_exit;
    } else if (!r.ok) {
      target = step.on_failure;
    }
    turn = enter(target, r.text, AgentTurn::Cause::kResponse, step.action.operation, r.ok);
  } else {
    turn = enter(step.next, step.action.say, AgentTurn::Cause::kResponse);
  }
  return cap(std::move(turn), inputs_, options_.turn_cap, finished_, end_reason_);
}

AgentTurn DialogSession::say(std::string_view text, const RecognitionRates* noise, Rng* rng) {
  require_input_state();
  const auto& spec = machine_->state(state_);
  auto frame = interpret(text, spec.grammar, vocabulary_);
  if (!frame) return utter(std::string(text), SemanticFrame{}, RecognitionResult{});
  RecognitionResult result;
  if (noise && rng) {
    result = recognize(*frame, spec.grammar, vocabulary_, *noise, *rng);
  } else {
    result.accepted = true;
    result.frame = frame;
    result.concept_accuracy = 1.0;
  }
  return utter(std::string(text), *frame, result);
}

void DialogSession::barge_in(std::size_t word_offset) {
  if (events_.empty()) throw PreconditionError("nothing to barge in on");
  log(event::BargeIn{state_, word_offset}, 0);
}

void DialogSession::close(std::map<std::string, std::string> observed_avm, std::string status) {
  if (closed_) throw PreconditionError("session already closed");
  if (status.empty()) status = end_reason_.empty() ? "eof" : end_reason_;
  log(event::TaskEnd{std::move(status), std::move(observed_avm)}, 0);
  finished_ = true;
  closed_ = true;
}

DialogSession::OpResult DialogSession::run(const std::string& operation, const SemanticFrame& frame) {
  OpResult r;
  auto fail = [&](std::string text) {
    r.ok = false;
    r.text = std::move(text);
    return r;
  };
  auto succeed = [&](std::string text) {
    r.ok = true;
    r.text = std::move(text);
    if (operation != op::kRepeat) last_response_ = r.text;
    return r;
  };

  std::vector<SelectionCriteria> criteria;
  std::string not_found = "There are no matching messages.";
  for (const auto& [slot, value] : frame.slot_values) {
    if (slot == "sender") {
      criteria.emplace_back(ContentCriterion{ContentField::kSender, value});
      not_found = "There are no messages from " + value + ".";
    } else if (slot == "subject") {
      criteria.emplace_back(ContentCriterion{ContentField::kSubject, value});
      not_found = "There are no messages about " + value + ".";
    } else if (slot == "position") {
      auto pos = parse_position(value);
      if (!pos) return fail("There is no such message.");
      criteria.emplace_back(*pos);
      not_found = "There is no such message.";
    }
  }
  if (criteria.size() > 1) not_found = "There are no matching messages.";

  if (operation == op::kRead) {
    if (!criteria.empty()) {
      auto found = folders_.select_all(criteria);
      if (!found || found->empty()) return fail(not_found);
      std::string text;
      if (found->size() > 1) text = "There are " + std::to_string(found->size()) + " matching messages. ";
      return succeed(text + folders_.read(found->front().id));
    }
    if (const Message* cur = folders_.current()) return succeed(folders_.read(cur->id));
    if (auto id = folders_.step_cursor(+1)) return succeed(folders_.read(*id));
    return fail("There are no messages in this folder.");
  }
  if (operation == op::kNext || operation == op::kPrevious) {
    const bool forward = operation == op::kNext;
    if (auto id = folders_.step_cursor(forward ? +1 : -1)) return succeed(folders_.read(*id));
    return fail(forward ? "There are no more messages." : "There is no previous message.");
  }
  if (operation == op::kRepeat) {
    if (last_response_.empty()) return fail("There is nothing to repeat.");
    return succeed(last_response_);
  }
  if (operation == op::kDelete) {
    const Message* cur = folders_.current();
    if (!cur) return fail("There is no message to delete.");
    folders_.update_status(cur->id, StatusAction::kDelete);
    return succeed("Message deleted.");
  }
  if (operation == op::kSummarize) {
    if (!criteria.empty()) {
      auto found = folders_.select_all(criteria);
      if (!found || found->empty()) return fail(not_found);
    }
    return succeed(folders_.summarize());
  }
  if (operation == op::kDone) {
    if (folders_.pop() == FolderStack::PopOutcome::kSessionEnd) {
      r.session_end = true;
      return r;
    }
    return succeed(folders_.depth() == 1 ? "You are back in your inbox." : "You are back in the previous folder.");
  }
  if (operation == op::kListSenders || operation == op::kListSubjects) {
    const bool senders = operation == op::kListSenders;
    const auto items = senders ? folders_.senders() : folders_.subjects();
    if (items.empty()) return fail("You have no messages.");
    return succeed((senders ? "Your messages are from " : "Your messages are about ") + join_list(items) + ".");
  }
  throw PreconditionError("unknown application operation '" + operation + "'");
}

namespace {

std::string trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

AgentTurn respond(DialogSession& session, std::string_view line, const RecognitionRates* noise, Rng* rng) {
  const std::string input = trimmed(line);
  if (input.empty() || input == "/silence") return session.silence();
  std::string lower;
  for (char c : input) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "help" || lower == "help.") return session.help();
  return session.say(input, noise, rng);
}

std::vector<std::string> play_script(DialogSession& session, const std::vector<std::string>& lines,
                                     const RecognitionRates* noise, Rng* rng) {
  std::vector<std::string> out{session.start().text};
  for (const auto& line : lines) {
    if (session.finished()) break;
    out.push_back(respond(session, line, noise, rng).text);
  }
  return out;
}

}  // namespace elvis
