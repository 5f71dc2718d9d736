#include "elvis/emai.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include "elvis/error.hpp"

namespace elvis {

std::string_view to_string(MessageStatus status) {
  switch (status) {
    case MessageStatus::kNew:
      return "new";
    case MessageStatus::kRead:
      return "read";
    case MessageStatus::kDeleted:
      return "deleted";
  }
  return "?";
}

std::optional<MessageStatus> parse_status(std::string_view name) {
  if (name == "new") return MessageStatus::kNew;
  if (name == "read") return MessageStatus::kRead;
  if (name == "deleted") return MessageStatus::kDeleted;
  return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string fold(std::string_view s) {
  std::string out = trim(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool valid_date(const std::string& d) {
  static const std::regex re(R"(\d{4}-\d{2}-\d{2} \d{2}:\d{2})");
  return std::regex_match(d, re);
}

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw MailboxFormatError("mailbox line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<Message> parse_mailbox(std::istream& in) {
  std::vector<Message> out;
  std::set<std::string> ids;
  std::optional<Message> cur;
  std::set<std::string> seen_fields;
  std::string last_field;
  std::size_t record_line = 0;

  auto finish = [&](std::size_t line) {
    if (!cur) return;
    for (const char* required : {"id", "from", "subject", "date", "body"}) {
      if (!seen_fields.count(required)) {
        bad_line(record_line, std::string("record is missing field '") + required + "'");
      }
    }
    if (!ids.insert(cur->id).second) bad_line(record_line, "duplicate message id '" + cur->id + "'");
    cur->length = cur->body.size();
    out.push_back(std::move(*cur));
    cur.reset();
    seen_fields.clear();
    last_field.clear();
    (void)line;
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) {
      finish(line_no);
      continue;
    }
    if (raw[0] == '#') continue;
    if (std::isspace(static_cast<unsigned char>(raw[0]))) {
      if (!cur || last_field != "body") bad_line(line_no, "continuation line outside a body");
      cur->body += '\n';
      cur->body += raw.size() >= 2 && raw[1] == ' ' ? raw.substr(2) : trim(raw);
      continue;
    }
    const auto colon = raw.find(':');
    if (colon == std::string::npos) bad_line(line_no, "expected 'field: value'");
    const std::string field = fold(raw.substr(0, colon));
    const std::string value = trim(std::string_view(raw).substr(colon + 1));
    if (!cur) {
      cur.emplace();
      record_line = line_no;
    }
    if (field != "attachment" && !seen_fields.insert(field).second) {
      bad_line(line_no, "field '" + field + "' repeated");
    }
    last_field = field;
    if (field == "id") {
      if (value.empty()) bad_line(line_no, "empty id");
      cur->id = value;
    } else if (field == "from") {
      cur->sender = value;
    } else if (field == "reply-to") {
      cur->reply_address = value;
    } else if (field == "subject") {
      cur->subject = value;
    } else if (field == "date") {
      if (!valid_date(value)) bad_line(line_no, "date must look like 'YYYY-MM-DD HH:MM'");
      cur->date = value;
    } else if (field == "priority") {
      try {
        std::size_t used = 0;
        cur->priority = std::stoi(value, &used);
        if (used != value.size() || cur->priority < 1 || cur->priority > 5) throw std::out_of_range("");
      } catch (const std::exception&) {
        bad_line(line_no, "priority must be an integer in 1..5");
      }
    } else if (field == "status") {
      auto s = parse_status(value);
      if (!s) bad_line(line_no, "status must be new, read or deleted");
      cur->status = *s;
    } else if (field == "attachment") {
      const auto semi = value.find(';');
      Attachment a;
      a.name = trim(value.substr(0, semi));
      a.mime_type = semi == std::string::npos ? "application/octet-stream" : trim(value.substr(semi + 1));
      cur->attachments.push_back(std::move(a));
    } else if (field == "body") {
      cur->body = value;
    } else {
      bad_line(line_no, "unknown field '" + field + "'");
    }
  }
  finish(line_no);
  return out;
}

std::vector<Message> load_mailbox(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MailboxFormatError("cannot open mailbox " + path.string());
  try {
    return parse_mailbox(in);
  } catch (const MailboxFormatError& e) {
    throw MailboxFormatError(path.string() + ": " + e.what());
  }
}

void write_mailbox(std::ostream& out, const std::vector<Message>& messages) {
  bool first = true;
  for (const auto& m : messages) {
    if (!first) out << '\n';
    first = false;
    out << "id: " << m.id << '\n' << "from: " << m.sender << '\n';
    if (!m.reply_address.empty()) out << "reply-to: " << m.reply_address << '\n';
    out << "subject: " << m.subject << '\n'
        << "date: " << m.date << '\n'
        << "priority: " << m.priority << '\n'
        << "status: " << to_string(m.status) << '\n';
    for (const auto& a : m.attachments) out << "attachment: " << a.name << "; " << a.mime_type << '\n';
    std::istringstream body(m.body);
    std::string line;
    bool head = true;
    while (std::getline(body, line)) {
      out << (head ? "body: " : "  ") << line << '\n';
      head = false;
    }
    if (head) out << "body: \n";
  }
}

std::optional<PositionCriterion> parse_position(std::string_view word) {
  static const std::pair<const char*, std::size_t> kOrdinals[] = {
      {"first", 1}, {"second", 2}, {"third", 3}, {"fourth", 4}, {"fifth", 5}};
  const std::string w = fold(word);
  PositionCriterion p;
  if (w == "first") {
    p.kind = PositionCriterion::Kind::kFirst;
    return p;
  }
  if (w == "last") {
    p.kind = PositionCriterion::Kind::kLast;
    return p;
  }
  if (w == "next") {
    p.kind = PositionCriterion::Kind::kNext;
    return p;
  }
  if (w == "previous") {
    p.kind = PositionCriterion::Kind::kPrevious;
    return p;
  }
  for (const auto& [name, idx] : kOrdinals) {
    if (w == name) {
      p.kind = PositionCriterion::Kind::kIndex;
      p.index = idx;
      return p;
    }
  }
  return std::nullopt;
}

std::optional<SortKey> parse_sort_key(std::string_view name) {
  if (name == "reply_address") return SortKey::kReplyAddress;
  if (name == "date") return SortKey::kDate;
  if (name == "subject") return SortKey::kSubject;
  if (name == "status") return SortKey::kStatus;
  if (name == "length") return SortKey::kLength;
  if (name == "priority") return SortKey::kPriority;
  return std::nullopt;
}

std::vector<Message> sort_messages(std::vector<Message> messages, SortKey key) {
  auto less = [key](const Message& a, const Message& b) {
    switch (key) {
      case SortKey::kReplyAddress:
        return fold(a.reply_address) < fold(b.reply_address);
      case SortKey::kDate:
        return a.date < b.date;
      case SortKey::kSubject:
        return fold(a.subject) < fold(b.subject);
      case SortKey::kStatus:
        return a.status < b.status;
      case SortKey::kLength:
        return a.length < b.length;
      case SortKey::kPriority:
        return a.priority < b.priority;
    }
    return false;
  };
  std::stable_sort(messages.begin(), messages.end(), less);
  return messages;
}

std::string preprocess(std::string_view body) {
  // Line-level: drop everything from a signature delimiter on, and quoted
  // reply lines.
  std::string kept;
  {
    std::istringstream in{std::string(body)};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line == "-- " || line == "--") break;
      if (!line.empty() && line[0] == '>') continue;
      kept += line;
      kept += '\n';
    }
  }

  struct Rule {
    std::regex pattern;
    const char* replacement;
  };
  static const Rule kRules[] = {
      {std::regex(R"((https?://|www\.)[^\s]+)", std::regex::icase), "a web link"},
      {std::regex(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})"), "an email address"},
      {std::regex(R"((^|\s)@(?=\s|$))"), "$1at"},
      {std::regex(R"((^|\s)&(?=\s|$))"), "$1and"},
      {std::regex(R"([-=_*~#]{3,})"), " "},
      {std::regex(R"(([!?.,;:])\1+)"), "$1"},
      {std::regex(R"(\s+)"), " "},
  };
  std::string text = kept;
  for (const auto& rule : kRules) text = std::regex_replace(text, rule.pattern, rule.replacement);
  return trim(text);
}

std::string header_line(const Message& message) {
  return "The message from " + message.sender + " is about " + message.subject + ".";
}

MessageStatus next_status(MessageStatus current, StatusAction action) {
  if (current == MessageStatus::kDeleted) {
    throw StatusTransitionError(action == StatusAction::kRead ? "cannot read a deleted message"
                                                              : "message is already deleted");
  }
  return action == StatusAction::kRead ? MessageStatus::kRead : MessageStatus::kDeleted;
}

// --- FolderStack ---------------------------------------------------------------

FolderStack::FolderStack(std::vector<Message> inbox) : messages_(std::move(inbox)) {
  Frame root;
  root.name = "inbox";
  for (std::size_t i = 0; i < messages_.size(); ++i) root.members.push_back(i);
  frames_.push_back(std::move(root));
}

std::size_t FolderStack::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    if (messages_[i].id == id) return i;
  }
  throw UnknownMessageError("no message with id '" + id + "'");
}

const Message& FolderStack::message(const std::string& id) const { return messages_[index_of(id)]; }

std::vector<std::size_t> FolderStack::live_members(const Frame& f) const {
  std::vector<std::size_t> out;
  for (std::size_t m : f.members) {
    if (messages_[m].status != MessageStatus::kDeleted) out.push_back(m);
  }
  return out;
}

std::vector<Message> FolderStack::top_messages() const {
  std::vector<Message> out;
  for (std::size_t m : live_members(top())) out.push_back(messages_[m]);
  return out;
}

const Message* FolderStack::current() const {
  const Frame& f = top();
  if (!f.cursor || *f.cursor >= f.members.size()) return nullptr;
  const Message& m = messages_[f.members[*f.cursor]];
  return m.status == MessageStatus::kDeleted ? nullptr : &m;
}

std::optional<std::vector<Message>> FolderStack::select(const SelectionCriteria& criteria) {
  return select_all({criteria});
}

std::optional<std::vector<Message>> FolderStack::select_all(
    const std::vector<SelectionCriteria>& criteria) {
  if (criteria.empty()) throw PreconditionError("selection needs at least one criterion");
  const Frame& f = top();
  std::vector<std::size_t> candidates = live_members(f);

  for (const auto& c : criteria) {
    if (const auto* content = std::get_if<ContentCriterion>(&c)) {
      const std::string want = fold(content->value);
      std::erase_if(candidates, [&](std::size_t m) {
        const Message& msg = messages_[m];
        const std::string& have = content->field == ContentField::kSender ? msg.sender : msg.subject;
        return fold(have) != want;
      });
    }
  }
  for (const auto& c : criteria) {
    const auto* pos = std::get_if<PositionCriterion>(&c);
    if (!pos || candidates.empty()) continue;
    // Position of each candidate within the top frame, for next/previous.
    auto frame_pos = [&](std::size_t m) {
      return static_cast<std::size_t>(std::find(f.members.begin(), f.members.end(), m) -
                                      f.members.begin());
    };
    std::optional<std::size_t> pick;
    switch (pos->kind) {
      case PositionCriterion::Kind::kFirst:
        pick = candidates.front();
        break;
      case PositionCriterion::Kind::kLast:
        pick = candidates.back();
        break;
      case PositionCriterion::Kind::kIndex:
        if (pos->index >= 1 && pos->index <= candidates.size()) pick = candidates[pos->index - 1];
        break;
      case PositionCriterion::Kind::kNext:
        for (std::size_t m : candidates) {
          if (!f.cursor || frame_pos(m) > *f.cursor) {
            pick = m;
            break;
          }
        }
        break;
      case PositionCriterion::Kind::kPrevious:
        if (f.cursor) {
          for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
            if (frame_pos(*it) < *f.cursor) {
              pick = *it;
              break;
            }
          }
        }
        break;
    }
    candidates.clear();
    if (pick) candidates.push_back(*pick);
  }

  if (candidates.empty()) return std::nullopt;
  Frame next;
  next.name = "selection";
  next.members = candidates;
  next.cursor = 0;
  std::vector<Message> result;
  for (std::size_t m : candidates) result.push_back(messages_[m]);
  frames_.push_back(std::move(next));
  return result;
}

std::string FolderStack::read(const std::string& id) {
  const std::size_t idx = index_of(id);
  Frame& f = frames_.back();
  const auto it = std::find(f.members.begin(), f.members.end(), idx);
  if (it == f.members.end() || messages_[idx].status == MessageStatus::kDeleted) {
    throw UnknownMessageError("message '" + id + "' is not in the current folder");
  }
  Message& m = messages_[idx];
  m.status = next_status(m.status, StatusAction::kRead);
  f.cursor = static_cast<std::size_t>(it - f.members.begin());
  std::string text = header_line(m);
  const std::string spoken = preprocess(m.body);
  if (!spoken.empty()) text += " " + spoken;
  return text;
}

MessageStatus FolderStack::update_status(const std::string& id, StatusAction action) {
  Message& m = messages_[index_of(id)];
  m.status = next_status(m.status, action);
  return m.status;
}

std::optional<std::string> FolderStack::step_cursor(int delta) {
  Frame& f = frames_.back();
  if (f.members.empty()) return std::nullopt;
  long pos = f.cursor ? static_cast<long>(*f.cursor) : (delta > 0 ? -1 : static_cast<long>(f.members.size()));
  for (;;) {
    pos += delta;
    if (pos < 0 || pos >= static_cast<long>(f.members.size())) return std::nullopt;
    const Message& m = messages_[f.members[static_cast<std::size_t>(pos)]];
    if (m.status != MessageStatus::kDeleted) {
      f.cursor = static_cast<std::size_t>(pos);
      return m.id;
    }
  }
}

std::string FolderStack::summarize() const {
  const auto live = live_members(top());
  if (live.empty()) return "There are no messages in this folder.";
  std::size_t fresh = 0;
  std::size_t read = 0;
  for (std::size_t m : live) {
    (messages_[m].status == MessageStatus::kNew ? fresh : read) += 1;
  }
  std::ostringstream out;
  out << "There " << (live.size() == 1 ? "is " : "are ") << fresh << " new and " << read << " read "
      << (live.size() == 1 ? "message" : "messages") << " in this folder.";
  std::size_t n = 0;
  for (std::size_t m : live) {
    out << " Message " << ++n << " is from " << messages_[m].sender << " about " << messages_[m].subject
        << '.';
  }
  return out.str();
}

FolderStack::PopOutcome FolderStack::pop() {
  if (frames_.size() <= 1) return PopOutcome::kSessionEnd;
  frames_.pop_back();
  return PopOutcome::kPopped;
}

std::size_t FolderStack::count(MessageStatus status) const {
  return static_cast<std::size_t>(std::count_if(messages_.begin(), messages_.end(),
                                                [&](const Message& m) { return m.status == status; }));
}

namespace {

std::vector<std::string> distinct(const std::vector<Message>& messages, std::string Message::*field) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& m : messages) {
    if (m.status == MessageStatus::kDeleted) continue;
    if (seen.insert(fold(m.*field)).second) out.push_back(m.*field);
  }
  return out;
}

}  // namespace

std::vector<std::string> FolderStack::senders() const { return distinct(messages_, &Message::sender); }
std::vector<std::string> FolderStack::subjects() const { return distinct(messages_, &Message::subject); }

}  // namespace elvis
