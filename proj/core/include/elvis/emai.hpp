#pragma once

// Email application interface: an in-memory mailbox with selection, sorting,
// status updates, summaries, body preprocessing for speech, and a folder
// stack that mirrors the nesting of the dialog.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace elvis {

enum class MessageStatus { kNew, kRead, kDeleted };

std::string_view to_string(MessageStatus status);
std::optional<MessageStatus> parse_status(std::string_view name);

struct Attachment {
  std::string name;
  std::string mime_type;

  friend bool operator==(const Attachment&, const Attachment&) = default;
};

struct Message {
  std::string id;
  std::string sender;
  std::string reply_address;
  std::string subject;
  std::string body;
  std::string date;  // "YYYY-MM-DD HH:MM"; sorts chronologically as text
  std::size_t length = 0;  // body characters
  int priority = 3;        // 1 = highest
  MessageStatus status = MessageStatus::kNew;
  std::vector<Attachment> attachments;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Parses the field-per-line fixture format (see data/mailboxes/README).
/// Throws MailboxFormatError with the line number on malformed input.
std::vector<Message> parse_mailbox(std::istream& in);
std::vector<Message> load_mailbox(const std::filesystem::path& path);
void write_mailbox(std::ostream& out, const std::vector<Message>& messages);

enum class ContentField { kSender, kSubject };

struct ContentCriterion {
  ContentField field;
  std::string value;
};

struct PositionCriterion {
  enum class Kind { kFirst, kPrevious, kNext, kLast, kIndex };
  Kind kind = Kind::kFirst;
  std::size_t index = 0;  // 1-based, kIndex only
};

/// Either a content or a positional criterion, never both.
using SelectionCriteria = std::variant<ContentCriterion, PositionCriterion>;

/// Maps spoken position words ("first", "last", "next", "third", ...).
std::optional<PositionCriterion> parse_position(std::string_view word);

enum class SortKey { kReplyAddress, kDate, kSubject, kStatus, kLength, kPriority };

std::optional<SortKey> parse_sort_key(std::string_view name);

/// Stable ascending sort; returns a sorted copy.
std::vector<Message> sort_messages(std::vector<Message> messages, SortKey key);

/// Rewrites material that does not speak well: URLs, e-mail addresses,
/// symbols such as "@" and "&", repeated punctuation, quoted replies and
/// signature blocks. Whitespace is collapsed.
std::string preprocess(std::string_view body);

/// Header line spoken before a message body.
std::string header_line(const Message& message);

enum class StatusAction { kRead, kDelete };

/// The status a message moves to; throws StatusTransitionError for
/// deleted -> read. read -> read is allowed and leaves the status unchanged.
MessageStatus next_status(MessageStatus current, StatusAction action);

/// The mailbox as the dialog sees it: the session's own copy of the messages
/// plus a stack of folder frames. The inbox frame at the bottom is never
/// popped.
class FolderStack {
 public:
  struct Frame {
    std::string name;
    std::vector<std::size_t> members;  // indices into messages()
    std::optional<std::size_t> cursor;  // index into members
  };

  enum class PopOutcome { kPopped, kSessionEnd };

  explicit FolderStack(std::vector<Message> inbox);

  std::size_t depth() const { return frames_.size(); }
  const Frame& top() const { return frames_.back(); }
  const std::vector<Message>& messages() const { return messages_; }
  const Message& message(const std::string& id) const;

  /// Live (non-deleted) messages of the top frame, in frame order.
  std::vector<Message> top_messages() const;
  /// Current message of the top frame, if the cursor is set and live.
  const Message* current() const;

  /// Matching live messages of the top frame. A non-empty result is pushed
  /// as a new frame with the cursor on its first message; an empty result
  /// (nullopt) pushes nothing. Content matching is case-insensitive and
  /// whitespace-trimmed equality on the named field.
  std::optional<std::vector<Message>> select(const SelectionCriteria& criteria);
  /// Conjunction of several criteria; pushes one frame.
  std::optional<std::vector<Message>> select_all(const std::vector<SelectionCriteria>& criteria);

  /// Header line plus preprocessed body; marks the message read and moves the
  /// cursor onto it. Throws UnknownMessageError when the id is not a live
  /// member of the top frame.
  std::string read(const std::string& id);

  /// Throws UnknownMessageError / StatusTransitionError.
  MessageStatus update_status(const std::string& id, StatusAction action);

  /// Moves the cursor by +1/-1 within the top frame; nullopt at either end.
  std::optional<std::string> step_cursor(int delta);

  std::string summarize() const;

  PopOutcome pop();

  std::size_t count(MessageStatus status) const;
  /// Distinct senders / subjects of live inbox messages, in first-seen order.
  std::vector<std::string> senders() const;
  std::vector<std::string> subjects() const;

 private:
  std::size_t index_of(const std::string& id) const;
  std::vector<std::size_t> live_members(const Frame& f) const;

  std::vector<Message> messages_;
  std::vector<Frame> frames_;
};

}  // namespace elvis
