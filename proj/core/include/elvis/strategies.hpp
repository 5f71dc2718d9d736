#pragma once

// The two dialog strategies for the voice email agent.
//
// System initiative (SI) walks the user through eight narrow states, each
// accepting one increment of information. Mixed initiative (MI) has a single
// main state whose grammar accepts an action plus up to three slots at once.
// Both expose the same application operations.

#include <optional>
#include <string_view>

#include "elvis/dialog.hpp"

namespace elvis {

enum class StrategyKind { kSystemInitiative, kMixedInitiative };

std::string_view to_string(StrategyKind kind);  // "SI" / "MI"
std::optional<StrategyKind> parse_strategy(std::string_view name);

namespace si {
inline constexpr const char* kGreeting = "greeting";
inline constexpr const char* kTop = "top";
inline constexpr const char* kSelectMethod = "select-method";
inline constexpr const char* kSelectField = "select-field";
inline constexpr const char* kWhichSender = "which-sender";
inline constexpr const char* kWhichSubject = "which-subject";
inline constexpr const char* kWhichPosition = "which-position";
inline constexpr const char* kMessageContext = "message-context";
inline constexpr const char* kFolderSummary = "folder-summary";
inline constexpr const char* kGoodbye = "goodbye";
}  // namespace si

namespace mi {
inline constexpr const char* kGreeting = "greeting";
inline constexpr const char* kMain = "main";
inline constexpr const char* kGoodbye = "goodbye";
}  // namespace mi

/// Application operations a transition may request. The session layer maps
/// them onto the mailbox.
namespace op {
inline constexpr const char* kRead = "read";
inline constexpr const char* kNext = "next";
inline constexpr const char* kPrevious = "previous";
inline constexpr const char* kRepeat = "repeat";
inline constexpr const char* kDelete = "delete";
inline constexpr const char* kSummarize = "summarize";
inline constexpr const char* kDone = "done";
inline constexpr const char* kListSenders = "list-senders";
inline constexpr const char* kListSubjects = "list-subjects";
}  // namespace op

StrategyMachine build_si();
StrategyMachine build_mi();
StrategyMachine build_strategy(StrategyKind kind);

}  // namespace elvis
