#pragma once

// Simulated recognizer and turn-taking channel. Intended frames go in;
// rejections, concept substitutions and barge-ins come out.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "elvis/dialog.hpp"
#include "elvis/rng.hpp"

namespace elvis {

struct RecognitionRates {
  double concept_error_rate = 0.0;
  double rejection_rate = 0.0;

  friend bool operator==(const RecognitionRates&, const RecognitionRates&) = default;
};

struct AsrModel {
  /// Keyed by grammar id ("mi.main") or by grammar family, the id prefix up
  /// to the first '.' ("si"). Exact ids take precedence.
  std::map<std::string, RecognitionRates> rates;
  RecognitionRates fallback;
  /// Scales both rates by (1 + sensitivity * (1 - expertise)): speakers who
  /// have not yet learned the grammar's limits are recognized less reliably.
  double expertise_sensitivity = 0.0;
  std::uint64_t seed = 0;

  RecognitionRates rates_for(const std::string& grammar_id) const;
  RecognitionRates effective_rates(const std::string& grammar_id, double expertise) const;

  friend bool operator==(const AsrModel&, const AsrModel&) = default;
};

struct RecognitionResult {
  bool accepted = false;
  std::optional<SemanticFrame> frame;  // set iff accepted
  double concept_accuracy = 0.0;       // 0 when rejected
};

/// Fraction of the intended concepts (action and each slot value) that the
/// recognized frame reproduces.
double concept_accuracy(const SemanticFrame& intended, const SemanticFrame& recognized);

/// Rejects with probability rejection_rate; otherwise replaces each concept
/// independently with probability concept_error_rate by a uniformly chosen
/// different value licensed by the grammar. A concept with no alternative
/// value stays as spoken. The intended frame must conform to the grammar.
RecognitionResult recognize(const SemanticFrame& intended, const Grammar& grammar,
                            const SlotVocabulary& vocabulary, const RecognitionRates& rates, Rng& rng);

RecognitionResult recognize(const SemanticFrame& intended, const Grammar& grammar,
                            const SlotVocabulary& vocabulary, const AsrModel& model, Rng& rng,
                            double expertise = 1.0);

/// Mean concept accuracy over the user-utterance events (rejections score 0).
/// Throws UndefinedMetricError when there are none.
double mean_recognition(std::span<const DialogEvent> events);

/// Word offset at which the user cuts into a prompt, if they do. Never fires
/// when barge-in is disabled, the propensity is zero, or the prompt has fewer
/// than two words; the offset is always inside the prompt.
std::optional<std::size_t> maybe_barge_in(std::size_t prompt_words, bool barge_in_enabled,
                                          double propensity, Rng& rng);

}  // namespace elvis
