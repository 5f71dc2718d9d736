#include "elvis/channel.hpp"

#include <algorithm>
#include <vector>

#include "elvis/error.hpp"

namespace elvis {

RecognitionRates AsrModel::rates_for(const std::string& grammar_id) const {
  if (auto it = rates.find(grammar_id); it != rates.end()) return it->second;
  const auto dot = grammar_id.find('.');
  if (dot != std::string::npos) {
    if (auto it = rates.find(grammar_id.substr(0, dot)); it != rates.end()) return it->second;
  }
  return fallback;
}

RecognitionRates AsrModel::effective_rates(const std::string& grammar_id, double expertise) const {
  RecognitionRates r = rates_for(grammar_id);
  const double scale = 1.0 + expertise_sensitivity * (1.0 - std::clamp(expertise, 0.0, 1.0));
  r.concept_error_rate = std::min(1.0, r.concept_error_rate * scale);
  r.rejection_rate = std::min(1.0, r.rejection_rate * scale);
  return r;
}

double concept_accuracy(const SemanticFrame& intended, const SemanticFrame& recognized) {
  const std::size_t total = intended.concept_count();
  if (total == 0) return 0.0;
  std::size_t correct = 0;
  if (intended.action && recognized.action == intended.action) ++correct;
  for (const auto& [slot, value] : intended.slot_values) {
    auto it = recognized.slot_values.find(slot);
    if (it != recognized.slot_values.end() && it->second == value) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

template <typename Range>
std::string substitute(const Range& choices, const std::string& spoken, Rng& rng) {
  std::vector<std::string> others;
  for (const auto& c : choices) {
    if (c != spoken) others.push_back(c);
  }
  if (others.empty()) return spoken;
  return others[rng.index(others.size())];
}

}  // namespace

RecognitionResult recognize(const SemanticFrame& intended, const Grammar& grammar,
                            const SlotVocabulary& vocabulary, const RecognitionRates& rates, Rng& rng) {
  if (!conforms(intended, grammar)) {
    throw PreconditionError("intended frame " + to_string(intended) + " does not conform to grammar " +
                            grammar.id);
  }
  // Draw order is fixed (rejection, then action, then slots in key order) so
  // a stream replays identically.
  RecognitionResult out;
  if (rng.bernoulli(rates.rejection_rate)) {
    out.accepted = false;
    out.concept_accuracy = 0.0;
    return out;
  }
  SemanticFrame heard = intended;
  if (heard.action && rng.bernoulli(rates.concept_error_rate)) {
    heard.action = substitute(grammar.actions, *heard.action, rng);
  }
  for (auto& [slot, value] : heard.slot_values) {
    if (!rng.bernoulli(rates.concept_error_rate)) continue;
    auto vocab = vocabulary.find(slot);
    if (vocab == vocabulary.end()) continue;
    value = substitute(vocab->second, value, rng);
  }
  out.accepted = true;
  out.concept_accuracy = concept_accuracy(intended, heard);
  out.frame = std::move(heard);
  return out;
}

RecognitionResult recognize(const SemanticFrame& intended, const Grammar& grammar,
                            const SlotVocabulary& vocabulary, const AsrModel& model, Rng& rng,
                            double expertise) {
  return recognize(intended, grammar, vocabulary, model.effective_rates(grammar.id, expertise), rng);
}

double mean_recognition(std::span<const DialogEvent> events) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : events) {
    if (const auto* u = std::get_if<event::UserUtterance>(&e.payload)) {
      sum += u->recognized ? u->concept_accuracy : 0.0;
      ++n;
    }
  }
  if (n == 0) throw UndefinedMetricError("mean recognition is undefined for a session without utterances");
  return sum / static_cast<double>(n);
}

std::optional<std::size_t> maybe_barge_in(std::size_t prompt_words, bool barge_in_enabled,
                                          double propensity, Rng& rng) {
  if (!barge_in_enabled || propensity <= 0.0 || prompt_words < 2) return std::nullopt;
  if (!rng.bernoulli(propensity)) return std::nullopt;
  // Somewhere after the first word and before the last.
  return 1 + rng.index(prompt_words - 1);
}

}  // namespace elvis
