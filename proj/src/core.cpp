#include "chronofact/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "chronofact/error.hpp"

namespace chronofact {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kSup: return "SUP";
    case Label::kRef: return "REF";
    case Label::kNei: return "NEI";
  }
  return "?";
}

Label label_from_string(std::string_view s) {
  if (s == "SUP" || s == "SUPPORTS") return Label::kSup;
  if (s == "REF" || s == "REFUTES") return Label::kRef;
  if (s == "NEI" || s == "NOT ENOUGH INFO") return Label::kNei;
  throw ValidationError("unknown label '" + std::string(s) + "'");
}

Label label_at(std::size_t index, std::size_t arity) {
  if (index >= arity || arity < 2 || arity > 3) {
    throw ValidationError("label index " + std::to_string(index) + " out of range for arity " +
                          std::to_string(arity));
  }
  return static_cast<Label>(index);
}

ProbDist ProbDist::from(std::vector<double> probs) {
  if (probs.size() != 2 && probs.size() != 3) {
    throw ValidationError("distribution arity must be 2 or 3, got " + std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw ValidationError("distribution entry is negative or non-finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ValidationError("distribution sums to " + std::to_string(sum));
  }
  for (double& p : probs) p /= sum;
  return ProbDist(std::move(probs));
}

ProbDist ProbDist::normalized(std::vector<double> weights) {
  if (weights.size() != 2 && weights.size() != 3) {
    throw ValidationError("distribution arity must be 2 or 3");
  }
  double sum = 0.0;
  for (double& w : weights) {
    if (!std::isfinite(w)) throw ValidationError("non-finite weight");
    w = std::max(w, 0.0);
    sum += w;
  }
  if (sum <= 0.0) throw ValidationError("cannot normalize an all-zero weight vector");
  for (double& w : weights) w /= sum;
  return ProbDist(std::move(weights));
}

ProbDist ProbDist::uniform(std::size_t arity) {
  if (arity != 2 && arity != 3) throw ValidationError("distribution arity must be 2 or 3");
  return ProbDist(std::vector<double>(arity, 1.0 / static_cast<double>(arity)));
}

ProbDist ProbDist::one_hot(Label label, std::size_t arity) {
  std::vector<double> p(arity, 0.0);
  p.at(index_of(label)) = 1.0;
  return ProbDist(std::move(p));
}

Label label_from_dist(const ProbDist& d) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.arity(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  return static_cast<Label>(best);
}

Label label_from_dist(std::span<const double> probs) {
  return label_from_dist(ProbDist::from({probs.begin(), probs.end()}));
}

std::string_view to_string(EventSource s) { return s == EventSource::kClaim ? "claim" : "evidence"; }

EventSource event_source_from_string(std::string_view s) {
  if (s == "claim") return EventSource::kClaim;
  if (s == "evidence") return EventSource::kEvidence;
  throw ValidationError("unknown event source '" + std::string(s) + "'");
}

std::vector<std::string> Event::tokens() const {
  std::vector<std::string> out = predicate_tokens;
  out.insert(out.end(), argument_tokens.begin(), argument_tokens.end());
  return out;
}

void Event::validate() const {
  if (predicate_tokens.empty()) throw ValidationError("event '" + id + "' has no predicate tokens");
  if (raw_text.empty()) throw ValidationError("event '" + id + "' has empty raw_text");
}

void Claim::validate() const {
  if (events.empty()) throw ValidationError("claim '" + id + "' has no events");
  for (const auto& e : events) e.validate();
  if (gold && gold->event_labels.size() != events.size()) {
    throw ValidationError("claim '" + id + "': " + std::to_string(gold->event_labels.size()) +
                          " event labels for " + std::to_string(events.size()) + " events");
  }
}

void EvidencePool::add(Event event, Provenance where) {
  events.push_back(std::move(event));
  provenance.push_back(std::move(where));
}

void EvidencePool::validate() const {
  if (provenance.size() != events.size()) {
    throw ValidationError("evidence pool provenance count does not match event count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& e : events) {
    e.validate();
    if (!seen.insert(e.id).second) throw ValidationError("duplicate evidence event id '" + e.id + "'");
  }
}

Label hard_rule(std::span<const Label> event_labels, std::optional<Label> order_label) {
  bool any_ref = order_label == Label::kRef;
  bool all_sup = !order_label || order_label == Label::kSup;
  for (Label l : event_labels) {
    any_ref = any_ref || l == Label::kRef;
    all_sup = all_sup && l == Label::kSup;
  }
  if (any_ref) return Label::kRef;
  if (all_sup) return Label::kSup;
  return Label::kNei;
}

}  // namespace chronofact
