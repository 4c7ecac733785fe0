#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronofact/time_span.hpp"

namespace chronofact {

// Verdict labels. Index order is the serialization order and the argmax
// tie-break order: SUP < REF < NEI.
enum class Label : std::uint8_t { kSup = 0, kRef = 1, kNei = 2 };

std::string_view to_string(Label label);
Label label_from_string(std::string_view s);

inline std::size_t index_of(Label label) { return static_cast<std::size_t>(label); }
Label label_at(std::size_t index, std::size_t arity);

// Probability vector over SUP/REF (arity 2) or SUP/REF/NEI (arity 3).
class ProbDist {
 public:
  static constexpr double kSumTolerance = 1e-4;

  // Validates entries >= 0 and |sum - 1| <= kSumTolerance, then stores the
  // vector renormalized so the library-side invariant holds to 1e-12.
  static ProbDist from(std::vector<double> probs);
  // Clamps negatives to zero and divides by the sum. Throws if the sum is 0.
  static ProbDist normalized(std::vector<double> weights);
  static ProbDist uniform(std::size_t arity);
  static ProbDist one_hot(Label label, std::size_t arity);

  std::size_t arity() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

 private:
  explicit ProbDist(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Highest-probability label, ties to the lowest index.
Label label_from_dist(const ProbDist& d);
// Same, but validates a raw vector first (ValidationError on a bad simplex).
Label label_from_dist(std::span<const double> probs);

enum class EventSource : std::uint8_t { kClaim, kEvidence };
std::string_view to_string(EventSource s);
EventSource event_source_from_string(std::string_view s);

struct Event {
  std::string id;
  EventSource source = EventSource::kClaim;
  std::size_t source_index = 0;
  std::vector<std::string> predicate_tokens;
  std::vector<std::string> argument_tokens;
  std::optional<TimeSpan> time;
  std::string raw_text;
  bool low_confidence = false;

  // predicate tokens followed by argument tokens
  std::vector<std::string> tokens() const;
  bool dated() const { return time.has_value(); }

  // Throws ValidationError when predicate_tokens or raw_text is empty.
  void validate() const;
};

struct ClaimGold {
  std::vector<Label> event_labels;
  Label order_label = Label::kSup;
  Label claim_label = Label::kSup;
};

struct Claim {
  std::string id;
  std::string text;
  std::vector<Event> events;
  std::optional<ClaimGold> gold;

  void validate() const;
};

struct Provenance {
  std::string doc_id;
  std::string sent_id;
};

struct EvidencePool {
  std::vector<Event> events;
  std::vector<Provenance> provenance;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  void add(Event event, Provenance where);
  // ids unique, one provenance entry per event
  void validate() const;
};

struct VerificationResult {
  std::vector<ProbDist> event_dists;
  std::vector<Label> event_labels;
  ProbDist order_dist = ProbDist::uniform(2);
  Label order_label = Label::kSup;
  ProbDist claim_dist = ProbDist::uniform(2);
  Label claim_label = Label::kSup;
  // Indices into the scored evidence pool, in the order fed to the
  // evidence-side sequence encoder.
  std::vector<std::size_t> evidence_order;
  std::vector<double> relevance;
  bool empty_evidence = false;
};

// The hard aggregation rule: all SUP -> SUP, any REF -> REF, else NEI.
// In 2-class mode NEI never occurs in the inputs and the rule returns SUP/REF.
Label hard_rule(std::span<const Label> event_labels, std::optional<Label> order_label);

}  // namespace chronofact
