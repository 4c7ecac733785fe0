#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chronofact/chrono_time.hpp"
#include "chronofact/core.hpp"
#include "chronofact/encoder.hpp"

namespace chronofact {

struct ExtractOptions {
  EventSource source = EventSource::kClaim;
  // Event ids are id_prefix + source_index.
  std::string id_prefix = "c";
  TimeConfig time;
};

// Rule-based event extraction. Clauses are split at "and then", "before",
// "after", "thereafter", ", then", ";" and at "," / "and" when the next
// word is a verb. Each clause yields one event whose predicate is its first
// verb (copulas absorb the following noun phrase: "was a member").
// Verb-initial clauses and pronoun subjects inherit the previous subject.
// Throws ValidationError on an empty sentence.
std::vector<Event> extract_events(std::string_view sentence, const ExtractOptions& options = {});

bool looks_like_verb(std::string_view token);

// Evidence pre-scoring: ranks pool events by the best cosine similarity of
// their CLS encoding to any claim event's CLS encoding and keeps the top
// `budget`. Ties go to (doc_id, sent_id, source_index). Provenance is kept.
EvidencePool score_evidence(std::span<const Event> claim_events, const EvidencePool& pool,
                            const EventEncoderHandle& encoder, std::size_t budget);

}  // namespace chronofact
