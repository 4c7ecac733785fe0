#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronofact/core.hpp"
#include "chronofact/time_span.hpp"

namespace chronofact {

struct TimeConfig {
  // End day for open intervals such as "starting in 2015".
  DayIndex horizon_day = day_index(2100, 12, 31);
  // Days per positional-encoding unit; 30 makes one unit roughly one month.
  double time_scale = 30.0;
  DayIndex offset_cap = 36'500;
};

// A recognized temporal expression inside a token sequence.
struct TemporalMatch {
  TimeSpan span;
  std::size_t begin = 0;  // first token of the whole phrase, cue words included
  std::size_t end = 0;    // one past the last token
  // Tokens carrying date values (day numbers, month names, years). These are
  // the tokens the encoder mean-pools into the date representation.
  std::vector<std::size_t> date_tokens;
};

// Scans for the first explicit temporal expression. Marker tokens ("," ";")
// are allowed in the input and are never part of a match.
std::optional<TemporalMatch> find_temporal_expression(std::span<const std::string> tokens,
                                                      const TimeConfig& config = {});

// Recognizes "in 1953", "March 2023", "from 2002 to 2006", "from 1975 until
// 1986", "on 22 October 2010", "October 22, 2010", "starting in 2015",
// "since 2015", "between 2001 and 2003". Implicit cues yield nullopt.
std::optional<TimeSpan> parse_temporal_expression(std::string_view text, const TimeConfig& config = {});

// Renders a span the way the verbalizer and extractor agree on: year spans
// as "2002", month spans as "March 2023", day spans as "22 October 2010".
std::string render_date(DayIndex day, Granularity g);

// Minimum start day over all dated events; throws NoTemporalAnchor.
DayIndex earliest_reference(std::span<const Event> claim_events, std::span<const Event> evidence_events);

class TimelinePosition {
 public:
  TimelinePosition(DayIndex offset_days, DayIndex cap);
  // Clamps into [0, cap] instead of throwing.
  static TimelinePosition clamped(DayIndex offset_days, DayIndex cap);
  DayIndex offset_days() const { return offset_; }

 private:
  DayIndex offset_;
};

// Sinusoidal encoding of p = offset / time_scale:
// pe[2i] = sin(p / 10000^(2i/dim)), pe[2i+1] = cos(p / 10000^(2i/dim)).
std::vector<double> positional_encoding(const TimelinePosition& position, std::size_t dim,
                                        double time_scale = 30.0);

// Stable permutation by (start_day, end_day, source_index), undated events
// last. perm[r] is the index of the event at rank r.
std::vector<std::size_t> chronological_sort(std::span<const Event> events);

// Alternative reorderers (for example an LLM-backed one) plug in here:
// events in, permutation out.
using Reorderer = std::function<std::vector<std::size_t>(std::span<const Event>)>;

// SUP iff the timeline start days of the matched facts, taken in claim
// surface order, are non-decreasing. matching[i] is the timeline index of
// claim event i; a missing or out-of-range entry is an OracleError.
Label order_consistency_oracle(std::span<const Event> claim_events, std::span<const Event> timeline,
                               std::span<const std::optional<std::size_t>> matching);

// Number of pairs (a, b), a before b, whose start days are strictly decreasing.
std::size_t start_day_inversions(std::span<const Event> events, std::span<const std::size_t> order);

}  // namespace chronofact
