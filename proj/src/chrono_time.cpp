#include "chronofact/chrono_time.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "chronofact/error.hpp"
#include "chronofact/text.hpp"

namespace chronofact {
namespace {

constexpr std::array<std::string_view, 12> kMonthNames = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

std::optional<unsigned> month_number(std::string_view lower) {
  for (std::size_t i = 0; i < kMonthNames.size(); ++i) {
    if (lower == kMonthNames[i] || (lower.size() == 3 && kMonthNames[i].substr(0, 3) == lower && lower != "may")) {
      return static_cast<unsigned>(i + 1);
    }
  }
  return std::nullopt;
}

std::optional<int> year_number(std::string_view tok) {
  if (tok.size() != 4 || !is_number(tok)) return std::nullopt;
  const int y = std::stoi(std::string(tok));
  if (y < 1000 || y > 2999) return std::nullopt;
  return y;
}

std::optional<unsigned> day_number(std::string_view tok) {
  std::string_view digits = tok;
  for (std::string_view suffix : {"st", "nd", "rd", "th"}) {
    if (digits.size() > 2 && digits.ends_with(suffix)) {
      digits.remove_suffix(2);
      break;
    }
  }
  if (digits.empty() || digits.size() > 2 || !is_number(digits)) return std::nullopt;
  const unsigned d = static_cast<unsigned>(std::stoi(std::string(digits)));
  if (d < 1 || d > 31) return std::nullopt;
  return d;
}

Granularity finer(Granularity a, Granularity b) { return std::min(a, b); }

struct DatePhrase {
  DayIndex start;
  DayIndex end;
  Granularity granularity;
  std::vector<std::size_t> tokens;  // original token indices
  std::size_t next;                 // position in the filtered sequence
};

// Works over the non-marker tokens; `orig` maps filtered positions back.
class Scanner {
 public:
  Scanner(std::span<const std::string> tokens, const TimeConfig& config) : config_(config) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (is_clause_marker(tokens[i])) continue;
      lower_.push_back(to_lower(tokens[i]));
      orig_.push_back(i);
    }
  }

  std::optional<TemporalMatch> first_match() const {
    for (std::size_t pos = 0; pos < lower_.size(); ++pos) {
      if (auto m = expression_at(pos)) return m;
    }
    return std::nullopt;
  }

 private:
  bool is(std::size_t pos, std::initializer_list<std::string_view> words) const {
    if (pos >= lower_.size()) return false;
    return std::find(words.begin(), words.end(), lower_[pos]) != words.end();
  }

  std::optional<DatePhrase> date_at(std::size_t pos) const {
    if (pos >= lower_.size()) return std::nullopt;
    auto checked = [](int y, unsigned m, unsigned d) -> std::optional<DayIndex> {
      try {
        return day_index(y, m, d);
      } catch (const ValidationError&) {
        return std::nullopt;
      }
    };
    // 22 October 2010
    if (auto d = day_number(lower_[pos]); d && pos + 2 < lower_.size()) {
      auto m = month_number(lower_[pos + 1]);
      auto y = year_number(lower_[pos + 2]);
      if (m && y) {
        if (auto day = checked(*y, *m, *d)) {
          return DatePhrase{*day, *day, Granularity::kDay, {orig_[pos], orig_[pos + 1], orig_[pos + 2]}, pos + 3};
        }
      }
    }
    if (auto m = month_number(lower_[pos])) {
      // October 22 2010 (the comma marker is already filtered out)
      if (pos + 2 < lower_.size()) {
        auto d = day_number(lower_[pos + 1]);
        auto y = year_number(lower_[pos + 2]);
        if (d && y) {
          if (auto day = checked(*y, *m, *d)) {
            return DatePhrase{*day, *day, Granularity::kDay, {orig_[pos], orig_[pos + 1], orig_[pos + 2]}, pos + 3};
          }
        }
      }
      // March 2023
      if (pos + 1 < lower_.size()) {
        if (auto y = year_number(lower_[pos + 1])) {
          return DatePhrase{day_index(*y, *m, 1), last_day_of_month(*y, *m), Granularity::kMonth,
                            {orig_[pos], orig_[pos + 1]}, pos + 2};
        }
      }
    }
    if (auto y = year_number(lower_[pos])) {
      return DatePhrase{first_day_of_year(*y), last_day_of_year(*y), Granularity::kYear, {orig_[pos]}, pos + 1};
    }
    return std::nullopt;
  }

  TemporalMatch make(std::size_t begin, std::size_t end_pos, DayIndex start, DayIndex end, Granularity g,
                     std::vector<std::size_t> date_tokens) const {
    // An open interval keeps its start granularity; the horizon is Dec 31 so
    // the rounding invariant still holds.
    TimeSpan span(start, std::max(start, end), g);
    return TemporalMatch{span, orig_[begin], orig_[end_pos - 1] + 1, std::move(date_tokens)};
  }

  std::optional<TemporalMatch> range_from(std::size_t begin, const DatePhrase& first, bool open_if_alone,
                                          std::initializer_list<std::string_view> joiners) const {
    if (is(first.next, joiners)) {
      if (auto second = date_at(first.next + 1)) {
        if (second->end >= first.start) {
          auto toks = first.tokens;
          toks.insert(toks.end(), second->tokens.begin(), second->tokens.end());
          return make(begin, second->next, first.start, second->end, finer(first.granularity, second->granularity),
                      std::move(toks));
        }
      }
    }
    if (open_if_alone) {
      return make(begin, first.next, first.start, config_.horizon_day, first.granularity, first.tokens);
    }
    return make(begin, first.next, first.start, first.end, first.granularity, first.tokens);
  }

  std::optional<TemporalMatch> expression_at(std::size_t pos) const {
    if (is(pos, {"from"})) {
      if (auto d = date_at(pos + 1)) return range_from(pos, *d, true, {"to", "until", "till", "through", "-"});
    }
    if (is(pos, {"between"})) {
      if (auto d = date_at(pos + 1)) {
        if (is(d->next, {"and"})) return range_from(pos, *d, false, {"and"});
      }
    }
    if (is(pos, {"starting", "beginning"})) {
      std::size_t at = pos + 1;
      if (is(at, {"in", "from", "on"})) ++at;
      if (auto d = date_at(at)) return make(pos, d->next, d->start, config_.horizon_day, d->granularity, d->tokens);
    }
    if (is(pos, {"since"})) {
      if (auto d = date_at(pos + 1)) return make(pos, d->next, d->start, config_.horizon_day, d->granularity, d->tokens);
    }
    if (is(pos, {"in", "on", "during"})) {
      if (auto d = date_at(pos + 1)) return range_from(pos, *d, false, {"to", "until", "till", "through"});
    }
    if (auto d = date_at(pos)) return range_from(pos, *d, false, {"to", "until", "till", "through"});
    return std::nullopt;
  }

  const TimeConfig& config_;
  std::vector<std::string> lower_;
  std::vector<std::size_t> orig_;
};

}  // namespace

std::optional<TemporalMatch> find_temporal_expression(std::span<const std::string> tokens, const TimeConfig& config) {
  return Scanner(tokens, config).first_match();
}

std::optional<TimeSpan> parse_temporal_expression(std::string_view text, const TimeConfig& config) {
  const auto tokens = tokenize(text);
  if (auto m = find_temporal_expression(tokens, config)) return m->span;
  return std::nullopt;
}

std::string render_date(DayIndex day, Granularity g) {
  const CivilDate c = civil_from_day(day);
  std::string month(kMonthNames[c.month - 1]);
  month[0] = static_cast<char>(month[0] - 'a' + 'A');
  switch (g) {
    case Granularity::kYear: return std::to_string(c.year);
    case Granularity::kMonth: return month + " " + std::to_string(c.year);
    case Granularity::kDay: return std::to_string(c.day) + " " + month + " " + std::to_string(c.year);
  }
  return {};
}

DayIndex earliest_reference(std::span<const Event> claim_events, std::span<const Event> evidence_events) {
  std::optional<DayIndex> best;
  for (auto events : {claim_events, evidence_events}) {
    for (const auto& e : events) {
      if (e.time && (!best || e.time->start_day() < *best)) best = e.time->start_day();
    }
  }
  if (!best) throw NoTemporalAnchor();
  return *best;
}

TimelinePosition::TimelinePosition(DayIndex offset_days, DayIndex cap) : offset_(offset_days) {
  if (offset_days < 0 || offset_days > cap) {
    throw ConfigError("timeline offset " + std::to_string(offset_days) + " outside [0, " + std::to_string(cap) + "]");
  }
}

TimelinePosition TimelinePosition::clamped(DayIndex offset_days, DayIndex cap) {
  return TimelinePosition(std::clamp<DayIndex>(offset_days, 0, cap), cap);
}

std::vector<double> positional_encoding(const TimelinePosition& position, std::size_t dim, double time_scale) {
  if (dim == 0 || dim % 2 != 0) throw ConfigError("positional encoding dimension must be even and positive");
  if (!(time_scale > 0.0)) throw ConfigError("time_scale must be positive");
  const double p = static_cast<double>(position.offset_days()) / time_scale;
  std::vector<double> pe(dim);
  for (std::size_t i = 0; i < dim / 2; ++i) {
    const double rate = std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(dim));
    pe[2 * i] = std::sin(p / rate);
    pe[2 * i + 1] = std::cos(p / rate);
  }
  return pe;
}

std::vector<std::size_t> chronological_sort(std::span<const Event> events) {
  constexpr DayIndex kUndated = std::numeric_limits<DayIndex>::max();
  auto key = [&](std::size_t i) {
    const auto& e = events[i];
    return std::make_tuple(e.time ? e.time->start_day() : kUndated, e.time ? e.time->end_day() : kUndated,
                           e.source_index);
  };
  std::vector<std::size_t> perm(events.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  return perm;
}

Label order_consistency_oracle(std::span<const Event> claim_events, std::span<const Event> timeline,
                               std::span<const std::optional<std::size_t>> matching) {
  if (matching.size() != claim_events.size()) {
    throw OracleError("matching covers " + std::to_string(matching.size()) + " of " +
                      std::to_string(claim_events.size()) + " claim events");
  }
  std::optional<DayIndex> previous;
  for (std::size_t i = 0; i < matching.size(); ++i) {
    if (!matching[i] || *matching[i] >= timeline.size()) {
      throw OracleError("claim event " + std::to_string(i) + " is not matched to a timeline fact");
    }
    const auto& fact = timeline[*matching[i]];
    if (!fact.time) throw OracleError("timeline fact '" + fact.id + "' is undated");
    const DayIndex start = fact.time->start_day();
    if (previous && start < *previous) return Label::kRef;
    previous = start;
  }
  return Label::kSup;
}

std::size_t start_day_inversions(std::span<const Event> events, std::span<const std::size_t> order) {
  std::size_t count = 0;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto& ea = events[order[a]];
      const auto& eb = events[order[b]];
      if (ea.time && eb.time && eb.time->start_day() < ea.time->start_day()) ++count;
    }
  }
  return count;
}

}  // namespace chronofact
