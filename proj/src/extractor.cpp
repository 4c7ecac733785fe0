#include "chronofact/extractor.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "chronofact/error.hpp"
#include "chronofact/text.hpp"

namespace chronofact {
namespace {

const std::set<std::string, std::less<>> kVerbs = {
    "is", "was", "are", "were", "be", "been", "being", "became", "become", "becomes", "becoming",
    "remained", "remains", "join", "joins", "joined", "joining", "play", "plays", "played", "playing",
    "move", "moves", "moved", "moving", "return", "returns", "returned", "returning", "serve", "serves",
    "served", "serving", "work", "works", "worked", "working", "hold", "holds", "held", "holding",
    "study", "studies", "studied", "studying", "began", "begin", "begins", "beginning", "graduate",
    "graduates", "graduated", "attend", "attends", "attended", "attack", "attacks", "attacked", "win",
    "wins", "won", "receive", "receives", "received", "marry", "marries", "married", "live", "lives",
    "lived", "found", "founds", "founded", "lead", "leads", "led", "sign", "signs", "signed", "left",
    "leave", "leaves", "went", "go", "goes", "took", "take", "takes", "participated", "participate",
    "represented", "represents", "coached", "coaches", "managed", "manages", "taught", "teaches",
    "resided", "resides", "transferred", "obtained", "earned", "elected", "appointed", "pursued",
    "competed", "captained", "produced", "has", "had", "have"};

const std::set<std::string, std::less<>> kCopulas = {
    "is", "was", "are", "were", "be", "been", "being", "became", "become", "becomes", "becoming",
    "remained", "remains"};

const std::set<std::string, std::less<>> kPrepositions = {
    "of", "at", "for", "in", "from", "to", "with", "on", "by", "until", "since", "during", "into",
    "as", "between", "starting", "after", "before", "about", "under", "over", "through", "till"};

const std::set<std::string, std::less<>> kPronouns = {"he", "she", "they", "it", "his", "her"};

// Words that end in -ed/-ing but are not verbs in this domain.
const std::set<std::string, std::less<>> kNotVerbs = {"during", "thing", "nothing", "something", "king",
                                                      "wedding", "building", "red", "bed", "hundred",
                                                      "ring", "spring", "evening", "morning"};

// Adverbs that can sit between a clause connective and the verb.
const std::set<std::string, std::less<>> kLinkAdverbs = {"finally", "later", "subsequently", "eventually", "then",
                                                         "also", "afterwards"};

struct Clause {
  std::vector<std::string> tokens;
};

std::string lower_at(const std::vector<std::string>& t, std::size_t i) {
  return i < t.size() ? to_lower(t[i]) : std::string();
}

// True when a verb starts at i, possibly after linking adverbs.
bool verb_follows(const std::vector<std::string>& t, std::size_t i) {
  while (i < t.size() && kLinkAdverbs.contains(to_lower(t[i]))) ++i;
  return i < t.size() && looks_like_verb(t[i]);
}

std::vector<Clause> split_clauses(const std::vector<std::string>& tokens) {
  std::vector<Clause> clauses(1);
  auto cut = [&] {
    if (!clauses.back().tokens.empty()) clauses.emplace_back();
  };
  for (std::size_t i = 0; i < tokens.size();) {
    const std::string w = lower_at(tokens, i);
    const std::string next = lower_at(tokens, i + 1);
    if (w == "and" && next == "then") {
      cut();
      i += 2;
      continue;
    }
    if (w == ";") {
      cut();
      ++i;
      continue;
    }
    if (w == ",") {
      if (next == "then" || next == "thereafter" || next == "before" || next == "after") {
        cut();
        i += 2;
        continue;
      }
      if (next == "and" && verb_follows(tokens, i + 2)) {
        cut();
        i += 2;
        continue;
      }
      if (verb_follows(tokens, i + 1)) {
        cut();
        ++i;
        continue;
      }
      ++i;  // plain comma
      continue;
    }
    if (w == "before" || w == "after" || w == "thereafter") {
      cut();
      ++i;
      continue;
    }
    if (w == "and" && verb_follows(tokens, i + 1)) {
      cut();
      ++i;
      continue;
    }
    clauses.back().tokens.push_back(tokens[i]);
    ++i;
  }
  if (clauses.back().tokens.empty()) clauses.pop_back();
  // Linking adverbs left at the front of a clause are connective residue.
  for (auto& c : clauses) {
    while (c.tokens.size() > 1 && kLinkAdverbs.contains(to_lower(c.tokens.front()))) {
      c.tokens.erase(c.tokens.begin());
    }
  }
  return clauses;
}

}  // namespace

bool looks_like_verb(std::string_view token) {
  if (token.empty() || is_capitalized(token) || is_number(token)) return false;
  const std::string w = to_lower(token);
  if (kVerbs.contains(w)) return true;
  if (kNotVerbs.contains(w)) return false;
  return w.size() >= 5 && (w.ends_with("ing") || w.ends_with("ed"));
}

std::vector<Event> extract_events(std::string_view sentence, const ExtractOptions& options) {
  const auto tokens = tokenize(sentence);
  if (strip_markers(tokens).empty()) throw ValidationError("cannot extract events from an empty sentence");

  std::vector<Event> events;
  std::vector<std::string> subject;
  for (const Clause& clause : split_clauses(tokens)) {
    const auto& t = clause.tokens;
    Event ev;
    ev.source = options.source;
    ev.source_index = events.size();
    ev.id = options.id_prefix + std::to_string(ev.source_index);
    ev.raw_text = join(t);

    std::optional<std::size_t> verb;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (looks_like_verb(t[i])) {
        verb = i;
        break;
      }
    }
    if (!verb) {
      ev.predicate_tokens = {t.front()};
      ev.argument_tokens.assign(t.begin() + 1, t.end());
      ev.low_confidence = true;
    } else {
      std::vector<std::string> own_subject(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(*verb));
      const bool pronoun = own_subject.size() == 1 && kPronouns.contains(to_lower(own_subject.front()));
      if ((own_subject.empty() || pronoun) && !subject.empty()) {
        own_subject = subject;
      } else if (!own_subject.empty()) {
        subject = own_subject;
      }

      std::size_t end = *verb + 1;
      bool copula = kCopulas.contains(to_lower(t[*verb]));
      while (end < t.size()) {
        const std::string w = to_lower(t[end]);
        if (looks_like_verb(t[end])) {
          copula = copula || kCopulas.contains(w);
          ++end;  // "began studying", "has been"
          continue;
        }
        if (copula && !kPrepositions.contains(w) && !is_capitalized(t[end]) && !is_number(t[end])) {
          ++end;  // "was a member"
          continue;
        }
        break;
      }
      ev.predicate_tokens.assign(t.begin() + static_cast<std::ptrdiff_t>(*verb),
                                 t.begin() + static_cast<std::ptrdiff_t>(end));
      ev.argument_tokens = std::move(own_subject);
      ev.argument_tokens.insert(ev.argument_tokens.end(), t.begin() + static_cast<std::ptrdiff_t>(end), t.end());
    }
    if (auto m = find_temporal_expression(ev.tokens(), options.time)) ev.time = m->span;
    events.push_back(std::move(ev));
  }
  return events;
}

EvidencePool score_evidence(std::span<const Event> claim_events, const EvidencePool& pool,
                            const EventEncoderHandle& encoder, std::size_t budget) {
  if (budget < 1) throw ConfigError("evidence budget must be at least 1");
  if (pool.empty()) return {};

  std::vector<std::vector<double>> claim_cls;
  for (const auto& c : claim_events) claim_cls.push_back(encode_cls(c, encoder));
  std::vector<double> score(pool.size(), -2.0);
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const auto cls = encode_cls(pool.events[j], encoder);
    for (const auto& c : claim_cls) score[j] = std::max(score[j], cosine(c, cls));
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    const auto& pa = pool.provenance[a];
    const auto& pb = pool.provenance[b];
    return std::tie(pa.doc_id, pa.sent_id, pool.events[a].source_index) <
           std::tie(pb.doc_id, pb.sent_id, pool.events[b].source_index);
  });
  EvidencePool out;
  for (std::size_t r = 0; r < std::min(budget, order.size()); ++r) {
    out.add(pool.events[order[r]], pool.provenance[order[r]]);
  }
  return out;
}

}  // namespace chronofact
