#include "chronofact/datagen.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "chronofact/error.hpp"
#include "chronofact/extractor.hpp"
#include "chronofact/text.hpp"

namespace chronofact {

extern const char* const kBuiltinVocabulary;

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

bool single_unit(const TimeSpan& s) {
  const CivilDate a = civil_from_day(s.start_day());
  const CivilDate b = civil_from_day(s.end_day());
  switch (s.granularity()) {
    case Granularity::kYear: return a.year == b.year;
    case Granularity::kMonth: return a.year == b.year && a.month == b.month;
    case Granularity::kDay: return s.start_day() == s.end_day();
  }
  return false;
}

DayIndex shift_day(DayIndex d, int years) {
  const CivilDate c = civil_from_day(d);
  const unsigned day = std::min(c.day, static_cast<unsigned>(civil_from_day(last_day_of_month(c.year + years, c.month)).day));
  return day_index(c.year + years, c.month, day);
}

bool same_object(const FactTuple& a, const FactTuple& b) { return a.relation == b.relation && a.object == b.object; }

// The claim fact agrees with some timeline entry of the same relation and object.
bool supported(const FactTuple& f, std::span<const FactTuple> timeline) {
  return std::any_of(timeline.begin(), timeline.end(),
                     [&](const FactTuple& t) { return same_object(f, t) && t.span.overlaps(f.span); });
}

std::string padded(std::size_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, v);
  return buf;
}

}  // namespace

void FactTuple::validate() const {
  if (subject.empty() || relation.empty() || object.empty()) throw ValidationError("fact fields must be non-empty");
}

std::vector<std::string> Vocabulary::alternatives(const std::string& relation, const std::string& object) const {
  auto rel = relations.find(relation);
  if (rel == relations.end()) return {};
  auto objs = objects.find(rel->second.category);
  if (objs == objects.end()) return {};
  std::vector<std::string> out;
  for (const auto& o : objs->second) {
    if (o != object) out.push_back(o);
  }
  return out;
}

Vocabulary parse_vocabulary(std::string_view text) {
  Vocabulary v;
  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    auto bad = [&] { return ValidationError("vocabulary line " + std::to_string(line_no) + " is malformed"); };
    if (f[0] == "relation") {
      if (f.size() != 4) throw bad();
      v.relations[f[1]] = {f[2], split(f[3], '|')};
    } else if (f[0] == "object") {
      if (f.size() != 3) throw bad();
      v.objects[f[1]].push_back(f[2]);
    } else if (f[0] == "first") {
      if (f.size() != 2) throw bad();
      v.first_names.push_back(f[1]);
    } else if (f[0] == "last") {
      if (f.size() != 2) throw bad();
      v.last_names.push_back(f[1]);
    } else {
      throw bad();
    }
  }
  return v;
}

const Vocabulary& builtin_vocabulary() {
  static const Vocabulary v = parse_vocabulary(kBuiltinVocabulary);
  return v;
}

std::string_view to_string(ExpressionMode m) { return m == ExpressionMode::kExplicit ? "explicit" : "implicit"; }

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kOverlapping: return "overlapping";
    case Category::kRecurring: return "recurring";
    case Category::kAny: return "any";
  }
  return "any";
}

std::string_view to_string(Corruption c) {
  switch (c) {
    case Corruption::kNone: return "none";
    case Corruption::kOrderPerturb: return "order_perturb";
    case Corruption::kFactObject: return "fact_object";
    case Corruption::kFactDate: return "fact_date";
  }
  return "none";
}

ExpressionMode expression_from_string(std::string_view s) {
  if (s == "explicit") return ExpressionMode::kExplicit;
  if (s == "implicit") return ExpressionMode::kImplicit;
  throw ValidationError("unknown expression mode '" + std::string(s) + "'");
}

Category category_from_string(std::string_view s) {
  if (s == "overlapping") return Category::kOverlapping;
  if (s == "recurring") return Category::kRecurring;
  if (s == "any") return Category::kAny;
  throw ValidationError("unknown category '" + std::string(s) + "'");
}

Corruption corruption_from_string(std::string_view s) {
  if (s == "none") return Corruption::kNone;
  if (s == "order_perturb") return Corruption::kOrderPerturb;
  if (s == "fact_object") return Corruption::kFactObject;
  if (s == "fact_date") return Corruption::kFactDate;
  throw ValidationError("unknown corruption mode '" + std::string(s) + "'");
}

void GenSpec::validate() const {
  if (n_events < 2) throw ConfigError("claims need at least 2 events");
  if (target == Label::kSup && corruption != Corruption::kNone) throw ConfigError("SUP claims cannot be corrupted");
  if (target == Label::kRef && corruption == Corruption::kNone) throw ConfigError("REF claims need a corruption mode");
  if (target == Label::kNei) throw ConfigError("the generator does not synthesize NEI claims");
}

std::map<std::string, std::vector<FactTuple>> build_timeline(std::span<const FactTuple> facts) {
  std::map<std::string, std::vector<FactTuple>> out;
  for (const auto& f : facts) {
    f.validate();
    out[f.subject].push_back(f);
  }
  for (auto& [subject, tl] : out) {
    std::stable_sort(tl.begin(), tl.end(), [](const FactTuple& a, const FactTuple& b) {
      return std::make_tuple(a.span.start_day(), a.span.end_day(), std::cref(a.relation), std::cref(a.object)) <
             std::make_tuple(b.span.start_day(), b.span.end_day(), std::cref(b.relation), std::cref(b.object));
    });
  }
  return out;
}

bool has_overlap(std::span<const FactTuple> facts) {
  for (std::size_t a = 0; a < facts.size(); ++a) {
    for (std::size_t b = a + 1; b < facts.size(); ++b) {
      if (facts[a].span.overlaps(facts[b].span)) return true;
    }
  }
  return false;
}

bool has_recurrence(std::span<const FactTuple> facts) {
  for (std::size_t a = 0; a < facts.size(); ++a) {
    for (std::size_t b = a + 1; b < facts.size(); ++b) {
      if (same_object(facts[a], facts[b]) && !facts[a].span.overlaps(facts[b].span)) return true;
    }
  }
  return false;
}

SampledClaim sample_claim(std::span<const FactTuple> timeline, const GenSpec& spec) {
  const std::size_t n = spec.n_events;
  if (n == 0 || n > timeline.size()) {
    throw CategoryUnsatisfiable("timeline has " + std::to_string(timeline.size()) + " facts, " + std::to_string(n) +
                                " requested");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (spec.category != Category::kAny) {
    for (std::size_t a = 0; a < timeline.size(); ++a) {
      for (std::size_t b = a + 1; b < timeline.size(); ++b) {
        const bool ov = timeline[a].span.overlaps(timeline[b].span);
        const bool rec = same_object(timeline[a], timeline[b]) && !ov;
        if ((spec.category == Category::kOverlapping && ov) || (spec.category == Category::kRecurring && rec)) {
          pairs.emplace_back(a, b);
        }
      }
    }
    if (pairs.empty()) throw CategoryUnsatisfiable("timeline has no " + std::string(to_string(spec.category)) + " pair");
  }
  std::vector<std::size_t> chosen;
  if (!pairs.empty()) {
    const auto [a, b] = pick(pairs, rng);
    chosen = {a, b};
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) rest.push_back(i);
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  for (std::size_t i = 0; chosen.size() < n; ++i) chosen.push_back(rest[i]);
  std::sort(chosen.begin(), chosen.end());

  SampledClaim out;
  out.timeline_index = chosen;
  for (std::size_t i : chosen) out.facts.push_back(timeline[i]);
  out.gold.event_labels.assign(n, Label::kSup);
  out.gold.order_label = Label::kSup;
  out.gold.claim_label = Label::kSup;
  return out;
}

std::vector<std::size_t> perturb_order(std::span<const FactTuple> events, std::uint64_t seed) {
  const std::size_t n = events.size();
  auto violates = [&](const std::vector<std::size_t>& p) {
    for (std::size_t i = 1; i < n; ++i) {
      if (events[p[i]].span.start_day() < events[p[i - 1]].span.start_day()) return true;
    }
    return false;
  };
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  for (std::size_t a = 0; a < n && !witness; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (events[a].span.start_day() < events[b].span.start_day()) {
        witness = {a, b};
        break;
      }
    }
  }
  if (!witness) throw PerturbationImpossible("all start days are equal");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::shuffle(p.begin(), p.end(), rng);
    if (violates(p)) return p;
  }
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::swap(p[witness->first], p[witness->second]);
  return p;
}

FactTuple corrupt_fact(const FactTuple& fact, std::span<const FactTuple> timeline, const Vocabulary& vocabulary,
                       Corruption mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (mode == Corruption::kFactObject) {
    std::set<std::string> used;
    for (const auto& t : timeline) {
      if (t.relation == fact.relation) used.insert(t.object);
    }
    std::vector<std::string> options;
    for (const auto& o : vocabulary.alternatives(fact.relation, fact.object)) {
      if (!used.contains(o)) options.push_back(o);
    }
    if (options.empty()) throw CorruptionImpossible("no alternative object for relation '" + fact.relation + "'");
    FactTuple out = fact;
    out.object = pick(options, rng);
    return out;
  }
  if (mode == Corruption::kFactDate) {
    std::vector<int> shifts{2, 3, 4, 5, 6, -2, -3, -4, -5, -6};
    std::shuffle(shifts.begin(), shifts.end(), rng);
    const bool open_end = fact.span.end_day() >= TimeConfig{}.horizon_day;
    for (int d : shifts) {
      const DayIndex start = shift_day(fact.span.start_day(), d);
      const DayIndex end = open_end ? fact.span.end_day() : shift_day(fact.span.end_day(), d);
      const int y0 = civil_from_day(start).year, y1 = civil_from_day(end).year;
      if (y0 < 1000 || y1 > 2999 || start > end) continue;
      FactTuple out = fact;
      if (fact.span.granularity() == Granularity::kYear) {
        out.span = TimeSpan::years(y0, y1);
      } else if (fact.span.granularity() == Granularity::kMonth) {
        out.span = TimeSpan(day_index(y0, civil_from_day(start).month, 1),
                            last_day_of_month(y1, civil_from_day(end).month), Granularity::kMonth);
      } else {
        out.span = TimeSpan(start, end, Granularity::kDay);
      }
      if (!supported(out, timeline)) return out;
    }
    throw CorruptionImpossible("no date shift contradicts the timeline");
  }
  throw CorruptionImpossible("corruption mode does not alter facts");
}

std::string verbalize(const FactTuple& fact, ExpressionMode mode, const Vocabulary& vocabulary,
                      std::size_t template_index, const TimeConfig& time) {
  std::string tmpl = "{s} is associated with {o}";
  if (auto it = vocabulary.relations.find(fact.relation); it != vocabulary.relations.end() && !it->second.templates.empty()) {
    tmpl = it->second.templates[template_index % it->second.templates.size()];
  }
  std::string s = replace_all(replace_all(tmpl, "{s}", fact.subject), "{o}", fact.object);
  if (mode == ExpressionMode::kImplicit) return s;
  const Granularity g = fact.span.granularity();
  const std::string start = render_date(fact.span.start_day(), g);
  if (fact.span.end_day() >= time.horizon_day) {
    return s + (template_index % 2 == 1 ? " starting in " : " from ") + start;
  }
  if (single_unit(fact.span)) return s + " in " + start;
  return s + " from " + start + (template_index % 2 == 1 ? " to " : " until ") + render_date(fact.span.end_day(), g);
}

std::string synthesize_claim(std::span<const std::string> sentences, std::string_view connective) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out += connective;
    out += sentences[i];
  }
  return out;
}

std::string audit_record(const DatasetRecord& r) {
  const std::size_t n = r.claim.events.size();
  if (!r.claim.gold) return "missing gold";
  const ClaimGold& gold = *r.claim.gold;
  if (n == 0 || r.claim_facts.size() != n || r.timeline_index.size() != n || gold.event_labels.size() != n) {
    return "inconsistent claim bookkeeping";
  }
  const std::size_t m = r.evidence.size();
  if (r.timeline.size() != m || r.evidence_timeline_index.size() != m) return "inconsistent evidence bookkeeping";
  std::vector<std::optional<Event>> slots(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t t = r.evidence_timeline_index[j];
    if (t >= m || slots[t]) return "evidence is not a permutation of the timeline";
    const Event& ev = r.evidence.events[j];
    if (!ev.time || !(*ev.time == r.timeline[t].span)) return "evidence span differs from its timeline fact";
    slots[t] = ev;
  }
  std::vector<Event> timeline_events;
  for (auto& s : slots) timeline_events.push_back(*s);
  for (std::size_t i : r.timeline_index) {
    if (i >= m) return "claim event matched outside the timeline";
  }
  std::vector<std::optional<std::size_t>> matching(r.timeline_index.begin(), r.timeline_index.end());
  const Label oracle = order_consistency_oracle(r.claim.events, timeline_events, matching);
  if (oracle != gold.order_label) return "order gold disagrees with the oracle";

  std::vector<FactTuple> matched;
  for (std::size_t i = 0; i < n; ++i) {
    const FactTuple& truth = r.timeline[r.timeline_index[i]];
    matched.push_back(truth);
    const bool corrupted = r.corrupted_event == i;
    if (gold.event_labels[i] != (corrupted ? Label::kRef : Label::kSup)) return "event gold disagrees with bookkeeping";
    if (corrupted) {
      if (supported(r.claim_facts[i], r.timeline)) return "corrupted fact is still supported by the timeline";
    } else if (!(r.claim_facts[i] == truth)) {
      return "uncorrupted claim fact differs from the timeline";
    }
    if (r.expression == ExpressionMode::kExplicit) {
      if (!r.claim.events[i].time || !(*r.claim.events[i].time == r.claim_facts[i].span)) {
        return "explicit claim event does not carry its fact's span";
      }
    } else if (r.claim.events[i].time) {
      return "implicit claim event carries a date";
    }
  }
  const bool any_corrupt = r.corrupted_event.has_value();
  if (gold.claim_label != hard_rule(gold.event_labels, gold.order_label)) return "claim gold violates the hard rule";
  if ((gold.claim_label == Label::kSup) != (oracle == Label::kSup && !any_corrupt)) return "claim gold unsound";
  if (r.category == Category::kOverlapping && !has_overlap(matched)) return "overlapping bucket without overlap";
  if (r.category == Category::kRecurring && !has_recurrence(matched)) return "recurring bucket without recurrence";
  if (r.overlapping != has_overlap(matched) || r.recurring != has_recurrence(matched)) return "category flags stale";
  return {};
}

namespace {

struct Bucket {
  ExpressionMode expression;
  std::size_t n_events;
  Category category;
  Label target;
};

std::optional<DatasetRecord> make_record(const std::vector<FactTuple>& timeline, const Bucket& b,
                                         const GenerationPlan& plan, const Vocabulary& vocab, const TimeConfig& time,
                                         std::mt19937_64& rng) {
  GenSpec spec;
  spec.n_events = b.n_events;
  spec.expression = b.expression;
  spec.category = b.category;
  spec.target = b.target;
  spec.seed = rng();
  if (b.target == Label::kRef) {
    if (plan.order_only || chance(rng, plan.order_perturb_share)) {
      spec.corruption = Corruption::kOrderPerturb;
    } else if (b.expression == ExpressionMode::kExplicit && chance(rng, 0.5)) {
      spec.corruption = Corruption::kFactDate;
    } else {
      spec.corruption = Corruption::kFactObject;
    }
  }
  spec.validate();

  SampledClaim sc = sample_claim(timeline, spec);
  if (spec.corruption == Corruption::kOrderPerturb) {
    const auto perm = perturb_order(sc.facts, rng());
    SampledClaim p = sc;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      p.facts[i] = sc.facts[perm[i]];
      p.timeline_index[i] = sc.timeline_index[perm[i]];
    }
    sc = std::move(p);
    sc.gold.order_label = Label::kRef;
  } else if (spec.corruption != Corruption::kNone) {
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, sc.facts.size() - 1)(rng);
    sc.facts[pos] = corrupt_fact(sc.facts[pos], timeline, vocab, spec.corruption, rng());
    sc.corrupted = pos;
    sc.gold.event_labels[pos] = Label::kRef;
  }
  sc.gold.claim_label = hard_rule(sc.gold.event_labels, sc.gold.order_label);

  DatasetRecord r;
  r.expression = b.expression;
  r.category = b.category;
  r.corruption = spec.corruption;
  r.subject = timeline.front().subject;
  r.timeline = timeline;
  r.claim_facts = sc.facts;
  r.timeline_index = sc.timeline_index;
  r.corrupted_event = sc.corrupted;

  std::vector<std::string> sentences;
  for (const auto& f : sc.facts) {
    sentences.push_back(verbalize(f, b.expression, vocab, std::uniform_int_distribution<std::size_t>(0, 3)(rng), time));
  }
  r.claim.text = synthesize_claim(sentences);
  ExtractOptions opts;
  opts.source = EventSource::kClaim;
  opts.time = time;
  r.claim.events = extract_events(r.claim.text, opts);
  if (r.claim.events.size() != b.n_events) return std::nullopt;
  r.claim.gold = sc.gold;

  // Evidence: every timeline fact, canonical template, explicit dates, shuffled.
  std::vector<std::size_t> order(timeline.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 0; k < order.size(); ++k) {
    ExtractOptions eo;
    eo.source = EventSource::kEvidence;
    eo.id_prefix = "e" + std::to_string(k) + "_";
    eo.time = time;
    auto evs = extract_events(verbalize(timeline[order[k]], ExpressionMode::kExplicit, vocab, 0, time), eo);
    if (evs.size() != 1 || !evs[0].time || !(*evs[0].time == timeline[order[k]].span)) {
      throw Error("evidence sentence for '" + timeline[order[k]].object + "' does not round-trip");
    }
    evs[0].id = "e" + std::to_string(k);
    r.evidence.add(std::move(evs[0]), {r.subject, "s" + padded(k, 3)});
    r.evidence_timeline_index.push_back(order[k]);
  }

  std::vector<FactTuple> matched;
  for (std::size_t i : r.timeline_index) matched.push_back(timeline[i]);
  r.overlapping = has_overlap(matched);
  r.recurring = has_recurrence(matched);
  return r;
}

}  // namespace

GenerationReport generate_dataset(std::span<const FactTuple> corpus, const GenerationPlan& plan, std::uint64_t seed,
                                  const Vocabulary& vocab, const TimeConfig& time) {
  if (plan.splits.empty()) throw ConfigError("generation plan has no splits");
  const auto timelines = build_timeline(corpus);
  std::vector<std::string> subjects;
  for (const auto& [s, tl] : timelines) subjects.push_back(s);
  if (subjects.size() < plan.splits.size()) throw ConfigError("corpus has fewer subjects than splits");
  std::mt19937_64 rng(seed);
  std::shuffle(subjects.begin(), subjects.end(), rng);

  std::vector<Bucket> buckets;
  for (auto e : plan.expressions) {
    for (auto n : plan.event_counts) {
      for (auto c : plan.categories) {
        for (auto t : plan.targets) buckets.push_back({e, n, c, t});
      }
    }
  }
  if (buckets.empty()) throw ConfigError("generation plan has no buckets");

  GenerationReport report;
  std::size_t total = 0;
  for (const auto& s : plan.splits) total += s.count;
  std::size_t subject_cursor = 0, count_cursor = 0;
  for (std::size_t si = 0; si < plan.splits.size(); ++si) {
    const SplitPlan& sp = plan.splits[si];
    count_cursor += sp.count;
    const std::size_t subject_end = si + 1 == plan.splits.size()
                                        ? subjects.size()
                                        : std::max(subject_cursor + 1, subjects.size() * count_cursor / std::max<std::size_t>(total, 1));
    std::vector<std::string> pool(subjects.begin() + static_cast<std::ptrdiff_t>(subject_cursor),
                                  subjects.begin() + static_cast<std::ptrdiff_t>(std::min(subject_end, subjects.size())));
    subject_cursor = std::min(subject_end, subjects.size());
    report.requested += sp.count;
    auto& records = report.splits[sp.name];
    if (pool.empty()) {
      report.shortfalls.push_back(sp.name + ": no subjects left");
      continue;
    }
    for (std::size_t bi = 0; bi < buckets.size(); ++bi) {
      const std::size_t want = sp.count / buckets.size() + (bi < sp.count % buckets.size() ? 1 : 0);
      std::size_t made = 0, attempts = 0;
      while (made < want && attempts < want * 200 + 200) {
        ++attempts;
        const auto& timeline = timelines.at(pick(pool, rng));
        try {
          auto rec = make_record(timeline, buckets[bi], plan, vocab, time, rng);
          if (!rec) continue;
          rec->split = sp.name;
          const std::string problem = audit_record(*rec);
          if (!problem.empty()) throw Error("generated record failed its audit: " + problem);
          records.push_back(std::move(*rec));
          ++made;
        } catch (const CategoryUnsatisfiable&) {
        } catch (const PerturbationImpossible&) {
        } catch (const CorruptionImpossible&) {
        }
      }
      if (made < want) {
        const Bucket& b = buckets[bi];
        std::ostringstream msg;
        msg << sp.name << ": bucket " << to_string(b.expression) << '/' << b.n_events << '/' << to_string(b.category)
            << '/' << to_string(b.target) << " produced " << made << " of " << want;
        report.shortfalls.push_back(msg.str());
      }
    }
    std::shuffle(records.begin(), records.end(), rng);
    for (std::size_t i = 0; i < records.size(); ++i) records[i].claim.id = sp.name + "-" + padded(i, 5);
    report.generated += records.size();
  }
  return report;
}

std::vector<FactTuple> generate_fact_corpus(std::size_t n_subjects, std::uint64_t seed, const Vocabulary& vocab,
                                            const TimeConfig& time) {
  std::vector<std::string> names;
  for (const auto& f : vocab.first_names) {
    for (const auto& l : vocab.last_names) names.push_back(f + " " + l);
  }
  if (n_subjects > names.size()) throw ConfigError("vocabulary offers only " + std::to_string(names.size()) + " subjects");
  if (vocab.relations.empty()) throw ConfigError("vocabulary has no relations");
  std::mt19937_64 rng(seed);
  std::shuffle(names.begin(), names.end(), rng);

  struct Weighted {
    std::string relation;
    double weight;
  };
  const std::vector<Weighted> mix{{"member_of", 0.35}, {"employer", 0.15},      {"educated_at", 0.1},
                                  {"residence", 0.15}, {"position_held", 0.15}, {"award_received", 0.1}};
  std::vector<std::string> relations;
  std::vector<double> weights;
  for (const auto& w : mix) {
    if (vocab.relations.contains(w.relation)) {
      relations.push_back(w.relation);
      weights.push_back(w.weight);
    }
  }
  if (relations.empty()) {
    for (const auto& [r, t] : vocab.relations) {
      relations.push_back(r);
      weights.push_back(1.0);
    }
  }
  std::discrete_distribution<std::size_t> rel_dist(weights.begin(), weights.end());
  const int horizon_year = civil_from_day(time.horizon_day).year;

  std::vector<FactTuple> facts;
  for (std::size_t s = 0; s < n_subjects; ++s) {
    const std::string& subject = names[s];
    const int length = uniform_int(rng, 6, 9);
    int year = uniform_int(rng, 1950, 1995);
    std::vector<FactTuple> own;
    for (int f = 0; f < length; ++f) {
      FactTuple fact;
      fact.subject = subject;
      std::vector<const FactTuple*> returnable;
      for (const auto& prev : own) {
        if (civil_from_day(prev.span.end_day()).year < year) returnable.push_back(&prev);
      }
      if (!returnable.empty() && chance(rng, 0.3)) {
        const FactTuple* prev = pick(returnable, rng);
        fact.relation = prev->relation;
        fact.object = prev->object;
      } else {
        fact.relation = relations[rel_dist(rng)];
        const auto& objs = vocab.objects.at(vocab.relations.at(fact.relation).category);
        std::vector<std::string> fresh;
        for (const auto& o : objs) {
          const bool used = std::any_of(own.begin(), own.end(), [&](const FactTuple& p) {
            return p.relation == fact.relation && p.object == o;
          });
          if (!used) fresh.push_back(o);
        }
        fact.object = pick(fresh.empty() ? objs : fresh, rng);
      }
      int duration = (fact.relation == "award_received" || chance(rng, 0.2)) ? 0 : uniform_int(rng, 1, 8);
      int end = std::min(year + duration, horizon_year - 1);
      fact.span = TimeSpan::years(year, end);
      if (f + 1 == length && fact.relation != "award_received" && chance(rng, 0.2)) {
        fact.span = TimeSpan(first_day_of_year(year), time.horizon_day, Granularity::kYear);
      }
      own.push_back(fact);
      year = std::min(year + uniform_int(rng, 0, 3), horizon_year - 10);
    }
    facts.insert(facts.end(), own.begin(), own.end());
  }
  return facts;
}

std::string stats_csv(const GenerationReport& report) {
  std::vector<std::string> split_names;
  for (const auto& [name, recs] : report.splits) split_names.push_back(name);
  // Keep the conventional split order when present.
  std::vector<std::string> ordered;
  for (const char* s : {"train", "val", "test"}) {
    if (report.splits.contains(s)) ordered.push_back(s);
  }
  for (const auto& s : split_names) {
    if (std::find(ordered.begin(), ordered.end(), s) == ordered.end()) ordered.push_back(s);
  }

  std::ostringstream out;
  out << "section,row";
  for (const auto& s : ordered) out << ',' << s << "_support," << s << "_refute";
  out << '\n';
  auto row = [&](const std::string& section, const std::string& label, auto pred) {
    out << section << ',' << label;
    for (const auto& s : ordered) {
      std::size_t sup = 0, ref = 0;
      for (const auto& r : report.splits.at(s)) {
        if (!pred(r)) continue;
        (r.claim.gold->claim_label == Label::kSup ? sup : ref) += 1;
      }
      out << ',' << sup << ',' << ref;
    }
    out << '\n';
  };
  for (auto e : {ExpressionMode::kExplicit, ExpressionMode::kImplicit}) {
    for (std::size_t n : {3, 4, 5}) {
      row(std::string(to_string(e)), std::to_string(n) + " events",
          [&](const DatasetRecord& r) { return r.expression == e && r.n_events() == n; });
    }
  }
  row("category", "overlapping", [](const DatasetRecord& r) { return r.category == Category::kOverlapping; });
  row("category", "recurring", [](const DatasetRecord& r) { return r.category == Category::kRecurring; });
  row("total", "all", [](const DatasetRecord&) { return true; });
  return out.str();
}

}  // namespace chronofact
