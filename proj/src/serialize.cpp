#include "chronofact/serialize.hpp"

#include <fstream>
#include <sstream>

#include "chronofact/error.hpp"
#include "chronofact/extractor.hpp"

namespace chronofact {
namespace {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad field '") + key + "': " + e.what());
  }
}

Json labels_json(const std::vector<Label>& labels) {
  Json a = Json::array();
  for (Label l : labels) a.push_back(std::string(to_string(l)));
  return a;
}

Json dist_json(const ProbDist& d) { return Json(std::vector<double>(d.probs().begin(), d.probs().end())); }

DayIndex parse_date_or_year(const std::string& s, bool end) {
  if (s.size() == 4 && s.find_first_not_of("0123456789") == std::string::npos) {
    const int y = std::stoi(s);
    return end ? last_day_of_year(y) : first_day_of_year(y);
  }
  return parse_iso_date(s);
}

}  // namespace

Json to_json(const TimeSpan& span) {
  return {{"start", format_iso_date(span.start_day())},
          {"end", format_iso_date(span.end_day())},
          {"granularity", std::string(to_string(span.granularity()))}};
}

TimeSpan span_from_json(const Json& j) {
  return TimeSpan(parse_iso_date(get<std::string>(j, "start")), parse_iso_date(get<std::string>(j, "end")),
                  granularity_from_string(get<std::string>(j, "granularity")));
}

Json to_json(const Event& e) {
  Json j{{"id", e.id},
         {"source", std::string(to_string(e.source))},
         {"source_index", e.source_index},
         {"predicate_tokens", e.predicate_tokens},
         {"argument_tokens", e.argument_tokens},
         {"time", e.time ? to_json(*e.time) : Json(nullptr)},
         {"raw_text", e.raw_text},
         {"low_confidence", e.low_confidence}};
  return j;
}

Event event_from_json(const Json& j) {
  Event e;
  e.id = get<std::string>(j, "id");
  e.source = event_source_from_string(get<std::string>(j, "source"));
  const auto idx = get<long long>(j, "source_index");
  if (idx < 0) throw ValidationError("source_index must be >= 0");
  e.source_index = static_cast<std::size_t>(idx);
  e.predicate_tokens = get<std::vector<std::string>>(j, "predicate_tokens");
  if (j.contains("argument_tokens")) e.argument_tokens = get<std::vector<std::string>>(j, "argument_tokens");
  if (j.contains("time") && !j.at("time").is_null()) e.time = span_from_json(j.at("time"));
  e.raw_text = get<std::string>(j, "raw_text");
  if (j.contains("low_confidence")) e.low_confidence = get<bool>(j, "low_confidence");
  e.validate();
  return e;
}

Json to_json(const Claim& c) {
  Json events = Json::array();
  for (const auto& e : c.events) events.push_back(to_json(e));
  Json gold = nullptr;
  if (c.gold) {
    gold = {{"event_labels", labels_json(c.gold->event_labels)},
            {"order_label", std::string(to_string(c.gold->order_label))},
            {"claim_label", std::string(to_string(c.gold->claim_label))}};
  }
  return {{"id", c.id}, {"text", c.text}, {"events", events}, {"gold", gold}};
}

Claim claim_from_json(const Json& j) {
  Claim c;
  c.id = get<std::string>(j, "id");
  c.text = j.contains("text") ? get<std::string>(j, "text") : std::string();
  for (const auto& e : get<Json>(j, "events")) c.events.push_back(event_from_json(e));
  if (j.contains("gold") && !j.at("gold").is_null()) {
    const Json& g = j.at("gold");
    ClaimGold gold;
    for (const auto& l : get<std::vector<std::string>>(g, "event_labels")) gold.event_labels.push_back(label_from_string(l));
    gold.order_label = label_from_string(get<std::string>(g, "order_label"));
    gold.claim_label = label_from_string(get<std::string>(g, "claim_label"));
    c.gold = std::move(gold);
  }
  c.validate();
  return c;
}

Json to_json(const EvidencePool& pool) {
  Json events = Json::array(), prov = Json::array();
  for (const auto& e : pool.events) events.push_back(to_json(e));
  for (const auto& p : pool.provenance) prov.push_back({{"doc_id", p.doc_id}, {"sent_id", p.sent_id}});
  return {{"events", events}, {"provenance", prov}};
}

EvidencePool pool_from_json(const Json& j) {
  EvidencePool pool;
  const Json& events = get<Json>(j, "events");
  const Json& prov = get<Json>(j, "provenance");
  if (events.size() != prov.size()) throw ValidationError("one provenance entry per evidence event expected");
  for (std::size_t i = 0; i < events.size(); ++i) {
    pool.add(event_from_json(events[i]), {get<std::string>(prov[i], "doc_id"), get<std::string>(prov[i], "sent_id")});
  }
  pool.validate();
  return pool;
}

Json to_json(const FactTuple& f) {
  return {{"subject", f.subject}, {"relation", f.relation}, {"object", f.object}, {"time", to_json(f.span)}};
}

FactTuple fact_from_json(const Json& j) {
  FactTuple f;
  f.subject = get<std::string>(j, "subject");
  f.relation = get<std::string>(j, "relation");
  f.object = get<std::string>(j, "object");
  if (j.contains("time")) {
    f.span = span_from_json(j.at("time"));
  } else {
    const DayIndex s = parse_date_or_year(get<std::string>(j, "time_start"), false);
    const DayIndex e = parse_date_or_year(get<std::string>(j, "time_end"), true);
    const std::string g = j.contains("granularity") ? get<std::string>(j, "granularity") : "year";
    f.span = TimeSpan(s, e, granularity_from_string(g));
  }
  f.validate();
  return f;
}

Json to_json(const DatasetRecord& r) {
  Json timeline = Json::array(), facts = Json::array();
  for (const auto& f : r.timeline) timeline.push_back(to_json(f));
  for (const auto& f : r.claim_facts) facts.push_back(to_json(f));
  return {{"claim", to_json(r.claim)},
          {"evidence", to_json(r.evidence)},
          {"split", r.split},
          {"expression", std::string(to_string(r.expression))},
          {"n_events", r.n_events()},
          {"category", std::string(to_string(r.category))},
          {"corruption", std::string(to_string(r.corruption))},
          {"subject", r.subject},
          {"timeline", timeline},
          {"claim_facts", facts},
          {"timeline_index", r.timeline_index},
          {"evidence_timeline_index", r.evidence_timeline_index},
          {"corrupted_event", r.corrupted_event ? Json(*r.corrupted_event) : Json(nullptr)},
          {"overlapping", r.overlapping},
          {"recurring", r.recurring}};
}

DatasetRecord record_from_json(const Json& j) {
  DatasetRecord r;
  r.claim = claim_from_json(get<Json>(j, "claim"));
  r.evidence = pool_from_json(get<Json>(j, "evidence"));
  r.split = j.contains("split") ? get<std::string>(j, "split") : std::string();
  r.expression = expression_from_string(get<std::string>(j, "expression"));
  r.category = category_from_string(get<std::string>(j, "category"));
  r.corruption = corruption_from_string(get<std::string>(j, "corruption"));
  r.subject = j.contains("subject") ? get<std::string>(j, "subject") : std::string();
  if (j.contains("timeline")) {
    for (const auto& f : j.at("timeline")) r.timeline.push_back(fact_from_json(f));
  }
  if (j.contains("claim_facts")) {
    for (const auto& f : j.at("claim_facts")) r.claim_facts.push_back(fact_from_json(f));
  }
  if (j.contains("timeline_index")) r.timeline_index = get<std::vector<std::size_t>>(j, "timeline_index");
  if (j.contains("evidence_timeline_index")) {
    r.evidence_timeline_index = get<std::vector<std::size_t>>(j, "evidence_timeline_index");
  }
  if (j.contains("corrupted_event") && !j.at("corrupted_event").is_null()) {
    r.corrupted_event = get<std::size_t>(j, "corrupted_event");
  }
  if (j.contains("overlapping")) r.overlapping = get<bool>(j, "overlapping");
  if (j.contains("recurring")) r.recurring = get<bool>(j, "recurring");
  return r;
}

Json to_json(const VerificationResult& r) {
  Json dists = Json::array();
  for (const auto& d : r.event_dists) dists.push_back(dist_json(d));
  return {{"event_dists", dists},
          {"event_labels", labels_json(r.event_labels)},
          {"order_dist", dist_json(r.order_dist)},
          {"order_label", std::string(to_string(r.order_label))},
          {"claim_dist", dist_json(r.claim_dist)},
          {"claim_label", std::string(to_string(r.claim_label))},
          {"evidence_order", r.evidence_order},
          {"relevance", r.relevance},
          {"empty_evidence", r.empty_evidence}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

void write_jsonl(const std::string& path, const std::vector<Json>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  for (const auto& r : rows) out << r.dump() << '\n';
}

std::vector<Json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<Json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

void write_records(const std::string& path, const std::vector<DatasetRecord>& records) {
  std::vector<Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

std::vector<DatasetRecord> read_records(const std::string& path) {
  std::vector<DatasetRecord> out;
  std::size_t line = 0;
  for (const auto& j : read_jsonl(path)) {
    ++line;
    try {
      out.push_back(record_from_json(j));
    } catch (const Error& e) {
      throw ValidationError(path + ": record " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::vector<FactTuple> read_facts(const std::string& path) {
  std::vector<FactTuple> facts;
  if (path.ends_with(".jsonl") || path.ends_with(".json")) {
    for (const auto& j : read_jsonl(path)) facts.push_back(fact_from_json(j));
    return facts;
  }
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, '\t');) f.push_back(cell);
    if (f.size() < 5) throw ValidationError(path + ":" + std::to_string(line_no) + ": expected 5 tab-separated fields");
    if (line_no == 1 && f[0] == "subject") continue;
    FactTuple t;
    t.subject = f[0];
    t.relation = f[1];
    t.object = f[2];
    const Granularity g = f.size() > 5 ? granularity_from_string(f[5]) : Granularity::kYear;
    t.span = TimeSpan(parse_date_or_year(f[3], false), parse_date_or_year(f[4], true), g);
    t.validate();
    facts.push_back(std::move(t));
  }
  return facts;
}

void write_facts_tsv(const std::string& path, const std::vector<FactTuple>& facts) {
  std::ostringstream out;
  out << "subject\trelation\tobject\ttime_start\ttime_end\tgranularity\n";
  for (const auto& f : facts) {
    out << f.subject << '\t' << f.relation << '\t' << f.object << '\t' << format_iso_date(f.span.start_day()) << '\t'
        << format_iso_date(f.span.end_day()) << '\t' << to_string(f.span.granularity()) << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<Event> read_events(const std::string& path) {
  std::vector<Event> out;
  for (const auto& j : read_jsonl(path)) out.push_back(event_from_json(j));
  return out;
}

EvidencePool read_evidence(const std::string& path, const TimeConfig& time) {
  EvidencePool pool;
  std::size_t doc_counter = 0;
  for (const auto& j : read_jsonl(path)) {
    if (j.contains("predicate_tokens")) {
      Event e = event_from_json(j);
      const std::string doc = j.contains("doc_id") ? get<std::string>(j, "doc_id") : "structured";
      const std::string sent = j.contains("sent_id") ? get<std::string>(j, "sent_id") : e.id;
      pool.add(std::move(e), {doc, sent});
      continue;
    }
    const std::string doc = get<std::string>(j, "doc_id");
    const std::string sent = get<std::string>(j, "sent_id");
    ExtractOptions opts;
    opts.source = EventSource::kEvidence;
    opts.id_prefix = "e" + std::to_string(doc_counter++) + "_";
    opts.time = time;
    for (auto& e : extract_events(get<std::string>(j, "text"), opts)) pool.add(std::move(e), {doc, sent});
  }
  pool.validate();
  return pool;
}

}  // namespace chronofact
