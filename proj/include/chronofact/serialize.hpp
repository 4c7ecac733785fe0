#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "chronofact/core.hpp"
#include "chronofact/datagen.hpp"

namespace chronofact {

using Json = nlohmann::json;

// Spans are {"start": ISO date, "end": ISO date, "granularity": tag}.
Json to_json(const TimeSpan& span);
TimeSpan span_from_json(const Json& j);

Json to_json(const Event& event);
Event event_from_json(const Json& j);

Json to_json(const Claim& claim);
Claim claim_from_json(const Json& j);

Json to_json(const EvidencePool& pool);
EvidencePool pool_from_json(const Json& j);

Json to_json(const FactTuple& fact);
FactTuple fact_from_json(const Json& j);

Json to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const Json& j);

Json to_json(const VerificationResult& result);

// One JSON document per line. Reading reports the failing line number.
void write_jsonl(const std::string& path, const std::vector<Json>& rows);
std::vector<Json> read_jsonl(const std::string& path);

void write_records(const std::string& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_records(const std::string& path);

// TSV "subject relation object time_start time_end" (ISO dates or bare
// years) or JSONL of fact objects, chosen by the .jsonl/.json extension.
std::vector<FactTuple> read_facts(const std::string& path);
void write_facts_tsv(const std::string& path, const std::vector<FactTuple>& facts);

// JSONL of Event records (structured path, extraction bypassed).
std::vector<Event> read_events(const std::string& path);

// JSONL lines that are either Event records or documents
// {doc_id, sent_id, text}; documents go through the extractor.
EvidencePool read_evidence(const std::string& path, const TimeConfig& time = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace chronofact
