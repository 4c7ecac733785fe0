#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "chronofact/chrono_time.hpp"
#include "chronofact/core.hpp"
#include "chronofact/time_span.hpp"

namespace chronofact {

struct FactTuple {
  std::string subject;
  std::string relation;
  std::string object;
  TimeSpan span = TimeSpan::year(1970);  // start_day() is time_start, end_day() is time_end

  void validate() const;
  friend bool operator==(const FactTuple&, const FactTuple&) = default;
};

struct RelationTemplates {
  std::string category;  // object category
  std::vector<std::string> templates;  // "{s}" and "{o}" placeholders; index 0 is canonical
};

struct Vocabulary {
  std::map<std::string, RelationTemplates> relations;
  std::map<std::string, std::vector<std::string>> objects;  // by category
  std::vector<std::string> first_names;
  std::vector<std::string> last_names;

  // Objects that can replace `object` for `relation`; empty when unknown.
  std::vector<std::string> alternatives(const std::string& relation, const std::string& object) const;
};

// Tab-separated records: "relation name category t0|t1|...", "object category
// surface", "first name", "last name". '#' starts a comment line.
Vocabulary parse_vocabulary(std::string_view text);
const Vocabulary& builtin_vocabulary();

enum class ExpressionMode : std::uint8_t { kExplicit, kImplicit };
enum class Category : std::uint8_t { kOverlapping, kRecurring, kAny };
enum class Corruption : std::uint8_t { kNone, kOrderPerturb, kFactObject, kFactDate };

std::string_view to_string(ExpressionMode m);
std::string_view to_string(Category c);
std::string_view to_string(Corruption c);
ExpressionMode expression_from_string(std::string_view s);
Category category_from_string(std::string_view s);
Corruption corruption_from_string(std::string_view s);

struct GenSpec {
  std::size_t n_events = 3;
  ExpressionMode expression = ExpressionMode::kExplicit;
  Category category = Category::kAny;
  Label target = Label::kSup;
  Corruption corruption = Corruption::kNone;
  std::uint64_t seed = 0;

  // REF needs a corruption mode, SUP needs none; n_events in 2..n_max.
  void validate() const;
};

// Per-subject timelines sorted by (start, end, relation, object).
std::map<std::string, std::vector<FactTuple>> build_timeline(std::span<const FactTuple> facts);

struct SampledClaim {
  std::vector<FactTuple> facts;           // in claim surface order
  std::vector<std::size_t> timeline_index;  // matched timeline fact per claim fact
  std::optional<std::size_t> corrupted;    // claim position of a corrupted fact
  ClaimGold gold;
};

// Seeded sample of n facts in timeline order meeting the category.
// Throws CategoryUnsatisfiable (also when n exceeds the timeline).
SampledClaim sample_claim(std::span<const FactTuple> timeline, const GenSpec& spec);

bool has_overlap(std::span<const FactTuple> facts);
bool has_recurrence(std::span<const FactTuple> facts);

// Permutation of 0..n-1 whose start days are not non-decreasing.
// Throws PerturbationImpossible when all starts are equal.
std::vector<std::size_t> perturb_order(std::span<const FactTuple> events, std::uint64_t seed);

// Object swap (or a date shift of >= 2 years) so that the fact no longer
// agrees with any timeline entry of the same relation. Throws
// CorruptionImpossible when no alternative exists.
FactTuple corrupt_fact(const FactTuple& fact, std::span<const FactTuple> timeline, const Vocabulary& vocabulary,
                       Corruption mode, std::uint64_t seed);

// "<subject> <relation phrase> <object>" plus "from X until Y", "in X" for
// single-period spans, "from X" for open spans; the implicit mode omits dates.
// template_index picks the paraphrase; unknown relations use a copula form.
std::string verbalize(const FactTuple& fact, ExpressionMode mode, const Vocabulary& vocabulary,
                      std::size_t template_index = 0, const TimeConfig& time = {});

// Joins with " and then " (or another connective).
std::string synthesize_claim(std::span<const std::string> sentences, std::string_view connective = " and then ");

struct DatasetRecord {
  Claim claim;
  EvidencePool evidence;
  std::string split;
  ExpressionMode expression = ExpressionMode::kExplicit;
  Category category = Category::kAny;
  Corruption corruption = Corruption::kNone;
  std::string subject;
  std::vector<FactTuple> timeline;     // the subject's sorted facts
  std::vector<FactTuple> claim_facts;  // as verbalized, corruption included
  std::vector<std::size_t> timeline_index;           // per claim event
  std::vector<std::size_t> evidence_timeline_index;  // per evidence event
  std::optional<std::size_t> corrupted_event;
  bool overlapping = false;
  bool recurring = false;

  std::size_t n_events() const { return claim.events.size(); }
};

// Checks label soundness and bucket purity of one record against its own
// evidence. Returns an empty string when sound, otherwise the reason.
std::string audit_record(const DatasetRecord& record);

struct SplitPlan {
  std::string name;
  std::size_t count = 0;
};

struct GenerationPlan {
  std::vector<SplitPlan> splits{{"train", 2000}, {"val", 200}, {"test", 200}};
  std::vector<ExpressionMode> expressions{ExpressionMode::kExplicit, ExpressionMode::kImplicit};
  std::vector<std::size_t> event_counts{3, 4, 5};
  std::vector<Category> categories{Category::kOverlapping, Category::kRecurring};
  std::vector<Label> targets{Label::kSup, Label::kRef};
  // REF mixing: probability of order perturbation versus fact corruption.
  double order_perturb_share = 0.5;
  bool order_only = false;
};

struct GenerationReport {
  std::map<std::string, std::vector<DatasetRecord>> splits;
  std::size_t requested = 0;
  std::size_t generated = 0;
  std::vector<std::string> shortfalls;
};

// Subjects are split disjointly across splits in plan order, proportional to
// the split sizes. Buckets are the cross product of the plan axes; each split
// spreads its count over them as evenly as possible.
GenerationReport generate_dataset(std::span<const FactTuple> corpus, const GenerationPlan& plan, std::uint64_t seed,
                                  const Vocabulary& vocabulary = builtin_vocabulary(), const TimeConfig& time = {});

// Synthetic careers: per subject a chain of memberships, jobs, residences,
// positions and awards with overlaps and returns to earlier objects.
std::vector<FactTuple> generate_fact_corpus(std::size_t n_subjects, std::uint64_t seed,
                                            const Vocabulary& vocabulary = builtin_vocabulary(),
                                            const TimeConfig& time = {});

// Layout: expression x event-count rows, then category rows; one
// SUP/REF column pair per split.
std::string stats_csv(const GenerationReport& report);

}  // namespace chronofact
