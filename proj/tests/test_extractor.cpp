#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "chronofact/encoder.hpp"
#include "chronofact/error.hpp"
#include "chronofact/extractor.hpp"
#include "chronofact/serialize.hpp"
#include "chronofact/text.hpp"

using namespace chronofact;

namespace {

EvidencePool pool_of(const std::vector<std::string>& sentences) {
  EvidencePool pool;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ExtractOptions o;
    o.source = EventSource::kEvidence;
    o.id_prefix = "e" + std::to_string(i) + "_";
    for (auto& e : extract_events(sentences[i], o)) pool.add(std::move(e), {"doc", "s" + std::to_string(i)});
  }
  return pool;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return d / std::sqrt(na * nb);
}

}  // namespace

TEST(Extract, TableSixClaim) {
  const auto ev = extract_events("Davie Dodds was a member of Dundee United F.C. before joining Arbroath F.C.");
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(join(ev[0].predicate_tokens), "was a member");
  EXPECT_EQ(join(ev[1].predicate_tokens), "joining");
  EXPECT_EQ(ev[0].source_index, 0u);
  EXPECT_EQ(ev[1].source_index, 1u);
  EXPECT_FALSE(ev[0].time);
}

TEST(Extract, SingleUndatedEvent) {
  const auto ev = extract_events("Israel attacks Hamas");
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(join(ev[0].predicate_tokens), "attacks");
  EXPECT_FALSE(ev[0].time);
  EXPECT_FALSE(ev[0].low_confidence);
}

TEST(Extract, EmptySentenceIsPreconditionError) {
  EXPECT_THROW(extract_events(""), ValidationError);
  EXPECT_THROW(extract_events("   "), ValidationError);
}

TEST(Extract, NoVerbFallsBackToFirstToken) {
  const auto ev = extract_events("Aberdeen harbour");
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_TRUE(ev[0].low_confidence);
  EXPECT_EQ(ev[0].predicate_tokens, (std::vector<std::string>{"Aberdeen"}));
}

TEST(Extract, DatesAttachedPerClause) {
  const auto ev = extract_events(
      "Davie Dodds was a member of the Dundee United F.C. from 1975 until 1986 and then joined Arbroath F.C. in 1986");
  ASSERT_EQ(ev.size(), 2u);
  ASSERT_TRUE(ev[0].time);
  ASSERT_TRUE(ev[1].time);
  EXPECT_EQ(ev[0].time->start_day(), day_index(1975, 1, 1));
  EXPECT_EQ(ev[0].time->end_day(), day_index(1986, 12, 31));
  EXPECT_EQ(ev[1].time->start_day(), day_index(1986, 1, 1));
}

TEST(Extract, Deterministic) {
  const std::string s = "She studied at Leiden University, then worked for Aurora Telecom thereafter lived in Riga";
  const auto a = extract_events(s), b = extract_events(s);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json(a[i]).dump(), to_json(b[i]).dump());
}

TEST(ScoreEvidence, VerbatimCopyRankedFirst) {
  const auto claim = extract_events("Georgi Andonov played for Botev Plovdiv");
  const EvidencePool pool = pool_of({"Anna Novak lived in Vienna", "Georgi Andonov played for Botev Plovdiv",
                                     "Boris Horvat won the Golden Boot"});
  const auto handle = EventEncoderHandle::toy(64, 3);
  const auto out = score_evidence(claim, pool, handle, 30);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out.events[0].raw_text, "Georgi Andonov played for Botev Plovdiv");
  EXPECT_EQ(out.provenance[0].sent_id, "s1");
}

TEST(ScoreEvidence, BudgetAndOrderMatchExhaustiveScoring) {
  const auto claim = extract_events("Elena Petrova worked for Summit Bank and then lived in Porto");
  const EvidencePool pool =
      pool_of({"Elena Petrova worked for Summit Bank from 1980 until 1984", "Hugo Costa studied at Uppsala University",
               "Elena Petrova lived in Porto in 1990", "Ivo Marin received the Olympic Order",
               "Olga Berg was employed by Tatra Motors"});
  const auto handle = EventEncoderHandle::toy(64, 9);
  // exhaustive reference ranking
  std::vector<std::pair<double, std::size_t>> ref;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    double best = -2.0;
    for (const auto& c : claim) {
      best = std::max(best, cosine(encode_cls(c, handle), encode_cls(pool.events[j], handle)));
    }
    ref.emplace_back(best, j);
  }
  std::stable_sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const auto out = score_evidence(claim, pool, handle, 3);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(out.events[r].id, pool.events[ref[r].second].id);
  // related events outrank the distractors
  EXPECT_NE(out.events[0].raw_text.find("Elena Petrova"), std::string::npos);
  EXPECT_NE(out.events[1].raw_text.find("Elena Petrova"), std::string::npos);
}

TEST(ScoreEvidence, EmptyPoolAndBadBudget) {
  const auto claim = extract_events("Israel attacks Hamas");
  const auto handle = EventEncoderHandle::toy(64, 0);
  EXPECT_TRUE(score_evidence(claim, EvidencePool{}, handle, 5).empty());
  EXPECT_THROW(score_evidence(claim, pool_of({"Hamas attacks Israel"}), handle, 0), ConfigError);
}
