// Acceptance runner: one PASS/FAIL line per criterion, artifacts under --work.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../grad_check.hpp"
#include "chronofact/attention.hpp"
#include "chronofact/chrono_time.hpp"
#include "chronofact/core.hpp"
#include "chronofact/datagen.hpp"
#include "chronofact/extractor.hpp"
#include "chronofact/harness.hpp"
#include "chronofact/losses.hpp"
#include "chronofact/metrics.hpp"
#include "chronofact/model.hpp"
#include "chronofact/serialize.hpp"

using namespace chronofact;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kGodelExact = 1e-15;  // rounding of the renormalizing division
constexpr double kClampTol = 1e-4;
constexpr double kGradTol = 1e-3;
constexpr double kGradStep = 1e-3;
constexpr double kAttnTol = 1e-6;
constexpr double kTanhTol = 1e-9;
constexpr double kMetricTol = 1e-9;
constexpr double kOverfitAccuracy = 0.95;
constexpr double kGeneralizationMargin = 0.15;
constexpr double kGradSeconds = 120.0;
constexpr double kDatasetSeconds = 60.0;
constexpr double kOverfitSeconds = 300.0;

// Desk-scale training budget shared by criteria 8 to 10.
constexpr std::size_t kDeskEpochs = 10;
constexpr std::size_t kSeeds = 5;

fs::path g_work;
std::size_t g_failed = 0;
std::ofstream g_report;

void result(int id, bool pass, const std::string& name, const std::string& detail, double seconds) {
  std::ostringstream line;
  line << (pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << id << "  " << name << "  | " << detail << "  ["
       << std::fixed << std::setprecision(1) << seconds << " s]";
  std::cout << line.str() << std::endl;
  g_report << line.str() << '\n';
  g_report.flush();
  if (!pass) ++g_failed;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(prec) << v;
  return o.str();
}

std::string sci(double v) {
  std::ostringstream o;
  o << std::scientific << std::setprecision(2) << v;
  return o.str();
}

template <typename F>
void run(int id, const std::string& name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::string detail;
    const bool pass = body(detail, t0);
    result(id, pass, name, detail, seconds_since(t0));
  } catch (const std::exception& e) {
    result(id, false, name, std::string("exception: ") + e.what(), seconds_since(t0));
  }
}

using Clock = std::chrono::steady_clock::time_point;

// ---------------------------------------------------------------- 1, 2

Label rule_oracle(const std::vector<std::size_t>& ev, std::size_t o) {
  bool any_ref = o == 1, all_sup = o == 0;
  for (auto e : ev) {
    any_ref = any_ref || e == 1;
    all_sup = all_sup && e == 0;
  }
  return any_ref ? Label::kRef : all_sup ? Label::kSup : Label::kNei;
}

bool criterion_truth_table(std::string& detail, Clock) {
  std::size_t cases = 0, bad = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<std::size_t> ev(n, 0);
    while (true) {
      for (std::size_t o = 0; o < 2; ++o) {
        std::vector<ProbDist> d;
        for (auto e : ev) d.push_back(ProbDist::one_hot(label_at(e, 3), 3));
        const auto z = godel_aggregate(d, ProbDist::one_hot(label_at(o, 2), 2));
        ++cases;
        if (label_from_dist(z) != rule_oracle(ev, o)) ++bad;
      }
      std::size_t i = 0;
      while (i < n && ++ev[i] == 3) ev[i++] = 0;
      if (i == n) break;
    }
  }
  detail = std::to_string(cases) + " assignments, " + std::to_string(bad) + " mismatches";
  return bad == 0 && cases == 2 * (3 + 9 + 27);
}

bool criterion_hand_cases(std::string& detail, Clock) {
  const std::vector<ProbDist> ev{ProbDist::from({0.7, 0.2, 0.1}), ProbDist::from({0.6, 0.3, 0.1})};
  const auto z = godel_aggregate(ev, ProbDist::from({0.9, 0.1}));
  const double e1 = std::max({std::abs(z[0] - 0.6), std::abs(z[1] - 0.3), std::abs(z[2] - 0.1)});
  // s + r <= 1 for proper distributions, so the clamp case goes through raw masses
  ad::Graph g;
  const std::vector<ad::Var> raw{g.constant(Tensor::row_vector({0.9, 0.8, 0.0}))};
  const auto c = ad::godel_aggregate(g, raw, std::nullopt, 3).value();
  const double e2 = std::max({std::abs(c[0] - 0.5294), std::abs(c[1] - 0.4706), std::abs(c[2])});
  detail = "hand case [" + fmt(z[0], 6) + ", " + fmt(z[1], 6) + ", " + fmt(z[2], 6) + "] max err " + sci(e1) +
           "; clamp case [" + fmt(c[0]) + ", " + fmt(c[1]) + ", " + fmt(c[2]) + "] max err " + sci(e2);
  return e1 <= kGodelExact && e2 <= kClampTol;
}

// ---------------------------------------------------------------- 3

EvidencePool extracted_pool(const std::vector<std::string>& sentences) {
  EvidencePool pool;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ExtractOptions o;
    o.source = EventSource::kEvidence;
    o.id_prefix = "e" + std::to_string(i) + "_";
    for (auto& e : extract_events(sentences[i], o)) pool.add(std::move(e), {"doc", "s" + std::to_string(i)});
  }
  return pool;
}

bool criterion_gradients(std::string& detail, Clock t0) {
  ModelConfig cfg;
  cfg.dim = 8;
  cfg.k = 2;
  cfg.k_seq = 2;
  cfg.n_max = 2;
  cfg.lstm_hidden = 4;
  cfg.lstm_layers = 2;
  cfg.fc_hidden = 8;
  cfg.arity = 3;
  auto params = ModelParams::init(cfg, 3);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (Parameter* p : {&params.attention.token, &params.attention.event, &params.attention.time}) {
    for (double& v : p->value.data()) v += u(rng);
  }
  PipelineConfig pipe;
  pipe.encoder = EventEncoderHandle::toy(8, 1);
  const auto ex = prepare_example(
      extract_events("Georgi Andonov played for Botev Plovdiv in 2002 and then joined Levski Sofia in 2010"),
      extracted_pool({"Georgi Andonov is a member of the Levski Sofia from 2010 until 2015",
                      "Georgi Andonov is a member of the Botev Plovdiv from 2002 until 2006",
                      "Anna Novak lived in Vienna in 1980"}),
      pipe);
  if (ex.claim_enc.size() != 2) throw std::runtime_error("expected two claim events");
  const ClaimGold gold{{Label::kSup, Label::kNei}, Label::kRef, Label::kRef};
  auto loss = [&](ad::Graph& g) {
    const auto out = forward(g, params, ex);
    return example_loss(g, out, gold, 0.3, cfg).total;
  };
  const auto rep = chronofact::testing::check_gradients(params.parameters(), loss, kGradStep);
  const double secs = seconds_since(t0);
  detail = std::to_string(rep.checked) + " parameters, max relative error " + sci(rep.max_rel_error) + " (" +
           rep.worst + ")";
  return rep.max_rel_error <= kGradTol && secs < kGradSeconds;
}

// ---------------------------------------------------------------- 4

EventEncoding random_encoding(std::mt19937_64& rng, std::size_t dim, bool dated) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 5);
  EventEncoding e;
  e.dim = dim;
  e.tokens = Tensor(len(rng), dim);
  e.cls.assign(dim, 0.0);
  for (std::size_t r = 0; r < e.tokens.rows(); ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      e.tokens(r, c) = n(rng);
      e.cls[c] += e.tokens(r, c) / static_cast<double>(e.tokens.rows());
    }
  }
  if (dated) {
    e.date.emplace(dim);
    for (auto& x : *e.date) x = n(rng);
  }
  return e;
}

EventEncoding scaled(EventEncoding e, double lambda) {
  for (auto& x : e.tokens.data()) x *= lambda;
  for (auto& x : e.cls) x *= lambda;
  if (e.date) {
    for (auto& x : *e.date) x *= lambda;
  }
  return e;
}

bool criterion_attention(std::string& detail, Clock) {
  const std::size_t dim = 16;
  std::mt19937_64 rng(17);
  auto proj = AttentionProjection::identity(dim);
  std::normal_distribution<double> n(0.0, 0.2);
  for (Parameter* p : {&proj.token, &proj.event, &proj.time}) {
    for (double& v : p->value.data()) v += n(rng);
  }
  double worst_scale = 0.0, worst_tanh = 0.0;
  std::size_t out_of_bounds = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    std::bernoulli_distribution coin(0.7);
    const std::vector<EventEncoding> c{random_encoding(rng, dim, coin(rng))};
    const std::vector<EventEncoding> e{random_encoding(rng, dim, coin(rng))};
    const auto base = multi_level_scores(c, e, proj);
    if (std::abs(base.alpha(0, 0)) > 1 + kAttnTol || std::abs(base.beta(0, 0)) > 1 + kAttnTol ||
        std::abs(base.gamma(0, 0)) > 1 + kAttnTol || std::abs(base.omega(0, 0)) > 1 + kAttnTol ||
        std::abs(base.relevance[0]) > 1.0) {
      ++out_of_bounds;
    }
    worst_tanh = std::max(worst_tanh, std::abs(base.relevance[0] - std::tanh(base.omega(0, 0))));
    for (double lambda : {0.1, 10.0}) {
      const std::vector<EventEncoding> cs{scaled(c[0], lambda)}, es{scaled(e[0], lambda)};
      const auto s = multi_level_scores(cs, es, proj);
      worst_scale = std::max({worst_scale, std::abs(s.alpha(0, 0) - base.alpha(0, 0)),
                              std::abs(s.beta(0, 0) - base.beta(0, 0)), std::abs(s.gamma(0, 0) - base.gamma(0, 0)),
                              std::abs(s.omega(0, 0) - base.omega(0, 0)),
                              std::abs(s.relevance[0] - base.relevance[0])});
    }
  }
  detail = "1000 pairs, max scale deviation " + sci(worst_scale) + ", out of bounds " +
           std::to_string(out_of_bounds) + ", max |r - tanh| " + sci(worst_tanh);
  return worst_scale <= kAttnTol && out_of_bounds == 0 && worst_tanh <= kTanhTol;
}

// ---------------------------------------------------------------- 5

Event dated_event(const std::string& id, std::size_t idx, DayIndex start, DayIndex end) {
  Event e;
  e.id = id;
  e.source = EventSource::kEvidence;
  e.source_index = idx;
  e.predicate_tokens = {"happened"};
  e.raw_text = "happened " + id;
  e.time = TimeSpan(start, end, Granularity::kDay);
  return e;
}

// Brute force: the permutation minimizing, in this priority, start-day
// inversions, end-day inversions among equal starts, source-index inversions
// among equal spans, and input-position inversions.
std::vector<std::size_t> brute_force_order(const std::vector<Event>& ev) {
  std::vector<std::size_t> perm(ev.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best;
  std::array<std::size_t, 4> best_cost{};
  bool first = true;
  do {
    std::array<std::size_t, 4> cost{};
    for (std::size_t a = 0; a < perm.size(); ++a) {
      for (std::size_t b = a + 1; b < perm.size(); ++b) {
        const auto& x = ev[perm[a]];
        const auto& y = ev[perm[b]];
        const auto xs = x.time->start_day(), ys = y.time->start_day();
        const auto xe = x.time->end_day(), ye = y.time->end_day();
        if (xs > ys) ++cost[0];
        else if (xs == ys && xe > ye) ++cost[1];
        else if (xs == ys && xe == ye && x.source_index > y.source_index) ++cost[2];
        else if (xs == ys && xe == ye && x.source_index == y.source_index && perm[a] > perm[b]) ++cost[3];
      }
    }
    if (first || cost < best_cost) {
      best = perm;
      best_cost = cost;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool criterion_sort(std::string& detail, Clock) {
  std::mt19937_64 rng(5);
  std::size_t lists = 0, inversions = 0, mismatches = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    // small day range forces shared starts and ends
    std::uniform_int_distribution<DayIndex> day(0, 4);
    std::vector<Event> base;
    for (std::size_t i = 0; i < n; ++i) {
      const DayIndex s = day(rng);
      base.push_back(dated_event("e" + std::to_string(i), i % 3, s, s + day(rng)));
    }
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    do {
      std::vector<Event> ev;
      for (auto i : p) ev.push_back(base[i]);
      const auto got = chronological_sort(ev);
      inversions += start_day_inversions(ev, got);
      if (got != brute_force_order(ev)) ++mismatches;
      ++lists;
    } while (std::next_permutation(p.begin(), p.end()));
  }
  detail = std::to_string(lists) + " permutations, " + std::to_string(inversions) + " inversions, " +
           std::to_string(mismatches) + " brute-force mismatches";
  return inversions == 0 && mismatches == 0;
}

// ---------------------------------------------------------------- 6

Label record_oracle(const DatasetRecord& r) {
  std::vector<Event> timeline;
  for (std::size_t i = 0; i < r.timeline.size(); ++i) {
    timeline.push_back(dated_event("t" + std::to_string(i), i, r.timeline[i].span.start_day(), r.timeline[i].span.end_day()));
  }
  std::vector<std::optional<std::size_t>> match(r.timeline_index.begin(), r.timeline_index.end());
  return order_consistency_oracle(r.claim.events, timeline, match);
}

std::string split_bytes(const GenerationReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  std::string all;
  for (const auto& [name, recs] : rep.splits) {
    const auto path = (dir / (name + ".jsonl")).string();
    write_records(path, recs);
    all += read_text_file(path);
  }
  write_text_file((dir / "stats.csv").string(), stats_csv(rep));
  return all + read_text_file((dir / "stats.csv").string());
}

bool criterion_dataset(std::string& detail, Clock t0) {
  const auto corpus = generate_fact_corpus(1200, 1);
  const GenerationPlan plan;  // 2000 / 200 / 200 over the 24 buckets
  const auto a = generate_dataset(corpus, plan, 11);
  std::size_t total = 0, unsound = 0, sup = 0, ref = 0;
  std::map<std::string, std::size_t> buckets;
  for (const auto& [name, recs] : a.splits) {
    for (const auto& r : recs) {
      ++total;
      const Label oracle = record_oracle(r);
      const auto& gold = *r.claim.gold;
      bool ok = gold.order_label == oracle && audit_record(r).empty();
      if (gold.claim_label == Label::kSup) {
        ++sup;
        ok = ok && oracle == Label::kSup && !r.corrupted_event;
      } else {
        ++ref;
        ok = ok && (oracle == Label::kRef || r.corrupted_event.has_value());
      }
      if (!ok) ++unsound;
      buckets[name + "/" + std::string(to_string(r.expression)) + "/" + std::to_string(r.n_events()) + "/" +
              std::string(to_string(r.category)) + "/" + std::string(to_string(gold.claim_label))]++;
    }
  }
  // balance is per split: bucket sizes differ by at most one within a split
  std::map<std::string, std::pair<std::size_t, std::size_t>> range;
  for (const auto& [k, v] : buckets) {
    auto [it, fresh] = range.try_emplace(k.substr(0, k.find('/')), v, v);
    it->second = {std::min(it->second.first, v), std::max(it->second.second, v)};
  }
  bool balanced = true;
  std::string sizes;
  for (const auto& [split, mm] : range) {
    balanced = balanced && mm.second - mm.first <= 1;
    sizes += (sizes.empty() ? "" : ", ") + split + " " + std::to_string(mm.first) + ".." + std::to_string(mm.second);
  }
  const auto first = split_bytes(a, g_work / "dataset_a");
  const auto second = split_bytes(generate_dataset(corpus, plan, 11), g_work / "dataset_b");
  const double secs = seconds_since(t0);
  detail = std::to_string(total) + " claims (SUP " + std::to_string(sup) + ", REF " + std::to_string(ref) + "), " +
           std::to_string(buckets.size()) + " split buckets sized " + sizes +
           ", unsound " + std::to_string(unsound) + ", byte-identical " + (first == second ? "yes" : "no");
  return total == 2400 && unsound == 0 && sup == ref && balanced && first == second && secs < kDatasetSeconds;
}

// ---------------------------------------------------------------- 7

bool criterion_overfit(std::string& detail, Clock t0) {
  GenerationPlan plan;
  plan.splits = {{"train", 64}};
  const auto rep = generate_dataset(generate_fact_corpus(200, 7), plan, 7);
  const auto& set = rep.splits.at("train");
  RunConfig cfg;
  cfg.dim = 64;
  cfg.mu = 0.3;
  cfg.k = 3;
  cfg.seed = 7;
  cfg.epochs = 200;
  // validating on the training set keeps the best training-fit epoch
  const auto tr = train(cfg, set, set);
  const auto ev = evaluate(tr.best, set, cfg.pipeline());
  std::size_t first_hit = 0;
  for (const auto& e : tr.epochs) {
    if (e.train_accuracy >= kOverfitAccuracy) {
      first_hit = e.epoch;
      break;
    }
  }
  const double secs = seconds_since(t0);
  detail = std::to_string(set.size()) + " claims, training accuracy " + fmt(ev.report.accuracy) + " (best epoch " +
           std::to_string(tr.best_epoch) + ", running accuracy first >= 0.95 at epoch " +
           (first_hit ? std::to_string(first_hit) : std::string("never")) + ")";
  return !tr.diverged && ev.report.accuracy >= kOverfitAccuracy && secs < kOverfitSeconds;
}

// ---------------------------------------------------------------- 8, 9, 10, 12

struct DeskState {
  Datasets data;
  std::vector<SweepRow> mu_rows;  // every trained (mu, seed) run
  std::optional<ModelParams> seed0_model;
  RunConfig base;
};

DeskState& desk() {
  static DeskState s;
  return s;
}

Datasets desk_data(bool order_only, std::uint64_t seed, const fs::path& dir) {
  GenerationPlan plan;
  plan.splits = {{"train", 2000}, {"val", 200}, {"test", 400}};
  plan.order_only = order_only;
  auto rep = generate_dataset(generate_fact_corpus(1200, seed), plan, seed);
  split_bytes(rep, dir);
  return Datasets{rep.splits["train"], rep.splits["val"], rep.splits["test"]};
}

double mean_of(const std::vector<SweepRow>& rows, double mu, double MetricsReport::*field) {
  double s = 0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (std::abs(r.value - mu) < 1e-12) {
      s += r.report.*field;
      ++n;
    }
  }
  return n ? s / n : std::nan("");
}

bool criterion_generalization(std::string& detail, Clock) {
  auto& st = desk();
  st.data = desk_data(false, 21, g_work / "desk");
  st.base.epochs = kDeskEpochs;
  st.base.mu = 0.3;
  std::ofstream log(g_work / "desk_train_log.jsonl");
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto cfg = st.base;
    cfg.seed = seed;
    const auto tr = train(cfg, st.data.train, st.data.val, &log);
    if (tr.diverged) throw std::runtime_error("seed " + std::to_string(seed) + " diverged: " + tr.divergence);
    const auto ev = evaluate(tr.best, st.data.test, cfg.pipeline());
    st.mu_rows.push_back({"mu", 0.3, seed, ev.report, tr.best_epoch});
    if (seed == 0) {
      st.seed0_model = tr.best;
      save_checkpoint(tr.best, (g_work / "desk_seed0.bin").string());
      write_text_file((g_work / "desk_seed0_metrics.json").string(), ev.report.to_json());
    }
    per_seed += (seed ? ", " : "") + fmt(ev.report.macro_f1);
  }
  const double mean = mean_of(st.mu_rows, 0.3, &MetricsReport::macro_f1);
  const double baseline = majority_baseline_macro_f1(st.data.test, 2);
  detail = "mean test macro F1 " + fmt(mean) + " over seeds [" + per_seed + "], majority baseline " + fmt(baseline) +
           ", margin " + fmt(mean - baseline);
  return mean >= baseline + kGeneralizationMargin;
}

bool criterion_mu_sweep(std::string& detail, Clock) {
  auto& st = desk();
  if (st.mu_rows.empty()) throw std::runtime_error("desk-scale runs missing");
  std::ofstream log(g_work / "mu_sweep_log.jsonl");
  std::vector<std::uint64_t> seeds(kSeeds);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
  const std::vector<double> zero{0.0};
  for (auto& r : sweep(st.base, "mu", zero, seeds, st.data, &log)) st.mu_rows.push_back(std::move(r));
  const std::vector<double> grid{0.1, 0.2, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const std::vector<std::uint64_t> one{0};
  for (auto& r : sweep(st.base, "mu", grid, one, st.data, &log)) st.mu_rows.push_back(std::move(r));
  auto rows = st.mu_rows;
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  write_text_file((g_work / "mu_sweep.csv").string(), sweep_csv(rows));
  write_text_file((g_work / "mu_sweep_plot.csv").string(), sweep_plot_csv(rows));
  const double v0 = mean_of(rows, 0.0, &MetricsReport::consistency_violation_rate);
  const double v3 = mean_of(rows, 0.3, &MetricsReport::consistency_violation_rate);
  std::string curve;
  for (double mu : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    curve += (curve.empty() ? "" : " ") + fmt(mu, 1) + ":" + fmt(mean_of(rows, mu, &MetricsReport::macro_f1), 3);
  }
  detail = "violation rate mu=0.3 " + fmt(v3) + " vs mu=0.0 " + fmt(v0) + " (5-seed means); macro F1 by mu " + curve;
  return v3 <= v0;
}

bool criterion_ablation(std::string& detail, Clock) {
  const auto data = desk_data(true, 22, g_work / "order_only");
  RunConfig cfg = desk().base;
  cfg.seed = 0;
  std::ofstream log(g_work / "ablation_log.jsonl");
  const auto rows = ablate(cfg, data, &log);
  write_text_file((g_work / "ablation.csv").string(), ablation_csv(rows));
  std::string deltas;
  const AblationRow* worst = nullptr;
  for (const auto& r : rows) {
    if (r.variant == "full") continue;
    deltas += (deltas.empty() ? "" : ", ") + r.variant + " " + fmt(r.delta_macro_f1);
    if (!worst || r.delta_macro_f1 < worst->delta_macro_f1) worst = &r;
  }
  detail = "full macro F1 " + fmt(rows.front().report.macro_f1) + "; deltas " + deltas;
  return worst && worst->variant == "no_order_classifier" && worst->delta_macro_f1 < 0.0;
}

// ---------------------------------------------------------------- 11

bool criterion_metrics(std::string& detail, Clock) {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (std::size_t arity : {2, 3}) {
    std::uniform_int_distribution<std::size_t> u(0, arity - 1);
    std::vector<Label> gold, pred;
    for (int i = 0; i < 10000; ++i) {
      gold.push_back(label_at(u(rng), arity));
      pred.push_back(label_at(u(rng), arity));
    }
    std::vector<std::vector<double>> cm(arity, std::vector<double>(arity, 0.0));
    for (std::size_t i = 0; i < gold.size(); ++i) cm[index_of(gold[i])][index_of(pred[i])] += 1;
    double macro = 0, diag = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      double row = 0, col = 0;
      for (std::size_t k = 0; k < arity; ++k) {
        row += cm[c][k];
        col += cm[k][c];
      }
      const double p = col ? cm[c][c] / col : 0, r = row ? cm[c][c] / row : 0;
      macro += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
      diag += cm[c][c];
    }
    worst = std::max({worst, std::abs(macro_f1(gold, pred, arity) - macro / arity),
                      std::abs(micro_f1(gold, pred, arity) - diag / gold.size())});
  }
  detail = "2 x 10000 pairs, max deviation " + sci(worst);
  return worst <= kMetricTol;
}

// ---------------------------------------------------------------- 12

Event structured(const std::string& id, EventSource src, std::size_t idx, const std::string& text,
                 std::size_t predicate_len, std::optional<TimeSpan> span) {
  Event e;
  e.id = id;
  e.source = src;
  e.source_index = idx;
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  // subject is the first two words, the predicate follows
  for (std::size_t i = 2; i < words.size(); ++i) {
    (i < 2 + predicate_len ? e.predicate_tokens : e.argument_tokens).push_back(words[i]);
  }
  e.argument_tokens.insert(e.argument_tokens.begin(), words.begin(), words.begin() + 2);
  e.raw_text = text;
  e.time = span;
  return e;
}

TimeSpan yrs(int a, int b) { return TimeSpan::years(a, b); }
TimeSpan from_year(int a) { return TimeSpan(first_day_of_year(a), TimeConfig{}.horizon_day, Granularity::kYear); }

struct Scenario {
  std::string name;
  std::string claim_text;
  std::vector<Event> claim;
  std::vector<Event> evidence;
  std::vector<std::size_t> matching;  // claim event -> evidence index
  Label expected_order;
};

std::vector<Scenario> scenarios() {
  const auto C = EventSource::kClaim;
  const auto E = EventSource::kEvidence;
  std::vector<Scenario> s;
  // The party membership precedes the professorship in the evidence; years are illustrative.
  s.push_back({"yona",
               "Yossi Yona began studying for a PhD and went on to become a Professor of philosophy of education at "
               "Ben-Gurion University before he joined the Left Camp of Israel party",
               {structured("c1", C, 0, "Yossi Yona began studying for a PhD", 2, std::nullopt),
                structured("c2", C, 1, "Yossi Yona became a Professor of philosophy of education at Ben-Gurion University",
                           2, std::nullopt),
                structured("c3", C, 2, "Yossi Yona joined the Left Camp of Israel party", 1, std::nullopt)},
               {structured("e0", E, 0, "Yossi Yona joined the Left Camp of Israel party whilst at university", 1,
                           yrs(1975, 1978)),
                structured("e1", E, 1, "Yossi Yona began studying for a PhD after graduating in 1979", 2, yrs(1979, 1985)),
                structured("e2", E, 2, "Yossi Yona became a Professor of philosophy of education at Ben-Gurion University",
                           2, from_year(1993))},
               {1, 2, 0},
               Label::kRef});
  s.push_back({"dodds",
               "Davie Dodds was a member of Dundee United F.C. before joining Arbroath F.C., thereafter becoming part "
               "of the Scotland national football team, then moving to Neuchatel Xamax, and finally playing for "
               "Aberdeen F.C.",
               {structured("c1", C, 0, "Davie Dodds was a member of Dundee United F.C.", 3, std::nullopt),
                structured("c2", C, 1, "Davie Dodds joined Arbroath F.C.", 1, std::nullopt),
                structured("c3", C, 2, "Davie Dodds became part of the Scotland national football team", 2, std::nullopt),
                structured("c4", C, 3, "Davie Dodds moved to Neuchatel Xamax", 2, std::nullopt),
                structured("c5", C, 4, "Davie Dodds played for Aberdeen F.C.", 2, std::nullopt)},
               {structured("e0", E, 0, "Davie Dodds is a member of the Dundee United F.C. from 1975 until 1986", 4,
                           yrs(1975, 1986)),
                structured("e1", E, 1, "Davie Dodds is a member of the Arbroath F.C. from 1977 until 1978", 4,
                           yrs(1977, 1978)),
                structured("e2", E, 2, "Davie Dodds is a member of the Scotland national football from 1983 until 1983",
                           4, yrs(1983, 1983)),
                structured("e3", E, 3, "Davie Dodds is a member of the Neuchatel Xamax from 1986 until 1986", 4,
                           yrs(1986, 1986)),
                structured("e4", E, 4, "Davie Dodds is a member of the Aberdeen F.C. from 1986 until 1989", 4,
                           yrs(1986, 1989))},
               {0, 1, 2, 3, 4},
               Label::kSup});
  // Evidence deliberately out of order: 2009, 2002, 2015, 2010, 2003.
  s.push_back({"andonov",
               "Georgi Andonov was a member of the Botev Plovdiv from 2002 to 2006, joined the Bulgaria national "
               "under-21 team from 2003 to 2005, returned to Botev Plovdiv in 2009, played for PSFC Chernomorets "
               "Burgas from 2010 to 2012, and then became a member of PFC Beroe Stara Zagora starting in 2015",
               {structured("c1", C, 0, "Georgi Andonov was a member of the Botev Plovdiv from 2002 to 2006", 3,
                           yrs(2002, 2006)),
                structured("c2", C, 1, "Georgi Andonov joined the Bulgaria national under-21 team from 2003 to 2005", 1,
                           yrs(2003, 2005)),
                structured("c3", C, 2, "Georgi Andonov returned to Botev Plovdiv in 2009", 1, yrs(2009, 2009)),
                structured("c4", C, 3, "Georgi Andonov played for PSFC Chernomorets Burgas from 2010 to 2012", 2,
                           yrs(2010, 2012)),
                structured("c5", C, 4, "Georgi Andonov became a member of PFC Beroe Stara Zagora starting in 2015", 4,
                           from_year(2015))},
               {structured("e0", E, 0, "Georgi Andonov is member of Botev Plovdiv from 2009 until 2009", 3,
                           yrs(2009, 2009)),
                structured("e1", E, 1, "Georgi Andonov is a member of the Botev Plovdiv from 2002 until 2006", 4,
                           yrs(2002, 2006)),
                structured("e2", E, 2, "Georgi Andonov is a member of the PFC Beroe Stara Zagora from 2015", 4,
                           from_year(2015)),
                structured("e3", E, 3, "Georgi Andonov is a member of the PSFC Chernomorets Burgas from 2010 until 2012",
                           4, yrs(2010, 2012)),
                structured("e4", E, 4,
                           "Georgi Andonov is a member of the Bulgaria national under-21 team from 2003 until 2005", 4,
                           yrs(2003, 2005))},
               {1, 4, 0, 3, 2},
               Label::kSup});
  return s;
}

// Years in the time column of the rendered evidence table, top to bottom.
std::vector<std::string> rendered_years(const std::string& text) {
  std::vector<std::string> years;
  std::istringstream in(text);
  bool inside = false, header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("Evidence events in chronological order", 0) == 0) {
      inside = header = true;
      continue;
    }
    if (!inside) continue;
    if (line.empty()) break;
    if (header) {
      header = false;
      continue;
    }
    years.push_back(line.substr(6, 4));
  }
  return years;
}

bool criterion_case_studies(std::string& detail, Clock) {
  auto& st = desk();
  if (!st.seed0_model) throw std::runtime_error("desk-scale model missing");
  const auto pipeline = st.base.pipeline();
  bool ok = true;
  std::string summary;
  std::vector<std::string> table7_years;
  for (const auto& sc : scenarios()) {
    // round-trip through the structured JSONL path
    const auto claim_path = (g_work / ("case_" + sc.name + "_claim.jsonl")).string();
    const auto ev_path = (g_work / ("case_" + sc.name + "_evidence.jsonl")).string();
    std::vector<Json> cj, ej;
    for (const auto& e : sc.claim) cj.push_back(to_json(e));
    for (const auto& e : sc.evidence) ej.push_back(to_json(e));
    write_jsonl(claim_path, cj);
    write_jsonl(ev_path, ej);
    Claim claim;
    claim.id = sc.name;
    claim.text = sc.claim_text;
    claim.events = read_events(claim_path);
    const EvidencePool pool = read_evidence(ev_path);

    std::vector<std::optional<std::size_t>> match(sc.matching.begin(), sc.matching.end());
    const Label oracle = order_consistency_oracle(claim.events, pool.events, match);
    const auto study = run_case_study(claim, pool, *st.seed0_model, pipeline);
    const auto text = render_case_study(study);
    write_text_file((g_work / ("case_" + sc.name + ".txt")).string(), text);
    ok = ok && oracle == sc.expected_order;
    summary += (summary.empty() ? "" : "; ") + sc.name + " oracle " + std::string(to_string(oracle)) + " model order " +
               std::string(to_string(study.result.order_label)) + " final " +
               std::string(to_string(study.result.claim_label));
    if (sc.name == "andonov") table7_years = rendered_years(text);
  }
  const std::vector<std::string> want{"2002", "2003", "2009", "2010", "2015"};
  std::string shown;
  for (const auto& y : table7_years) shown += (shown.empty() ? "" : ",") + y;
  detail = summary + "; andonov evidence rendered " + shown;
  return ok && table7_years == want;
}

}  // namespace

int main(int argc, char** argv) {
  g_work = "acceptance_work";
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work" && i + 1 < argc) {
      g_work = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      std::istringstream in(argv[++i]);
      for (std::string t; std::getline(in, t, ',');) only.push_back(std::stoi(t));
    } else {
      std::cerr << "usage: acceptance [--work DIR] [--only 1,2,...]\n";
      return 2;
    }
  }
  fs::create_directories(g_work);
  g_report.open(g_work / "acceptance_report.txt");
  auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  if (want(1)) run(1, "truth table vs hard rule", criterion_truth_table);
  if (want(2)) run(2, "aggregation hand cases", criterion_hand_cases);
  if (want(3)) run(3, "full-model gradient check", criterion_gradients);
  if (want(4)) run(4, "attention scale invariance and bounds", criterion_attention);
  if (want(5)) run(5, "chronological sort oracle", criterion_sort);
  if (want(6)) run(6, "dataset soundness and determinism", criterion_dataset);
  if (want(7)) run(7, "overfit sanity", criterion_overfit);
  if (want(11)) run(11, "metric oracle", criterion_metrics);
  if (want(8) || want(9) || want(12)) run(8, "desk-scale generalization", criterion_generalization);
  if (want(9)) run(9, "mu sweep", criterion_mu_sweep);
  if (want(10)) run(10, "ablation on order-perturbed data", criterion_ablation);
  if (want(12)) run(12, "case studies", criterion_case_studies);

  std::cout << (g_failed == 0 ? "ALL CRITERIA PASSED" : std::to_string(g_failed) + " CRITERIA FAILED") << std::endl;
  return g_failed == 0 ? 0 : 1;
}
