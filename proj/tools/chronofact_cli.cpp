#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chronofact/datagen.hpp"
#include "chronofact/error.hpp"
#include "chronofact/extractor.hpp"
#include "chronofact/harness.hpp"
#include "chronofact/serialize.hpp"

namespace fs = std::filesystem;
using namespace chronofact;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> mu;
  std::optional<std::size_t> k;
  std::vector<std::string> ablations;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "flat key = value run configuration");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--mu", c.mu, "soft-logic loss weight in [0, 1]");
  cmd->add_option("--k", c.k, "top-k evidence per claim event (also the sequence length)");
  cmd->add_option("--ablation", c.ablations,
                  "none | no_multilevel_attention | no_event_classifier | no_order_classifier");
  cmd->add_option("--out", c.out, "output directory");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : RunConfig::load(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.mu) cfg.mu = *c.mu;
  if (c.k) cfg.k = cfg.k_seq = *c.k;
  for (const auto& a : c.ablations) apply_ablation_flag(cfg.ablation, a);
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Common& c) {
  fs::path p(c.out);
  fs::create_directories(p);
  return p;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad list entry '" + item + "'");
    }
  }
  return out;
}

int cmd_generate(const Common& c, std::size_t subjects, std::size_t n_train, std::size_t n_val, std::size_t n_test,
                 const std::string& facts_path, bool order_only) {
  const std::uint64_t seed = c.seed.value_or(0);
  const auto corpus = facts_path.empty() ? generate_fact_corpus(subjects, seed) : read_facts(facts_path);
  GenerationPlan plan;
  plan.splits = {{"train", n_train}, {"val", n_val}, {"test", n_test}};
  plan.order_only = order_only;
  const auto report = generate_dataset(corpus, plan, seed);
  const fs::path dir = out_dir(c);
  for (const auto& [name, records] : report.splits) write_records((dir / (name + ".jsonl")).string(), records);
  write_text_file((dir / "stats.csv").string(), stats_csv(report));
  if (facts_path.empty()) write_facts_tsv((dir / "facts.tsv").string(), corpus);
  std::cout << "generated " << report.generated << " of " << report.requested << " claims into " << dir.string()
            << '\n';
  for (const auto& s : report.shortfalls) std::cerr << "shortfall: " << s << '\n';
  return 0;
}

int cmd_train(const Common& c) {
  const RunConfig cfg = resolve(c);
  const auto data = load_datasets(cfg);
  if (data.train.empty()) throw ValidationError("no training data; set 'train' in the config");
  const fs::path dir = out_dir(c);
  std::ofstream log(dir / "train_log.jsonl");
  const auto res = train(cfg, data.train, data.val, &log);
  save_checkpoint(res.best, (dir / "checkpoint.bin").string());
  save_checkpoint(res.last_good, (dir / "last.bin").string());
  write_text_file((dir / "config.txt").string(), cfg.to_text());
  std::cout << "best epoch " << res.best_epoch << "  val macro-F1 " << res.best_val_macro_f1 << "  checksum "
            << std::hex << checkpoint_checksum(res.best) << std::dec << '\n';
  if (res.diverged) {
    std::cerr << "training diverged: " << res.divergence << " (last good parameters saved)\n";
    return 1;
  }
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& checkpoint, const std::string& data_path) {
  RunConfig cfg = resolve(c);
  const ModelParams params = load_checkpoint(checkpoint);
  const std::string path = data_path.empty() ? cfg.test_path : data_path;
  if (path.empty()) throw ValidationError("no evaluation data; pass --data or set 'test' in the config");
  const auto records = read_records(path);
  cfg.dim = params.config.dim;
  const auto ev = evaluate(params, records, cfg.pipeline());
  const fs::path dir = out_dir(c);
  write_text_file((dir / "metrics.json").string(), ev.report.to_json() + "\n");
  write_text_file((dir / "buckets.csv").string(), ev.report.buckets_csv());
  write_text_file((dir / "confusion.csv").string(), "level,gold,pred,count\n" + ev.report.claim.to_csv("claim") +
                                                         ev.report.event.to_csv("event") +
                                                         ev.report.order.to_csv("order"));
  std::cout << ev.report.to_text();
  return 0;
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& values, const std::string& seeds) {
  const RunConfig cfg = resolve(c);
  const auto data = load_datasets(cfg);
  std::vector<std::uint64_t> seed_list;
  if (seeds.empty()) {
    seed_list.push_back(cfg.seed);
  } else {
    for (double s : parse_list(seeds)) seed_list.push_back(static_cast<std::uint64_t>(s));
  }
  const auto vals = parse_list(values);
  const fs::path dir = out_dir(c);
  std::ofstream log(dir / "sweep_log.jsonl");
  const auto rows = sweep(cfg, param, vals, seed_list, data, &log);
  write_text_file((dir / "sweep.csv").string(), sweep_csv(rows));
  write_text_file((dir / "sweep_plot.csv").string(), sweep_plot_csv(rows));
  std::cout << sweep_plot_csv(rows);
  return 0;
}

int cmd_ablate(const Common& c) {
  const RunConfig cfg = resolve(c);
  const auto data = load_datasets(cfg);
  const fs::path dir = out_dir(c);
  std::ofstream log(dir / "ablation_log.jsonl");
  const auto rows = ablate(cfg, data, &log);
  write_text_file((dir / "ablation.csv").string(), ablation_csv(rows));
  for (const auto& r : rows) write_text_file((dir / ("metrics_" + r.variant + ".json")).string(), r.report.to_json() + "\n");
  std::cout << ablation_csv(rows);
  return 0;
}

int cmd_verify(const Common& c, const std::string& checkpoint, const std::string& claim_text,
               const std::string& claim_events, const std::vector<std::string>& evidence_files, bool as_json) {
  RunConfig cfg = resolve(c);
  const ModelParams params = load_checkpoint(checkpoint);
  cfg.dim = params.config.dim;
  Claim claim;
  claim.id = "claim";
  if (!claim_events.empty()) {
    claim.events = read_events(claim_events);
    for (const auto& e : claim.events) claim.text += (claim.text.empty() ? "" : "; ") + e.raw_text;
  } else if (!claim_text.empty()) {
    claim.text = claim_text;
    claim.events = extract_events(claim_text);
  } else {
    throw ValidationError("pass --claim or --claim-events");
  }
  if (claim.events.size() > params.config.n_max) throw ValidationError("claim has more events than the checkpoint allows");

  EvidencePool pool;
  std::set<std::string> ids;
  for (std::size_t f = 0; f < evidence_files.size(); ++f) {
    auto part = read_evidence(evidence_files[f]);
    for (std::size_t i = 0; i < part.size(); ++i) {
      Event e = part.events[i];
      if (!ids.insert(e.id).second) {
        e.id = "f" + std::to_string(f) + "_" + e.id;
        ids.insert(e.id);
      }
      e.source_index = pool.size();
      pool.add(std::move(e), part.provenance[i]);
    }
  }
  const auto study = run_case_study(claim, pool, params, cfg.pipeline());
  if (as_json) {
    std::cout << to_json(study.result).dump(2) << '\n';
  } else {
    std::cout << render_case_study(study);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal claim verification: generate, train, evaluate, sweep, ablate, verify"};
  app.require_subcommand(1);

  Common c;
  std::size_t subjects = 1200, n_train = 2000, n_val = 200, n_test = 200;
  std::string facts, checkpoint, data_path, param = "mu", values, seeds, claim_text, claim_events;
  std::vector<std::string> evidence;
  bool order_only = false, as_json = false;

  auto* gen = app.add_subcommand("generate", "synthesize a labelled benchmark");
  add_common(gen, c);
  gen->add_option("--subjects", subjects, "synthetic subjects when no fact file is given");
  gen->add_option("--facts", facts, "fact tuples (TSV or JSONL)");
  gen->add_option("--train", n_train, "training claims");
  gen->add_option("--val", n_val, "validation claims");
  gen->add_option("--test", n_test, "test claims");
  gen->add_flag("--order-only", order_only, "refuted claims only by order perturbation");

  auto* tr = app.add_subcommand("train", "train and keep the best validation checkpoint");
  add_common(tr, c);

  auto* ev = app.add_subcommand("evaluate", "macro/micro F1 with bucket tables");
  add_common(ev, c);
  ev->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  ev->add_option("--data", data_path, "records to evaluate (defaults to the config's test set)");

  auto* sw = app.add_subcommand("sweep", "sensitivity sweep over mu or k");
  add_common(sw, c);
  sw->add_option("--param", param, "mu or k")->check(CLI::IsMember({"mu", "k"}));
  sw->add_option("--values", values, "comma-separated values")->required();
  sw->add_option("--seeds", seeds, "comma-separated seeds (default: --seed)");

  auto* ab = app.add_subcommand("ablate", "full model against the three ablations");
  add_common(ab, c);

  auto* ve = app.add_subcommand("verify", "verify one claim and render the case-study table");
  add_common(ve, c);
  ve->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  ve->add_option("--claim", claim_text, "claim text");
  ve->add_option("--claim-events", claim_events, "JSONL of structured claim events (skips extraction)");
  ve->add_option("--evidence", evidence, "JSONL evidence files (events or {doc_id, sent_id, text})");
  ve->add_flag("--json", as_json, "print the result as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(c, subjects, n_train, n_val, n_test, facts, order_only);
    if (*tr) return cmd_train(c);
    if (*ev) return cmd_evaluate(c, checkpoint, data_path);
    if (*sw) return cmd_sweep(c, param, values, seeds);
    if (*ab) return cmd_ablate(c);
    if (*ve) return cmd_verify(c, checkpoint, claim_text, claim_events, evidence, as_json);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
