#include "chronofact/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "chronofact/chrono_time.hpp"
#include "chronofact/error.hpp"
#include "chronofact/serialize.hpp"
#include "chronofact/text.hpp"

namespace chronofact {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw ConfigError("'" + std::string(key) + "' expects a number, got '" + s + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  const std::string s = to_lower(v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("'" + std::string(key) + "' expects a boolean, got '" + std::string(v) + "'");
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

Label argmax(const ad::Var& v, std::size_t arity) {
  const auto& d = v.value().data();
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  return label_at(best, arity);
}

void check_golds(std::span<const DatasetRecord> records, const char* which) {
  for (const auto& r : records) {
    if (!r.claim.gold) throw ValidationError(std::string(which) + " record " + r.claim.id + " has no gold labels");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (k_seq < 1) throw ConfigError("k_seq must be >= 1");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("mu must lie in [0, 1]");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  model_config().validate();
}

ModelConfig RunConfig::model_config() const {
  ModelConfig c;
  c.dim = dim;
  c.fc_hidden = fc_hidden;
  c.lstm_hidden = lstm_hidden;
  c.lstm_layers = lstm_layers;
  c.n_max = n_max;
  c.k = k;
  c.k_seq = k_seq;
  c.arity = arity;
  c.ablation = ablation;
  return c;
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.encoder = EventEncoderHandle::toy(dim, encoder_seed);
  p.evidence_budget = evidence_budget;
  return p;
}

void RunConfig::set(std::string_view key_in, std::string_view value_in) {
  const std::string key = trim(key_in), value = trim(value_in);
  if (key == "arity") arity = parse_size(key, value);
  else if (key == "k") k = parse_size(key, value);
  else if (key == "k_seq") k_seq = parse_size(key, value);
  else if (key == "n_max") n_max = parse_size(key, value);
  else if (key == "dim") dim = parse_size(key, value);
  else if (key == "fc_hidden") fc_hidden = parse_size(key, value);
  else if (key == "lstm_hidden") lstm_hidden = parse_size(key, value);
  else if (key == "lstm_layers") lstm_layers = parse_size(key, value);
  else if (key == "mu") mu = parse_double(key, value);
  else if (key == "lr") lr = parse_double(key, value);
  else if (key == "batch_size") batch_size = parse_size(key, value);
  else if (key == "epochs") epochs = parse_size(key, value);
  else if (key == "seed") seed = parse_size(key, value);
  else if (key == "encoder_seed") encoder_seed = parse_size(key, value);
  else if (key == "evidence_budget") evidence_budget = parse_size(key, value);
  else if (key == "no_multilevel_attention") ablation.no_multilevel_attention = parse_bool(key, value);
  else if (key == "no_event_classifier") ablation.no_event_classifier = parse_bool(key, value);
  else if (key == "no_order_classifier") ablation.no_order_classifier = parse_bool(key, value);
  else if (key == "train") train_path = value;
  else if (key == "val") val_path = value;
  else if (key == "test") test_path = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig RunConfig::parse(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    base.set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
  }
  base.validate();
  return base;
}

RunConfig RunConfig::parse(std::string_view text) { return parse(text, RunConfig{}); }
RunConfig RunConfig::load(const std::string& path) { return load(path, RunConfig{}); }

RunConfig RunConfig::load(const std::string& path, RunConfig base) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return parse(text, std::move(base));
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  o << "arity = " << arity << "\nk = " << k << "\nk_seq = " << k_seq << "\nn_max = " << n_max << "\ndim = " << dim
    << "\nfc_hidden = " << fc_hidden << "\nlstm_hidden = " << lstm_hidden << "\nlstm_layers = " << lstm_layers
    << "\nmu = " << mu << "\nlr = " << lr << "\nbatch_size = " << batch_size << "\nepochs = " << epochs
    << "\nseed = " << seed << "\nencoder_seed = " << encoder_seed << "\nevidence_budget = " << evidence_budget
    << "\nno_multilevel_attention = " << ablation.no_multilevel_attention
    << "\nno_event_classifier = " << ablation.no_event_classifier
    << "\nno_order_classifier = " << ablation.no_order_classifier << '\n';
  if (!train_path.empty()) o << "train = " << train_path << '\n';
  if (!val_path.empty()) o << "val = " << val_path << '\n';
  if (!test_path.empty()) o << "test = " << test_path << '\n';
  return o.str();
}

void apply_ablation_flag(Ablation& a, std::string_view flag) {
  if (flag == "none" || flag == "full") a = {};
  else if (flag == "no_multilevel_attention") a.no_multilevel_attention = true;
  else if (flag == "no_event_classifier") a.no_event_classifier = true;
  else if (flag == "no_order_classifier") a.no_order_classifier = true;
  else throw ConfigError("unknown ablation flag '" + std::string(flag) + "'");
}

std::string ablation_name(const Ablation& a) {
  std::vector<std::string> parts;
  if (a.no_multilevel_attention) parts.emplace_back("no_multilevel_attention");
  if (a.no_event_classifier) parts.emplace_back("no_event_classifier");
  if (a.no_order_classifier) parts.emplace_back("no_order_classifier");
  return parts.empty() ? "full" : join(parts, "+");
}

std::string StepLog::to_json() const {
  nlohmann::json j{{"epoch", epoch}, {"step", step},       {"l_cross", loss.l_cross}, {"l_soft", loss.l_soft},
                   {"total", loss.total}, {"mu", loss.mu}, {"lr", lr}};
  return j.dump();
}

std::string EpochLog::to_json() const {
  nlohmann::json j{{"epoch", epoch}, {"train_accuracy", train_accuracy}, {"mean_total", mean_total}};
  j["val_macro_f1"] = val_macro_f1 ? nlohmann::json(*val_macro_f1) : nlohmann::json(nullptr);
  return j.dump();
}

std::vector<PreparedExample> prepare_records(std::span<const DatasetRecord> records, const PipelineConfig& pipeline) {
  std::vector<PreparedExample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(prepare_example(r.claim.events, r.evidence, pipeline));
  return out;
}

Evaluation evaluate_prepared(const ModelParams& params, std::span<const DatasetRecord> records,
                             std::span<const PreparedExample> prepared) {
  if (records.empty()) throw ValidationError("cannot evaluate an empty dataset");
  Evaluation ev;
  ev.results.reserve(records.size());
  for (const auto& ex : prepared) ev.results.push_back(verify_prepared(ex, params));
  ev.report = compute_metrics(records, ev.results, params.config.arity, params.config.ablation);
  return ev;
}

Evaluation evaluate(const ModelParams& params, std::span<const DatasetRecord> records, const PipelineConfig& pipeline) {
  if (records.empty()) throw ValidationError("cannot evaluate an empty dataset");
  check_golds(records, "test");
  for (const auto& r : records) {
    for (Label l : r.claim.gold->event_labels) {
      if (index_of(l) >= params.config.arity) throw ValidationError("dataset labels exceed the checkpoint arity");
    }
    if (index_of(r.claim.gold->claim_label) >= params.config.arity) {
      throw ValidationError("dataset labels exceed the checkpoint arity");
    }
  }
  const auto prepared = prepare_records(records, pipeline);
  return evaluate_prepared(params, records, prepared);
}

TrainResult train(const RunConfig& config, std::span<const DatasetRecord> train_set,
                  std::span<const DatasetRecord> val_set, std::ostream* log) {
  config.validate();
  if (train_set.empty()) throw ValidationError("training set is empty");
  check_golds(train_set, "training");
  check_golds(val_set, "validation");

  const ModelConfig mc = config.model_config();
  const PipelineConfig pipeline = config.pipeline();
  const auto train_ex = prepare_records(train_set, pipeline);
  const auto val_ex = prepare_records(val_set, pipeline);

  ModelParams params = ModelParams::init(mc, config.seed);
  auto plist = params.parameters();
  Adam adam({.lr = config.lr});
  std::mt19937_64 shuffle_rng(config.seed ^ 0x5eedf00dULL);

  TrainResult res;
  res.best = params;
  res.last_good = params;
  std::vector<std::size_t> order(train_ex.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs && !res.diverged; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    std::size_t correct = 0, seen = 0;
    double total_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size() && !res.diverged; begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      params.zero_grad();
      LossBreakdown acc{0.0, 0.0, 0.0, config.mu};
      try {
        for (std::size_t b = begin; b < end; ++b) {
          const std::size_t i = order[b];
          ad::Graph g;
          const auto out = forward(g, params, train_ex[i]);
          const auto loss = example_loss(g, out, *train_set[i].claim.gold, config.mu, mc);
          if (!std::isfinite(loss.breakdown.total)) throw TrainingDivergence("non-finite loss at step " + std::to_string(step + 1));
          g.backward(loss.total);
          acc.l_cross += loss.breakdown.l_cross;
          acc.l_soft += loss.breakdown.l_soft;
          acc.total += loss.breakdown.total;
          if (argmax(out.claim_dist, mc.arity) == train_set[i].claim.gold->claim_label) ++correct;
          ++seen;
        }
      } catch (const TrainingDivergence& e) {
        res.diverged = true;
        res.divergence = e.what();
        break;
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (Parameter* p : plist) {
        for (double& gv : p->grad.data()) gv *= inv;
      }
      if (!adam.step(plist)) {
        res.diverged = true;
        res.divergence = "non-finite gradient at step " + std::to_string(step + 1);
        break;
      }
      ++step;
      StepLog sl{epoch, step, {acc.l_cross * inv, acc.l_soft * inv, acc.total * inv, config.mu}, adam.config().lr};
      total_sum += acc.total;
      if (log) *log << sl.to_json() << '\n';
      res.steps.push_back(sl);
    }
    if (res.diverged) break;
    res.last_good = params;

    EpochLog el;
    el.epoch = epoch;
    el.train_accuracy = seen ? static_cast<double>(correct) / static_cast<double>(seen) : 0.0;
    el.mean_total = seen ? total_sum / static_cast<double>(seen) : 0.0;
    if (!val_set.empty()) {
      const double f1 = evaluate_prepared(params, val_set, val_ex).report.macro_f1;
      el.val_macro_f1 = f1;
      if (f1 > res.best_val_macro_f1) {
        res.best_val_macro_f1 = f1;
        res.best_epoch = epoch;
        res.best = params;
      }
    } else {
      res.best_epoch = epoch;
      res.best = params;
    }
    if (log) *log << el.to_json() << '\n';
    res.epochs.push_back(el);
  }
  if (res.diverged) {
    // Parameters were not touched by the failed step.
    res.last_good = params;
    if (res.best_epoch == 0) res.best = params;
    if (log) {
      *log << nlohmann::json{{"diverged", true}, {"reason", res.divergence}}.dump() << '\n';
    }
  }
  return res;
}

Datasets load_datasets(const RunConfig& config) {
  Datasets d;
  if (!config.train_path.empty()) d.train = read_records(config.train_path);
  if (!config.val_path.empty()) d.val = read_records(config.val_path);
  if (!config.test_path.empty()) d.test = read_records(config.test_path);
  return d;
}

std::vector<SweepRow> sweep(const RunConfig& base, std::string_view parameter, std::span<const double> values,
                            std::span<const std::uint64_t> seeds, const Datasets& data, std::ostream* log) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  if (parameter != "mu" && parameter != "k") throw ConfigError("sweep parameter must be mu or k");
  if (data.test.empty()) throw ValidationError("sweep needs a test set");
  std::vector<SweepRow> rows;
  for (double v : values) {
    RunConfig cfg = base;
    if (parameter == "mu") {
      cfg.mu = v;
    } else {
      if (v < 1.0 || v != std::floor(v)) throw ConfigError("k values must be positive integers");
      cfg.k = cfg.k_seq = static_cast<std::size_t>(v);
    }
    for (auto s : seeds) {
      cfg.seed = s;
      const auto tr = train(cfg, data.train, data.val, nullptr);
      if (tr.diverged) throw TrainingDivergence("sweep run diverged: " + tr.divergence);
      SweepRow row{std::string(parameter), v, s, evaluate(tr.best, data.test, cfg.pipeline()).report, tr.best_epoch};
      if (log) {
        *log << nlohmann::json{{"parameter", row.parameter}, {"value", v}, {"seed", s},
                               {"macro_f1", row.report.macro_f1}, {"accuracy", row.report.accuracy},
                               {"consistency_violation_rate", row.report.consistency_violation_rate}}
                    .dump()
             << '\n';
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream o;
  o << "parameter,value,seed,accuracy,macro_f1,micro_f1,consistency_violation_rate,best_epoch\n";
  for (const auto& r : rows) {
    o << r.parameter << ',' << r.value << ',' << r.seed << ',' << fmt(r.report.accuracy) << ','
      << fmt(r.report.macro_f1) << ',' << fmt(r.report.micro_f1) << ',' << fmt(r.report.consistency_violation_rate)
      << ',' << r.best_epoch << '\n';
  }
  return o.str();
}

std::string sweep_plot_csv(std::span<const SweepRow> rows) {
  struct Acc {
    double accuracy = 0, macro = 0, cvr = 0;
    std::size_t n = 0;
  };
  std::vector<std::pair<double, Acc>> by_value;
  for (const auto& r : rows) {
    auto it = std::find_if(by_value.begin(), by_value.end(), [&](const auto& p) { return p.first == r.value; });
    if (it == by_value.end()) {
      by_value.push_back({r.value, {}});
      it = by_value.end() - 1;
    }
    it->second.accuracy += r.report.accuracy;
    it->second.macro += r.report.macro_f1;
    it->second.cvr += r.report.consistency_violation_rate;
    ++it->second.n;
  }
  std::ostringstream o;
  o << (rows.empty() ? "value" : rows.front().parameter)
    << ",mean_accuracy,mean_macro_f1,mean_consistency_violation_rate,runs\n";
  for (const auto& [v, a] : by_value) {
    const double n = static_cast<double>(a.n);
    o << v << ',' << fmt(a.accuracy / n) << ',' << fmt(a.macro / n) << ',' << fmt(a.cvr / n) << ',' << a.n << '\n';
  }
  return o.str();
}

std::vector<AblationRow> ablate(const RunConfig& base, const Datasets& data, std::ostream* log) {
  if (data.test.empty()) throw ValidationError("ablation needs a test set");
  std::vector<Ablation> variants(4);
  variants[1].no_multilevel_attention = true;
  variants[2].no_event_classifier = true;
  variants[3].no_order_classifier = true;
  std::vector<AblationRow> rows;
  for (const auto& a : variants) {
    RunConfig cfg = base;
    cfg.ablation = a;
    const auto tr = train(cfg, data.train, data.val, nullptr);
    if (tr.diverged) throw TrainingDivergence(ablation_name(a) + " diverged: " + tr.divergence);
    AblationRow row{ablation_name(a), a, evaluate(tr.best, data.test, cfg.pipeline()).report, 0.0};
    row.delta_macro_f1 = rows.empty() ? 0.0 : row.report.macro_f1 - rows.front().report.macro_f1;
    if (log) {
      *log << nlohmann::json{{"variant", row.variant}, {"macro_f1", row.report.macro_f1},
                             {"delta_macro_f1", row.delta_macro_f1}}
                  .dump()
           << '\n';
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ablation_csv(std::span<const AblationRow> rows) {
  std::ostringstream o;
  o << "variant,macro_f1,micro_f1,delta_macro_f1,consistency_violation_rate\n";
  for (const auto& r : rows) {
    o << r.variant << ',' << fmt(r.report.macro_f1) << ',' << fmt(r.report.micro_f1) << ','
      << fmt(r.delta_macro_f1) << ',' << fmt(r.report.consistency_violation_rate) << '\n';
  }
  return o.str();
}

CaseStudy run_case_study(const Claim& claim, const EvidencePool& pool, const ModelParams& params,
                         const PipelineConfig& pipeline) {
  CaseStudy cs;
  cs.claim = claim;
  cs.example = prepare_example(claim.events, pool, pipeline);
  cs.result = verify_prepared(cs.example, params);
  return cs;
}

namespace {

std::string span_text(const std::optional<TimeSpan>& t) {
  if (!t) return "-";
  const std::string a = render_date(t->start_day(), t->granularity());
  const std::string b = render_date(t->end_day(), t->granularity());
  return a == b ? a : a + " to " + b;
}

std::string dist_text(const ProbDist& d) {
  std::string s = "[";
  for (std::size_t i = 0; i < d.arity(); ++i) s += (i ? " " : "") + fmt(d[i], 3);
  return s + "]";
}

}  // namespace

std::string render_case_study(const CaseStudy& cs) {
  const auto& r = cs.result;
  std::ostringstream o;
  if (!cs.claim.text.empty()) o << "Claim: " << cs.claim.text << "\n\n";
  o << "Claim events\n";
  o << std::left << std::setw(6) << "id" << std::setw(20) << "time" << std::setw(7) << "label" << "event\n";
  for (std::size_t i = 0; i < cs.example.claim_events.size(); ++i) {
    const auto& e = cs.example.claim_events[i];
    const std::string label = i < r.event_labels.size() ? std::string(to_string(r.event_labels[i])) : "-";
    o << std::setw(6) << e.id << std::setw(20) << span_text(e.time) << std::setw(7) << label << e.raw_text << '\n';
  }
  o << "\nEvidence events in chronological order\n";
  if (r.empty_evidence || cs.example.evidence.empty()) {
    o << "(no evidence: empty evidence pool)\n";
  } else {
    const auto& ev = cs.example.evidence;
    std::vector<double> rel(ev.size(), 0.0);
    for (std::size_t j = 0; j < r.relevance.size() && j < rel.size(); ++j) rel[j] = r.relevance[j];
    o << std::setw(6) << "rank" << std::setw(20) << "time" << std::setw(11) << "relevance" << "event\n";
    const auto perm = chronological_sort(ev.events);
    for (std::size_t rank = 0; rank < perm.size(); ++rank) {
      const auto& e = ev.events[perm[rank]];
      o << std::setw(6) << rank + 1 << std::setw(20) << span_text(e.time) << std::setw(11) << fmt(rel[perm[rank]])
        << e.raw_text << '\n';
    }
  }
  o << "\nOrder label: " << to_string(r.order_label) << "  " << dist_text(r.order_dist) << '\n';
  o << "Final label: " << to_string(r.claim_label) << "  " << dist_text(r.claim_dist) << '\n';
  return o.str();
}

}  // namespace chronofact
