#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronofact/datagen.hpp"
#include "chronofact/losses.hpp"
#include "chronofact/metrics.hpp"
#include "chronofact/model.hpp"

namespace chronofact {

struct RunConfig {
  std::size_t arity = 2;
  std::size_t k = 3;
  std::size_t k_seq = 3;
  std::size_t n_max = 8;
  std::size_t dim = 64;
  std::size_t fc_hidden = 192;
  std::size_t lstm_hidden = 32;
  std::size_t lstm_layers = 2;
  double mu = kDefaultMu;
  double lr = 1e-3;
  std::size_t batch_size = 8;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  std::uint64_t encoder_seed = 0;
  std::size_t evidence_budget = 30;
  Ablation ablation;
  std::string train_path;
  std::string val_path;
  std::string test_path;

  // Throws ConfigError.
  void validate() const;
  ModelConfig model_config() const;
  PipelineConfig pipeline() const;

  // Flat "key = value" lines, '#' comments. Unknown keys are a ConfigError.
  static RunConfig parse(std::string_view text, RunConfig base);
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path, RunConfig base);
  static RunConfig load(const std::string& path);
  void set(std::string_view key, std::string_view value);
  std::string to_text() const;
};

// Applies a CLI ablation flag: "none", "no_multilevel_attention",
// "no_event_classifier" or "no_order_classifier".
void apply_ablation_flag(Ablation& ablation, std::string_view flag);
std::string ablation_name(const Ablation& ablation);

struct StepLog {
  std::size_t epoch = 0;
  std::size_t step = 0;
  LossBreakdown loss;
  double lr = 0.0;

  std::string to_json() const;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_accuracy = 0.0;  // claim labels seen during the epoch's updates
  double mean_total = 0.0;
  std::optional<double> val_macro_f1;

  std::string to_json() const;
};

struct TrainResult {
  ModelParams best;       // best validation macro F1, or the final state without validation data
  ModelParams last_good;  // state after the last accepted update
  std::size_t best_epoch = 0;
  double best_val_macro_f1 = -1.0;
  std::vector<StepLog> steps;
  std::vector<EpochLog> epochs;
  bool diverged = false;
  std::string divergence;
};

std::vector<PreparedExample> prepare_records(std::span<const DatasetRecord> records, const PipelineConfig& pipeline);

// Adam on batch-averaged gradients, reshuffling each epoch from the seed.
// Divergence stops training and keeps the last good parameters. Each step
// and epoch is written as one JSON line to `log` when given.
TrainResult train(const RunConfig& config, std::span<const DatasetRecord> train_set,
                  std::span<const DatasetRecord> val_set, std::ostream* log = nullptr);

struct Evaluation {
  MetricsReport report;
  std::vector<VerificationResult> results;
};

Evaluation evaluate(const ModelParams& params, std::span<const DatasetRecord> records, const PipelineConfig& pipeline);
Evaluation evaluate_prepared(const ModelParams& params, std::span<const DatasetRecord> records,
                             std::span<const PreparedExample> prepared);

struct Datasets {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> val;
  std::vector<DatasetRecord> test;
};

Datasets load_datasets(const RunConfig& config);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  std::uint64_t seed = 0;
  MetricsReport report;
  std::size_t best_epoch = 0;
};

// Trains and evaluates once per (value, seed). "k" sets both k and k_seq.
std::vector<SweepRow> sweep(const RunConfig& base, std::string_view parameter, std::span<const double> values,
                            std::span<const std::uint64_t> seeds, const Datasets& data, std::ostream* log = nullptr);
// One row per run.
std::string sweep_csv(std::span<const SweepRow> rows);
// Seed means per value, the plot data.
std::string sweep_plot_csv(std::span<const SweepRow> rows);

struct AblationRow {
  std::string variant;
  Ablation ablation;
  MetricsReport report;
  double delta_macro_f1 = 0.0;  // variant minus full model
};

// Full model first, then the three single-flag variants, same seed and data.
std::vector<AblationRow> ablate(const RunConfig& base, const Datasets& data, std::ostream* log = nullptr);
std::string ablation_csv(std::span<const AblationRow> rows);

struct CaseStudy {
  Claim claim;
  PreparedExample example;
  VerificationResult result;
};

CaseStudy run_case_study(const Claim& claim, const EvidencePool& pool, const ModelParams& params,
                         const PipelineConfig& pipeline);

// Claim events with their labels, evidence in chronological order, order
// label and final label.
std::string render_case_study(const CaseStudy& study);

}  // namespace chronofact
