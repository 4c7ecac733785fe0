#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronofact/attention.hpp"
#include "chronofact/autodiff.hpp"
#include "chronofact/core.hpp"
#include "chronofact/encoder.hpp"

namespace chronofact {

struct Ablation {
  bool no_multilevel_attention = false;  // every omega is 1
  bool no_event_classifier = false;      // claim head drops the per-event distributions
  bool no_order_classifier = false;      // claim head drops z^o, evidence stays in relevance order

  bool any() const { return no_multilevel_attention || no_event_classifier || no_order_classifier; }
  friend bool operator==(const Ablation&, const Ablation&) = default;
};

struct ModelConfig {
  std::size_t dim = 64;
  std::size_t fc_hidden = 192;
  std::size_t lstm_hidden = 32;
  std::size_t lstm_layers = 2;
  std::size_t n_max = 8;
  std::size_t k = 3;      // evidence per claim event
  std::size_t k_seq = 3;  // evidence sequence length for the order and claim heads
  std::size_t arity = 2;
  Ablation ablation;

  // Throws ConfigError on inconsistent values.
  void validate() const;
  std::size_t event_input_dim() const { return (k + 1) * dim; }
  std::size_t claim_input_dim() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct Dense {
  Parameter w;  // out x in
  Parameter b;  // 1 x out
};

// One direction of one LSTM layer.
struct LstmWeights {
  Parameter wx;  // 4H x in
  Parameter wh;  // 4H x H
  Parameter b;   // 1 x 4H
};

struct BiLstm {
  std::vector<LstmWeights> fwd;
  std::vector<LstmWeights> bwd;
};

struct ModelParams {
  ModelConfig config;
  AttentionProjection attention;
  Dense fc1, fc2;  // claim-event head
  BiLstm claim_lstm, evidence_lstm;
  Dense fc3, fc4;  // order head
  Dense fc5, fc6;  // claim head

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for dense and LSTM weights;
  // attention projections start at the identity.
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);
  // Everything zero, projections included.
  static ModelParams zeros(const ModelConfig& config);

  // Declared order, which is also the checkpoint order.
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();
};

// Checkpoint: "CFMK", u32 version, u32 dim, fc_hidden, lstm_hidden,
// lstm_layers, n_max, k, k_seq, arity, u8 ablation bits, u32 parameter
// count, then per parameter {u32 name length, name, u32 rows, u32 cols,
// float64 data}, then a u64 FNV-1a checksum of every preceding byte.
// Little-endian throughout.
std::vector<std::uint8_t> serialize_checkpoint(const ModelParams& params);
ModelParams deserialize_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);
std::uint64_t checkpoint_checksum(const ModelParams& params);

// Claim and evidence sequences with padding masks (1 = real entry).
struct SequenceReps {
  std::vector<std::vector<double>> seq_c;
  std::vector<std::vector<double>> seq_e;
  std::vector<char> mask_c;
  std::vector<char> mask_e;
};

// Graph-level heads.
namespace heads {

// cls_c followed by weights[t] * topk[t] in the given order, zero blocks up to k.
ad::Var build_u(ad::Graph& g, ad::Var cls_c, std::span<const ad::Var> topk, std::span<const ad::Var> weights,
                std::size_t k);
ad::Var claim_event_head(ad::Graph& g, ModelParams& p, ad::Var u);
// [final forward hidden | final backward hidden] of the top layer; zeros for
// an empty sequence.
ad::Var bilstm(ad::Graph& g, BiLstm& lstm, std::size_t hidden, std::span<const ad::Var> seq);
ad::Var order_head(ad::Graph& g, ModelParams& p, std::span<const ad::Var> seq_c, std::span<const ad::Var> seq_e);
ad::Var claim_head_input(ad::Graph& g, const ModelConfig& config, std::span<const ad::Var> seq_c,
                         std::span<const ad::Var> seq_e, std::span<const ad::Var> event_dists,
                         std::optional<ad::Var> order_dist);
ad::Var claim_head(ad::Graph& g, ModelParams& p, ad::Var input);

}  // namespace heads

// Value-level heads used for inspection and tests.
std::vector<double> build_u(const EventEncoding& c, std::span<const EventEncoding> topk,
                            std::span<const double> weights, std::size_t k);
ProbDist claim_event_head(std::span<const double> u, const ModelParams& params);
ProbDist order_head(const SequenceReps& seq, const ModelParams& params);
std::vector<double> claim_head_input(const SequenceReps& seq, std::span<const ProbDist> event_dists,
                                     const std::optional<ProbDist>& order_dist, const ModelConfig& config);
ProbDist claim_head(const SequenceReps& seq, std::span<const ProbDist> event_dists,
                    const std::optional<ProbDist>& order_dist, const ModelParams& params);

struct PipelineConfig {
  EventEncoderHandle encoder = EventEncoderHandle::toy(64, 0);
  std::size_t evidence_budget = 30;
};

// Frozen inputs of one claim: pre-scored evidence and their encodings.
struct PreparedExample {
  std::vector<Event> claim_events;
  EvidencePool evidence;
  std::vector<EventEncoding> claim_enc;
  std::vector<EventEncoding> evidence_enc;
  DayIndex reference_day = 0;
  bool anchored = false;  // false when nothing was dated
};

PreparedExample prepare_example(std::span<const Event> claim_events, const EvidencePool& pool,
                                const PipelineConfig& pipeline);

struct ForwardOutputs {
  std::vector<ad::Var> event_dists;  // empty under no_event_classifier
  std::optional<ad::Var> order_dist;  // absent under no_order_classifier
  ad::Var claim_dist;
  ad::Var claim_input;
  std::optional<AttentionVars> attention;  // absent for an empty evidence pool
  std::vector<std::size_t> evidence_order;
  bool empty_evidence = false;
};

ForwardOutputs forward(ad::Graph& g, ModelParams& params, const PreparedExample& example);

// Shared conversion from a forward pass to the public result.
VerificationResult to_result(const ForwardOutputs& out, const PreparedExample& example, const ModelConfig& config);

// Full pipeline: pre-score, encode, attend, classify.
VerificationResult verify_claim(const Claim& claim, const EvidencePool& pool, const ModelParams& params,
                                const PipelineConfig& pipeline);
VerificationResult verify_prepared(const PreparedExample& example, const ModelParams& params);

}  // namespace chronofact
