#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "chronofact/autodiff.hpp"
#include "chronofact/encoder.hpp"
#include "chronofact/tensor.hpp"

namespace chronofact {

// One learned dim x dim matrix per attention level, applied before cosine.
struct AttentionProjection {
  Parameter token;
  Parameter event;
  Parameter time;

  static AttentionProjection identity(std::size_t dim);
  std::size_t dim() const { return token.value.rows(); }
};

// Scores for every (claim event i, evidence event j) pair, n x m.
struct AttentionMatrix {
  std::size_t n = 0;
  std::size_t m = 0;
  Tensor alpha;  // token level
  Tensor beta;   // event level
  Tensor gamma;  // time level, 0 where absent
  Tensor omega;
  std::vector<double> relevance;  // tanh of the column sums of omega
  std::vector<char> time_present;  // per pair; 0 means the 2-level fallback was used
  std::vector<char> zero_norm;     // per pair; some projected vector had norm 0

  bool has_time(std::size_t i, std::size_t j) const { return time_present[i * m + j] != 0; }
};

struct AttentionOptions {
  // Replace every omega by 1 (the attention-free variant).
  bool unit_omega = false;
};

// Differentiable scores: omega[i * m + j] and relevance[j] are 1 x 1 nodes.
struct AttentionVars {
  AttentionMatrix values;
  std::vector<ad::Var> omega;
  std::vector<ad::Var> relevance;
};

AttentionVars attend(ad::Graph& g, std::span<const EventEncoding> claims, std::span<const EventEncoding> evidence,
                     AttentionProjection& proj, const AttentionOptions& options = {});

// Mean cosine over all projected token pairs.
double token_level(const EventEncoding& c, const EventEncoding& e, const AttentionProjection& proj);
// Cosine of the projected CLS vectors.
double event_level(const EventEncoding& c, const EventEncoding& e, const AttentionProjection& proj);
// Cosine of the projected date vectors; nullopt unless both are dated.
std::optional<double> time_level(const EventEncoding& c, const EventEncoding& e, const AttentionProjection& proj);

// Throws ValidationError when either side is empty.
AttentionMatrix multi_level_scores(std::span<const EventEncoding> claims, std::span<const EventEncoding> evidence,
                                   const AttentionProjection& proj, const AttentionOptions& options = {});

// Indices of the k largest omega in row claim_index, descending, ties to the
// lower index. Returns all m indices when m < k.
std::vector<std::size_t> top_k(const AttentionMatrix& matrix, std::size_t claim_index, std::size_t k);

// CSV with one row per pair: claim,evidence,alpha,beta,gamma,omega,time_present,zero_norm
void write_attention_csv(std::ostream& out, const AttentionMatrix& matrix);

}  // namespace chronofact
