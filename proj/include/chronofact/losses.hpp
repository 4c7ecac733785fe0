#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "chronofact/autodiff.hpp"
#include "chronofact/core.hpp"
#include "chronofact/model.hpp"

namespace chronofact {

// Probabilities are floored here before any log.
inline constexpr double kProbFloor = 1e-6;
inline constexpr double kDefaultMu = 0.3;

struct LossBreakdown {
  double l_cross = 0.0;
  double l_soft = 0.0;
  double total = 0.0;
  double mu = kDefaultMu;
};

// -log(max(z[g], eps)). Throws ValidationError when g is outside z's labels.
double cross_entropy(Label g, const ProbDist& z);

// Sum of the per-event, order and claim cross-entropies. Throws
// ValidationError on missing or mismatched golds.
double loss_cross(std::span<const ProbDist> event_dists, const ProbDist& order_dist, const ProbDist& claim_dist,
                  const std::optional<ClaimGold>& gold);

// Soft version of "all events SUP and order SUP implies SUP":
// s = min of SUP masses, r = max of REF masses, nei = clamp(1 - s - r, 0, 1),
// renormalized. With arity 2 the result is normalize(s, r). Either input
// group may be empty, but not both.
ProbDist godel_aggregate(std::span<const ProbDist> event_dists, const std::optional<ProbDist>& order_dist,
                         std::size_t arity = 3);

// D_KL(z || z_soft) after flooring both at eps and renormalizing.
double kl_divergence(const ProbDist& z, const ProbDist& z_soft);

// (1 - mu) * l_cross + mu * l_soft; ConfigError unless 0 <= mu <= 1.
LossBreakdown total_loss(double l_cross, double l_soft, double mu = kDefaultMu);

namespace ad {

Var cross_entropy(Var z, Label g);
Var godel_aggregate(Graph& g, std::span<const Var> event_dists, std::optional<Var> order_dist, std::size_t arity);
Var kl_divergence(Var z, Var z_soft);

}  // namespace ad

struct LossVars {
  ad::Var l_cross;
  ad::Var l_soft;
  ad::Var total;
  LossBreakdown breakdown;
};

// Loss of one forward pass. Terms of ablated heads are left out of the
// cross-entropy sum and of the aggregation.
LossVars example_loss(ad::Graph& g, const ForwardOutputs& out, const ClaimGold& gold, double mu,
                      const ModelConfig& config);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // One in-place step using each parameter's grad. Returns false and leaves
  // everything untouched when any gradient is non-finite.
  bool step(std::span<Parameter* const> params);

  std::size_t steps() const { return t_; }
  std::size_t rejected() const { return rejected_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::size_t rejected_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace chronofact
