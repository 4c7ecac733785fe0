#include "chronofact/losses.hpp"

#include <cmath>

#include "chronofact/error.hpp"

namespace chronofact {
namespace ad {

Var cross_entropy(Var z, Label g) {
  const std::size_t i = index_of(g);
  if (i >= z.cols()) throw ValidationError("gold label outside the distribution's label set");
  return scale(log(floor_at(element(z, i), kProbFloor)), -1.0);
}

Var godel_aggregate(Graph& g, std::span<const Var> event_dists, std::optional<Var> order_dist, std::size_t arity) {
  if (arity != 2 && arity != 3) throw ValidationError("aggregation arity must be 2 or 3");
  std::vector<Var> sup, ref;
  for (const Var& z : event_dists) {
    sup.push_back(element(z, 0));
    ref.push_back(element(z, 1));
  }
  if (order_dist) {
    sup.push_back(element(*order_dist, 0));
    ref.push_back(element(*order_dist, 1));
  }
  if (sup.empty()) throw ValidationError("aggregation needs at least one distribution");
  const Var s = minimum(sup);
  const Var r = maximum(ref);
  std::vector<Var> parts{s, r};
  if (arity == 3) {
    const Var one = g.constant(Tensor(1, 1, 1.0));
    parts.push_back(clamp(sub(sub(one, s), r), 0.0, 1.0));
  }
  const Var v = stack(parts);
  return divide(v, sum(v));
}

namespace {

Var floored(Var z) {
  const Var f = floor_at(z, kProbFloor);
  return divide(f, sum(f));
}

}  // namespace

Var kl_divergence(Var z, Var z_soft) {
  if (!z.value().same_shape(z_soft.value())) throw ValidationError("KL arguments differ in arity");
  const Var p = floored(z);
  const Var q = floored(z_soft);
  return sum(mul(p, sub(log(p), log(q))));
}

}  // namespace ad

namespace {

ad::Var constant_dist(ad::Graph& g, const ProbDist& d) {
  return g.constant(Tensor::row_vector({d.probs().begin(), d.probs().end()}));
}

}  // namespace

double cross_entropy(Label g, const ProbDist& z) {
  ad::Graph graph;
  return ad::cross_entropy(constant_dist(graph, z), g).scalar();
}

double loss_cross(std::span<const ProbDist> event_dists, const ProbDist& order_dist, const ProbDist& claim_dist,
                  const std::optional<ClaimGold>& gold) {
  if (!gold) throw ValidationError("missing gold labels");
  if (gold->event_labels.size() != event_dists.size()) throw ValidationError("one gold label per claim event expected");
  double total = 0.0;
  for (std::size_t i = 0; i < event_dists.size(); ++i) total += cross_entropy(gold->event_labels[i], event_dists[i]);
  total += cross_entropy(gold->order_label, order_dist);
  total += cross_entropy(gold->claim_label, claim_dist);
  return total;
}

ProbDist godel_aggregate(std::span<const ProbDist> event_dists, const std::optional<ProbDist>& order_dist,
                         std::size_t arity) {
  ad::Graph g;
  std::vector<ad::Var> ev;
  for (const auto& d : event_dists) ev.push_back(constant_dist(g, d));
  std::optional<ad::Var> o;
  if (order_dist) o = constant_dist(g, *order_dist);
  return ProbDist::from(ad::godel_aggregate(g, ev, o, arity).value().data());
}

double kl_divergence(const ProbDist& z, const ProbDist& z_soft) {
  if (z.arity() != z_soft.arity()) throw ValidationError("KL arguments differ in arity");
  ad::Graph g;
  return ad::kl_divergence(constant_dist(g, z), constant_dist(g, z_soft)).scalar();
}

LossBreakdown total_loss(double l_cross, double l_soft, double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("mu must lie in [0, 1]");
  return {l_cross, l_soft, (1.0 - mu) * l_cross + mu * l_soft, mu};
}

LossVars example_loss(ad::Graph& g, const ForwardOutputs& out, const ClaimGold& gold, double mu,
                      const ModelConfig& config) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("mu must lie in [0, 1]");
  std::vector<ad::Var> terms;
  if (!config.ablation.no_event_classifier) {
    if (gold.event_labels.size() != out.event_dists.size()) {
      throw ValidationError("one gold label per claim event expected");
    }
    for (std::size_t i = 0; i < out.event_dists.size(); ++i) {
      terms.push_back(ad::cross_entropy(out.event_dists[i], gold.event_labels[i]));
    }
  }
  if (out.order_dist) terms.push_back(ad::cross_entropy(*out.order_dist, gold.order_label));
  terms.push_back(ad::cross_entropy(out.claim_dist, gold.claim_label));

  LossVars lv;
  lv.l_cross = ad::sum(ad::stack(terms));
  if (out.event_dists.empty() && !out.order_dist) {
    lv.l_soft = g.constant(Tensor(1, 1, 0.0));
  } else {
    const ad::Var z_soft = ad::godel_aggregate(g, out.event_dists, out.order_dist, config.arity);
    lv.l_soft = ad::kl_divergence(out.claim_dist, z_soft);
  }
  lv.total = ad::add(ad::scale(lv.l_cross, 1.0 - mu), ad::scale(lv.l_soft, mu));
  lv.breakdown = {lv.l_cross.scalar(), lv.l_soft.scalar(), lv.total.scalar(), mu};
  return lv;
}

bool Adam::step(std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    if (!p->grad.same_shape(p->value)) throw ShapeError("gradient shape differs from parameter '" + p->name + "'");
    for (double g : p->grad.data()) {
      if (!std::isfinite(g)) {
        ++rejected_;
        return false;
      }
    }
  }
  if (m_.empty()) {
    for (const Parameter* p : params) {
      m_.emplace_back(p->value.rows(), p->value.cols());
      v_.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (m_.size() != params.size()) throw ShapeError("optimizer state belongs to a different parameter list");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& w = params[k]->value.data();
    const auto& g = params[k]->grad.data();
    auto& m = m_[k].data();
    auto& v = v_[k].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      w[i] -= config_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.eps);
    }
  }
  return true;
}

}  // namespace chronofact
