#include "chronofact/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chronofact/error.hpp"

namespace chronofact {
namespace {

struct Projected {
  ad::Var tokens;
  ad::Var cls;
  std::optional<ad::Var> date;
  bool zero_token = false;
  bool zero_cls = false;
  bool zero_date = false;
};

struct ProjVars {
  ad::Var token, event, time;
};

bool has_zero_row(const Tensor& t) {
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (norm(t.row(r)) == 0.0) return true;
  }
  return false;
}

Projected project(ad::Graph& g, const EventEncoding& enc, const ProjVars& w) {
  if (enc.tokens.rows() == 0) throw ValidationError("encoding has no tokens");
  Projected p;
  p.tokens = ad::linear(g.constant(enc.tokens), w.token);
  p.cls = ad::linear(g.constant(Tensor::row_vector(enc.cls)), w.event);
  p.zero_token = has_zero_row(p.tokens.value());
  p.zero_cls = norm(p.cls.value().data()) == 0.0;
  if (enc.date) {
    p.date = ad::linear(g.constant(Tensor::row_vector(*enc.date)), w.time);
    p.zero_date = norm(p.date->value().data()) == 0.0;
  }
  return p;
}

AttentionVars attend_impl(ad::Graph& g, std::span<const EventEncoding> claims, std::span<const EventEncoding> evidence,
                          const ProjVars& w, const AttentionOptions& options) {
  if (claims.empty() || evidence.empty()) throw ValidationError("attention needs claim and evidence events");
  const std::size_t n = claims.size(), m = evidence.size();
  std::vector<Projected> pc, pe;
  for (const auto& c : claims) pc.push_back(project(g, c, w));
  for (const auto& e : evidence) pe.push_back(project(g, e, w));

  AttentionVars out;
  AttentionMatrix& a = out.values;
  a.n = n;
  a.m = m;
  a.alpha = Tensor(n, m);
  a.beta = Tensor(n, m);
  a.gamma = Tensor(n, m);
  a.omega = Tensor(n, m);
  a.time_present.assign(n * m, 0);
  a.zero_norm.assign(n * m, 0);
  out.omega.resize(n * m);

  const ad::Var one = g.constant(Tensor(1, 1, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t idx = i * m + j;
      ad::Var alpha = ad::pairwise_cosine_mean(pc[i].tokens, pe[j].tokens);
      ad::Var beta = ad::cosine(pc[i].cls, pe[j].cls);
      bool zero = pc[i].zero_token || pe[j].zero_token || pc[i].zero_cls || pe[j].zero_cls;
      a.alpha(i, j) = alpha.scalar();
      a.beta(i, j) = beta.scalar();
      ad::Var omega;
      if (pc[i].date && pe[j].date) {
        ad::Var gamma = ad::cosine(*pc[i].date, *pe[j].date);
        zero = zero || pc[i].zero_date || pe[j].zero_date;
        a.gamma(i, j) = gamma.scalar();
        a.time_present[idx] = 1;
        omega = ad::scale(ad::add(ad::add(alpha, beta), gamma), 1.0 / 3.0);
      } else {
        omega = ad::scale(ad::add(alpha, beta), 0.5);
      }
      a.zero_norm[idx] = zero ? 1 : 0;
      if (options.unit_omega) omega = one;
      out.omega[idx] = omega;
      a.omega(i, j) = omega.scalar();
    }
  }
  a.relevance.resize(m);
  out.relevance.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<ad::Var> column;
    for (std::size_t i = 0; i < n; ++i) column.push_back(out.omega[i * m + j]);
    out.relevance[j] = ad::tanh(ad::sum(ad::stack(column)));
    a.relevance[j] = out.relevance[j].scalar();
  }
  return out;
}

ProjVars constant_vars(ad::Graph& g, const AttentionProjection& proj) {
  return {g.constant(proj.token.value), g.constant(proj.event.value), g.constant(proj.time.value)};
}

}  // namespace

AttentionProjection AttentionProjection::identity(std::size_t dim) {
  Tensor eye(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) eye(i, i) = 1.0;
  return {Parameter("attn.token", eye), Parameter("attn.event", eye), Parameter("attn.time", eye)};
}

AttentionVars attend(ad::Graph& g, std::span<const EventEncoding> claims, std::span<const EventEncoding> evidence,
                     AttentionProjection& proj, const AttentionOptions& options) {
  const ProjVars w{g.parameter(proj.token), g.parameter(proj.event), g.parameter(proj.time)};
  return attend_impl(g, claims, evidence, w, options);
}

double token_level(const EventEncoding& c, const EventEncoding& e, const AttentionProjection& proj) {
  ad::Graph g;
  const auto w = constant_vars(g, proj);
  return ad::pairwise_cosine_mean(project(g, c, w).tokens, project(g, e, w).tokens).scalar();
}

double event_level(const EventEncoding& c, const EventEncoding& e, const AttentionProjection& proj) {
  ad::Graph g;
  const auto w = constant_vars(g, proj);
  return ad::cosine(project(g, c, w).cls, project(g, e, w).cls).scalar();
}

std::optional<double> time_level(const EventEncoding& c, const EventEncoding& e, const AttentionProjection& proj) {
  if (!c.date || !e.date) return std::nullopt;
  ad::Graph g;
  const auto w = constant_vars(g, proj);
  return ad::cosine(*project(g, c, w).date, *project(g, e, w).date).scalar();
}

AttentionMatrix multi_level_scores(std::span<const EventEncoding> claims, std::span<const EventEncoding> evidence,
                                   const AttentionProjection& proj, const AttentionOptions& options) {
  ad::Graph g;
  return attend_impl(g, claims, evidence, constant_vars(g, proj), options).values;
}

std::vector<std::size_t> top_k(const AttentionMatrix& matrix, std::size_t claim_index, std::size_t k) {
  if (k < 1) throw ConfigError("top-k needs k >= 1");
  if (claim_index >= matrix.n) throw ValidationError("claim index out of range");
  std::vector<std::size_t> idx(matrix.m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return matrix.omega(claim_index, a) > matrix.omega(claim_index, b);
  });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

void write_attention_csv(std::ostream& out, const AttentionMatrix& a) {
  out << "claim,evidence,alpha,beta,gamma,omega,time_present,zero_norm\n";
  out.precision(10);
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < a.m; ++j) {
      out << i << ',' << j << ',' << a.alpha(i, j) << ',' << a.beta(i, j) << ',';
      if (a.has_time(i, j)) out << a.gamma(i, j);
      out << ',' << a.omega(i, j) << ',' << int(a.time_present[i * a.m + j]) << ',' << int(a.zero_norm[i * a.m + j])
          << '\n';
    }
  }
}

}  // namespace chronofact
