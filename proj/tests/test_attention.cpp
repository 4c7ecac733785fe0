#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "chronofact/attention.hpp"
#include "chronofact/error.hpp"
#include "grad_check.hpp"

using namespace chronofact;

namespace {

EventEncoding make_enc(const std::vector<std::vector<double>>& rows, std::optional<std::vector<double>> date = {}) {
  EventEncoding e;
  e.dim = rows.front().size();
  e.tokens = Tensor(rows.size(), e.dim);
  e.cls.assign(e.dim, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < e.dim; ++c) {
      e.tokens(r, c) = rows[r][c];
      e.cls[c] += rows[r][c] / static_cast<double>(rows.size());
    }
  }
  e.date = std::move(date);
  return e;
}

EventEncoding random_enc(std::mt19937_64& rng, std::size_t dim, bool dated) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 4);
  std::vector<std::vector<double>> rows(len(rng), std::vector<double>(dim));
  for (auto& r : rows) {
    for (auto& x : r) x = n(rng);
  }
  std::optional<std::vector<double>> date;
  if (dated) {
    date.emplace(dim);
    for (auto& x : *date) x = n(rng);
  }
  return make_enc(rows, date);
}

EventEncoding scaled(const EventEncoding& e, double lambda) {
  EventEncoding s = e;
  for (auto& x : s.tokens.data()) x *= lambda;
  for (auto& x : s.cls) x *= lambda;
  if (s.date) {
    for (auto& x : *s.date) x *= lambda;
  }
  return s;
}

}  // namespace

TEST(TokenLevel, Examples) {
  const auto proj = AttentionProjection::identity(2);
  const auto two = make_enc({{1, 0}, {0, 1}});
  EXPECT_NEAR(token_level(two, two, proj), 0.5, 1e-12);
  const auto a = make_enc({{1, 0, 0}}), b = make_enc({{0, 1, 0}, {0, 0, 1}});
  EXPECT_NEAR(token_level(a, b, AttentionProjection::identity(3)), 0.0, 1e-12);
  const auto one = make_enc({{0.3, -0.4}});
  EXPECT_NEAR(token_level(one, one, proj), 1.0, 1e-12);
}

TEST(TokenLevel, SymmetricUnderSharedProjection) {
  std::mt19937_64 rng(2);
  auto proj = AttentionProjection::identity(6);
  std::normal_distribution<double> n(0, 1);
  for (auto& x : proj.token.value.data()) x += 0.3 * n(rng);
  for (int t = 0; t < 50; ++t) {
    const auto c = random_enc(rng, 6, false), e = random_enc(rng, 6, false);
    EXPECT_NEAR(token_level(c, e, proj), token_level(e, c, proj), 1e-12);
  }
}

TEST(EventLevel, Examples) {
  const auto proj = AttentionProjection::identity(2);
  const auto a = make_enc({{1, 0}});
  EXPECT_NEAR(event_level(a, a, proj), 1.0, 1e-12);
  EXPECT_NEAR(event_level(a, make_enc({{-1, 0}}), proj), -1.0, 1e-12);
  EXPECT_NEAR(event_level(a, make_enc({{0.5, std::sqrt(3.0) / 2.0}}), proj), 0.5, 1e-12);
}

TEST(TimeLevel, Examples) {
  const auto proj = AttentionProjection::identity(4);
  const auto u = make_enc({{1, 0, 0, 0}});
  EXPECT_FALSE(time_level(u, u, proj));
  const std::vector<double> d0 = {0.1, 1.2, 0.3, 1.0};
  const auto a = make_enc({{1, 0, 0, 0}}, d0);
  EXPECT_FALSE(time_level(a, u, proj));
  EXPECT_NEAR(*time_level(a, a, proj), 1.0, 1e-12);
  // pe(0) against pe(900 days / 30) on equal pooled date rows
  std::vector<double> late = {0.1 + std::sin(30.0), 0.2 + std::cos(30.0), 0.3 + std::sin(0.3), 0.4 + std::cos(0.3)};
  std::vector<double> early = {0.1 + 0.0, 0.2 + 1.0, 0.3 + 0.0, 0.4 + 1.0};
  EXPECT_LT(*time_level(make_enc({{1, 0, 0, 0}}, early), make_enc({{1, 0, 0, 0}}, late), proj), 1.0 - 1e-6);
}

TEST(MultiLevel, OmegaIsMeanOfAvailableLevels) {
  std::mt19937_64 rng(3);
  const auto proj = AttentionProjection::identity(5);
  std::vector<EventEncoding> claims = {random_enc(rng, 5, true), random_enc(rng, 5, false)};
  std::vector<EventEncoding> ev = {random_enc(rng, 5, true), random_enc(rng, 5, false), random_enc(rng, 5, true)};
  const auto m = multi_level_scores(claims, ev, proj);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double a = token_level(claims[i], ev[j], proj), b = event_level(claims[i], ev[j], proj);
      const auto g = time_level(claims[i], ev[j], proj);
      EXPECT_NEAR(m.alpha(i, j), a, 1e-12);
      EXPECT_NEAR(m.beta(i, j), b, 1e-12);
      EXPECT_EQ(m.has_time(i, j), g.has_value());
      const double expect = g ? (a + b + *g) / 3.0 : (a + b) / 2.0;
      EXPECT_NEAR(m.omega(i, j), expect, 1e-12);
    }
  }
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(m.relevance[j], std::tanh(m.omega(0, j) + m.omega(1, j)), 1e-12);
  }
}

TEST(MultiLevel, HandExamples) {
  EXPECT_NEAR((0.9 + 0.6 + 0.3) / 3.0, 0.6, 1e-15);
  EXPECT_NEAR(std::tanh(0.5 + 0.3), 0.66404, 1e-5);
  // orthogonal pair with orthogonal dates gives a zero column
  const auto proj = AttentionProjection::identity(2);
  std::vector<EventEncoding> c = {make_enc({{1, 0}}, std::vector<double>{1, 0})};
  std::vector<EventEncoding> e = {make_enc({{0, 1}}, std::vector<double>{0, 1})};
  const auto m = multi_level_scores(c, e, proj);
  EXPECT_EQ(m.omega(0, 0), 0.0);
  EXPECT_EQ(m.relevance[0], 0.0);
}

TEST(MultiLevel, EmptyInputsRejected) {
  std::mt19937_64 rng(1);
  std::vector<EventEncoding> c = {random_enc(rng, 3, false)};
  EXPECT_THROW(multi_level_scores(c, {}, AttentionProjection::identity(3)), ValidationError);
  EXPECT_THROW(multi_level_scores({}, c, AttentionProjection::identity(3)), ValidationError);
}

TEST(MultiLevel, ScaleInvarianceAndBounds) {
  std::mt19937_64 rng(4);
  const auto proj = AttentionProjection::identity(6);
  for (int t = 0; t < 100; ++t) {
    std::vector<EventEncoding> c = {random_enc(rng, 6, t % 2 == 0), random_enc(rng, 6, true)};
    std::vector<EventEncoding> e = {random_enc(rng, 6, true), random_enc(rng, 6, t % 3 == 0)};
    const auto base = multi_level_scores(c, e, proj);
    for (double lambda : {0.1, 10.0}) {
      std::vector<EventEncoding> cs = {scaled(c[0], lambda), scaled(c[1], lambda)};
      const auto s = multi_level_scores(cs, e, proj);
      for (std::size_t i = 0; i < base.omega.size(); ++i) {
        EXPECT_NEAR(s.alpha[i], base.alpha[i], 1e-6);
        EXPECT_NEAR(s.beta[i], base.beta[i], 1e-6);
        EXPECT_NEAR(s.gamma[i], base.gamma[i], 1e-6);
        EXPECT_NEAR(s.omega[i], base.omega[i], 1e-6);
      }
    }
    for (std::size_t i = 0; i < base.omega.size(); ++i) {
      EXPECT_LE(std::abs(base.alpha[i]), 1.0 + 1e-12);
      EXPECT_LE(std::abs(base.omega[i]), 1.0 + 1e-12);
    }
    for (double r : base.relevance) EXPECT_LT(std::abs(r), 1.0);
  }
}

TEST(MultiLevel, UnitOmegaAblation) {
  std::mt19937_64 rng(5);
  std::vector<EventEncoding> c = {random_enc(rng, 4, true), random_enc(rng, 4, false), random_enc(rng, 4, true)};
  std::vector<EventEncoding> e = {random_enc(rng, 4, true), random_enc(rng, 4, false)};
  const auto m = multi_level_scores(c, e, AttentionProjection::identity(4), {.unit_omega = true});
  for (double w : m.omega.data()) EXPECT_EQ(w, 1.0);
  for (double r : m.relevance) EXPECT_NEAR(r, std::tanh(3.0), 1e-12);
}

TEST(TopK, Examples) {
  AttentionMatrix m;
  m.n = 1;
  m.m = 3;
  m.omega = Tensor::row_vector({0.1, 0.9, 0.5});
  EXPECT_EQ(top_k(m, 0, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(top_k(m, 0, 5), (std::vector<std::size_t>{1, 2, 0}));
  AttentionMatrix t;
  t.n = 1;
  t.m = 2;
  t.omega = Tensor::row_vector({0.4, 0.4});
  EXPECT_EQ(top_k(t, 0, 1), (std::vector<std::size_t>{0}));
  EXPECT_THROW(top_k(t, 0, 0), ConfigError);
}

TEST(Attend, GraphValuesMatchDirectScores) {
  std::mt19937_64 rng(6);
  auto proj = AttentionProjection::identity(4);
  std::normal_distribution<double> n(0, 1);
  for (Parameter* p : {&proj.token, &proj.event, &proj.time}) {
    for (auto& x : p->value.data()) x += 0.2 * n(rng);
  }
  std::vector<EventEncoding> c = {random_enc(rng, 4, true), random_enc(rng, 4, false)};
  std::vector<EventEncoding> e = {random_enc(rng, 4, true), random_enc(rng, 4, true), random_enc(rng, 4, false)};
  const auto ref = multi_level_scores(c, e, proj);
  ad::Graph g;
  const auto vars = attend(g, c, e, proj);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(vars.omega[k].scalar(), ref.omega[k], 1e-12);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(vars.relevance[j].scalar(), ref.relevance[j], 1e-12);
}

TEST(Attend, RelevanceGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  auto proj = AttentionProjection::identity(5);
  std::normal_distribution<double> n(0, 1);
  for (Parameter* p : {&proj.token, &proj.event, &proj.time}) {
    for (auto& x : p->value.data()) x += 0.3 * n(rng);
  }
  std::vector<EventEncoding> c = {random_enc(rng, 5, true), random_enc(rng, 5, true)};
  std::vector<EventEncoding> e = {random_enc(rng, 5, true), random_enc(rng, 5, false), random_enc(rng, 5, true)};
  auto loss = [&](ad::Graph& g) {
    const auto v = attend(g, c, e, proj);
    ad::Var total = ad::scale(v.relevance[0], 1.0);
    total = ad::add(total, ad::scale(v.relevance[1], -0.7));
    return ad::add(total, ad::scale(v.relevance[2], 0.4));
  };
  const auto rep = chronofact::testing::check_gradients({&proj.token, &proj.event, &proj.time}, loss);
  EXPECT_LE(rep.max_rel_error, 1e-4) << rep.worst;
}

TEST(AttentionCsv, HeaderAndRows) {
  std::mt19937_64 rng(8);
  std::vector<EventEncoding> c = {random_enc(rng, 3, false)};
  std::vector<EventEncoding> e = {random_enc(rng, 3, false), random_enc(rng, 3, false)};
  std::ostringstream out;
  write_attention_csv(out, multi_level_scores(c, e, AttentionProjection::identity(3)));
  const auto s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "claim,evidence,alpha,beta,gamma,omega,time_present,zero_norm");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
