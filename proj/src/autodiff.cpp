#include "chronofact/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "chronofact/error.hpp"

namespace chronofact::ad {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

Graph& graph_of(std::initializer_list<Var> vars) {
  Graph* g = nullptr;
  for (const Var& v : vars) {
    if (!v.valid()) continue;
    require(g == nullptr || v.graph() == g, "operands belong to different graphs");
    g = v.graph();
  }
  require(g != nullptr, "operation on an empty variable");
  return *g;
}

double sigmoid_value(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Elementwise unary op whose derivative is expressed through input x and output y.
template <class F, class D>
Var unary(Var x, F f, D dfdx) {
  Graph& g = graph_of({x});
  Tensor y = x.value();
  for (double& v : y.data()) v = f(v);
  return g.push(std::move(y), {x}, [xi = x.id(), dfdx](Graph& g, std::size_t self) {
    if (!g.requires_grad(xi)) return;
    const Tensor& gy = g.output_grad(self);
    const Tensor& xv = g.value(xi);
    const Tensor& yv = g.value(self);
    Tensor& gx = g.grad(xi);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * dfdx(xv[i], yv[i]);
  });
}

Var select_scalar(std::span<const Var> scalars, bool take_min) {
  require(!scalars.empty(), "min/max of an empty list");
  Graph& g = graph_of({scalars.front()});
  std::size_t best = 0;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    require(scalars[i].value().size() == 1, "min/max operands must be scalars");
    require(scalars[i].graph() == &g, "operands belong to different graphs");
    const double v = scalars[i].scalar();
    const double b = scalars[best].scalar();
    if (take_min ? v < b : v > b) best = i;
  }
  const Var chosen = scalars[best];
  return g.push(Tensor(1, 1, chosen.scalar()), {scalars.begin(), scalars.end()},
                [ci = chosen.id()](Graph& g, std::size_t self) {
                  if (g.requires_grad(ci)) g.grad(ci)[0] += g.output_grad(self)[0];
                });
}

}  // namespace

const Tensor& Var::value() const {
  require(graph_ != nullptr, "empty variable");
  return graph_->value(id_);
}

double Var::scalar() const {
  const Tensor& v = value();
  require(v.size() == 1, "value is not a scalar");
  return v[0];
}

Var Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Graph::parameter(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.value = p.value;
  n.parameter = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  param_nodes_.emplace(&p, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Graph::push(Tensor value, std::vector<Var> parents, std::function<void(Graph&, std::size_t)> backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& p : parents) {
    if (p.valid() && nodes_[p.id()].requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Tensor& Graph::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

void Graph::backward(Var loss) {
  require(loss.graph() == this, "loss belongs to another graph");
  require(loss.value().size() == 1, "backward needs a scalar loss");
  for (auto& n : nodes_) n.grad = Tensor();
  grad(loss.id())[0] = 1.0;
  for (std::size_t k = loss.id() + 1; k-- > 0;) {
    Node& n = nodes_[k];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) n.backward(*this, k);
  }
  for (auto& n : nodes_) {
    if (n.parameter && !n.grad.empty()) {
      auto& pg = n.parameter->grad;
      if (!pg.same_shape(n.grad)) pg = Tensor(n.grad.rows(), n.grad.cols());
      for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += n.grad[i];
    }
  }
}

Var linear(Var x, Var w, Var b) {
  Graph& g = graph_of({x, w, b});
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  require(xv.cols() == wv.cols(), "linear: input width does not match weight columns");
  if (b.valid()) require(b.value().rows() == 1 && b.value().cols() == wv.rows(), "linear: bad bias shape");
  const std::size_t r = xv.rows(), in = xv.cols(), out = wv.rows();
  Tensor y(r, out);
  for (std::size_t i = 0; i < r; ++i) {
    const double* xr = xv.row(i).data();
    for (std::size_t o = 0; o < out; ++o) {
      const double* wr = wv.row(o).data();
      double s = b.valid() ? b.value()[o] : 0.0;
      for (std::size_t k = 0; k < in; ++k) s += xr[k] * wr[k];
      y(i, o) = s;
    }
  }
  const std::size_t bi = b.valid() ? b.id() : static_cast<std::size_t>(-1);
  return g.push(std::move(y), {x, w, b}, [xi = x.id(), wi = w.id(), bi, r, in, out](Graph& g, std::size_t self) {
    const Tensor& gy = g.output_grad(self);
    const Tensor& xv = g.value(xi);
    const Tensor& wv = g.value(wi);
    if (g.requires_grad(xi)) {
      Tensor& gx = g.grad(xi);
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t o = 0; o < out; ++o) {
          const double go = gy(i, o);
          if (go == 0.0) continue;
          const double* wr = wv.row(o).data();
          double* gxr = gx.row(i).data();
          for (std::size_t k = 0; k < in; ++k) gxr[k] += go * wr[k];
        }
      }
    }
    if (g.requires_grad(wi)) {
      Tensor& gw = g.grad(wi);
      for (std::size_t i = 0; i < r; ++i) {
        const double* xr = xv.row(i).data();
        for (std::size_t o = 0; o < out; ++o) {
          const double go = gy(i, o);
          if (go == 0.0) continue;
          double* gwr = gw.row(o).data();
          for (std::size_t k = 0; k < in; ++k) gwr[k] += go * xr[k];
        }
      }
    }
    if (bi != static_cast<std::size_t>(-1) && g.requires_grad(bi)) {
      Tensor& gb = g.grad(bi);
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t o = 0; o < out; ++o) gb[o] += gy(i, o);
      }
    }
  });
}

namespace {

template <class Fwd, class Da, class Db>
Var binary(Var a, Var b, Fwd f, Da da, Db db) {
  Graph& g = graph_of({a, b});
  require(a.value().same_shape(b.value()), "elementwise operands differ in shape");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(y[i], bv[i]);
  return g.push(std::move(y), {a, b}, [ai = a.id(), bi = b.id(), da, db](Graph& g, std::size_t self) {
    const Tensor& gy = g.output_grad(self);
    const Tensor& av = g.value(ai);
    const Tensor& bv = g.value(bi);
    if (g.requires_grad(ai)) {
      Tensor& ga = g.grad(ai);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * da(av[i], bv[i]);
    }
    if (g.requires_grad(bi)) {
      Tensor& gb = g.grad(bi);
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * db(av[i], bv[i]);
    }
  });
}

}  // namespace

Var add(Var a, Var b) {
  return binary(a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
                [](double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
  return binary(a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
                [](double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
  return binary(a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
                [](double x, double) { return x; });
}

Var scale(Var x, Var s) {
  Graph& g = graph_of({x, s});
  require(s.value().size() == 1, "scale factor must be a scalar");
  const double sv = s.scalar();
  Tensor y = x.value();
  for (double& v : y.data()) v *= sv;
  return g.push(std::move(y), {x, s}, [xi = x.id(), si = s.id()](Graph& g, std::size_t self) {
    const Tensor& gy = g.output_grad(self);
    const Tensor& xv = g.value(xi);
    const double sv = g.value(si)[0];
    if (g.requires_grad(xi)) {
      Tensor& gx = g.grad(xi);
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * sv;
    }
    if (g.requires_grad(si)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < gy.size(); ++i) acc += gy[i] * xv[i];
      g.grad(si)[0] += acc;
    }
  });
}

Var scale(Var x, double s) {
  return unary(x, [s](double v) { return v * s; }, [s](double, double) { return s; });
}

Var divide(Var x, Var s) {
  Graph& g = graph_of({x, s});
  require(s.value().size() == 1, "divisor must be a scalar");
  const double sv = s.scalar();
  require(sv != 0.0, "division by zero");
  Tensor y = x.value();
  for (double& v : y.data()) v /= sv;
  return g.push(std::move(y), {x, s}, [xi = x.id(), si = s.id()](Graph& g, std::size_t self) {
    const Tensor& gy = g.output_grad(self);
    const Tensor& yv = g.value(self);
    const double sv = g.value(si)[0];
    if (g.requires_grad(xi)) {
      Tensor& gx = g.grad(xi);
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] / sv;
    }
    if (g.requires_grad(si)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < gy.size(); ++i) acc -= gy[i] * yv[i] / sv;
      g.grad(si)[0] += acc;
    }
  });
}

Var relu(Var x) {
  return unary(x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var tanh(Var x) {
  return unary(x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var x) {
  return unary(x, sigmoid_value, [](double, double y) { return y * (1.0 - y); });
}

Var log(Var x) {
  for (double v : x.value().data()) require(v > 0.0, "log of a non-positive value");
  return unary(x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Var floor_at(Var x, double lo) {
  return unary(x, [lo](double v) { return v < lo ? lo : v; }, [lo](double v, double) { return v < lo ? 0.0 : 1.0; });
}

Var clamp(Var x, double lo, double hi) {
  return unary(x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
               [lo, hi](double v, double) { return (v < lo || v > hi) ? 0.0 : 1.0; });
}

Var softmax(Var x) {
  Graph& g = graph_of({x});
  require(x.value().rows() == 1, "softmax expects a row vector");
  Tensor y = x.value();
  const double mx = *std::max_element(y.data().begin(), y.data().end());
  double z = 0.0;
  for (double& v : y.data()) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : y.data()) v /= z;
  return g.push(std::move(y), {x}, [xi = x.id()](Graph& g, std::size_t self) {
    if (!g.requires_grad(xi)) return;
    const Tensor& gy = g.output_grad(self);
    const Tensor& yv = g.value(self);
    double inner = 0.0;
    for (std::size_t i = 0; i < yv.size(); ++i) inner += gy[i] * yv[i];
    Tensor& gx = g.grad(xi);
    for (std::size_t i = 0; i < yv.size(); ++i) gx[i] += yv[i] * (gy[i] - inner);
  });
}

Var concat(std::span<const Var> parts) {
  require(!parts.empty(), "concat of nothing");
  Graph& g = graph_of({parts.front()});
  std::size_t total = 0;
  for (const Var& p : parts) {
    require(p.graph() == &g, "operands belong to different graphs");
    require(p.value().rows() == 1, "concat expects row vectors");
    total += p.value().cols();
  }
  Tensor y(1, total);
  std::vector<std::size_t> ids, offsets;
  std::size_t off = 0;
  for (const Var& p : parts) {
    std::copy(p.value().data().begin(), p.value().data().end(), y.data().begin() + static_cast<std::ptrdiff_t>(off));
    ids.push_back(p.id());
    offsets.push_back(off);
    off += p.value().cols();
  }
  return g.push(std::move(y), {parts.begin(), parts.end()},
                [ids = std::move(ids), offsets = std::move(offsets)](Graph& g, std::size_t self) {
                  const Tensor& gy = g.output_grad(self);
                  for (std::size_t k = 0; k < ids.size(); ++k) {
                    if (!g.requires_grad(ids[k])) continue;
                    Tensor& gp = g.grad(ids[k]);
                    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += gy[offsets[k] + i];
                  }
                });
}

Var slice(Var x, std::size_t begin, std::size_t len) {
  Graph& g = graph_of({x});
  require(x.value().rows() == 1 && begin + len <= x.value().cols(), "slice out of range");
  std::vector<double> v(x.value().data().begin() + static_cast<std::ptrdiff_t>(begin),
                        x.value().data().begin() + static_cast<std::ptrdiff_t>(begin + len));
  return g.push(Tensor::row_vector(std::move(v)), {x}, [xi = x.id(), begin, len](Graph& g, std::size_t self) {
    if (!g.requires_grad(xi)) return;
    const Tensor& gy = g.output_grad(self);
    Tensor& gx = g.grad(xi);
    for (std::size_t i = 0; i < len; ++i) gx[begin + i] += gy[i];
  });
}

Var element(Var x, std::size_t i) {
  require(i < x.value().size(), "element index out of range");
  Graph& g = graph_of({x});
  return g.push(Tensor(1, 1, x.value()[i]), {x}, [xi = x.id(), i](Graph& g, std::size_t self) {
    if (g.requires_grad(xi)) g.grad(xi)[i] += g.output_grad(self)[0];
  });
}

Var stack(std::span<const Var> scalars) {
  for (const Var& s : scalars) require(s.value().size() == 1, "stack expects scalars");
  return concat(scalars);
}

Var sum(Var x) {
  Graph& g = graph_of({x});
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  return g.push(Tensor(1, 1, s), {x}, [xi = x.id()](Graph& g, std::size_t self) {
    if (!g.requires_grad(xi)) return;
    const double gy = g.output_grad(self)[0];
    for (double& v : g.grad(xi).data()) v += gy;
  });
}

Var mean_rows(Var x) {
  Graph& g = graph_of({x});
  const Tensor& xv = x.value();
  require(xv.rows() > 0, "mean of zero rows");
  Tensor y(1, xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    for (std::size_t c = 0; c < xv.cols(); ++c) y[c] += xv(r, c);
  }
  const double inv = 1.0 / static_cast<double>(xv.rows());
  for (double& v : y.data()) v *= inv;
  return g.push(std::move(y), {x}, [xi = x.id(), inv](Graph& g, std::size_t self) {
    if (!g.requires_grad(xi)) return;
    const Tensor& gy = g.output_grad(self);
    Tensor& gx = g.grad(xi);
    for (std::size_t r = 0; r < gx.rows(); ++r) {
      for (std::size_t c = 0; c < gx.cols(); ++c) gx(r, c) += gy[c] * inv;
    }
  });
}

Var row(Var x, std::size_t r) {
  Graph& g = graph_of({x});
  require(r < x.value().rows(), "row index out of range");
  const auto src = x.value().row(r);
  return g.push(Tensor::row_vector({src.begin(), src.end()}), {x}, [xi = x.id(), r](Graph& g, std::size_t self) {
    if (!g.requires_grad(xi)) return;
    const Tensor& gy = g.output_grad(self);
    auto dst = g.grad(xi).row(r);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += gy[c];
  });
}

Var cosine(Var a, Var b) {
  Graph& g = graph_of({a, b});
  require(a.value().rows() == 1 && a.value().same_shape(b.value()), "cosine expects equal row vectors");
  const auto& av = a.value().data();
  const auto& bv = b.value().data();
  const double na = norm(av), nb = norm(bv);
  const bool degenerate = na == 0.0 || nb == 0.0;
  const double c = degenerate ? 0.0 : dot(av, bv) / (na * nb);
  return g.push(Tensor(1, 1, c), {a, b}, [ai = a.id(), bi = b.id(), na, nb, c, degenerate](Graph& g, std::size_t self) {
    if (degenerate) return;
    const double gy = g.output_grad(self)[0];
    const Tensor& av = g.value(ai);
    const Tensor& bv = g.value(bi);
    if (g.requires_grad(ai)) {
      Tensor& ga = g.grad(ai);
      for (std::size_t i = 0; i < av.size(); ++i) ga[i] += gy * (bv[i] / (na * nb) - c * av[i] / (na * na));
    }
    if (g.requires_grad(bi)) {
      Tensor& gb = g.grad(bi);
      for (std::size_t i = 0; i < bv.size(); ++i) gb[i] += gy * (av[i] / (na * nb) - c * bv[i] / (nb * nb));
    }
  });
}

Var pairwise_cosine_mean(Var a, Var b) {
  Graph& g = graph_of({a, b});
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.rows() > 0 && bv.rows() > 0 && av.cols() == bv.cols(), "pairwise cosine shape mismatch");
  const std::size_t dim = av.cols();
  // mean_{r,s} cos(a_r, b_s) = mean_r(a_r / |a_r|) . mean_s(b_s / |b_s|); zero rows contribute 0.
  auto unit_rows = [dim](const Tensor& m, std::vector<double>& norms) {
    Tensor u(m.rows(), dim);
    norms.assign(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      norms[r] = norm(m.row(r));
      if (norms[r] == 0.0) continue;
      for (std::size_t c = 0; c < dim; ++c) u(r, c) = m(r, c) / norms[r];
    }
    return u;
  };
  auto mean_of = [dim](const Tensor& u) {
    std::vector<double> m(dim, 0.0);
    for (std::size_t r = 0; r < u.rows(); ++r) {
      for (std::size_t c = 0; c < dim; ++c) m[c] += u(r, c);
    }
    for (double& v : m) v /= static_cast<double>(u.rows());
    return m;
  };
  auto na = std::make_shared<std::vector<double>>();
  auto nb = std::make_shared<std::vector<double>>();
  auto ua = std::make_shared<Tensor>(unit_rows(av, *na));
  auto ub = std::make_shared<Tensor>(unit_rows(bv, *nb));
  auto ma = std::make_shared<std::vector<double>>(mean_of(*ua));
  auto mb = std::make_shared<std::vector<double>>(mean_of(*ub));
  const double y = std::clamp(dot(*ma, *mb), -1.0, 1.0);
  return g.push(Tensor(1, 1, y), {a, b},
                [ai = a.id(), bi = b.id(), na, nb, ua, ub, ma, mb, dim](Graph& g, std::size_t self) {
                  const double gy = g.output_grad(self)[0];
                  auto back = [&](std::size_t id, const Tensor& u, const std::vector<double>& norms,
                                  const std::vector<double>& other_mean) {
                    if (!g.requires_grad(id)) return;
                    Tensor& gx = g.grad(id);
                    const double inv_rows = 1.0 / static_cast<double>(u.rows());
                    for (std::size_t r = 0; r < u.rows(); ++r) {
                      if (norms[r] == 0.0) continue;
                      const double proj = dot(u.row(r), other_mean);
                      for (std::size_t c = 0; c < dim; ++c) {
                        gx(r, c) += gy * inv_rows * (other_mean[c] - proj * u(r, c)) / norms[r];
                      }
                    }
                  };
                  back(ai, *ua, *na, *mb);
                  back(bi, *ub, *nb, *ma);
                });
}

Var minimum(std::span<const Var> scalars) { return select_scalar(scalars, true); }
Var maximum(std::span<const Var> scalars) { return select_scalar(scalars, false); }

Var lstm_cell(Var x, Var h, Var c, Var wx, Var wh, Var b) {
  Graph& g = graph_of({x, h, c, wx, wh, b});
  const std::size_t hidden = h.value().cols();
  require(c.value().cols() == hidden && wx.value().rows() == 4 * hidden && wh.value().rows() == 4 * hidden &&
              wh.value().cols() == hidden && b.value().cols() == 4 * hidden && wx.value().cols() == x.value().cols(),
          "lstm_cell shape mismatch");
  const Tensor& xv = x.value();
  const Tensor& hv = h.value();
  const Tensor& cv = c.value();
  const Tensor& wxv = wx.value();
  const Tensor& whv = wh.value();
  const std::size_t in = xv.cols();

  auto gates = std::make_shared<std::vector<double>>(4 * hidden);
  for (std::size_t k = 0; k < 4 * hidden; ++k) {
    double z = b.value()[k];
    const double* wr = wxv.row(k).data();
    for (std::size_t j = 0; j < in; ++j) z += wr[j] * xv[j];
    const double* ur = whv.row(k).data();
    for (std::size_t j = 0; j < hidden; ++j) z += ur[j] * hv[j];
    (*gates)[k] = (k >= 2 * hidden && k < 3 * hidden) ? std::tanh(z) : sigmoid_value(z);
  }
  Tensor y(1, 2 * hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    const double ig = (*gates)[j], fg = (*gates)[hidden + j], gg = (*gates)[2 * hidden + j],
                 og = (*gates)[3 * hidden + j];
    const double cn = fg * cv[j] + ig * gg;
    y[hidden + j] = cn;
    y[j] = og * std::tanh(cn);
  }
  return g.push(std::move(y), {x, h, c, wx, wh, b},
                [xi = x.id(), hi = h.id(), ci = c.id(), wxi = wx.id(), whi = wh.id(), bi = b.id(), hidden, in,
                 gates](Graph& g, std::size_t self) {
                  const Tensor& gy = g.output_grad(self);
                  const Tensor& yv = g.value(self);
                  const Tensor& cv = g.value(ci);
                  const auto& gt = *gates;
                  std::vector<double> dz(4 * hidden);
                  std::vector<double> dc_prev(hidden);
                  for (std::size_t j = 0; j < hidden; ++j) {
                    const double ig = gt[j], fg = gt[hidden + j], gg = gt[2 * hidden + j], og = gt[3 * hidden + j];
                    const double tc = std::tanh(yv[hidden + j]);
                    const double dh = gy[j];
                    const double dc = gy[hidden + j] + dh * og * (1.0 - tc * tc);
                    dz[j] = dc * gg * ig * (1.0 - ig);
                    dz[hidden + j] = dc * cv[j] * fg * (1.0 - fg);
                    dz[2 * hidden + j] = dc * ig * (1.0 - gg * gg);
                    dz[3 * hidden + j] = dh * tc * og * (1.0 - og);
                    dc_prev[j] = dc * fg;
                  }
                  if (g.requires_grad(ci)) {
                    Tensor& gc = g.grad(ci);
                    for (std::size_t j = 0; j < hidden; ++j) gc[j] += dc_prev[j];
                  }
                  auto back_input = [&](std::size_t vi, std::size_t wi, std::size_t width) {
                    const Tensor& wv = g.value(wi);
                    if (g.requires_grad(vi)) {
                      Tensor& gv = g.grad(vi);
                      for (std::size_t k = 0; k < 4 * hidden; ++k) {
                        if (dz[k] == 0.0) continue;
                        const double* wr = wv.row(k).data();
                        for (std::size_t j = 0; j < width; ++j) gv[j] += dz[k] * wr[j];
                      }
                    }
                    if (g.requires_grad(wi)) {
                      const Tensor& vv = g.value(vi);
                      Tensor& gw = g.grad(wi);
                      for (std::size_t k = 0; k < 4 * hidden; ++k) {
                        if (dz[k] == 0.0) continue;
                        double* gr = gw.row(k).data();
                        for (std::size_t j = 0; j < width; ++j) gr[j] += dz[k] * vv[j];
                      }
                    }
                  };
                  back_input(xi, wxi, in);
                  back_input(hi, whi, hidden);
                  if (g.requires_grad(bi)) {
                    Tensor& gb = g.grad(bi);
                    for (std::size_t k = 0; k < 4 * hidden; ++k) gb[k] += dz[k];
                  }
                });
}

}  // namespace chronofact::ad
