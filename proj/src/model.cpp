#include "chronofact/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

#include "chronofact/chrono_time.hpp"
#include "chronofact/error.hpp"
#include "chronofact/extractor.hpp"

namespace chronofact {
namespace {

Dense make_dense(const std::string& name, std::size_t out, std::size_t in) {
  return {Parameter(name + ".w", Tensor(out, in)), Parameter(name + ".b", Tensor(1, out))};
}

LstmWeights make_lstm(const std::string& name, std::size_t in, std::size_t hidden) {
  return {Parameter(name + ".wx", Tensor(4 * hidden, in)), Parameter(name + ".wh", Tensor(4 * hidden, hidden)),
          Parameter(name + ".b", Tensor(1, 4 * hidden))};
}

BiLstm make_bilstm(const std::string& name, const ModelConfig& c) {
  BiLstm b;
  for (std::size_t l = 0; l < c.lstm_layers; ++l) {
    const std::size_t in = l == 0 ? c.dim : 2 * c.lstm_hidden;
    b.fwd.push_back(make_lstm(name + ".l" + std::to_string(l) + ".fwd", in, c.lstm_hidden));
    b.bwd.push_back(make_lstm(name + ".l" + std::to_string(l) + ".bwd", in, c.lstm_hidden));
  }
  return b;
}

template <class ParamT, class Self>
std::vector<ParamT*> collect(Self& m) {
  std::vector<ParamT*> out{&m.attention.token, &m.attention.event, &m.attention.time,
                           &m.fc1.w, &m.fc1.b, &m.fc2.w, &m.fc2.b};
  for (auto* lstm : {&m.claim_lstm, &m.evidence_lstm}) {
    for (std::size_t l = 0; l < lstm->fwd.size(); ++l) {
      for (auto* dir : {&lstm->fwd[l], &lstm->bwd[l]}) {
        out.push_back(&dir->wx);
        out.push_back(&dir->wh);
        out.push_back(&dir->b);
      }
    }
  }
  for (auto* d : {&m.fc3, &m.fc4, &m.fc5, &m.fc6}) {
    out.push_back(&d->w);
    out.push_back(&d->b);
  }
  return out;
}

// Checkpoint byte helpers.
struct Writer {
  std::vector<std::uint8_t> bytes;
  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }
};

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw ValidationError("truncated checkpoint");
  }
  std::uint8_t u8() {
    need(1);
    return bytes[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    return s;
  }
};

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr char kMagic[4] = {'C', 'F', 'M', 'K'};

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

ProbDist to_dist(const ad::Var& v) { return ProbDist::from(v.value().data()); }

ad::Var dense(ad::Graph& g, Dense& d, ad::Var x) { return ad::linear(x, g.parameter(d.w), g.parameter(d.b)); }

}  // namespace

void ModelConfig::validate() const {
  if (dim < 4 || dim % 2 != 0) throw ConfigError("model dim must be even and >= 4");
  if (fc_hidden < 1 || lstm_hidden < 1 || lstm_layers < 1) throw ConfigError("hidden sizes must be positive");
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (k_seq < 1) throw ConfigError("k_seq must be >= 1");
  if (arity != 2 && arity != 3) throw ConfigError("label arity must be 2 or 3");
}

std::size_t ModelConfig::claim_input_dim() const {
  std::size_t d = n_max * dim + k_seq * dim;
  if (!ablation.no_event_classifier) d += n_max * arity;
  if (!ablation.no_order_classifier) d += 2;
  return d;
}

ModelParams ModelParams::zeros(const ModelConfig& c) {
  c.validate();
  ModelParams p;
  p.config = c;
  p.attention = AttentionProjection::identity(c.dim);
  p.attention.token.value.fill(0.0);
  p.attention.event.value.fill(0.0);
  p.attention.time.value.fill(0.0);
  p.fc1 = make_dense("fc1", c.fc_hidden, c.event_input_dim());
  p.fc2 = make_dense("fc2", c.arity, c.fc_hidden);
  p.claim_lstm = make_bilstm("lstm_c", c);
  p.evidence_lstm = make_bilstm("lstm_e", c);
  p.fc3 = make_dense("fc3", c.fc_hidden, 4 * c.lstm_hidden);
  p.fc4 = make_dense("fc4", 2, c.fc_hidden);
  p.fc5 = make_dense("fc5", c.fc_hidden, c.claim_input_dim());
  p.fc6 = make_dense("fc6", c.arity, c.fc_hidden);
  return p;
}

ModelParams ModelParams::init(const ModelConfig& c, std::uint64_t seed) {
  ModelParams p = zeros(c);
  p.attention = AttentionProjection::identity(c.dim);
  std::mt19937_64 rng(seed);
  auto fill = [&](Parameter& param, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& v : param.value.data()) v = u(rng);
  };
  for (Dense* d : {&p.fc1, &p.fc2, &p.fc3, &p.fc4, &p.fc5, &p.fc6}) {
    fill(d->w, d->w.value.cols());
    fill(d->b, d->w.value.cols());
  }
  for (BiLstm* b : {&p.claim_lstm, &p.evidence_lstm}) {
    for (auto* dirs : {&b->fwd, &b->bwd}) {
      for (auto& l : *dirs) {
        fill(l.wx, c.lstm_hidden);
        fill(l.wh, c.lstm_hidden);
        fill(l.b, c.lstm_hidden);
      }
    }
  }
  return p;
}

std::vector<Parameter*> ModelParams::parameters() { return collect<Parameter>(*this); }
std::vector<const Parameter*> ModelParams::parameters() const { return collect<const Parameter>(*this); }

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

void ModelParams::zero_grad() {
  for (Parameter* p : parameters()) {
    if (!p->grad.same_shape(p->value)) p->grad = Tensor(p->value.rows(), p->value.cols());
    p->zero_grad();
  }
}

std::vector<std::uint8_t> serialize_checkpoint(const ModelParams& params) {
  const ModelConfig& c = params.config;
  Writer w;
  for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.u32(kCheckpointVersion);
  for (std::size_t v : {c.dim, c.fc_hidden, c.lstm_hidden, c.lstm_layers, c.n_max, c.k, c.k_seq, c.arity}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  w.u8(static_cast<std::uint8_t>((c.ablation.no_multilevel_attention ? 1 : 0) | (c.ablation.no_event_classifier ? 2 : 0) |
                                 (c.ablation.no_order_classifier ? 4 : 0)));
  const auto ps = params.parameters();
  w.u32(static_cast<std::uint32_t>(ps.size()));
  for (const Parameter* p : ps) {
    w.str(p->name);
    w.u32(static_cast<std::uint32_t>(p->value.rows()));
    w.u32(static_cast<std::uint32_t>(p->value.cols()));
    for (double v : p->value.data()) w.f64(v);
  }
  w.u64(fnv1a(w.bytes));
  return std::move(w.bytes);
}

ModelParams deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw ValidationError("checkpoint too short");
  Reader r{bytes};
  for (char ch : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(ch)) throw ValidationError("not a checkpoint file");
  }
  if (r.u32() != kCheckpointVersion) throw ValidationError("unsupported checkpoint version");
  {
    Reader tail{bytes, bytes.size() - 8};
    if (tail.u64() != fnv1a(bytes.first(bytes.size() - 8))) throw ValidationError("checkpoint checksum mismatch");
  }
  ModelConfig c;
  c.dim = r.u32();
  c.fc_hidden = r.u32();
  c.lstm_hidden = r.u32();
  c.lstm_layers = r.u32();
  c.n_max = r.u32();
  c.k = r.u32();
  c.k_seq = r.u32();
  c.arity = r.u32();
  const std::uint8_t flags = r.u8();
  c.ablation = {(flags & 1) != 0, (flags & 2) != 0, (flags & 4) != 0};
  ModelParams p = ModelParams::zeros(c);
  auto ps = p.parameters();
  if (r.u32() != ps.size()) throw ValidationError("checkpoint parameter count mismatch");
  for (Parameter* param : ps) {
    const std::string name = r.str();
    const std::size_t rows = r.u32(), cols = r.u32();
    if (name != param->name || rows != param->value.rows() || cols != param->value.cols()) {
      throw ValidationError("checkpoint parameter '" + name + "' does not match the model layout");
    }
    for (double& v : param->value.data()) v = r.f64();
  }
  if (r.pos != bytes.size() - 8) throw ValidationError("trailing bytes in checkpoint");
  return p;
}

void save_checkpoint(const ModelParams& params, const std::string& path) {
  const auto bytes = serialize_checkpoint(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

std::uint64_t checkpoint_checksum(const ModelParams& params) {
  const auto bytes = serialize_checkpoint(params);
  Reader tail{bytes, bytes.size() - 8};
  return tail.u64();
}

namespace heads {

ad::Var build_u(ad::Graph& g, ad::Var cls_c, std::span<const ad::Var> topk, std::span<const ad::Var> weights,
                std::size_t k) {
  if (topk.size() > k || topk.size() != weights.size()) throw ShapeError("build_u: bad evidence block count");
  const std::size_t dim = cls_c.cols();
  std::vector<ad::Var> blocks{cls_c};
  for (std::size_t t = 0; t < topk.size(); ++t) blocks.push_back(ad::scale(topk[t], weights[t]));
  if (topk.size() < k) blocks.push_back(g.zeros(1, (k - topk.size()) * dim));
  return ad::concat(blocks);
}

ad::Var claim_event_head(ad::Graph& g, ModelParams& p, ad::Var u) {
  return ad::softmax(dense(g, p.fc2, ad::relu(dense(g, p.fc1, u))));
}

ad::Var bilstm(ad::Graph& g, BiLstm& lstm, std::size_t hidden, std::span<const ad::Var> seq) {
  if (seq.empty()) return g.zeros(1, 2 * hidden);
  std::vector<ad::Var> inputs(seq.begin(), seq.end());
  const std::size_t T = inputs.size();
  auto run = [&](LstmWeights& w, bool reverse) {
    std::vector<ad::Var> hs(T);
    ad::Var h = g.zeros(1, hidden), c = g.zeros(1, hidden);
    const ad::Var wx = g.parameter(w.wx), wh = g.parameter(w.wh), b = g.parameter(w.b);
    for (std::size_t s = 0; s < T; ++s) {
      const std::size_t t = reverse ? T - 1 - s : s;
      const ad::Var y = ad::lstm_cell(inputs[t], h, c, wx, wh, b);
      h = ad::slice(y, 0, hidden);
      c = ad::slice(y, hidden, hidden);
      hs[t] = h;
    }
    return hs;
  };
  for (std::size_t l = 0; l < lstm.fwd.size(); ++l) {
    const auto hf = run(lstm.fwd[l], false);
    const auto hb = run(lstm.bwd[l], true);
    if (l + 1 == lstm.fwd.size()) {
      const std::array<ad::Var, 2> last{hf[T - 1], hb[0]};
      return ad::concat(last);
    }
    for (std::size_t t = 0; t < T; ++t) {
      const std::array<ad::Var, 2> pair{hf[t], hb[t]};
      inputs[t] = ad::concat(pair);
    }
  }
  throw ShapeError("bilstm without layers");
}

ad::Var order_head(ad::Graph& g, ModelParams& p, std::span<const ad::Var> seq_c, std::span<const ad::Var> seq_e) {
  if (seq_c.empty()) throw ValidationError("order head needs at least one claim event");
  const std::size_t h = p.config.lstm_hidden;
  const std::array<ad::Var, 2> o{bilstm(g, p.claim_lstm, h, seq_c), bilstm(g, p.evidence_lstm, h, seq_e)};
  return ad::softmax(dense(g, p.fc4, ad::relu(dense(g, p.fc3, ad::concat(o)))));
}

ad::Var claim_head_input(ad::Graph& g, const ModelConfig& config, std::span<const ad::Var> seq_c,
                         std::span<const ad::Var> seq_e, std::span<const ad::Var> event_dists,
                         std::optional<ad::Var> order_dist) {
  if (seq_c.size() > config.n_max) throw ConfigError("claim has more events than n_max");
  if (seq_e.size() > config.k_seq) throw ShapeError("evidence sequence longer than k_seq");
  std::vector<ad::Var> parts(seq_c.begin(), seq_c.end());
  if (seq_c.size() < config.n_max) parts.push_back(g.zeros(1, (config.n_max - seq_c.size()) * config.dim));
  parts.insert(parts.end(), seq_e.begin(), seq_e.end());
  if (seq_e.size() < config.k_seq) parts.push_back(g.zeros(1, (config.k_seq - seq_e.size()) * config.dim));
  if (!config.ablation.no_event_classifier) {
    if (event_dists.size() != seq_c.size()) throw ShapeError("one event distribution per claim event expected");
    parts.insert(parts.end(), event_dists.begin(), event_dists.end());
    if (event_dists.size() < config.n_max) {
      parts.push_back(g.zeros(1, (config.n_max - event_dists.size()) * config.arity));
    }
  }
  if (!config.ablation.no_order_classifier) {
    if (!order_dist) throw ShapeError("claim head needs the order distribution");
    parts.push_back(*order_dist);
  }
  return ad::concat(parts);
}

ad::Var claim_head(ad::Graph& g, ModelParams& p, ad::Var input) {
  if (input.cols() != p.config.claim_input_dim()) throw ShapeError("claim head input has the wrong width");
  return ad::softmax(dense(g, p.fc6, ad::relu(dense(g, p.fc5, input))));
}

}  // namespace heads

namespace {

// Inference never calls backward, so binding const parameters is safe.
ModelParams& mutable_params(const ModelParams& p) { return const_cast<ModelParams&>(p); }

std::vector<ad::Var> masked_rows(ad::Graph& g, const std::vector<std::vector<double>>& rows,
                                 const std::vector<char>& mask) {
  if (!mask.empty() && mask.size() != rows.size()) throw ShapeError("mask length differs from sequence length");
  std::vector<ad::Var> out;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (mask.empty() || mask[t]) out.push_back(g.constant(Tensor::row_vector(rows[t])));
  }
  return out;
}

std::vector<ad::Var> dist_vars(ad::Graph& g, std::span<const ProbDist> dists) {
  std::vector<ad::Var> out;
  for (const auto& d : dists) out.push_back(g.constant(Tensor::row_vector({d.probs().begin(), d.probs().end()})));
  return out;
}

void check_finite(const ad::Var& v, const char* what) {
  for (double x : v.value().data()) {
    if (!std::isfinite(x)) throw TrainingDivergence(std::string("non-finite activation in ") + what);
  }
}

}  // namespace

std::vector<double> build_u(const EventEncoding& c, std::span<const EventEncoding> topk,
                            std::span<const double> weights, std::size_t k) {
  ad::Graph g;
  std::vector<ad::Var> ev, w;
  for (const auto& e : topk) ev.push_back(g.constant(Tensor::row_vector(e.cls)));
  for (double x : weights) w.push_back(g.constant(Tensor(1, 1, x)));
  return heads::build_u(g, g.constant(Tensor::row_vector(c.cls)), ev, w, k).value().data();
}

ProbDist claim_event_head(std::span<const double> u, const ModelParams& params) {
  if (u.size() != params.config.event_input_dim()) throw ShapeError("u has the wrong length");
  ad::Graph g;
  const auto z = heads::claim_event_head(g, mutable_params(params), g.constant(Tensor::row_vector({u.begin(), u.end()})));
  check_finite(z, "claim event head");
  return to_dist(z);
}

ProbDist order_head(const SequenceReps& seq, const ModelParams& params) {
  ad::Graph g;
  const auto z = heads::order_head(g, mutable_params(params), masked_rows(g, seq.seq_c, seq.mask_c),
                                   masked_rows(g, seq.seq_e, seq.mask_e));
  check_finite(z, "order head");
  return to_dist(z);
}

std::vector<double> claim_head_input(const SequenceReps& seq, std::span<const ProbDist> event_dists,
                                     const std::optional<ProbDist>& order_dist, const ModelConfig& config) {
  ad::Graph g;
  std::optional<ad::Var> o;
  if (order_dist) o = dist_vars(g, std::span(&*order_dist, 1)).front();
  return heads::claim_head_input(g, config, masked_rows(g, seq.seq_c, seq.mask_c), masked_rows(g, seq.seq_e, seq.mask_e),
                                 dist_vars(g, event_dists), o)
      .value()
      .data();
}

ProbDist claim_head(const SequenceReps& seq, std::span<const ProbDist> event_dists,
                    const std::optional<ProbDist>& order_dist, const ModelParams& params) {
  ad::Graph g;
  std::optional<ad::Var> o;
  if (order_dist) o = dist_vars(g, std::span(&*order_dist, 1)).front();
  const auto input = heads::claim_head_input(g, params.config, masked_rows(g, seq.seq_c, seq.mask_c),
                                             masked_rows(g, seq.seq_e, seq.mask_e), dist_vars(g, event_dists), o);
  const auto z = heads::claim_head(g, mutable_params(params), input);
  check_finite(z, "claim head");
  return to_dist(z);
}

PreparedExample prepare_example(std::span<const Event> claim_events, const EvidencePool& pool,
                                const PipelineConfig& pipeline) {
  if (claim_events.empty()) throw ValidationError("claim has no events");
  PreparedExample ex;
  ex.claim_events.assign(claim_events.begin(), claim_events.end());
  ex.evidence = score_evidence(claim_events, pool, pipeline.encoder, pipeline.evidence_budget);
  try {
    ex.reference_day = earliest_reference(claim_events, ex.evidence.events);
    ex.anchored = true;
  } catch (const NoTemporalAnchor&) {
    ex.reference_day = 0;
    ex.anchored = false;
  }
  for (const auto& e : ex.claim_events) ex.claim_enc.push_back(encode_event(e, pipeline.encoder, ex.reference_day));
  for (const auto& e : ex.evidence.events) {
    ex.evidence_enc.push_back(encode_event(e, pipeline.encoder, ex.reference_day));
  }
  return ex;
}

ForwardOutputs forward(ad::Graph& g, ModelParams& params, const PreparedExample& ex) {
  const ModelConfig& cfg = params.config;
  const std::size_t n = ex.claim_enc.size(), m = ex.evidence_enc.size();
  if (n == 0) throw ValidationError("claim has no events");
  if (n > cfg.n_max) throw ConfigError("claim has " + std::to_string(n) + " events, n_max is " + std::to_string(cfg.n_max));
  for (const auto& e : ex.claim_enc) {
    if (e.dim != cfg.dim) throw ShapeError("encoding dimension differs from model dimension");
  }

  ForwardOutputs out;
  std::vector<ad::Var> claim_cls, ev_cls;
  for (const auto& e : ex.claim_enc) claim_cls.push_back(g.constant(Tensor::row_vector(e.cls)));
  for (const auto& e : ex.evidence_enc) ev_cls.push_back(g.constant(Tensor::row_vector(e.cls)));

  std::vector<std::size_t> selected;
  if (m > 0) {
    out.attention = attend(g, ex.claim_enc, ex.evidence_enc, params.attention,
                           {.unit_omega = cfg.ablation.no_multilevel_attention});
    const auto& rel = out.attention->values.relevance;
    selected.resize(m);
    std::iota(selected.begin(), selected.end(), std::size_t{0});
    std::stable_sort(selected.begin(), selected.end(), [&](std::size_t a, std::size_t b) { return rel[a] > rel[b]; });
    selected.resize(std::min(cfg.k_seq, m));
    if (!cfg.ablation.no_order_classifier) {
      std::vector<Event> chosen;
      for (std::size_t j : selected) chosen.push_back(ex.evidence.events[j]);
      const auto perm = chronological_sort(chosen);
      std::vector<std::size_t> sorted;
      for (std::size_t r : perm) sorted.push_back(selected[r]);
      selected = std::move(sorted);
    }
  } else {
    out.empty_evidence = true;
  }
  out.evidence_order = selected;

  if (!cfg.ablation.no_event_classifier) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<ad::Var> blocks, weights;
      if (m > 0) {
        for (std::size_t j : top_k(out.attention->values, i, cfg.k)) {
          blocks.push_back(ev_cls[j]);
          weights.push_back(out.attention->omega[i * m + j]);
        }
      }
      out.event_dists.push_back(
          heads::claim_event_head(g, params, heads::build_u(g, claim_cls[i], blocks, weights, cfg.k)));
    }
  }

  std::vector<ad::Var> seq_e;
  for (std::size_t j : selected) seq_e.push_back(ad::scale(ev_cls[j], out.attention->relevance[j]));
  if (!cfg.ablation.no_order_classifier) out.order_dist = heads::order_head(g, params, claim_cls, seq_e);
  out.claim_input = heads::claim_head_input(g, cfg, claim_cls, seq_e, out.event_dists, out.order_dist);
  out.claim_dist = heads::claim_head(g, params, out.claim_input);

  for (const auto& z : out.event_dists) check_finite(z, "claim event head");
  if (out.order_dist) check_finite(*out.order_dist, "order head");
  check_finite(out.claim_dist, "claim head");
  return out;
}

VerificationResult to_result(const ForwardOutputs& out, const PreparedExample& ex, const ModelConfig& cfg) {
  VerificationResult r;
  const std::size_t n = ex.claim_events.size();
  if (out.event_dists.empty()) {
    r.event_dists.assign(n, ProbDist::uniform(cfg.arity));
  } else {
    for (const auto& z : out.event_dists) r.event_dists.push_back(to_dist(z));
  }
  for (const auto& d : r.event_dists) r.event_labels.push_back(label_from_dist(d));
  r.order_dist = out.order_dist ? to_dist(*out.order_dist) : ProbDist::uniform(2);
  r.order_label = label_from_dist(r.order_dist);
  r.claim_dist = to_dist(out.claim_dist);
  r.claim_label = label_from_dist(r.claim_dist);
  r.evidence_order = out.evidence_order;
  if (out.attention) r.relevance = out.attention->values.relevance;
  r.empty_evidence = out.empty_evidence;
  return r;
}

VerificationResult verify_prepared(const PreparedExample& example, const ModelParams& params) {
  ad::Graph g;
  const auto out = forward(g, mutable_params(params), example);
  return to_result(out, example, params.config);
}

VerificationResult verify_claim(const Claim& claim, const EvidencePool& pool, const ModelParams& params,
                                const PipelineConfig& pipeline) {
  claim.validate();
  pool.validate();
  if (pipeline.encoder.dim() != params.config.dim) throw ConfigError("encoder and model dimensions differ");
  return verify_prepared(prepare_example(claim.events, pool, pipeline), params);
}

}  // namespace chronofact
