#include "chronofact/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "chronofact/error.hpp"

namespace chronofact {

ConfusionMatrix::ConfusionMatrix(std::size_t arity) : arity_(arity), counts_(arity * arity, 0) {
  if (arity != 2 && arity != 3) throw ConfigError("label arity must be 2 or 3");
}

void ConfusionMatrix::add(Label gold, Label pred) {
  const std::size_t g = index_of(gold), p = index_of(pred);
  if (g >= arity_ || p >= arity_) throw ValidationError("label outside the matrix arity");
  ++counts_[g * arity_ + p];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < arity_; ++i) t += at(i, i);
  return t;
}

std::vector<double> ConfusionMatrix::per_class_f1() const {
  std::vector<double> f1(arity_, 0.0);
  for (std::size_t c = 0; c < arity_; ++c) {
    std::size_t gold = 0, pred = 0;
    for (std::size_t j = 0; j < arity_; ++j) {
      gold += at(c, j);
      pred += at(j, c);
    }
    const std::size_t tp = at(c, c);
    // 2tp / (2tp + fp + fn), with fp + fn = pred + gold - 2tp
    if (tp > 0) f1[c] = 2.0 * static_cast<double>(tp) / static_cast<double>(gold + pred);
  }
  return f1;
}

double ConfusionMatrix::macro_f1() const {
  const auto f1 = per_class_f1();
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < arity_; ++c) {
    std::size_t seen = 0;
    for (std::size_t j = 0; j < arity_; ++j) seen += at(c, j) + at(j, c);
    if (seen == 0) continue;
    sum += f1[c];
    ++present;
  }
  return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

double ConfusionMatrix::micro_f1() const {
  const std::size_t t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

std::string ConfusionMatrix::to_csv(std::string_view level) const {
  std::ostringstream out;
  for (std::size_t g = 0; g < arity_; ++g) {
    for (std::size_t p = 0; p < arity_; ++p) {
      out << level << ',' << to_string(label_at(g, arity_)) << ',' << to_string(label_at(p, arity_)) << ','
          << at(g, p) << '\n';
    }
  }
  return out.str();
}

namespace {

ConfusionMatrix matrix_of(std::span<const Label> gold, std::span<const Label> pred, std::size_t arity) {
  if (gold.size() != pred.size()) throw ValidationError("gold and prediction counts differ");
  ConfusionMatrix m(arity);
  for (std::size_t i = 0; i < gold.size(); ++i) m.add(gold[i], pred[i]);
  return m;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

}  // namespace

double macro_f1(std::span<const Label> gold, std::span<const Label> pred, std::size_t arity) {
  return matrix_of(gold, pred, arity).macro_f1();
}

double micro_f1(std::span<const Label> gold, std::span<const Label> pred, std::size_t arity) {
  return matrix_of(gold, pred, arity).micro_f1();
}

std::vector<BucketRow> MetricsReport::axis(std::string_view name) const {
  std::vector<BucketRow> rows;
  for (const auto& b : buckets) {
    if (b.axis == name) rows.push_back(b);
  }
  return rows;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["arity"] = arity;
  j["macro_f1"] = macro_f1;
  j["micro_f1"] = micro_f1;
  j["accuracy"] = accuracy;
  j["per_class_f1"] = per_class_f1;
  j["consistency_violation_rate"] = consistency_violation_rate;
  auto cm = [](const ConfusionMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t g = 0; g < m.arity(); ++g) {
      std::vector<std::size_t> row;
      for (std::size_t p = 0; p < m.arity(); ++p) row.push_back(m.at(g, p));
      rows.push_back(row);
    }
    return rows;
  };
  j["confusion"] = {{"claim", cm(claim)}, {"event", cm(event)}, {"order", cm(order)}};
  nlohmann::json b = nlohmann::json::array();
  for (const auto& r : buckets) {
    b.push_back({{"axis", r.axis}, {"bucket", r.bucket}, {"count", r.count}, {"macro_f1", r.macro_f1},
                 {"micro_f1", r.micro_f1}});
  }
  j["buckets"] = b;
  return j.dump(2);
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out << "claims " << n << "  macro-F1 " << fmt(macro_f1) << "  micro-F1 " << fmt(micro_f1)
      << "  consistency violations " << fmt(consistency_violation_rate) << '\n';
  out << std::left << std::setw(12) << "bucket";
  for (const auto& r : buckets) out << std::setw(13) << r.bucket;
  out << '\n' << std::setw(12) << "macro-F1";
  for (const auto& r : buckets) out << std::setw(13) << fmt(r.macro_f1);
  out << '\n' << std::setw(12) << "count";
  for (const auto& r : buckets) out << std::setw(13) << r.count;
  out << '\n';
  return out.str();
}

std::string MetricsReport::buckets_csv() const {
  std::ostringstream out;
  out << "axis,bucket,count,macro_f1,micro_f1\n";
  for (const auto& r : buckets) {
    out << r.axis << ',' << r.bucket << ',' << r.count << ',' << fmt(r.macro_f1) << ',' << fmt(r.micro_f1) << '\n';
  }
  return out.str();
}

Label implied_label(const VerificationResult& result, const Ablation& ablation) {
  std::vector<Label> events;
  if (!ablation.no_event_classifier) events = result.event_labels;
  std::optional<Label> order;
  if (!ablation.no_order_classifier) order = result.order_label;
  return hard_rule(events, order);
}

MetricsReport compute_metrics(std::span<const DatasetRecord> records, std::span<const VerificationResult> results,
                              std::size_t arity, const Ablation& ablation) {
  if (records.empty()) throw ValidationError("cannot evaluate an empty dataset");
  if (records.size() != results.size()) throw ValidationError("one result per record expected");

  MetricsReport rep;
  rep.n = records.size();
  rep.arity = arity;
  rep.claim = ConfusionMatrix(arity);
  rep.event = ConfusionMatrix(arity);
  rep.order = ConfusionMatrix(2);

  // Bucket key -> (gold, pred) lists, kept in axis order.
  std::map<std::pair<int, std::string>, std::pair<std::vector<Label>, std::vector<Label>>> groups;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const auto& res = results[i];
    if (!rec.claim.gold) throw ValidationError("record " + rec.claim.id + " has no gold labels");
    const ClaimGold& gold = *rec.claim.gold;
    rep.claim.add(gold.claim_label, res.claim_label);
    if (!ablation.no_event_classifier) {
      const std::size_t m = std::min(gold.event_labels.size(), res.event_labels.size());
      for (std::size_t e = 0; e < m; ++e) rep.event.add(gold.event_labels[e], res.event_labels[e]);
    }
    if (!ablation.no_order_classifier) rep.order.add(gold.order_label, res.order_label);
    if (res.claim_label != implied_label(res, ablation)) ++violations;

    const std::pair<int, std::string> keys[] = {
        {0, std::to_string(rec.n_events())},
        {1, std::string(to_string(rec.expression))},
        {2, std::string(to_string(rec.category))},
    };
    for (const auto& k : keys) {
      auto& grp = groups[k];
      grp.first.push_back(gold.claim_label);
      grp.second.push_back(res.claim_label);
    }
  }
  static const char* const kAxes[] = {"events", "expression", "category"};
  for (const auto& [key, lists] : groups) {
    const auto m = matrix_of(lists.first, lists.second, arity);
    rep.buckets.push_back({kAxes[key.first], key.second, lists.first.size(), m.macro_f1(), m.micro_f1()});
  }
  rep.macro_f1 = rep.claim.macro_f1();
  rep.micro_f1 = rep.claim.micro_f1();
  rep.accuracy = rep.micro_f1;
  rep.per_class_f1 = rep.claim.per_class_f1();
  rep.consistency_violation_rate = static_cast<double>(violations) / static_cast<double>(rep.n);
  return rep;
}

double majority_baseline_macro_f1(std::span<const DatasetRecord> records, std::size_t arity) {
  if (records.empty()) throw ValidationError("cannot evaluate an empty dataset");
  std::vector<std::size_t> counts(arity, 0);
  std::vector<Label> gold;
  for (const auto& r : records) {
    if (!r.claim.gold) throw ValidationError("record " + r.claim.id + " has no gold labels");
    gold.push_back(r.claim.gold->claim_label);
    ++counts[index_of(gold.back())];
  }
  const auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  std::vector<Label> pred(gold.size(), label_at(best, arity));
  return macro_f1(gold, pred, arity);
}

}  // namespace chronofact
