// Python bindings. Structured values cross the boundary as JSON text; the
// Python package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chronofact/chrono_time.hpp"
#include "chronofact/core.hpp"
#include "chronofact/datagen.hpp"
#include "chronofact/error.hpp"
#include "chronofact/extractor.hpp"
#include "chronofact/harness.hpp"
#include "chronofact/losses.hpp"
#include "chronofact/metrics.hpp"
#include "chronofact/model.hpp"
#include "chronofact/serialize.hpp"

namespace py = pybind11;
using namespace chronofact;

namespace {

std::vector<Label> labels(const std::vector<std::string>& names) {
  std::vector<Label> out;
  for (const auto& n : names) out.push_back(label_from_string(n));
  return out;
}

EvidencePool pool_from_sentences(const std::vector<std::string>& sentences) {
  EvidencePool pool;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ExtractOptions o;
    o.source = EventSource::kEvidence;
    o.id_prefix = "e" + std::to_string(i) + "_";
    for (auto& e : extract_events(sentences[i], o)) pool.add(std::move(e), {"input", std::to_string(i)});
  }
  return pool;
}

class Model {
 public:
  explicit Model(ModelParams params, std::uint64_t encoder_seed) : params_(std::move(params)), encoder_seed_(encoder_seed) {}

  static Model load(const std::string& path, std::uint64_t encoder_seed) { return Model(load_checkpoint(path), encoder_seed); }

  static Model fresh(const std::string& config_text, std::uint64_t seed) {
    const auto cfg = RunConfig::parse(config_text);
    return Model(ModelParams::init(cfg.model_config(), seed), cfg.encoder_seed);
  }

  void save(const std::string& path) const { save_checkpoint(params_, path); }
  std::uint64_t checksum() const { return checkpoint_checksum(params_); }
  std::size_t parameter_count() const { return params_.parameter_count(); }

  std::string verify(const std::string& claim_text, const std::vector<std::string>& evidence) const {
    Claim claim;
    claim.id = "claim";
    claim.text = claim_text;
    claim.events = extract_events(claim_text);
    PipelineConfig pipe;
    pipe.encoder = EventEncoderHandle::toy(params_.config.dim, encoder_seed_);
    const auto study = run_case_study(claim, pool_from_sentences(evidence), params_, pipe);
    Json j = to_json(study.result);
    j["rendered"] = render_case_study(study);
    return j.dump();
  }

  ModelParams params_;
  std::uint64_t encoder_seed_;
};

}  // namespace

PYBIND11_MODULE(_chronofact, m) {
  m.doc() = "Temporal claim verification core";

  // later registrations are tried first, so the base class goes first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("extract_events", [](const std::string& text) {
    Json arr = Json::array();
    for (const auto& e : extract_events(text)) arr.push_back(to_json(e));
    return arr.dump();
  });

  m.def("chronological_sort", [](const std::string& events_json) {
    std::vector<Event> ev;
    for (const auto& j : Json::parse(events_json)) ev.push_back(event_from_json(j));
    return chronological_sort(ev);
  });

  m.def("parse_temporal_expression", [](const std::string& text) -> std::optional<std::string> {
    const auto span = parse_temporal_expression(text);
    if (!span) return std::nullopt;
    return to_json(*span).dump();
  });

  m.def(
      "godel_aggregate",
      [](const std::vector<std::vector<double>>& events, std::optional<std::vector<double>> order, std::size_t arity) {
        std::vector<ProbDist> ev;
        for (const auto& d : events) ev.push_back(ProbDist::from(d));
        std::optional<ProbDist> o;
        if (order) o = ProbDist::from(*order);
        const auto z = godel_aggregate(ev, o, arity);
        return std::vector<double>(z.probs().begin(), z.probs().end());
      },
      py::arg("event_dists"), py::arg("order_dist") = std::nullopt, py::arg("arity") = 3);

  m.def(
      "hard_rule",
      [](const std::vector<std::string>& events, std::optional<std::string> order) {
        std::optional<Label> o;
        if (order) o = label_from_string(*order);
        return std::string(to_string(hard_rule(labels(events), o)));
      },
      py::arg("event_labels"), py::arg("order_label") = std::nullopt);

  m.def("macro_f1", [](const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                       std::size_t arity) { return macro_f1(labels(gold), labels(pred), arity); });
  m.def("micro_f1", [](const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                       std::size_t arity) { return micro_f1(labels(gold), labels(pred), arity); });

  m.def(
      "generate",
      [](std::size_t subjects, const std::vector<std::pair<std::string, std::size_t>>& splits, std::uint64_t seed,
         bool order_only) {
        GenerationPlan plan;
        plan.splits.clear();
        for (const auto& [name, count] : splits) plan.splits.push_back({name, count});
        plan.order_only = order_only;
        const auto rep = generate_dataset(generate_fact_corpus(subjects, seed), plan, seed);
        std::map<std::string, std::vector<std::string>> out;
        for (const auto& [name, recs] : rep.splits) {
          for (const auto& r : recs) out[name].push_back(to_json(r).dump());
        }
        return out;
      },
      py::arg("subjects"), py::arg("splits"), py::arg("seed") = 0, py::arg("order_only") = false);

  m.def(
      "train",
      [](const std::string& config_text, const std::string& train_path, const std::string& val_path,
         const std::string& checkpoint_path) {
        const auto cfg = RunConfig::parse(config_text);
        const auto tr = read_records(train_path);
        const auto va = val_path.empty() ? std::vector<DatasetRecord>{} : read_records(val_path);
        py::gil_scoped_release release;
        const auto result = train(cfg, tr, va);
        save_checkpoint(result.diverged ? result.last_good : result.best, checkpoint_path);
        return std::make_pair(result.best_val_macro_f1, result.diverged);
      },
      py::arg("config_text"), py::arg("train_path"), py::arg("val_path"), py::arg("checkpoint_path"));

  py::class_<Model>(m, "Model")
      .def_static("load", &Model::load, py::arg("path"), py::arg("encoder_seed") = 0)
      .def_static("fresh", &Model::fresh, py::arg("config_text") = "", py::arg("seed") = 0)
      .def("save", &Model::save)
      .def("checksum", &Model::checksum)
      .def("parameter_count", &Model::parameter_count)
      .def("verify_json", &Model::verify, py::arg("claim"), py::arg("evidence"));
}
