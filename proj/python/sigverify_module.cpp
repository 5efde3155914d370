#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>

#include "sigverify/alignment.hpp"
#include "sigverify/eval.hpp"
#include "sigverify/ingest.hpp"
#include "sigverify/path_signature.hpp"
#include "sigverify/pipeline.hpp"
#include "sigverify/scoring.hpp"
#include "sigverify/synth.hpp"

namespace py = pybind11;
using namespace sigverify;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ValidationError("expected a 2-D array (samples x channels)");
  Matrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

LocalMetric parse_metric(const std::string& s) {
  if (s == "euclidean") return LocalMetric::euclidean;
  if (s == "sq_euclidean") return LocalMetric::sq_euclidean;
  throw ValidationError("unknown metric '" + s + "'");
}

ImpostorFilter parse_filter(const std::string& s) {
  for (auto f : {ImpostorFilter::all, ImpostorFilter::skilled_only, ImpostorFilter::random_only}) {
    if (to_string(f) == s) return f;
  }
  throw ValidationError("unknown impostor filter '" + s + "'");
}

SoftDtwNormalization parse_normalization(const std::string& s) {
  if (s == "none") return SoftDtwNormalization::none;
  if (s == "length_sum") return SoftDtwNormalization::length_sum;
  throw ValidationError("unknown normalization '" + s + "'");
}

std::vector<ScoreRecord> records(const std::vector<double>& scores, const std::vector<std::string>& labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  std::vector<ScoreRecord> out;
  for (std::size_t k = 0; k < scores.size(); ++k) out.push_back({scores[k], parse_label(labels[k])});
  return out;
}

// Columns t, x, y and, when present, p.
Array signature_points(const RawSignature& sig) {
  const std::size_t cols = sig.has_pressure() ? 4 : 3;
  Matrix m(sig.size(), cols);
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const auto& pt = sig.points[i];
    m(i, 0) = pt.t;
    m(i, 1) = pt.x;
    m(i, 2) = pt.y;
    if (cols == 4) m(i, 3) = *pt.p;
  }
  return to_array(m);
}

}  // namespace

PYBIND11_MODULE(_sigverify, m) {
  m.doc() = "On-line signature verification toolkit";

  auto error = py::register_exception<Error>(m, "Error");
  auto format_error = py::register_exception<FormatError>(m, "FormatError", error.ptr());
  auto validation_error = py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", validation_error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());
  (void)format_error;

  py::class_<RawSignature>(m, "Signature")
      .def_readonly("id", &RawSignature::id)
      .def_property_readonly("input_tool", [](const RawSignature& s) { return std::string(to_string(s.meta.input_tool)); })
      .def_property_readonly("has_pressure", &RawSignature::has_pressure)
      .def_property_readonly("points", &signature_points)
      .def("__len__", &RawSignature::size)
      .def("to_text", &serialize_signature);

  m.def("parse_signature", [](const std::string& text, const std::string& id) { return parse_signature(text, id); },
        py::arg("text"), py::arg("id") = "");

  m.def(
      "dtw",
      [](const Array& a, const Array& b, const std::string& metric) {
        const auto r = dtw(to_matrix(a), to_matrix(b), parse_metric(metric));
        return py::make_tuple(r.cumulative_cost, r.path.pairs, r.normalized_score);
      },
      py::arg("a"), py::arg("b"), py::arg("metric") = "euclidean",
      "Returns (cumulative_cost, path, normalized_score).");

  m.def(
      "soft_dtw",
      [](const Array& a, const Array& b, double gamma, const std::string& metric) {
        return soft_dtw(to_matrix(a), to_matrix(b), gamma, parse_metric(metric));
      },
      py::arg("a"), py::arg("b"), py::arg("gamma"), py::arg("metric") = "sq_euclidean");

  m.def(
      "soft_dtw_value_and_grad",
      [](const Array& a, const Array& b, double gamma, const std::string& metric) {
        const auto r = soft_dtw_value_and_grad(to_matrix(a), to_matrix(b), gamma, parse_metric(metric));
        return py::make_tuple(r.value, to_array(r.grad_a), to_array(r.grad_b));
      },
      py::arg("a"), py::arg("b"), py::arg("gamma"), py::arg("metric") = "sq_euclidean");

  m.def(
      "triplet_loss",
      [](const Array& anchor, const Array& pos, const Array& neg, double margin, double gamma,
         const std::string& normalization) {
        const auto r = triplet_loss(to_matrix(anchor), to_matrix(pos), to_matrix(neg), margin, gamma,
                                    parse_normalization(normalization));
        return py::make_tuple(r.loss, to_array(r.grad_anchor), to_array(r.grad_positive),
                              to_array(r.grad_negative));
      },
      py::arg("anchor"), py::arg("positive"), py::arg("negative"), py::arg("margin"), py::arg("gamma"),
      py::arg("normalization") = "none");

  m.def(
      "path_signature", [](const Array& path, int depth) { return path_signature(to_matrix(path), depth); },
      py::arg("path"), py::arg("depth"));

  m.def(
      "eer",
      [](const std::vector<double>& scores, const std::vector<std::string>& labels, const std::string& filter) {
        return eer(records(scores, labels), parse_filter(filter));
      },
      py::arg("scores"), py::arg("labels"), py::arg("filter") = "all",
      "EER in percent; higher scores mean more genuine.");

  m.def(
      "evaluate",
      [](const std::vector<double>& scores, const std::vector<std::string>& labels) {
        return serialize_report(evaluate(records(scores, labels)));
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "tanh_normalize",
      [](const std::vector<double>& s, double mu, double sigma) { return tanh_normalize(s, mu, sigma); },
      py::arg("scores"), py::arg("mu"), py::arg("sigma"));

  m.def("sigstat_local_score", &sigstat_local_score, py::arg("d"), py::arg("g_th"), py::arg("f_th"),
        py::arg("s"));
  m.def("sigstat_global_score", &sigstat_global_score, py::arg("d"), py::arg("d_g_min"),
        py::arg("d_f_med"));

  m.def(
      "rank_teams",
      [](const TaskResults& results) {
        const auto table = rank_teams(results);
        std::vector<std::pair<std::string, int>> totals;
        for (const auto& t : table.totals) totals.emplace_back(t.team, t.total);
        return py::make_tuple(totals, render_ranking_markdown(table));
      },
      py::arg("results"), "results: {task: {team: eer}}. Returns (totals, markdown).");

  m.def(
      "normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
      py::arg("text"), "Parses, validates and re-serializes a pipeline config with every key resolved.");

  m.def(
      "score_comparisons",
      [](const std::string& config_text, const std::filesystem::path& manifest,
         const std::filesystem::path& comparisons, unsigned workers) {
        const auto cfg = config_text.empty() ? baseline_dtw_config() : parse_config(config_text);
        const auto man = load_manifest(manifest);
        const auto list = parse_comparisons(read_text_file(comparisons));
        check_resolves(man, list);
        py::gil_scoped_release release;
        return score_comparisons(cfg, man, list, workers);
      },
      py::arg("config"), py::arg("manifest"), py::arg("comparisons"), py::arg("workers") = 1);

  m.def(
      "write_synthetic",
      [](const std::string& spec_text, const std::filesystem::path& out_dir) {
        const auto spec = parse_synth_spec(spec_text);
        write_synthetic(generate_synthetic(spec), out_dir);
      },
      py::arg("spec"), py::arg("out_dir"), "Writes a seeded synthetic dataset; spec is key=value text.");
}
