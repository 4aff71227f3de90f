// Python bindings. Structured records cross the boundary as JSON text and are
// decoded by the pure-Python wrapper in boilerfield/__init__.py.
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "boilerfield/dom.hpp"
#include "boilerfield/embeddings.hpp"
#include "boilerfield/error.hpp"
#include "boilerfield/evaluator.hpp"
#include "boilerfield/graph.hpp"
#include "boilerfield/json_io.hpp"
#include "boilerfield/pipeline.hpp"
#include "boilerfield/solver.hpp"

namespace py = pybind11;
using namespace boilerfield;

namespace {

KernelSpec kernel_from(const std::string& name, std::optional<double> sigma) {
  if (name == "rbf") return KernelSpec::rbf(sigma);
  if (name == "inner") {
    if (sigma) throw UsageError("sigma applies to the rbf kernel only");
    return KernelSpec::inner_product();
  }
  throw UsageError("unknown kernel '" + name + "' (expected rbf or inner)");
}

SimilarityGraph graph_from(const std::vector<std::vector<double>>& weights) {
  const std::size_t n = weights.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : weights) {
    if (row.size() != n) throw UsageError("weight matrix must be square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return SimilarityGraph::from_dense(n, std::move(flat));
}

std::vector<std::vector<double>> to_rows(const SimilarityGraph& g) {
  std::vector<std::vector<double>> rows(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rows[i].assign(g.row(i).begin(), g.row(i).end());
  return rows;
}

std::vector<FeatureVector> features_from(const std::vector<std::vector<double>>& vectors) {
  std::vector<FeatureVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back({v, 1});
  return out;
}

SeedSet seeds_from(const std::map<std::size_t, int>& labels) { return SeedSet{labels}; }

py::dict result_dict(const PropagationResult& r) {
  py::dict d;
  d["scores"] = r.scores;
  d["labels"] = r.labels;
  d["iterations"] = r.iterations;
  d["residual"] = r.residual;
  d["energy"] = r.energy;
  d["isolated"] = r.isolated;
  d["warnings"] = r.warnings;
  d["energy_trace"] = r.energy_trace;
  return d;
}

RunConfig config_from(const std::string& kernel, std::optional<double> sigma, std::optional<std::size_t> knn,
                      const std::string& solver, double tol, std::optional<std::size_t> max_iters, double threshold,
                      const std::string& seed_mode, double seed_fraction, std::optional<std::uint64_t> seed_rng) {
  RunConfig c;
  c.kernel = kernel_from(kernel, sigma);
  c.knn = knn;
  if (solver == "iterative")
    c.solver = SolverKind::Iterative;
  else if (solver == "direct")
    c.solver = SolverKind::Direct;
  else
    throw UsageError("unknown solver '" + solver + "' (expected iterative or direct)");
  c.tol = tol;
  c.max_iters = max_iters;
  c.threshold = threshold;
  if (seed_mode == "heuristic")
    c.seed_mode = SeedMode::Heuristic;
  else if (seed_mode == "truth")
    c.seed_mode = SeedMode::Truth;
  else
    throw UsageError("unknown seed mode '" + seed_mode + "' (expected heuristic or truth)");
  c.seed_fraction = seed_fraction;
  if (seed_rng) c.seed_strategy = RandomSample{*seed_rng};
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Boilerplate removal by harmonic label propagation over text blocks";

  // Registered first so the translator below, which also sets exit_code, takes precedence.
  py::register_exception<Error>(m, "BoilerfieldError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::module_::import("boilerfield._core").attr("BoilerfieldError")(e.what());
      exc.attr("exit_code") = e.exit_code();
      PyErr_SetObject(exc.get_type().ptr(), exc.ptr());
    }
  });

  m.def("text_hash", [](const std::string& text) { return text_hash(normalize_text(text)); }, py::arg("text"),
        "Hash of the normalized text: 16 lowercase hex digits of FNV-1a 64.");
  m.def("normalize_text", &normalize_text, py::arg("text"));
  m.def("tokenize", &tokenize, py::arg("text"));

  m.def(
      "extract_blocks_json",
      [](const std::string& html, const std::string& page_id) {
        return dump_stable(blocks_to_json(page_id, extract_text_blocks(decode_document_bytes(html))));
      },
      py::arg("html"), py::arg("page_id"));

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def_static("load", &EmbeddingTable::load, py::arg("path"))
      .def_static(
          "parse",
          [](const std::string& text) {
            std::istringstream in(text);
            return EmbeddingTable::parse(in);
          },
          py::arg("text"))
      .def_property_readonly("dim", &EmbeddingTable::dim)
      .def("__len__", &EmbeddingTable::size)
      .def(
          "lookup",
          [](const EmbeddingTable& t, const std::string& token) -> std::optional<std::vector<float>> {
            const auto v = t.lookup(token);
            if (!v) return std::nullopt;
            return std::vector<float>(v->begin(), v->end());
          },
          py::arg("token"))
      .def(
          "embed",
          [](const EmbeddingTable& t, const std::string& text) {
            const auto f = embed_block(text, t);
            return py::make_tuple(f.values, f.in_vocab_count);
          },
          py::arg("text"), "Averaged vector of the in-vocabulary tokens and their count.");

  m.def(
      "build_graph",
      [](const std::vector<std::vector<double>>& vectors, const std::string& kernel, std::optional<double> sigma,
         std::optional<std::size_t> knn) {
        const auto features = features_from(vectors);
        const auto g = build_graph(features, kernel_from(kernel, sigma), knn);
        return py::make_tuple(to_rows(g), g.sigma);
      },
      py::arg("vectors"), py::arg("kernel") = "rbf", py::arg("sigma") = py::none(), py::arg("knn") = py::none());
  m.def("median_sigma", [](const std::vector<std::vector<double>>& v) { return median_sigma(features_from(v)); },
        py::arg("vectors"));

  m.def(
      "energy", [](const std::vector<std::vector<double>>& w, const std::vector<double>& f) {
        return energy(graph_from(w), f);
      },
      py::arg("weights"), py::arg("f"));

  m.def(
      "solve_iterative",
      [](const std::vector<std::vector<double>>& w, const std::map<std::size_t, int>& seeds, double tol,
         std::optional<std::size_t> max_iters, double init, double threshold, bool trace_energy) {
        SolveOptions opt;
        opt.tol = tol;
        opt.max_iters = max_iters;
        opt.init = init;
        opt.threshold = threshold;
        opt.trace_energy = trace_energy;
        return result_dict(solve_iterative(graph_from(w), seeds_from(seeds), opt));
      },
      py::arg("weights"), py::arg("seeds"), py::arg("tol") = 1e-8, py::arg("max_iters") = py::none(),
      py::arg("init") = 1.0, py::arg("threshold") = 0.5, py::arg("trace_energy") = false);
  m.def(
      "solve_direct",
      [](const std::vector<std::vector<double>>& w, const std::map<std::size_t, int>& seeds, double threshold) {
        return result_dict(solve_direct(graph_from(w), seeds_from(seeds), threshold));
      },
      py::arg("weights"), py::arg("seeds"), py::arg("threshold") = 0.5);

  m.def(
      "extract_page_json",
      [](const std::string& html, const EmbeddingTable& table, const std::string& page_id,
         std::optional<std::string> truth_json, const std::string& kernel, std::optional<double> sigma,
         std::optional<std::size_t> knn, const std::string& solver, double tol, std::optional<std::size_t> max_iters,
         double threshold, const std::string& seed_mode, double seed_fraction, std::optional<std::uint64_t> seed_rng) {
        const auto config =
            config_from(kernel, sigma, knn, solver, tol, max_iters, threshold, seed_mode, seed_fraction, seed_rng);
        PageInput page{page_id, html, std::nullopt};
        if (truth_json) page.truth = truth_from_json(Json::parse(*truth_json));
        if (config.seed_mode == SeedMode::Truth && !page.truth) throw UsageError("truth seeding needs a truth page");
        return dump_stable(to_json(extract_page(page, config, table)));
      },
      py::arg("html"), py::arg("table"), py::arg("page_id"), py::arg("truth_json"), py::arg("kernel"),
      py::arg("sigma"), py::arg("knn"), py::arg("solver"), py::arg("tol"), py::arg("max_iters"), py::arg("threshold"),
      py::arg("seed_mode"), py::arg("seed_fraction"), py::arg("seed_rng"));

  m.def(
      "compare_json",
      [](const std::string& pred, const std::string& truth, bool exclude_seeds) {
        return dump_stable(to_json(compare(prediction_from_json(Json::parse(pred)),
                                           truth_from_json(Json::parse(truth)), exclude_seeds)));
      },
      py::arg("pred"), py::arg("truth"), py::arg("exclude_seeds"));
  m.def(
      "evaluate_json",
      [](const std::filesystem::path& pred_dir, const std::filesystem::path& truth_dir, bool exclude_seeds,
         bool micro) {
        const auto outcome = run_evaluate(pred_dir, truth_dir, exclude_seeds, micro ? Averaging::Micro : Averaging::Macro);
        return py::make_tuple(dump_stable(to_json(outcome)), outcome.exit_code);
      },
      py::arg("pred_dir"), py::arg("truth_dir"), py::arg("exclude_seeds"), py::arg("micro"));
}
