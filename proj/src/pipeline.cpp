#include "boilerfield/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "boilerfield/dom.hpp"
#include "boilerfield/error.hpp"

namespace boilerfield {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestError::Kind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void RunConfig::validate() const {
  if (inputs.empty()) throw UsageError("no input pages given");
  for (const auto& p : inputs) {
    if (!std::filesystem::exists(p)) throw UsageError("input does not exist: " + p.string());
  }
  if (!std::filesystem::is_regular_file(embeddings))
    throw UsageError("embeddings file does not exist: " + embeddings.string());
  if (kernel.sigma && !(*kernel.sigma > 0.0 && std::isfinite(*kernel.sigma)))
    throw UsageError("sigma must be positive and finite");
  if (knn && *knn == 0) throw UsageError("knn must be positive");
  if (!(tol > 0.0)) throw UsageError("tol must be positive");
  if (max_iters && *max_iters == 0) throw UsageError("max-iters must be positive");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw UsageError("threshold must lie in [0, 1]");
  if (!(seed_fraction > 0.0 && seed_fraction <= 1.0))
    throw UsageError("seed fraction must lie in (0, 1]");
  if (seed_mode == SeedMode::Truth && !truth_dir) throw UsageError("truth seeding needs --truth-dir");
  if (truth_dir && !std::filesystem::is_directory(*truth_dir))
    throw UsageError("truth directory does not exist: " + truth_dir->string());
  try {
    validate_rules(rules);
  } catch (const SeedError& e) {
    throw UsageError(e.what());
  }
  if (jobs == 0) throw UsageError("jobs must be positive");
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["embeddings"] = c.embeddings.generic_string();
  j["kernel"] = to_string(c.kernel.kind);
  if (c.kernel.kind == KernelKind::Rbf) {
    j["sigma"] = c.kernel.sigma ? Json(*c.kernel.sigma) : Json("median");
  } else {
    j["sigma"] = nullptr;
  }
  j["knn"] = c.knn ? Json(*c.knn) : Json(nullptr);
  j["solver"] = c.solver == SolverKind::Iterative ? "iterative" : "direct";
  j["tol"] = c.tol;
  j["max_iters"] = c.max_iters ? Json(*c.max_iters) : Json("auto");
  j["threshold"] = c.threshold;
  j["seed_mode"] = c.seed_mode == SeedMode::Heuristic ? "heuristic" : "truth";
  j["seed_fraction"] = c.seed_fraction;
  if (const auto* r = std::get_if<RandomSample>(&c.seed_strategy)) {
    j["seed_strategy"] = "random";
    j["seed_rng"] = r->seed;
  } else {
    j["seed_strategy"] = "first";
    j["seed_rng"] = nullptr;
  }
  j["rules"] = to_json(c.rules);
  return j;
}

std::string page_id_for(const std::filesystem::path& file) { return file.stem().string(); }

std::vector<std::filesystem::path> expand_inputs(const std::vector<std::filesystem::path>& inputs) {
  std::vector<std::filesystem::path> files;
  for (const auto& p : inputs) {
    if (!std::filesystem::is_directory(p)) {
      files.push_back(p);
      continue;
    }
    std::vector<std::filesystem::path> found;
    for (const auto& entry : std::filesystem::directory_iterator(p)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".html" || ext == ".htm")) found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  return files;
}

Prediction extract_page(const PageInput& page, const RunConfig& config, const EmbeddingTable& table) {
  Prediction pred;
  pred.page_id = page.page_id;
  pred.config = config_to_json(config);

  const auto blocks = extract_text_blocks(parse_document(page.html));
  Json& stats = pred.stats;
  stats["block_count"] = blocks.size();
  if (blocks.empty()) {
    pred.config["sigma_resolved"] = nullptr;
    pred.config["max_iters"] = config.max_iters.value_or(default_max_iters(0));
    stats["iterations"] = 0;
    stats["residual"] = 0.0;
    stats["energy"] = 0.0;
    stats["isolated"] = Json::array();
    stats["oov_blocks"] = Json::array();
    stats["seed_count"] = 0;
    stats["seed_source"] = nullptr;
    stats["warnings"] = Json::array({"page has no text blocks"});
    return pred;
  }

  std::vector<FeatureVector> vectors;
  vectors.reserve(blocks.size());
  Json oov = Json::array();
  for (const auto& b : blocks) {
    vectors.push_back(embed_block(b.text, table));
    if (vectors.back().is_zero()) oov.push_back(b.index);
  }
  const SimilarityGraph graph = build_graph(vectors, config.kernel, config.knn);
  pred.config["sigma_resolved"] = graph.sigma ? Json(*graph.sigma) : Json(nullptr);

  const auto sample_from_truth = [&]() {
    if (!page.truth) throw SeedError(SeedError::Kind::Coverage, "no ground truth for page " + page.page_id);
    return sample_seeds(*page.truth, blocks, config.seed_fraction, config.seed_strategy);
  };
  SeedSet seeds;
  std::string seed_source;
  if (config.seed_mode == SeedMode::Truth) {
    seeds = sample_from_truth();
    seed_source = "truth";
  } else {
    try {
      seeds = apply_heuristics(blocks, config.rules);
      seed_source = "heuristic";
    } catch (const SeedError& e) {
      if (e.kind() != SeedError::Kind::Empty || !page.truth) throw;
      seeds = sample_from_truth();
      seed_source = "truth-fallback";
    }
  }

  const std::size_t max_iters = config.max_iters.value_or(default_max_iters(blocks.size()));
  pred.config["max_iters"] = max_iters;
  PropagationResult result;
  if (config.solver == SolverKind::Direct) {
    result = solve_direct(graph, seeds, config.threshold);
  } else {
    SolveOptions options;
    options.tol = config.tol;
    options.max_iters = max_iters;
    options.threshold = config.threshold;
    result = solve_iterative(graph, seeds, options);
  }

  for (const auto& b : blocks) {
    pred.blocks.push_back(
        {b.dom_path, b.text_hash, result.scores[b.index], result.labels[b.index], seeds.contains(b.index)});
  }
  stats["iterations"] = result.iterations;
  stats["residual"] = result.residual;
  stats["energy"] = result.energy;
  stats["isolated"] = result.isolated;
  stats["oov_blocks"] = oov;
  stats["seed_count"] = seeds.size();
  stats["seed_source"] = seed_source;
  stats["warnings"] = result.warnings;
  return pred;
}

namespace {

int exit_code_of(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->exit_code();
  return 2;
}

}  // namespace

ExtractOutcome run_extract(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto files = expand_inputs(config.inputs);
  const EmbeddingTable table = EmbeddingTable::load(config.embeddings);
  std::filesystem::create_directories(config.out_dir);

  struct Slot {
    bool done = false;
    std::optional<PageFailure> failure;
  };
  std::vector<Slot> slots(files.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  const auto work = [&]() {
    while (!stop) {
      const std::size_t k = next++;
      if (k >= files.size()) return;
      const std::string id = page_id_for(files[k]);
      try {
        PageInput page{id, read_file(files[k]), std::nullopt};
        if (config.truth_dir) {
          const auto truth_file = *config.truth_dir / (id + ".json");
          if (std::filesystem::exists(truth_file)) page.truth = truth_from_json(read_json_file(truth_file));
        }
        const Prediction pred = extract_page(page, config, table);
        write_file_atomic(config.out_dir / (id + ".json"), dump_stable(to_json(pred)));
      } catch (const std::exception& e) {
        slots[k].failure = PageFailure{id, e.what(), exit_code_of(e)};
        if (!config.continue_on_error) stop = true;
      }
      slots[k].done = true;
    }
  };

  const std::size_t workers = std::min(config.jobs, std::max<std::size_t>(files.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  ExtractOutcome outcome;
  for (std::size_t k = 0; k < files.size(); ++k) {
    if (!slots[k].done) continue;
    if (slots[k].failure) {
      const auto& f = *slots[k].failure;
      log << "error: page " << f.page_id << ": " << f.message << "\n";
      if (outcome.exit_code == 0) outcome.exit_code = f.exit_code;
      outcome.failures.push_back(f);
    } else {
      outcome.written.push_back(page_id_for(files[k]));
    }
  }
  return outcome;
}

namespace {

template <typename T, typename Parse>
std::map<std::string, T> load_dir(const std::filesystem::path& dir, Parse parse, std::vector<PageFailure>& failures) {
  std::map<std::string, T> out;
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      T value = parse(read_json_file(f));
      std::string id = value.page_id;
      if (!out.emplace(id, std::move(value)).second)
        failures.push_back({id, "duplicate page_id in " + dir.string(), 2});
    } catch (const std::exception& e) {
      failures.push_back({page_id_for(f), f.string() + ": " + e.what(), 2});
    }
  }
  return out;
}

}  // namespace

EvaluateOutcome run_evaluate(const std::filesystem::path& pred_dir, const std::filesystem::path& truth_dir,
                             bool exclude_seeds, Averaging averaging) {
  EvaluateOutcome outcome;
  const auto preds = load_dir<Prediction>(pred_dir, prediction_from_json, outcome.failures);
  const auto truths = load_dir<GroundTruthPage>(truth_dir, truth_from_json, outcome.failures);
  for (const auto& [id, pred] : preds) {
    const auto it = truths.find(id);
    if (it == truths.end()) {
      outcome.failures.push_back({id, "no ground truth for predicted page", 2});
      continue;
    }
    try {
      outcome.reports.push_back(compare(pred, it->second, exclude_seeds));
    } catch (const std::exception& e) {
      outcome.failures.push_back({id, e.what(), 2});
    }
  }
  for (const auto& [id, truth] : truths) {
    if (!preds.contains(id)) outcome.failures.push_back({id, "no prediction for ground-truth page", 2});
  }
  if (!outcome.reports.empty()) outcome.summary = aggregate(outcome.reports, averaging);
  if (!outcome.failures.empty() || outcome.reports.empty()) outcome.exit_code = 2;
  return outcome;
}

Json to_json(const EvaluateOutcome& outcome) {
  Json pages = Json::array();
  for (const auto& r : outcome.reports) pages.push_back(to_json(r));
  Json failures = Json::array();
  for (const auto& f : outcome.failures) failures.push_back({{"page_id", f.page_id}, {"error", f.message}});
  return {{"pages", pages},
          {"summary", outcome.summary ? to_json(*outcome.summary) : Json(nullptr)},
          {"failures", failures}};
}

std::string format_table(const EvaluateOutcome& outcome) {
  const auto cell = [](const std::optional<double>& v) {
    char buf[16];
    if (!v) return std::string("      -");
    std::snprintf(buf, sizeof buf, "%7.3f", *v);
    return std::string(buf);
  };
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %5s %5s %5s %5s %7s %7s %7s %7s\n", "page", "tp", "fp", "fn", "tn",
                "prec", "recall", "f1", "acc");
  out << line;
  for (const auto& r : outcome.reports) {
    std::snprintf(line, sizeof line, "%-24.24s %5zu %5zu %5zu %5zu ", r.page_id.c_str(), r.tp, r.fp, r.fn, r.tn);
    out << line << cell(r.precision) << ' ' << cell(r.recall) << ' ' << cell(r.f1) << ' ' << cell(r.accuracy)
        << "\n";
  }
  if (outcome.summary) {
    const auto& s = *outcome.summary;
    std::snprintf(line, sizeof line, "%-24s %5zu %5zu %5zu %5zu ",
                  s.averaging == Averaging::Macro ? "macro average" : "micro average", s.totals.tp, s.totals.fp,
                  s.totals.fn, s.totals.tn);
    out << line << cell(s.precision.mean) << ' ' << cell(s.recall.mean) << ' ' << cell(s.f1.mean) << ' '
        << cell(s.accuracy.mean) << "\n";
  }
  for (const auto& f : outcome.failures) out << "error: " << f.page_id << ": " << f.message << "\n";
  return out.str();
}

}  // namespace boilerfield
