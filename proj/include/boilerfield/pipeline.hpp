#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "boilerfield/embeddings.hpp"
#include "boilerfield/evaluator.hpp"
#include "boilerfield/graph.hpp"
#include "boilerfield/json_io.hpp"
#include "boilerfield/records.hpp"
#include "boilerfield/seeds.hpp"
#include "boilerfield/solver.hpp"

namespace boilerfield {

enum class SolverKind { Iterative, Direct };
enum class SeedMode { Heuristic, Truth };

struct RunConfig {
  std::vector<std::filesystem::path> inputs;  // HTML files or directories
  std::filesystem::path embeddings;
  KernelSpec kernel = KernelSpec::rbf();
  std::optional<std::size_t> knn;
  SolverKind solver = SolverKind::Iterative;
  double tol = 1e-8;
  std::optional<std::size_t> max_iters;
  double threshold = 0.5;
  SeedMode seed_mode = SeedMode::Heuristic;
  double seed_fraction = 0.2;
  SampleStrategy seed_strategy = FirstL{};
  /// Ground truth for truth seeding, and the fallback when no heuristic fires.
  std::optional<std::filesystem::path> truth_dir;
  std::vector<HeuristicRule> rules = default_rules();
  std::filesystem::path out_dir = "predictions";
  std::size_t jobs = 1;
  bool continue_on_error = false;

  /// Throws Error describing the first invalid field.
  void validate() const;
};

struct PageInput {
  std::string page_id;
  std::string html;
  std::optional<GroundTruthPage> truth;
};

/// ingest -> embed -> graph -> seed -> solve -> binarize for one page.
Prediction extract_page(const PageInput& page, const RunConfig& config, const EmbeddingTable& table);

/// The configuration fields that do not depend on the page.
Json config_to_json(const RunConfig& config);

/// File stem, e.g. "news/p1.html" -> "p1".
std::string page_id_for(const std::filesystem::path& file);

/// Files as given; directories expand to their *.html / *.htm entries, sorted.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::filesystem::path>& inputs);

struct PageFailure {
  std::string page_id;
  std::string message;
  int exit_code = 2;
};

struct ExtractOutcome {
  std::vector<std::string> written;  // page ids, input order
  std::vector<PageFailure> failures;
  int exit_code = 0;
};

/// Runs every page and writes <out_dir>/<page_id>.json atomically.
ExtractOutcome run_extract(const RunConfig& config, std::ostream& log);

struct EvaluateOutcome {
  std::vector<EvalReport> reports;
  std::optional<EvalSummary> summary;
  std::vector<PageFailure> failures;
  int exit_code = 0;
};

/// Pairs predictions and truth files by page_id and scores them.
EvaluateOutcome run_evaluate(const std::filesystem::path& pred_dir, const std::filesystem::path& truth_dir,
                             bool exclude_seeds, Averaging averaging);

Json to_json(const EvaluateOutcome& outcome);

/// Fixed-width per-page table plus the aggregate line.
std::string format_table(const EvaluateOutcome& outcome);

std::string read_file(const std::filesystem::path& path);

}  // namespace boilerfield
