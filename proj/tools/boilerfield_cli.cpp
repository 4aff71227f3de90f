// boilerfield: boilerplate removal by label propagation over text blocks.
//
//   boilerfield extract <pages...> --embeddings glove.txt [--out predictions]
//   boilerfield evaluate --pred predictions --truth truth
//   boilerfield fetch <url> --out snapshots/
//   boilerfield tag-serve --pages snapshots --truth-dir truth

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "boilerfield/error.hpp"
#include "boilerfield/json_io.hpp"
#include "boilerfield/pipeline.hpp"
#include "boilerfield/serve.hpp"

namespace fs = std::filesystem;
using namespace boilerfield;

namespace {

constexpr int kExitUsage = 1;

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string embeddings;
  std::string kernel = "rbf";
  std::string sigma = "median";
  std::optional<std::size_t> knn;
  std::string solver = "iterative";
  double tol = 1e-8;
  std::optional<std::size_t> max_iters;
  double threshold = 0.5;
  std::string seed_mode = "heuristic";
  double seed_fraction = 0.2;
  std::string seed_strategy = "first";
  std::uint64_t seed_rng = 0;
  std::optional<std::string> truth_dir;
  std::optional<std::string> rules;
  std::string out = "predictions";
  std::size_t jobs = 1;
  bool continue_on_error = false;
};

RunConfig to_config(const ExtractArgs& a) {
  RunConfig c;
  for (const auto& p : a.inputs) c.inputs.emplace_back(p);
  c.embeddings = a.embeddings;
  if (a.kernel == "inner") {
    if (a.sigma != "median") throw UsageError("--sigma only applies to --kernel rbf");
    c.kernel = KernelSpec::inner_product();
  } else if (a.sigma == "median") {
    c.kernel = KernelSpec::rbf();
  } else {
    std::size_t used = 0;
    double sigma = 0.0;
    try {
      sigma = std::stod(a.sigma, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != a.sigma.size()) throw UsageError("--sigma must be a number or 'median', got '" + a.sigma + "'");
    c.kernel = KernelSpec::rbf(sigma);
  }
  c.knn = a.knn;
  c.solver = a.solver == "direct" ? SolverKind::Direct : SolverKind::Iterative;
  c.tol = a.tol;
  c.max_iters = a.max_iters;
  c.threshold = a.threshold;
  c.seed_mode = a.seed_mode == "truth" ? SeedMode::Truth : SeedMode::Heuristic;
  c.seed_fraction = a.seed_fraction;
  if (a.seed_strategy == "random") {
    c.seed_strategy = RandomSample{a.seed_rng};
  } else {
    c.seed_strategy = FirstL{};
  }
  if (a.truth_dir) c.truth_dir = fs::path(*a.truth_dir);
  if (a.rules) {
    try {
      c.rules = rules_from_json(read_json_file(*a.rules));
    } catch (const Error& e) {
      throw UsageError(std::string("--rules: ") + e.what());
    }
  }
  c.out_dir = a.out;
  c.jobs = a.jobs;
  c.continue_on_error = a.continue_on_error;
  return c;
}

int run_extract_cmd(const ExtractArgs& args) {
  const RunConfig config = to_config(args);
  const ExtractOutcome outcome = run_extract(config, std::cerr);
  if (!outcome.failures.empty()) {
    Json failures = Json::array();
    for (const auto& f : outcome.failures)
      failures.push_back({{"page_id", f.page_id}, {"error", f.message}, {"exit_code", f.exit_code}});
    std::cerr << dump_stable(Json{{"failures", failures}, {"written", outcome.written}});
  }
  return outcome.exit_code;
}

struct EvaluateArgs {
  std::string pred;
  std::string truth;
  bool include_seeds = false;
  bool micro = false;
  std::optional<std::string> out;
};

int run_evaluate_cmd(const EvaluateArgs& args) {
  const EvaluateOutcome outcome =
      run_evaluate(args.pred, args.truth, !args.include_seeds, args.micro ? Averaging::Micro : Averaging::Macro);
  std::cout << format_table(outcome);
  if (args.out) write_file_atomic(*args.out, dump_stable(to_json(outcome)));
  return outcome.exit_code;
}

struct FetchArgs {
  std::string url;
  std::string out = ".";
  std::optional<std::string> id;
};

std::string id_from_url(const std::string& url) {
  std::string id;
  const auto start = url.find("://");
  for (const char c : url.substr(start == std::string::npos ? 0 : start + 3)) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (keep) {
      id.push_back(c);
    } else if (!id.empty() && id.back() != '_') {
      id.push_back('_');
    }
  }
  while (!id.empty() && id.back() == '_') id.pop_back();
  return id.empty() ? "page" : id;
}

int run_fetch_cmd(const FetchArgs& args) {
  const std::string id = args.id.value_or(id_from_url(args.url));
  if (!is_valid_page_id(id)) throw UsageError("invalid page id '" + id + "'");
  const std::string body = fetch_url(args.url);
  fs::create_directories(args.out);
  const fs::path target = fs::path(args.out) / (id + ".html");
  write_file_atomic(target, body);
  std::cout << target.string() << "\n";
  return 0;
}

struct ServeArgs {
  std::string pages;
  std::string truth_dir = "truth";
  std::optional<std::string> ui_dir;
  std::string host = "127.0.0.1";
  int port = 8765;
};

TagServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve_cmd(const ServeArgs& args) {
  if (!fs::is_directory(args.pages)) throw UsageError("pages directory does not exist: " + args.pages);
  TagServerConfig config;
  config.pages_dir = args.pages;
  config.truth_dir = args.truth_dir;
  if (args.ui_dir) config.ui_dir = fs::path(*args.ui_dir);
  config.host = args.host;
  config.port = args.port;
  TagServer server(config);
  const int port = server.bind();
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving " << args.pages << " on http://" << args.host << ":" << port << "/" << std::endl;
  server.serve();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boilerplate removal by label propagation over a page's text blocks"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Label the text blocks of HTML pages as content (1) or boilerplate (0)");
  extract->add_option("inputs", ex.inputs, "HTML files or directories")->required();
  extract->add_option("--embeddings", ex.embeddings, "Word vectors in GloVe text format")->required();
  extract->add_option("--kernel", ex.kernel, "Edge weight kernel")->check(CLI::IsMember({"inner", "rbf"}));
  extract->add_option("--sigma", ex.sigma, "RBF bandwidth, or 'median' of pairwise distances");
  extract->add_option("--knn", ex.knn, "Keep only each block's k strongest edges")->check(CLI::PositiveNumber);
  extract->add_option("--solver", ex.solver)->check(CLI::IsMember({"iterative", "direct"}));
  extract->add_option("--tol", ex.tol, "Convergence tolerance on the harmonic residual")->check(CLI::PositiveNumber);
  extract->add_option("--max-iters", ex.max_iters, "Sweep limit (default max(1000, 10n))")->check(CLI::PositiveNumber);
  extract->add_option("--threshold", ex.threshold, "Scores above this are content")->check(CLI::Range(0.0, 1.0));
  extract->add_option("--seed-mode", ex.seed_mode)->check(CLI::IsMember({"heuristic", "truth"}));
  extract->add_option("--seed-fraction", ex.seed_fraction, "Fraction of blocks seeded from ground truth")
      ->check(CLI::Range(0.0, 1.0));
  extract->add_option("--seed-strategy", ex.seed_strategy)->check(CLI::IsMember({"first", "random"}));
  extract->add_option("--seed-rng", ex.seed_rng, "RNG seed for --seed-strategy random");
  extract->add_option("--truth-dir", ex.truth_dir, "Ground truth for truth seeding or heuristic fallback");
  extract->add_option("--rules", ex.rules, "Heuristic seed rule file (JSON)");
  extract->add_option("--out", ex.out, "Prediction output directory");
  extract->add_option("--jobs", ex.jobs, "Pages processed in parallel")->check(CLI::PositiveNumber);
  extract->add_flag("--continue-on-error", ex.continue_on_error, "Keep going after a page fails");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate->add_option("--pred", ev.pred, "Prediction directory")->required();
  evaluate->add_option("--truth", ev.truth, "Ground-truth directory")->required();
  evaluate->add_flag("--include-seeds", ev.include_seeds, "Count seeded blocks in the metrics");
  evaluate->add_flag("--micro", ev.micro, "Pool counts across pages instead of averaging per page");
  evaluate->add_option("--out", ev.out, "Also write the report as JSON");

  FetchArgs fe;
  auto* fetch = app.add_subcommand("fetch", "Save a page snapshot with a plain GET");
  fetch->add_option("url", fe.url)->required();
  fetch->add_option("--out", fe.out, "Snapshot directory");
  fetch->add_option("--id", fe.id, "Page id (default derived from the URL)");

  ServeArgs se;
  auto* serve = app.add_subcommand("tag-serve", "Serve snapshots for manual tagging and collect ground truth");
  serve->add_option("--pages", se.pages, "Snapshot directory")->required();
  serve->add_option("--truth-dir", se.truth_dir, "Where posted ground truth is written");
  serve->add_option("--ui-dir", se.ui_dir, "Built tagging UI assets");
  serve->add_option("--host", se.host);
  serve->add_option("--port", se.port, "0 picks a free port")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (extract->parsed()) return run_extract_cmd(ex);
    if (evaluate->parsed()) return run_evaluate_cmd(ev);
    if (fetch->parsed()) return run_fetch_cmd(fe);
    return run_serve_cmd(se);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
