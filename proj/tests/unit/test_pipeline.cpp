#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "boilerfield/error.hpp"
#include "boilerfield/json_io.hpp"
#include "boilerfield/pipeline.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace boilerfield;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("boilerfield-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& content) const {
    const auto p = path / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }
};

constexpr const char* kVectors = "alpha 1 0\nomega 0 1\n";

EmbeddingTable table() {
  std::istringstream in(kVectors);
  return EmbeddingTable::parse(in);
}

RunConfig config_for(const TempDir& dir) {
  RunConfig c;
  c.embeddings = dir.write("vectors.txt", kVectors);
  c.out_dir = dir.path / "out";
  return c;
}

}  // namespace

TEST_CASE("extract_page: both blocks seeded by heuristics") {
  TempDir dir;
  const auto pred = extract_page({"p", "<article><p>alpha</p></article><footer><p>omega</p></footer>", {}},
                                 config_for(dir), table());
  REQUIRE(pred.blocks.size() == 2);
  CHECK(pred.blocks[0].seed);
  CHECK(pred.blocks[1].seed);
  CHECK(pred.blocks[0].label == 1);
  CHECK(pred.blocks[1].label == 0);
  CHECK(pred.stats["seed_source"] == "heuristic");
}

TEST_CASE("extract_page: one unknown between two seeds") {
  // B repeats A's text so their vectors coincide; C is orthogonal. Pairwise
  // distances are {0, sqrt2, sqrt2}, so the median sigma is sqrt2 and
  // w_BA = 1, w_BC = exp(-2 / (2 * 2)) = exp(-1/2). The single harmonic
  // equation gives f_B = w_BA / (w_BA + w_BC).
  TempDir dir;
  const auto pred = extract_page(
      {"p", "<article><p>alpha</p></article><div><p>alpha</p></div><footer><p>omega</p></footer>", {}},
      config_for(dir), table());
  REQUIRE(pred.blocks.size() == 3);
  const double expected = 1.0 / (1.0 + std::exp(-0.5));
  CHECK(pred.blocks[1].score == doctest::Approx(expected).epsilon(1e-8));
  CHECK(pred.blocks[1].label == 1);
  CHECK_FALSE(pred.blocks[1].seed);
  CHECK(pred.config["sigma_resolved"].get<double>() == doctest::Approx(std::sqrt(2.0)));

  RunConfig direct = config_for(dir);
  direct.solver = SolverKind::Direct;
  const auto exact = extract_page(
      {"p", "<article><p>alpha</p></article><div><p>alpha</p></div><footer><p>omega</p></footer>", {}}, direct,
      table());
  CHECK(exact.blocks[1].score == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("extract_page: empty page") {
  TempDir dir;
  const auto pred = extract_page({"empty", "", {}}, config_for(dir), table());
  CHECK(pred.blocks.empty());
  CHECK(pred.stats["block_count"] == 0);
}

TEST_CASE("extract_page: truth seeding and heuristic fallback") {
  TempDir dir;
  const std::string html = "<div><p>alpha</p><p>omega</p><p>alpha omega alpha</p></div>";
  const auto blocks = extract_text_blocks(html);
  GroundTruthPage truth{"p", {}};
  for (const auto& b : blocks) truth.blocks.push_back({b.dom_path, b.text_hash, b.index == 1 ? 0 : 1});

  auto config = config_for(dir);
  CHECK_THROWS_AS(extract_page({"p", html, {}}, config, table()), SeedError);  // no rule fires
  auto pred = extract_page({"p", html, truth}, config, table());
  CHECK(pred.stats["seed_source"] == "truth-fallback");
  config.seed_mode = SeedMode::Truth;
  config.seed_fraction = 0.5;
  pred = extract_page({"p", html, truth}, config, table());
  CHECK(pred.stats["seed_source"] == "truth");
  CHECK(pred.stats["seed_count"] == 2);
  CHECK(pred.blocks[0].seed);
  CHECK(pred.blocks[1].seed);
  CHECK(pred.blocks[2].label == 1);
}

TEST_CASE("extract_page: config echo is enough to rerun") {
  TempDir dir;
  auto config = config_for(dir);
  config.kernel = KernelSpec::inner_product();
  config.knn = 3;
  config.seed_strategy = RandomSample{42};
  const auto pred = extract_page({"p", "<article><p>alpha</p></article><nav>omega</nav>", {}}, config, table());
  const Json& c = pred.config;
  CHECK(c["kernel"] == "inner");
  CHECK(c["knn"] == 3);
  CHECK(c["seed_strategy"] == "random");
  CHECK(c["seed_rng"] == 42);
  CHECK(c["tol"] == 1e-8);
  CHECK(c["max_iters"] == 1000);
  CHECK(c["rules"] == to_json(default_rules()));
  for (const char* key : {"embeddings", "solver", "threshold", "seed_mode", "seed_fraction", "sigma"})
    CHECK(c.contains(key));
}

TEST_CASE("run_extract: writes one file per page, deterministically") {
  TempDir dir;
  auto config = config_for(dir);
  dir.write("pages/a.html", "<article><p>alpha</p></article><div><p>alpha omega</p></div><footer>omega</footer>");
  dir.write("pages/b.htm", "<article><p>alpha</p></article><aside>omega</aside>");
  dir.write("pages/notes.txt", "ignored");
  config.inputs = {dir.path / "pages"};
  config.jobs = 4;
  std::ostringstream log;
  const auto outcome = run_extract(config, log);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.written == std::vector<std::string>{"a", "b"});
  const auto first = read_file(config.out_dir / "a.json");
  CHECK(first.back() == '\n');
  config.jobs = 1;
  run_extract(config, log);
  CHECK(read_file(config.out_dir / "a.json") == first);
  CHECK_NOTHROW(prediction_from_json(Json::parse(first)));
}

TEST_CASE("run_extract: failures and exit codes") {
  TempDir dir;
  auto config = config_for(dir);
  config.inputs = {dir.write("a.html", "<div>no rule matches</div>"),
                   dir.write("b.html", "<article><p>alpha</p></article>")};
  std::ostringstream log;
  auto outcome = run_extract(config, log);
  CHECK(outcome.exit_code == 2);
  CHECK(outcome.failures.size() == 1);
  CHECK(outcome.failures[0].page_id == "a");
  CHECK(log.str().find("page a") != std::string::npos);

  config.continue_on_error = true;
  outcome = run_extract(config, log);
  CHECK(outcome.exit_code == 2);
  CHECK(outcome.written == std::vector<std::string>{"b"});

  // One sweep is not enough for a chain of unseeded blocks.
  std::string chain = "<article><p>alpha</p></article>";
  for (int k = 0; k < 30; ++k) chain += "<p>alpha omega</p>";
  chain += "<footer>omega</footer>";
  config.inputs = {dir.write("c.html", chain)};
  config.max_iters = 1;
  config.solver = SolverKind::Iterative;
  outcome = run_extract(config, log);
  CHECK(outcome.exit_code == 3);
}

TEST_CASE("RunConfig::validate reports usage errors") {
  TempDir dir;
  auto config = config_for(dir);
  config.inputs = {dir.write("a.html", "")};
  CHECK_NOTHROW(config.validate());
  const auto bad = [&](auto mutate) {
    auto c = config;
    mutate(c);
    try {
      c.validate();
    } catch (const Error& e) {
      return e.exit_code() == 1;
    }
    return false;
  };
  CHECK(bad([](RunConfig& c) { c.inputs = {"/nonexistent.html"}; }));
  CHECK(bad([](RunConfig& c) { c.embeddings = "/nonexistent.txt"; }));
  CHECK(bad([](RunConfig& c) { c.kernel = KernelSpec::rbf(0.0); }));
  CHECK(bad([](RunConfig& c) { c.tol = 0.0; }));
  CHECK(bad([](RunConfig& c) { c.threshold = 1.5; }));
  CHECK(bad([](RunConfig& c) { c.seed_fraction = 0.0; }));
  CHECK(bad([](RunConfig& c) { c.seed_mode = SeedMode::Truth; }));
  CHECK(bad([](RunConfig& c) { c.rules.clear(); }));
  CHECK(bad([](RunConfig& c) { c.jobs = 0; }));
}

TEST_CASE("run_evaluate: pairing, aggregation and failures") {
  TempDir dir;
  // Page x: 5 blocks, 3 correct; page y: 5 blocks, 4 correct.
  const auto write_page = [&](const std::string& id, const std::vector<int>& predicted,
                              const std::vector<int>& actual) {
    Prediction pred;
    GroundTruthPage truth;
    pred.page_id = truth.page_id = id;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const std::string path = "/html[1]/body[1]/p[" + std::to_string(i + 1) + "]/#text[1]";
      const std::string hash = text_hash(std::to_string(i));
      pred.blocks.push_back({path, hash, 0.5, predicted[i], false});
      truth.blocks.push_back({path, hash, actual[i]});
    }
    write_file_atomic(dir.path / "pred" / (id + ".json"), dump_stable(to_json(pred)));
    write_file_atomic(dir.path / "truth" / (id + ".json"), dump_stable(to_json(truth)));
  };
  fs::create_directories(dir.path / "pred");
  fs::create_directories(dir.path / "truth");
  write_page("x", {1, 1, 1, 0, 0}, {1, 1, 0, 1, 0});
  write_page("y", {1, 1, 1, 0, 0}, {1, 1, 1, 1, 0});

  auto outcome = run_evaluate(dir.path / "pred", dir.path / "truth", true, Averaging::Macro);
  CHECK(outcome.exit_code == 0);
  REQUIRE(outcome.summary);
  CHECK(*outcome.summary->accuracy.mean == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(format_table(outcome).find("macro average") != std::string::npos);
  CHECK(to_json(outcome)["summary"]["accuracy"]["mean"].get<double>() == doctest::Approx(0.7));

  // Predictions that equal the truth score 1.
  fs::create_directories(dir.path / "ident");
  for (const char* id : {"x", "y"}) {
    const auto truth = truth_from_json(read_json_file(dir.path / "truth" / (std::string(id) + ".json")));
    Prediction p;
    p.page_id = id;
    for (const auto& b : truth.blocks) p.blocks.push_back({b.dom_path, b.text_hash, double(b.label), b.label, false});
    write_file_atomic(dir.path / "ident" / (std::string(id) + ".json"), dump_stable(to_json(p)));
  }
  outcome = run_evaluate(dir.path / "ident", dir.path / "truth", true, Averaging::Macro);
  CHECK(*outcome.summary->accuracy.mean == 1.0);

  // Disjoint page ids.
  fs::create_directories(dir.path / "other");
  Prediction z;
  z.page_id = "z";
  z.blocks.push_back({"/html[1]/body[1]/p[1]/#text[1]", text_hash("0"), 1.0, 1, false});
  write_file_atomic(dir.path / "other" / "z.json", dump_stable(to_json(z)));
  outcome = run_evaluate(dir.path / "other", dir.path / "truth", true, Averaging::Macro);
  CHECK(outcome.exit_code == 2);
  CHECK(outcome.failures.size() == 3);
  CHECK_FALSE(outcome.summary);
}
