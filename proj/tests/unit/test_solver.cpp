#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "boilerfield/solver.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace boilerfield;

namespace {

SeedSet seeds(std::initializer_list<std::pair<const std::size_t, int>> l) { return SeedSet{{l}}; }

// s0 - u - s1 with unit weights; u is node 1.
SimilarityGraph path3() { return SimilarityGraph::from_dense(3, {0, 1, 0, 1, 0, 1, 0, 1, 0}); }

std::vector<std::pair<std::size_t, int>> seed_list(const SeedSet& s) { return {s.labels.begin(), s.labels.end()}; }

template <typename Fn>
SolverError solver_error(Fn fn) {
  try {
    fn();
  } catch (const SolverError& e) {
    return e;
  }
  FAIL("expected SolverError");
  return SolverError(SolverError::Kind::Shape, "unreachable");
}

}  // namespace

TEST_CASE("energy: fixtures and brute-force oracle") {
  const auto g2 = SimilarityGraph::from_dense(2, {0, 1, 1, 0});
  CHECK(energy(g2, std::vector<double>{0, 1}) == 1.0);
  CHECK(energy(path3(), std::vector<double>{0.3, 0.3, 0.3}) == 0.0);
  CHECK(solver_error([&] { energy(g2, std::vector<double>{1}); }).kind() == SolverError::Kind::Shape);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = trial == 0 ? 6 : 2 + rng() % 30;
    oracle::Matrix w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) w[i][j] = w[j][i] = unit(rng) < 0.5 ? 0.0 : unit(rng);
    std::vector<double> f(n);
    for (auto& x : f) x = unit(rng);
    const double expected = oracle::energy(w, f);
    CHECK(std::abs(energy(oracle::to_graph(w), f) - expected) <= 1e-12 * std::max(1.0, expected));
  }
}

TEST_CASE("solve: path graph midpoint") {
  const auto s = seeds({{0, 0}, {2, 1}});
  for (const auto& r : {solve_iterative(path3(), s), solve_direct(path3(), s)}) {
    CHECK(r.scores[1] == 0.5);
    CHECK(r.labels == std::vector<int>{0, 0, 1});
    CHECK(r.energy == 0.5);  // two edges, each counted in both orders
    CHECK(r.isolated.empty());
  }
}

TEST_CASE("solve: star with three seed leaves") {
  // Centre 0, leaves 1..3 seeded {1, 1, 0}.
  std::vector<double> w(16, 0.0);
  for (std::size_t leaf = 1; leaf <= 3; ++leaf) w[leaf] = w[leaf * 4] = 1.0;
  const auto g = SimilarityGraph::from_dense(4, w);
  const auto s = seeds({{1, 1}, {2, 1}, {3, 0}});
  const auto it = solve_iterative(g, s);
  CHECK(it.scores[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(it.labels[0] == 1);
  CHECK(it.iterations == 1);
  CHECK(solve_direct(g, s).scores[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("solve: all seeds equal gives a constant harmonic function") {
  const auto suite = oracle::graph_suite(10, 99);
  for (const auto& c : suite) {
    SeedSet ones;
    for (const auto& [i, v] : c.seeds.labels) ones.labels[i] = 1;
    const auto r = solve_iterative(c.graph, ones);
    for (const double f : r.scores) CHECK(f == 1.0);
    CHECK(r.energy == 0.0);
    CHECK(r.iterations <= 1);
    CHECK_FALSE(r.warnings.empty());  // one-class seeds are flagged
  }
}

TEST_CASE("solve: iterative and direct agree with the elimination oracle") {
  for (const auto& c : oracle::graph_suite(40, 2024)) {
    const auto expected = oracle::harmonic(oracle::to_matrix(c.graph), seed_list(c.seeds));
    SolveOptions opt;
    opt.tol = 1e-10;
    opt.max_iters = 1000000;
    const auto it = solve_iterative(c.graph, c.seeds, opt);
    const auto dr = solve_direct(c.graph, c.seeds);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(std::abs(it.scores[i] - expected[i]) < 1e-6);
      CHECK(std::abs(dr.scores[i] - expected[i]) < 1e-9);
    }
    CHECK(it.residual < 1e-10);
    CHECK(harmonic_defect(c.graph, c.seeds, dr.scores, dr.isolated) < 1e-8);
  }
}

TEST_CASE("solve: clamping, range and threshold on every result") {
  for (const auto& c : oracle::graph_suite(30, 77)) {
    for (const auto& r : {solve_iterative(c.graph, c.seeds), solve_direct(c.graph, c.seeds)}) {
      for (std::size_t i = 0; i < r.scores.size(); ++i) {
        if (c.seeds.contains(i)) CHECK(r.scores[i] == c.seeds.labels.at(i));
        CHECK(r.scores[i] >= 0.0);
        CHECK(r.scores[i] <= 1.0);
        CHECK(r.labels[i] == (r.scores[i] > 0.5 ? 1 : 0));
      }
    }
  }
}

TEST_CASE("solve: Gauss-Seidel energy never increases") {
  for (const auto& c : oracle::graph_suite(30, 8)) {
    SolveOptions opt;
    opt.trace_energy = true;
    opt.max_iters = 1000000;  // weakly coupled draws need many sweeps from init 0
    for (const double init : {1.0, 0.0, 0.5}) {
      opt.init = init;
      const auto r = solve_iterative(c.graph, c.seeds, opt);
      REQUIRE(r.energy_trace.size() == r.iterations + 1);
      for (std::size_t k = 1; k < r.energy_trace.size(); ++k) {
        const double prev = r.energy_trace[k - 1];
        CHECK(r.energy_trace[k] <= prev + 1e-12 * std::max(1.0, prev));
      }
    }
  }
}

TEST_CASE("solve: isolated nodes score 0 and are reported") {
  // 0 - 1 seeded, 2 - 3 form a component without seeds, 4 has no edges.
  std::vector<double> w(25, 0.0);
  const auto link = [&](std::size_t i, std::size_t j) { w[i * 5 + j] = w[j * 5 + i] = 1.0; };
  link(0, 1);
  link(2, 3);
  const auto g = SimilarityGraph::from_dense(5, w);
  const auto s = seeds({{0, 1}});
  CHECK(unreachable_nodes(g, s) == std::vector<std::size_t>{2, 3, 4});
  for (const auto& r : {solve_iterative(g, s), solve_direct(g, s)}) {
    CHECK(r.scores == std::vector<double>{1, 1, 0, 0, 0});
    CHECK(r.isolated == std::vector<std::size_t>{2, 3, 4});
  }
}

TEST_CASE("solve: errors") {
  CHECK(solver_error([] { solve_iterative(path3(), {}); }).kind() == SolverError::Kind::NoSeeds);
  CHECK(solver_error([] { solve_direct(path3(), {}); }).kind() == SolverError::Kind::NoSeeds);
  CHECK(solver_error([] { solve_iterative(path3(), seeds({{5, 1}})); }).kind() == SolverError::Kind::InvalidSeed);
  CHECK(solver_error([] { solve_iterative(path3(), seeds({{0, 2}})); }).kind() == SolverError::Kind::InvalidSeed);

  // A long chain needs many sweeps; one is not enough.
  const std::size_t n = 40;
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) w[i * n + i + 1] = w[(i + 1) * n + i] = 1.0;
  const auto chain = SimilarityGraph::from_dense(n, w);
  SolveOptions opt;
  opt.max_iters = 1;
  const auto e = solver_error([&] { solve_iterative(chain, seeds({{0, 0}, {n - 1, 1}}), opt); });
  CHECK(e.kind() == SolverError::Kind::NotConverged);
  CHECK(e.exit_code() == 3);
  REQUIRE(e.partial());
  CHECK(e.partial()->iterations == 1);
  CHECK(e.partial()->residual > opt.tol);
}

TEST_CASE("solve: every node seeded") {
  const auto r = solve_iterative(path3(), seeds({{0, 0}, {1, 1}, {2, 1}}));
  CHECK(r.iterations == 0);
  CHECK(r.scores == std::vector<double>{0, 1, 1});
  CHECK(r.energy == 1.0);
}

TEST_CASE("solve: result does not depend on the starting value") {
  for (const auto& c : oracle::graph_suite(30, 31)) {
    SolveOptions a, b;
    a.tol = b.tol = 1e-10;
    a.max_iters = b.max_iters = 1000000;
    b.init = 0.0;
    const auto ra = solve_iterative(c.graph, c.seeds, a);
    const auto rb = solve_iterative(c.graph, c.seeds, b);
    for (std::size_t i = 0; i < ra.scores.size(); ++i) CHECK(std::abs(ra.scores[i] - rb.scores[i]) <= 1e-6);
  }
}

TEST_CASE("binarize: strict threshold") {
  CHECK(binarize(std::vector<double>{0.5, 0.5000001, 0.0, 1.0}) == std::vector<int>{0, 1, 0, 1});
  CHECK(binarize(std::vector<double>{0.3, 0.7}, 0.3) == std::vector<int>{0, 1});
  CHECK(default_max_iters(5) == 1000);
  CHECK(default_max_iters(500) == 5000);
}
