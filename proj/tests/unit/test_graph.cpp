#include <cmath>
#include <random>
#include <vector>

#include "boilerfield/error.hpp"
#include "boilerfield/graph.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace boilerfield;

namespace {

FeatureVector fv(std::vector<double> v) { return {std::move(v), 1}; }

std::vector<FeatureVector> random_vectors(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = normal(rng);
    out.push_back(fv(v));
  }
  return out;
}

void check_invariants(const SimilarityGraph& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.weight(i, i) == 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(g.weight(i, j) == g.weight(j, i));
      CHECK(g.weight(i, j) >= 0.0);
      sum += g.weight(i, j);
    }
    CHECK(g.degree(i) == doctest::Approx(sum).epsilon(1e-15));
  }
}

}  // namespace

TEST_CASE("similarity: kernels") {
  const auto e1 = fv({1, 0}), e2 = fv({0, 1});
  CHECK(similarity(e1, e1, KernelSpec::inner_product()) == 1.0);
  CHECK(similarity(e1, e2, KernelSpec::inner_product()) == 0.0);
  CHECK(similarity(e1, fv({-1, 0}), KernelSpec::inner_product()) == 0.0);  // clipped
  const auto u = fv({0.3, -2.0, 7.5});
  CHECK(similarity(u, u, KernelSpec::rbf(1.0)) == 1.0);
  CHECK(similarity(e1, e2, KernelSpec::rbf(1.0)) == doctest::Approx(std::exp(-1.0)));
  CHECK(similarity(e1, e2, KernelSpec::rbf(2.0)) == doctest::Approx(std::exp(-2.0 / 8.0)));
}

TEST_CASE("similarity: errors") {
  CHECK_THROWS_AS(similarity(fv({1, 0}), fv({1, 0, 0}), KernelSpec::inner_product()), GraphError);
  CHECK_THROWS_AS(similarity(fv({1, 0}), fv({0, 1}), KernelSpec::rbf(0.0)), GraphError);
  CHECK_THROWS_AS(similarity(fv({1, 0}), fv({0, 1}), KernelSpec::rbf(-1.0)), GraphError);
  CHECK_THROWS_AS(build_graph(std::vector<FeatureVector>{}, KernelSpec::rbf()), GraphError);
}

TEST_CASE("build_graph: small fixtures") {
  auto g = build_graph(std::vector{fv({1, 0}), fv({1, 0})}, KernelSpec::inner_product());
  CHECK(g.weights() == std::vector<double>{0, 1, 1, 0});
  CHECK(g.degree(0) == 1.0);
  CHECK(g.degree(1) == 1.0);

  g = build_graph(std::vector{fv({1, 0}), fv({0, 1}), fv({1, 0})}, KernelSpec::inner_product());
  CHECK(g.weight(0, 2) == 1.0);
  CHECK(g.weight(0, 1) == 0.0);
  CHECK(g.weight(1, 2) == 0.0);
  check_invariants(g);

  g = build_graph(std::vector{fv({1, 0})}, KernelSpec::rbf());
  CHECK(g.size() == 1);
  CHECK(g.weight(0, 0) == 0.0);
}

TEST_CASE("median_sigma") {
  // Distances 1, 2, 3 between points on a line: median 2.
  const std::vector v = {fv({0}), fv({1}), fv({3})};
  CHECK(median_sigma(v) == 2.0);
  // Four points, six distances {1,1,2,2,3,...}: even count takes the mean.
  const std::vector w = {fv({0}), fv({1}), fv({2}), fv({3})};  // 1,2,3,1,2,1
  CHECK(median_sigma(w) == 1.5);
  CHECK(median_sigma(std::vector{fv({5, 5}), fv({5, 5})}) == 1.0);  // median 0 -> 1
  CHECK(median_sigma(std::vector{fv({5, 5})}) == 1.0);             // no pairs -> 1
  const auto g = build_graph(v, KernelSpec::rbf());
  REQUIRE(g.sigma);
  CHECK(*g.sigma == 2.0);
  CHECK(g.weight(0, 1) == doctest::Approx(std::exp(-1.0 / 8.0)));
}

TEST_CASE("build_graph: invariants on random inputs") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto vectors = random_vectors(rng, 2 + rng() % 15, 4);
    check_invariants(build_graph(vectors, KernelSpec::rbf()));
    check_invariants(build_graph(vectors, KernelSpec::inner_product()));
  }
}

TEST_CASE("build_graph: knn equals the brute-force union construction") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 12;
    const auto vectors = random_vectors(rng, n, 3);
    for (std::size_t k : {1, 2, 3}) {
      const auto kernel = trial % 2 ? KernelSpec::rbf() : KernelSpec::inner_product();
      const auto dense = build_graph(vectors, kernel);
      const auto sparse = build_graph(vectors, kernel, k);
      CAPTURE(n);
      CAPTURE(k);
      CHECK(oracle::to_matrix(sparse) == oracle::knn_union(oracle::to_matrix(dense), k));
      check_invariants(sparse);
    }
  }
  // The fixture from the module description: 5 random vectors, k = 2.
  const auto vectors = random_vectors(rng, 5, 2);
  const auto g = build_graph(vectors, KernelSpec::rbf(), 2);
  CHECK(oracle::to_matrix(g) == oracle::knn_union(oracle::to_matrix(build_graph(vectors, KernelSpec::rbf())), 2));
}

TEST_CASE("build_graph: knn ties go to the lower index") {
  // On a line: 0 at x=0 is equidistant from 1 (x=1) and 2 (x=-1); 1 and 2
  // each have a closer partner (3 and 4), so only 0's own choice decides.
  const std::vector v = {fv({0}), fv({1}), fv({-1}), fv({1.5}), fv({-1.5})};
  const auto g = build_graph(v, KernelSpec::rbf(1.0), 1);
  CHECK(g.weight(0, 1) > 0.0);
  CHECK(g.weight(0, 2) == 0.0);
  CHECK(g.weight(1, 3) > 0.0);
  CHECK(g.weight(2, 4) > 0.0);
}

TEST_CASE("from_dense validation") {
  CHECK_NOTHROW(SimilarityGraph::from_dense(2, {0, 1, 1, 0}));
  CHECK_THROWS_AS(SimilarityGraph::from_dense(2, {0, 1, 2, 0}), GraphError);   // asymmetric
  CHECK_THROWS_AS(SimilarityGraph::from_dense(2, {1, 1, 1, 0}), GraphError);   // diagonal
  CHECK_THROWS_AS(SimilarityGraph::from_dense(2, {0, -1, -1, 0}), GraphError); // negative
  CHECK_THROWS_AS(SimilarityGraph::from_dense(2, {0, 1, 1}), GraphError);      // shape
}
