#include "boilerfield/graph.hpp"

#include <algorithm>
#include <cmath>

#include "boilerfield/error.hpp"

namespace boilerfield {

std::string to_string(KernelKind kind) { return kind == KernelKind::Rbf ? "rbf" : "inner"; }

SimilarityGraph SimilarityGraph::from_dense(std::size_t n, std::vector<double> weights) {
  if (weights.size() != n * n) throw GraphError(GraphError::Kind::Dim, "weight matrix is not n*n");
  SimilarityGraph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i * n + i] != 0.0) throw GraphError(GraphError::Kind::Dim, "non-zero diagonal weight");
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights[i * n + j];
      if (!std::isfinite(w) || w < 0.0) throw GraphError(GraphError::Kind::Dim, "negative or non-finite weight");
      if (w != weights[j * n + i]) throw GraphError(GraphError::Kind::Dim, "weight matrix is not symmetric");
    }
  }
  g.weights_ = std::move(weights);
  g.recompute_degrees();
  return g;
}

void SimilarityGraph::set_weight(std::size_t i, std::size_t j, double w) {
  weights_[i * n_ + j] = w;
  weights_[j * n_ + i] = w;
}

void SimilarityGraph::recompute_degrees() {
  for (std::size_t i = 0; i < n_; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n_; ++j) d += weights_[i * n_ + j];
    degrees_[i] = d;
  }
}

namespace {

void check_dims(const FeatureVector& u, const FeatureVector& v) {
  if (u.values.size() != v.values.size())
    throw GraphError(GraphError::Kind::Dim, "feature vectors have different dimensions (" +
                                                std::to_string(u.values.size()) + " vs " +
                                                std::to_string(v.values.size()) + ")");
}

double squared_distance(const FeatureVector& u, const FeatureVector& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    const double d = u.values[k] - v.values[k];
    s += d * d;
  }
  return s;
}

}  // namespace

double similarity(const FeatureVector& u, const FeatureVector& v, const KernelSpec& kernel) {
  check_dims(u, v);
  if (kernel.kind == KernelKind::InnerProduct) {
    double dot = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k) dot += u.values[k] * v.values[k];
    return std::max(0.0, dot);
  }
  if (!kernel.sigma || !(*kernel.sigma > 0.0) || !std::isfinite(*kernel.sigma))
    throw GraphError(GraphError::Kind::BadSigma, "rbf kernel needs a positive finite sigma");
  const double s = *kernel.sigma;
  return std::exp(-squared_distance(u, v) / (2.0 * s * s));
}

double median_sigma(std::span<const FeatureVector> vectors) {
  std::vector<double> distances;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      check_dims(vectors[i], vectors[j]);
      distances.push_back(std::sqrt(squared_distance(vectors[i], vectors[j])));
    }
  }
  if (distances.empty()) return 1.0;
  const std::size_t mid = distances.size() / 2;
  std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(mid), distances.end());
  double median = distances[mid];
  if (distances.size() % 2 == 0) {
    const double lower = *std::max_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  return median > 0.0 ? median : 1.0;
}

KernelSpec resolve_kernel(std::span<const FeatureVector> vectors, const KernelSpec& kernel) {
  if (kernel.kind != KernelKind::Rbf) return kernel;
  if (!kernel.sigma) return KernelSpec::rbf(median_sigma(vectors));
  if (!(*kernel.sigma > 0.0) || !std::isfinite(*kernel.sigma))
    throw GraphError(GraphError::Kind::BadSigma, "sigma must be positive and finite");
  return kernel;
}

SimilarityGraph build_graph(std::span<const FeatureVector> vectors, const KernelSpec& kernel,
                            std::optional<std::size_t> knn) {
  if (vectors.empty()) throw GraphError(GraphError::Kind::Empty, "cannot build a graph over zero blocks");
  for (const auto& v : vectors) check_dims(vectors.front(), v);
  if (knn && *knn == 0) throw GraphError(GraphError::Kind::Dim, "knn must be positive");
  const KernelSpec resolved = resolve_kernel(vectors, kernel);
  const std::size_t n = vectors.size();

  SimilarityGraph dense(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dense.set_weight(i, j, similarity(vectors[i], vectors[j], resolved));
  }
  if (resolved.kind == KernelKind::Rbf) dense.sigma = resolved.sigma;

  if (!knn || *knn + 1 >= n) {
    dense.recompute_degrees();
    return dense;
  }

  SimilarityGraph sparse(n);
  sparse.sigma = dense.sigma;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order;
    order.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dense.weight(i, a) > dense.weight(i, b); });
    for (std::size_t r = 0; r < *knn; ++r) {
      const std::size_t j = order[r];
      sparse.set_weight(i, j, dense.weight(i, j));
    }
  }
  sparse.recompute_degrees();
  return sparse;
}

}  // namespace boilerfield
