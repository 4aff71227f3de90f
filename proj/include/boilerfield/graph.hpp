#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boilerfield/embeddings.hpp"

namespace boilerfield {

enum class KernelKind { InnerProduct, Rbf };

/// Edge-weight kernel. For Rbf an empty `sigma` means "median of the
/// pairwise Euclidean distances of the page" (1.0 if that median is 0).
struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  std::optional<double> sigma;

  static KernelSpec inner_product() { return {KernelKind::InnerProduct, std::nullopt}; }
  static KernelSpec rbf(std::optional<double> sigma = std::nullopt) { return {KernelKind::Rbf, sigma}; }
};

std::string to_string(KernelKind kind);

/// Dense symmetric weight matrix with zero diagonal and cached degrees.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;
  explicit SimilarityGraph(std::size_t n) : n_(n), weights_(n * n, 0.0), degrees_(n, 0.0) {}

  /// From a full row-major matrix. Throws GraphError::Dim if the matrix is
  /// not n*n, or if it is not symmetric/non-negative/finite with zero diagonal.
  static SimilarityGraph from_dense(std::size_t n, std::vector<double> weights);

  std::size_t size() const noexcept { return n_; }
  double weight(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return std::span<const double>(weights_).subspan(i * n_, n_); }
  std::span<const double> degrees() const noexcept { return degrees_; }
  double degree(std::size_t i) const { return degrees_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Sets w_ij = w_ji. Degrees are stale until `recompute_degrees`.
  void set_weight(std::size_t i, std::size_t j, double w);
  /// Row sums in ascending column order.
  void recompute_degrees();

  /// Resolved kernel bandwidth (Rbf) used to build this graph, if any.
  std::optional<double> sigma;

 private:
  std::size_t n_ = 0;
  std::vector<double> weights_;
  std::vector<double> degrees_;
};

/// InnerProduct: max(0, u.v). Rbf: exp(-|u-v|^2 / (2 sigma^2)); sigma must be
/// set. Throws GraphError::Dim / GraphError::BadSigma.
double similarity(const FeatureVector& u, const FeatureVector& v, const KernelSpec& kernel);

/// Median of the pairwise Euclidean distances; 1.0 when there are no pairs
/// or the median is 0.
double median_sigma(std::span<const FeatureVector> vectors);

/// Resolves a median-sigma Rbf spec into a concrete one; validates sigma.
KernelSpec resolve_kernel(std::span<const FeatureVector> vectors, const KernelSpec& kernel);

/// Pairwise graph; with `knn` keeps w_ij only if j is among i's k largest
/// weights or i among j's (ties broken toward the lower index).
SimilarityGraph build_graph(std::span<const FeatureVector> vectors, const KernelSpec& kernel,
                            std::optional<std::size_t> knn = std::nullopt);

}  // namespace boilerfield
