#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boilerfield/error.hpp"
#include "boilerfield/graph.hpp"

namespace boilerfield {

/// Seed labels by node index: 0 = noise, 1 = relevant.
struct SeedSet {
  std::map<std::size_t, int> labels;

  bool empty() const noexcept { return labels.empty(); }
  std::size_t size() const noexcept { return labels.size(); }
  bool contains(std::size_t node) const { return labels.contains(node); }
};

struct PropagationResult {
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t iterations = 0;
  /// max |f_j - (1/d_j) sum_i w_ij f_i| over non-isolated unlabeled j.
  double residual = 0.0;
  double energy = 0.0;
  /// Unlabeled nodes with no positive-weight path to a seed (score 0).
  std::vector<std::size_t> isolated;
  std::vector<std::string> warnings;
  /// Energy before the first sweep and after each sweep, when requested.
  std::vector<double> energy_trace;
};

class SolverError : public Error {
 public:
  enum class Kind { NoSeeds, NotConverged, Singular, Shape, InvalidSeed };

  SolverError(Kind kind, const std::string& what, std::optional<PropagationResult> partial = std::nullopt)
      : Error(what), kind_(kind), partial_(std::move(partial)) {}

  Kind kind() const noexcept { return kind_; }
  /// The state reached when `max_iters` ran out (NotConverged only).
  const std::optional<PropagationResult>& partial() const noexcept { return partial_; }
  int exit_code() const noexcept override { return kind_ == Kind::NotConverged ? 3 : 2; }

 private:
  Kind kind_;
  std::optional<PropagationResult> partial_;
};

struct SolveOptions {
  double tol = 1e-8;
  /// Defaults to max(1000, 10 n).
  std::optional<std::size_t> max_iters;
  /// Starting value of every unlabeled, non-isolated node.
  double init = 1.0;
  double threshold = 0.5;
  bool trace_energy = false;
};

std::size_t default_max_iters(std::size_t n);

/// 1/2 * sum over ordered pairs (i, j) of w_ij (f_i - f_j)^2.
double energy(const SimilarityGraph& graph, std::span<const double> f);

/// Largest harmonic defect over the unlabeled, non-isolated nodes.
double harmonic_defect(const SimilarityGraph& graph, const SeedSet& seeds, std::span<const double> f,
                       std::span<const std::size_t> isolated);

/// Unlabeled nodes that cannot reach any seed through positive weights.
std::vector<std::size_t> unreachable_nodes(const SimilarityGraph& graph, const SeedSet& seeds);

/// Gauss-Seidel sweeps in ascending node order with seeds clamped.
PropagationResult solve_iterative(const SimilarityGraph& graph, const SeedSet& seeds, const SolveOptions& options = {});

/// Exact harmonic solution f_u = (D_uu - W_uu)^-1 W_ul f_l.
PropagationResult solve_direct(const SimilarityGraph& graph, const SeedSet& seeds, double threshold = 0.5);

/// 1 iff score > threshold.
std::vector<int> binarize(std::span<const double> scores, double threshold = 0.5);

}  // namespace boilerfield
