#include "boilerfield/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <deque>

namespace boilerfield {

std::size_t default_max_iters(std::size_t n) { return std::max<std::size_t>(1000, 10 * n); }

double energy(const SimilarityGraph& graph, std::span<const double> f) {
  const std::size_t n = graph.size();
  if (f.size() != n)
    throw SolverError(SolverError::Kind::Shape, "score vector has " + std::to_string(f.size()) +
                                                    " entries for a graph of " + std::to_string(n));
  // Each unordered pair appears twice in the ordered sum; the halving cancels it.
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = graph.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = f[i] - f[j];
      e += row[j] * d * d;
    }
  }
  return e;
}

std::vector<int> binarize(std::span<const double> scores, double threshold) {
  std::vector<int> labels(scores.size());
  std::transform(scores.begin(), scores.end(), labels.begin(), [&](double s) { return s > threshold ? 1 : 0; });
  return labels;
}

namespace {

void validate(const SimilarityGraph& graph, const SeedSet& seeds) {
  if (seeds.empty()) throw SolverError(SolverError::Kind::NoSeeds, "no seed labels given");
  for (const auto& [node, label] : seeds.labels) {
    if (node >= graph.size())
      throw SolverError(SolverError::Kind::InvalidSeed, "seed index " + std::to_string(node) + " out of range");
    if (label != 0 && label != 1)
      throw SolverError(SolverError::Kind::InvalidSeed, "seed label must be 0 or 1");
  }
}

double neighbour_average(const SimilarityGraph& graph, std::size_t j, std::span<const double> f) {
  const auto row = graph.row(j);
  double s = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * f[i];
  return s / graph.degree(j);
}

struct Partition {
  std::vector<std::size_t> active;    // unlabeled, reachable, ascending
  std::vector<std::size_t> isolated;  // unlabeled, unreachable, ascending
};

Partition partition(const SimilarityGraph& graph, const SeedSet& seeds) {
  Partition p;
  p.isolated = unreachable_nodes(graph, seeds);
  for (std::size_t j = 0; j < graph.size(); ++j) {
    if (!seeds.contains(j) && !std::binary_search(p.isolated.begin(), p.isolated.end(), j)) p.active.push_back(j);
  }
  return p;
}

PropagationResult initial_state(const SimilarityGraph& graph, const SeedSet& seeds, const Partition& p,
                                double init) {
  PropagationResult r;
  r.scores.assign(graph.size(), 0.0);
  for (const auto& [node, label] : seeds.labels) r.scores[node] = label;
  for (const std::size_t j : p.active) r.scores[j] = init;
  r.isolated = p.isolated;
  const bool has0 = std::any_of(seeds.labels.begin(), seeds.labels.end(), [](const auto& kv) { return kv.second == 0; });
  const bool has1 = std::any_of(seeds.labels.begin(), seeds.labels.end(), [](const auto& kv) { return kv.second == 1; });
  if (!(has0 && has1)) {
    r.warnings.push_back(std::string("all seeds carry label ") + (has1 ? "1" : "0") +
                         "; the propagated solution is constant");
  }
  if (!p.isolated.empty()) {
    r.warnings.push_back(std::to_string(p.isolated.size()) +
                         " node(s) unreachable from any seed were labeled noise");
  }
  return r;
}

void finalize(const SimilarityGraph& graph, const SeedSet& seeds, PropagationResult& r, double threshold) {
  r.residual = harmonic_defect(graph, seeds, r.scores, r.isolated);
  r.energy = energy(graph, r.scores);
  r.labels = binarize(r.scores, threshold);
}

}  // namespace

std::vector<std::size_t> unreachable_nodes(const SimilarityGraph& graph, const SeedSet& seeds) {
  const std::size_t n = graph.size();
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue;
  for (const auto& [node, label] : seeds.labels) {
    if (node < n && !seen[node]) {
      seen[node] = 1;
      queue.push_back(node);
    }
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    const auto row = graph.row(u);
    for (std::size_t v = 0; v < n; ++v) {
      if (row[v] > 0.0 && !seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (!seen[j]) out.push_back(j);
  }
  return out;
}

double harmonic_defect(const SimilarityGraph& graph, const SeedSet& seeds, std::span<const double> f,
                       std::span<const std::size_t> isolated) {
  double worst = 0.0;
  for (std::size_t j = 0; j < graph.size(); ++j) {
    if (seeds.contains(j) || std::binary_search(isolated.begin(), isolated.end(), j)) continue;
    if (graph.degree(j) <= 0.0) continue;
    worst = std::max(worst, std::abs(f[j] - neighbour_average(graph, j, f)));
  }
  return worst;
}

PropagationResult solve_iterative(const SimilarityGraph& graph, const SeedSet& seeds, const SolveOptions& options) {
  validate(graph, seeds);
  if (!(options.tol > 0.0)) throw SolverError(SolverError::Kind::Shape, "tolerance must be positive");
  const Partition p = partition(graph, seeds);
  PropagationResult r = initial_state(graph, seeds, p, options.init);
  if (options.trace_energy) r.energy_trace.push_back(energy(graph, r.scores));
  if (p.active.empty()) {
    finalize(graph, seeds, r, options.threshold);
    return r;
  }

  const std::size_t max_iters = options.max_iters.value_or(default_max_iters(graph.size()));
  bool converged = false;
  while (r.iterations < max_iters) {
    for (const std::size_t j : p.active) r.scores[j] = neighbour_average(graph, j, r.scores);
    ++r.iterations;
    if (options.trace_energy) r.energy_trace.push_back(energy(graph, r.scores));
    if (harmonic_defect(graph, seeds, r.scores, r.isolated) < options.tol) {
      converged = true;
      break;
    }
  }
  finalize(graph, seeds, r, options.threshold);
  if (!converged) {
    const std::string what = "no convergence after " + std::to_string(r.iterations) +
                             " sweeps (residual " + std::to_string(r.residual) + ")";
    throw SolverError(SolverError::Kind::NotConverged, what, std::move(r));
  }
  return r;
}

PropagationResult solve_direct(const SimilarityGraph& graph, const SeedSet& seeds, double threshold) {
  validate(graph, seeds);
  const Partition p = partition(graph, seeds);
  PropagationResult r = initial_state(graph, seeds, p, 0.0);
  const auto m = static_cast<Eigen::Index>(p.active.size());
  if (m > 0) {
    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const std::size_t j = p.active[static_cast<std::size_t>(a)];
      const auto row = graph.row(j);
      laplacian(a, a) = graph.degree(j);
      for (Eigen::Index b = 0; b < m; ++b) laplacian(a, b) -= row[p.active[static_cast<std::size_t>(b)]];
      for (const auto& [node, label] : seeds.labels) rhs(a) += row[node] * label;
    }
    // LDL^T avoids the square roots of LLT, so small systems such as a
    // single unknown are solved by one exact division.
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(laplacian);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
      throw SolverError(SolverError::Kind::Singular, "reduced Laplacian is not positive definite");
    const Eigen::VectorXd x = ldlt.solve(rhs);
    for (Eigen::Index a = 0; a < m; ++a) {
      if (!std::isfinite(x(a))) throw SolverError(SolverError::Kind::Singular, "reduced system is singular");
      // Rounding can step a hair outside the seed range the exact solution lies in.
      r.scores[p.active[static_cast<std::size_t>(a)]] = std::clamp(x(a), 0.0, 1.0);
    }
  }
  finalize(graph, seeds, r, threshold);
  return r;
}

}  // namespace boilerfield
