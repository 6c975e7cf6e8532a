#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "privdac/rng.hpp"

namespace privdac {

/// Undirected edge between two 0-based agent indices.
using Edge = std::pair<std::size_t, std::size_t>;

/**
 * @brief Undirected, unweighted agent topology.
 *
 * Holds the {0,1} adjacency matrix. Construction checks symmetry, a zero
 * diagonal and index ranges; connectivity is a separate query because the
 * consensus entry points reject disconnected graphs at scenario-load time.
 */
class NetworkGraph {
 public:
  /// A single isolated agent.
  NetworkGraph() : NetworkGraph(Eigen::MatrixXi::Zero(1, 1)) {}
  explicit NetworkGraph(Eigen::MatrixXi adjacency);

  static NetworkGraph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
  const Eigen::MatrixXi& adjacency() const noexcept { return adjacency_; }
  bool adjacent(std::size_t i, std::size_t j) const { return adjacency_(i, j) != 0; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i]; }
  std::size_t degree(std::size_t i) const { return neighbors_[i].size(); }

  /// Edges (i, j) with i < j, in row-major order.
  std::vector<Edge> edges() const;

  bool operator==(const NetworkGraph& other) const { return adjacency_ == other.adjacency_; }

 private:
  Eigen::MatrixXi adjacency_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

/// Dense symmetric matrix; symmetry is checked to 1e-12 relative on construction.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Eigen::MatrixXd entries);

  std::size_t order() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

/// True iff every node is reachable from node 0 (breadth-first).
bool is_connected(const NetworkGraph& graph);

/// L = D - A.
SymmetricMatrix laplacian(const NetworkGraph& graph);

/**
 * @brief All eigenvalues of a symmetric matrix, ascending.
 *
 * Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius norm drops
 * below 1e-12 * max(1, ||M||_F); throws ConvergenceError after 100 sweeps.
 */
Eigen::VectorXd symmetric_eigenvalues(const SymmetricMatrix& m);

/// Second-smallest eigenvalue (index 1 of the ascending spectrum).
double algebraic_connectivity(const SymmetricMatrix& m);

/// [[L + I, -I], [-I, I]]: the Laplacian once every agent owns a hidden twin node.
SymmetricMatrix decomposed_laplacian(const SymmetricMatrix& laplacian);

/// (lambda2 + 2 - sqrt(lambda2^2 + 4)) / 2, the lambda2 of decomposed_laplacian.
double predicted_decomposed_lambda2(double lambda2);

/**
 * @brief Parse a named preset: "cycle(n)", "path(n)" or "complete(n)".
 *
 * cycle(2) degenerates to a single edge. Throws ValidationError on
 * anything else.
 */
NetworkGraph graph_from_preset(std::string_view spec);

/// Random spanning tree plus independent extra edges with probability extra_edge_probability.
NetworkGraph random_connected_graph(std::size_t n, SplitMix64& rng, double extra_edge_probability = 0.3);

}  // namespace privdac
