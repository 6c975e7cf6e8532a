#include "privdac/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <queue>

#include "privdac/errors.hpp"

namespace privdac {

NetworkGraph::NetworkGraph(Eigen::MatrixXi adjacency) : adjacency_(std::move(adjacency)) {
  const auto n = adjacency_.rows();
  if (n == 0 || adjacency_.cols() != n) {
    throw ValidationError("adjacency must be a non-empty square matrix");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0) {
      throw ValidationError("adjacency diagonal must be zero (self-loop at agent " +
                            std::to_string(i + 1) + ")");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const int a = adjacency_(i, j);
      if (a != 0 && a != 1) {
        throw ValidationError("adjacency entries must be 0 or 1");
      }
      if (a != adjacency_(j, i)) {
        throw ValidationError("adjacency must be symmetric");
      }
    }
  }
  neighbors_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (adjacency_(i, j) != 0) {
        neighbors_[static_cast<std::size_t>(i)].push_back(static_cast<std::size_t>(j));
      }
    }
  }
}

NetworkGraph NetworkGraph::from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) {
    throw ValidationError("graph needs at least one agent");
  }
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw ValidationError("edge (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                            ") references an agent outside 1.." + std::to_string(n));
    }
    if (i == j) {
      throw ValidationError("self-loop at agent " + std::to_string(i + 1));
    }
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1;
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1;
  }
  return NetworkGraph(std::move(a));
}

std::vector<Edge> NetworkGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : neighbors_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw ValidationError("symmetric matrix must be non-empty and square");
  }
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("matrix is not symmetric");
  }
}

bool is_connected(const NetworkGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j : graph.neighbors(i)) {
      if (!seen[j]) {
        seen[j] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n;
}

SymmetricMatrix laplacian(const NetworkGraph& graph) {
  const Eigen::MatrixXd a = graph.adjacency().cast<double>();
  Eigen::MatrixXd l = -a;
  l.diagonal() = a.rowwise().sum();
  return SymmetricMatrix(std::move(l));
}

Eigen::VectorXd symmetric_eigenvalues(const SymmetricMatrix& m) {
  constexpr int kMaxSweeps = 100;
  Eigen::MatrixXd a = m.entries();
  const Eigen::Index n = a.rows();
  const double tol = 1e-12 * std::max(1.0, a.norm());

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  bool converged = off_norm() <= tol;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
    converged = off_norm() <= tol;
  }
  if (!converged) {
    throw ConvergenceError("Jacobi eigensolver did not converge within 100 sweeps");
  }
  Eigen::VectorXd values = a.diagonal();
  std::sort(values.begin(), values.end());
  return values;
}

double algebraic_connectivity(const SymmetricMatrix& m) {
  if (m.order() < 2) {
    throw ValidationError("algebraic connectivity needs at least two nodes");
  }
  return symmetric_eigenvalues(m)(1);
}

SymmetricMatrix decomposed_laplacian(const SymmetricMatrix& laplacian) {
  const auto n = static_cast<Eigen::Index>(laplacian.order());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = laplacian.entries() + eye;
  out.topRightCorner(n, n) = -eye;
  out.bottomLeftCorner(n, n) = -eye;
  out.bottomRightCorner(n, n) = eye;
  return SymmetricMatrix(std::move(out));
}

double predicted_decomposed_lambda2(double lambda2) {
  // Rationalised form of (l + 2 - sqrt(l^2 + 4)) / 2; no cancellation as l -> 0.
  return 2.0 * lambda2 / (lambda2 + 2.0 + std::sqrt(lambda2 * lambda2 + 4.0));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

NetworkGraph graph_from_preset(std::string_view spec) {
  const std::string_view text = trim(spec);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw ValidationError("graph preset must look like cycle(n), path(n) or complete(n): '" +
                          std::string(spec) + "'");
  }
  const std::string_view name = trim(text.substr(0, open));
  const std::string_view arg = trim(text.substr(open + 1, text.size() - open - 2));
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
  if (ec != std::errc{} || ptr != arg.data() + arg.size() || n == 0) {
    throw ValidationError("graph preset size must be a positive integer: '" + std::string(spec) + "'");
  }

  std::vector<Edge> edges;
  if (name == "path") {
    for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  } else if (name == "cycle") {
    for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    if (n >= 3) edges.emplace_back(n - 1, 0);
  } else if (name == "complete") {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  } else {
    throw ValidationError("unknown graph preset '" + std::string(name) + "'");
  }
  return NetworkGraph::from_edges(n, edges);
}

NetworkGraph random_connected_graph(std::size_t n, SplitMix64& rng, double extra_edge_probability) {
  if (n == 0) throw ValidationError("graph needs at least one agent");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto link = [&](std::size_t i, std::size_t j) {
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1;
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1;
  };
  // Attach each node in the shuffled order to a uniformly chosen earlier one.
  for (std::size_t k = 1; k < n; ++k) {
    link(order[k], order[rng.below(k)]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < extra_edge_probability) link(i, j);
    }
  }
  return NetworkGraph(std::move(a));
}

}  // namespace privdac
