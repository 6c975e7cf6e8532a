#pragma once

// Reference computations used to freeze expected values. None of these call
// into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Householder reduction of symmetric a to tridiagonal form (diagonal d, off-diagonal e).
inline void tridiagonalize(Eigen::MatrixXd a, std::vector<double>& d, std::vector<double>& e) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    Eigen::VectorXd v = a.col(k).tail(n - k - 1);
    const double alpha = -std::copysign(v.norm(), v(0));
    if (alpha == 0.0) continue;
    v(0) -= alpha;
    const double vv = v.squaredNorm();
    if (vv == 0.0) continue;
    // a <- H a H with H = I - 2 v v^T / (v^T v), applied to the trailing block.
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    h.bottomRightCorner(n - k - 1, n - k - 1) -= 2.0 * v * v.transpose() / vv;
    a = h * a * h;
  }
  d.assign(static_cast<std::size_t>(n), 0.0);
  e.assign(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = a(i, i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) e[static_cast<std::size_t>(i)] = a(i + 1, i);
}

/// Number of eigenvalues of symmetric a strictly below x, by a Sturm count on the tridiagonal form.
inline int count_below(const Eigen::MatrixXd& a, double x) {
  std::vector<double> d, e;
  tridiagonalize(a, d, e);
  const double pivmin = 1e-300;
  int negative = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = d[i] - x - (i == 0 ? 0.0 : e[i - 1] * e[i - 1] / q);
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++negative;
  }
  return negative;
}

/// k-th smallest eigenvalue (0-based) by bisection on the inertia count.
inline double kth_eigenvalue(const Eigen::MatrixXd& a, int k) {
  double lo = -a.cwiseAbs().rowwise().sum().maxCoeff() - 1.0;
  double hi = -lo;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(a, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline Eigen::MatrixXd laplacian(const Eigen::MatrixXi& adjacency) {
  const Eigen::MatrixXd a = adjacency.cast<double>();
  Eigen::MatrixXd l = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = a.row(i).sum();
  return l;
}

/// [[L + I, -I], [-I, I]] assembled entry by entry.
inline Eigen::MatrixXd decomposed(const Eigen::MatrixXd& l) {
  const Eigen::Index n = l.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = l(i, j);
    out(i, i) += 1.0;
    out(i, n + i) = -1.0;
    out(n + i, i) = -1.0;
    out(n + i, n + i) = 1.0;
  }
  return out;
}

/// Composite Simpson on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double central_difference(const std::function<double(double)>& f, double t, double h = 1e-5) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

/// x(t) for x' = -kappa L x, solved through the eigen-decomposition of L.
inline Eigen::MatrixXd consensus_closed_form(const Eigen::MatrixXd& l, double kappa, const Eigen::MatrixXd& x0,
                                             double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
  const Eigen::VectorXd decay = (-kappa * t * es.eigenvalues().array()).exp();
  const Eigen::MatrixXd propagator = es.eigenvectors() * decay.asDiagonal() * es.eigenvectors().transpose();
  return propagator * x0;
}

/// Deterministic generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// Connected graph: random labelled tree plus extra edges.
  Eigen::MatrixXi connected_graph(int n, double extra = 0.3) {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const int j = integer(0, i - 1);
      a(i, j) = a(j, i) = 1;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!a(i, j) && coin(extra)) a(i, j) = a(j, i) = 1;
      }
    }
    return a;
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = real(-scale, scale);
    }
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
