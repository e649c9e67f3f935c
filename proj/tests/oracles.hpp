#pragma once

// Independent reference computations used to check the library.

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Groups = std::vector<std::vector<Index>>;

struct Svd {
  Vector s;
  Matrix U;
  Matrix V;
};

// Full SVD through the symmetric eigendecomposition of X^T X.
inline Svd eig_svd(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(X.transpose() * X);
  const Index n = X.cols();
  Svd out;
  out.s.resize(n);
  out.V.resize(n, n);
  out.U = Matrix::Zero(X.rows(), n);
  for (Index k = 0; k < n; ++k) {
    const Index src = n - 1 - k;
    out.s[k] = std::sqrt(std::max(eig.eigenvalues()[src], 0.0));
    out.V.col(k) = eig.eigenvectors().col(src);
    if (out.s[k] > 1e-12 * std::max(1.0, out.s[0])) out.U.col(k) = X * out.V.col(k) / out.s[k];
  }
  return out;
}

// Orthogonal projector onto the span of the columns of B.
inline Matrix span_projector(const Matrix& B) {
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
  const Matrix Uk = svd.matrixU().leftCols(B.cols());
  return Uk * Uk.transpose();
}

// Pearson chi-square of a contingency table divided by its total.
inline double chi2_over_n(const Matrix& A) {
  const double N = A.sum();
  double chi2 = 0.0;
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) {
      const double expected = A.row(i).sum() * A.col(j).sum() / N;
      chi2 += (A(i, j) - expected) * (A(i, j) - expected) / expected;
    }
  return chi2 / N;
}

inline Groups singleton_groups(Index n) {
  Groups g(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = {i};
  return g;
}

inline double group_norm(const Vector& x, const Groups& groups) {
  double s = 0.0;
  for (const auto& g : groups) {
    double sq = 0.0;
    for (Index i : g) sq += x[i] * x[i];
    s += std::sqrt(sq);
  }
  return s;
}

// Projection onto {z : sum_g ||z_g|| <= s} by projected gradient ascent on
// the scalar Lagrange multiplier; the inner minimizer is group shrinkage.
inline Vector dual_ascent_projection(const Vector& x, double radius, const Groups& groups,
                                     long max_iter = 1000000) {
  if (group_norm(x, groups) <= radius) return x;
  std::vector<double> norms;
  for (const auto& g : groups) {
    double sq = 0.0;
    for (Index i : g) sq += x[i] * x[i];
    norms.push_back(std::sqrt(sq));
  }
  const double step = 1.0 / static_cast<double>(groups.size());
  double lambda = 0.0;
  for (long t = 0; t < max_iter; ++t) {
    double grad = -radius;
    for (double n : norms) grad += std::max(n - lambda, 0.0);
    const double next = std::max(0.0, lambda + step * grad);
    if (next == lambda) break;
    lambda = next;
  }
  Vector z = x;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const double scale = norms[k] > 0.0 ? std::max(0.0, 1.0 - lambda / norms[k]) : 0.0;
    for (Index i : groups[k]) z[i] = x[i] * scale;
  }
  return z;
}

// Random point of the group-norm ball of the given radius.
template <class Rng>
Vector feasible_point(Index n, double radius, const Groups& groups, Rng& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector g(n);
  for (Index i = 0; i < n; ++i) g[i] = gauss(rng);
  return g * (radius * unit(rng) / group_norm(g, groups));
}

// Cyclic projections onto B^perp, the group ball and the unit L2 ball, using
// the oracles above; returns the last iterate.
inline Vector alternating_projections(Vector x, const Matrix& B, double radius, const Groups& groups,
                                      long cycles = 1000000) {
  for (long t = 0; t < cycles; ++t) {
    Vector prev = x;
    if (B.cols() > 0) x -= B * (B.transpose() * x);
    x = dual_ascent_projection(x, radius, groups, 100000);
    if (x.norm() > 1.0) x /= x.norm();
    if ((x - prev).norm() < 1e-15) break;
  }
  return x;
}

// Smallest index set S with sigma_1(rows S of Y) capturing the leading
// singular value of Y, found by enumerating every subset of rows.
inline std::vector<Index> minimal_row_support(const Matrix& Y, double tol = 1e-9) {
  const Index I = Y.rows();
  const double full = eig_svd(Y).s[0];
  std::vector<Index> best;
  Index best_size = I + 1;
  for (unsigned long mask = 1; mask < (1UL << I); ++mask) {
    const Index size = static_cast<Index>(__builtin_popcountl(mask));
    if (size >= best_size) continue;
    Matrix sub(size, Y.cols());
    std::vector<Index> ids;
    for (Index i = 0, k = 0; i < I; ++i)
      if (mask & (1UL << i)) {
        sub.row(k++) = Y.row(i);
        ids.push_back(i);
      }
    if (eig_svd(sub).s[0] >= full * (1.0 - tol)) {
      best = ids;
      best_size = size;
    }
  }
  return best;
}

// Row and column supports of each dimension of Y: enumerate the minimal
// supports of the leading triplet, then deflate it and repeat.
struct Supports {
  std::vector<std::vector<Index>> rows;
  std::vector<std::vector<Index>> cols;
};

inline Supports planted_supports(Matrix Y, Index dims) {
  Supports out;
  for (Index l = 0; l < dims; ++l) {
    out.rows.push_back(minimal_row_support(Y));
    out.cols.push_back(minimal_row_support(Y.transpose()));
    const Svd s = eig_svd(Y);
    Y -= s.s[0] * s.U.col(0) * s.V.col(0).transpose();
  }
  return out;
}

inline std::vector<Index> support(const Vector& v) {
  std::vector<Index> out;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) out.push_back(i);
  return out;
}

// 12 x 10 table on a constant base with two rank-one blocks whose row and
// column effects sum to zero, so the centered matrix is exactly block sparse.
inline Matrix planted_two_block() {
  Matrix A = Matrix::Constant(12, 10, 100.0);
  const double a[4] = {11, 9, -12, -8}, b[4] = {6, 4, -3, -7};
  const double a2[4] = {7, 4, -5, -6}, b2[4] = {5, 2, -3, -4};
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      A(i, j) += a[i] * b[j];
      A(4 + i, 4 + j) += a2[i] * b2[j];
    }
  return A;
}

// Random contingency table with positive margins.
template <class Rng>
Matrix random_counts(Index I, Index J, Rng& rng, int max_count = 30) {
  std::uniform_int_distribution<int> cell(0, max_count);
  Matrix A(I, J);
  for (;;) {
    for (Index i = 0; i < I; ++i)
      for (Index j = 0; j < J; ++j) A(i, j) = cell(rng);
    if ((A.rowwise().sum().array() > 0).all() && (A.colwise().sum().array() > 0).all()) return A;
  }
}

// Sizes as equal as possible when values are cut only between distinct
// values: best max deviation from n/k over every choice of cuts.
inline double best_bin_deviation(std::vector<double> values, int k) {
  std::sort(values.begin(), values.end());
  std::vector<long> counts;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i == 0 || values[i] != values[i - 1])
      counts.push_back(1);
    else
      ++counts.back();
  const double target = static_cast<double>(values.size()) / k;
  const int d = static_cast<int>(counts.size());
  double best = 1e300;
  std::vector<int> cut(static_cast<std::size_t>(k - 1));
  // enumerate increasing cut positions in 1..d-1
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == k - 1) {
      double worst = 0.0;
      int a = 0;
      for (int b = 0; b <= k - 1; ++b) {
        const int e = b < k - 1 ? cut[static_cast<std::size_t>(b)] : d;
        long n = 0;
        for (int i = a; i < e; ++i) n += counts[static_cast<std::size_t>(i)];
        worst = std::max(worst, std::abs(static_cast<double>(n) - target));
        a = e;
      }
      best = std::min(best, worst);
      return;
    }
    for (int c = start; c <= d - (k - 1 - pos); ++c) {
      cut[static_cast<std::size_t>(pos)] = c;
      rec(pos + 1, c + 1);
    }
  };
  rec(0, 1);
  return best;
}

}  // namespace oracle
