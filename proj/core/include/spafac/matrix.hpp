#pragma once

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace spafac {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Builds a matrix from row-major values, rejecting empty shapes and
// non-finite entries.
Matrix make_matrix(Index rows, Index cols, std::span<const double> row_major);

void require_finite(const Matrix& m, std::string_view what);

/// Positive diagonal metric (the diagonal of M or W).
class DiagonalMetric {
 public:
  DiagonalMetric() = default;
  explicit DiagonalMetric(Vector entries);

  static DiagonalMetric identity(Index n);
  /// diag(1 / masses), the metric CA derives from row or column masses.
  static DiagonalMetric inverse_of(const Vector& masses);

  Index size() const noexcept { return entries_.size(); }
  const Vector& entries() const noexcept { return entries_; }
  const Vector& sqrt() const noexcept { return sqrt_; }
  const Vector& inv_sqrt() const noexcept { return inv_sqrt_; }

 private:
  Vector entries_;
  Vector sqrt_;
  Vector inv_sqrt_;
};

struct AlsOptions {
  double epsilon = 1e-9;
  int max_iter = 1000;
};

struct SvdResult {
  Matrix P;      // I x R left singular vectors
  Matrix Q;      // J x R right singular vectors
  Vector delta;  // singular values, length R
  std::vector<int> iterations;
  std::vector<bool> converged;

  Index rank() const noexcept { return delta.size(); }
  bool all_converged() const noexcept;
};

struct GsvdResult : SvdResult {
  Matrix U;  // M^(-1/2) P
  Matrix V;  // W^(-1/2) Q
  DiagonalMetric row_metric;
  DiagonalMetric col_metric;
};

/// M^(1/2) X W^(1/2), formed entrywise as X_ij * sqrt(M_i W_j).
Matrix weighted(const Matrix& X, const DiagonalMetric& M, const DiagonalMetric& W);

/// Rank-`rank` SVD by alternating power iterations with deflation.
/// Each (p, q) pair is sign-normalized so the largest |q_i| is positive.
SvdResult als_svd(const Matrix& X, Index rank, const AlsOptions& options = {});

GsvdResult als_gsvd(const Matrix& X, const DiagonalMetric& M, const DiagonalMetric& W, Index rank,
                    const AlsOptions& options = {});

/// tr(W^(1/2) X^T M X W^(1/2)).
double inertia(const Matrix& X, const DiagonalMetric& M, const DiagonalMetric& W);

// Flips v so that its largest-magnitude entry is positive; returns the sign applied.
double sign_normalize(Eigen::Ref<Vector> v);

}  // namespace spafac
