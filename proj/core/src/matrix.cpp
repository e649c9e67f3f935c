#include "spafac/matrix.hpp"

#include "spafac/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spafac {

Matrix make_matrix(Index rows, Index cols, std::span<const double> row_major) {
  require(rows >= 1 && cols >= 1, ErrorCode::InvalidArgument, "matrix needs at least one row and one column");
  require(static_cast<Index>(row_major.size()) == rows * cols, ErrorCode::DimensionMismatch,
          "value count " + std::to_string(row_major.size()) + " does not match " + std::to_string(rows) + "x" +
              std::to_string(cols));
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = row_major[static_cast<std::size_t>(i * cols + j)];
  require_finite(m, "matrix");
  return m;
}

void require_finite(const Matrix& m, std::string_view what) {
  require(m.rows() >= 1 && m.cols() >= 1, ErrorCode::InvalidArgument, std::string(what) + " is empty");
  require(m.allFinite(), ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

DiagonalMetric::DiagonalMetric(Vector entries) : entries_(std::move(entries)) {
  for (Index i = 0; i < entries_.size(); ++i)
    require(std::isfinite(entries_[i]) && entries_[i] > 0.0, ErrorCode::InvalidArgument,
            "metric entry " + std::to_string(i) + " is not a finite positive value");
  sqrt_ = entries_.array().sqrt();
  inv_sqrt_ = sqrt_.array().inverse();
}

DiagonalMetric DiagonalMetric::identity(Index n) { return DiagonalMetric(Vector::Ones(n)); }

DiagonalMetric DiagonalMetric::inverse_of(const Vector& masses) {
  for (Index i = 0; i < masses.size(); ++i)
    require(masses[i] > 0.0, ErrorCode::ZeroMarginal, "mass " + std::to_string(i) + " is zero");
  return DiagonalMetric(masses.array().inverse().matrix());
}

bool SvdResult::all_converged() const noexcept {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

Matrix weighted(const Matrix& X, const DiagonalMetric& M, const DiagonalMetric& W) {
  require(M.size() == X.rows() && W.size() == X.cols(), ErrorCode::DimensionMismatch,
          "metric sizes do not conform to the data matrix");
  Matrix out(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j)
    for (Index i = 0; i < X.rows(); ++i) out(i, j) = X(i, j) * std::sqrt(M.entries()[i] * W.entries()[j]);
  return out;
}

double sign_normalize(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return 1.0;
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v[best] < 0.0) {
    v = -v;
    return -1.0;
  }
  return 1.0;
}

namespace {

void orthogonalize(Eigen::Ref<Vector> x, const Matrix& basis, Index count) {
  if (count == 0) return;
  const auto B = basis.leftCols(count);
  x -= B * (B.transpose() * x);
}

// Unit vector in the complement of the first `count` basis columns, built
// from canonical directions. Used when the residual matrix is exactly zero.
Vector canonical_complement(const Matrix& basis, Index count, Index n) {
  for (Index k = 0; k < n; ++k) {
    Vector e = Vector::Unit(n, k);
    orthogonalize(e, basis, count);
    orthogonalize(e, basis, count);
    const double norm = e.norm();
    if (norm > 1e-8) return e / norm;
  }
  return Vector::Unit(n, 0);
}

Vector initial_right_vector(const Matrix& X) {
  const Index J = X.cols();
  Vector seed = Vector::Ones(J);
  Vector q = X.transpose() * (X * seed);
  const double scale = X.squaredNorm() * std::sqrt(static_cast<double>(J));
  if (q.norm() > 1e-12 * scale) return q.normalized();
  // All-ones lies (numerically) in the null space, e.g. for double-centered
  // data with uniform masses. Seed with the heaviest column instead.
  Index heaviest = 0;
  X.colwise().squaredNorm().maxCoeff(&heaviest);
  q = X.transpose() * X.col(heaviest);
  if (q.norm() > 0.0) return q.normalized();
  return Vector::Unit(J, heaviest);
}

}  // namespace

SvdResult als_svd(const Matrix& X, Index rank, const AlsOptions& options) {
  require_finite(X, "als_svd input");
  require(rank >= 1 && rank <= std::min(X.rows(), X.cols()), ErrorCode::InvalidArgument,
          "rank must lie in [1, min(rows, cols)]");
  require(options.epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  require(options.max_iter >= 1, ErrorCode::InvalidArgument, "max_iter must be positive");

  const Index I = X.rows();
  const Index J = X.cols();
  SvdResult out;
  out.P = Matrix::Zero(I, rank);
  out.Q = Matrix::Zero(J, rank);
  out.delta = Vector::Zero(rank);
  out.iterations.assign(static_cast<std::size_t>(rank), 0);
  out.converged.assign(static_cast<std::size_t>(rank), false);

  Matrix residual = X;
  for (Index l = 0; l < rank; ++l) {
    const auto slot = static_cast<std::size_t>(l);
    if (residual.squaredNorm() == 0.0) {
      out.P.col(l) = canonical_complement(out.P, l, I);
      out.Q.col(l) = canonical_complement(out.Q, l, J);
      out.converged[slot] = true;
      continue;
    }

    Vector q = initial_right_vector(residual);
    orthogonalize(q, out.Q, l);
    Vector p = residual * q;
    orthogonalize(p, out.P, l);
    if (p.norm() == 0.0) p = canonical_complement(out.P, l, I);
    p.normalize();

    int t = 0;
    bool converged = false;
    while (t < options.max_iter) {
      Vector p_next = residual * q;
      orthogonalize(p_next, out.P, l);
      const double np = p_next.norm();
      if (np == 0.0) break;
      p_next /= np;
      Vector q_next = residual.transpose() * p_next;
      orthogonalize(q_next, out.Q, l);
      const double nq = q_next.norm();
      if (nq == 0.0) break;
      q_next /= nq;
      const double dp = (p_next - p).norm();
      const double dq = (q_next - q).norm();
      p = std::move(p_next);
      q = std::move(q_next);
      ++t;
      if (dp < options.epsilon && dq < options.epsilon) {
        converged = true;
        break;
      }
    }

    sign_normalize(q);
    Vector pq = residual * q;
    orthogonalize(pq, out.P, l);
    const double delta = pq.norm();
    if (delta > 0.0) p = pq / delta;
    out.P.col(l) = p;
    out.Q.col(l) = q;
    out.delta[l] = delta;
    out.iterations[slot] = t;
    out.converged[slot] = converged;
    residual -= delta * p * q.transpose();
  }
  return out;
}

GsvdResult als_gsvd(const Matrix& X, const DiagonalMetric& M, const DiagonalMetric& W, Index rank,
                    const AlsOptions& options) {
  require_finite(X, "als_gsvd input");
  const Matrix Xt = weighted(X, M, W);
  GsvdResult out;
  static_cast<SvdResult&>(out) = als_svd(Xt, rank, options);
  out.U = M.inv_sqrt().asDiagonal() * out.P;
  out.V = W.inv_sqrt().asDiagonal() * out.Q;
  out.row_metric = M;
  out.col_metric = W;
  return out;
}

double inertia(const Matrix& X, const DiagonalMetric& M, const DiagonalMetric& W) {
  require(M.size() == X.rows() && W.size() == X.cols(), ErrorCode::DimensionMismatch,
          "metric sizes do not conform to the data matrix");
  return weighted(X, M, W).squaredNorm();
}

}  // namespace spafac
