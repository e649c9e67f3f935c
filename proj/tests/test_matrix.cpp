#include "oracles.hpp"

#include <spafac/error.hpp>
#include <spafac/matrix.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace spafac;

namespace {

Matrix random_matrix(Index r, Index c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix X(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) X(i, j) = g(rng);
  return X;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(MakeMatrix, RejectsEmptyAndNonFinite) {
  const double v[] = {1.0, 2.0};
  EXPECT_EQ(make_matrix(1, 2, v)(0, 1), 2.0);
  EXPECT_THROW(make_matrix(0, 2, {}), Error);
  const double bad[] = {1.0, std::nan("")};
  EXPECT_THROW(make_matrix(1, 2, bad), Error);
}

TEST(DiagonalMetric, RejectsNonPositive) {
  EXPECT_THROW(DiagonalMetric(Vector::Constant(2, 0.0)), Error);
  EXPECT_THROW(DiagonalMetric(Vector::Constant(2, -1.0)), Error);
  const DiagonalMetric m(Vector::Constant(2, 4.0));
  EXPECT_DOUBLE_EQ(m.sqrt()[0], 2.0);
  EXPECT_DOUBLE_EQ(m.inv_sqrt()[1], 0.5);
}

TEST(AlsSvd, DiagonalMatrix) {
  Matrix X(2, 2);
  X << 2, 0, 0, 1;
  const auto r = als_svd(X, 2);
  EXPECT_NEAR(r.delta[0], 2.0, 1e-12);
  EXPECT_NEAR(r.delta[1], 1.0, 1e-12);
  EXPECT_LT(max_abs(r.P.cwiseAbs() - Matrix::Identity(2, 2)), 1e-10);
  EXPECT_LT(max_abs(r.Q.cwiseAbs() - Matrix::Identity(2, 2)), 1e-10);
}

TEST(AlsSvd, ZeroMatrixGivesZeroSpectrum) {
  const auto r = als_svd(Matrix::Zero(3, 3), 3);
  EXPECT_EQ(r.delta.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(max_abs(r.Q.transpose() * r.Q - Matrix::Identity(3, 3)), 1e-12);
}

TEST(AlsSvd, MatchesEigenOracle) {
  const Matrix X = random_matrix(5, 4, 7);
  const auto r = als_svd(X, 4, {1e-12, 20000});
  const auto o = oracle::eig_svd(X);
  for (Index k = 0; k < 4; ++k) EXPECT_NEAR(r.delta[k], o.s[k], 1e-8);
  const Matrix rebuilt = r.P * r.delta.asDiagonal() * r.Q.transpose();
  EXPECT_LT(max_abs(rebuilt - X), 1e-8);
  EXPECT_LT(max_abs(r.P.transpose() * r.P - Matrix::Identity(4, 4)), 1e-10);
  EXPECT_LT(max_abs(r.Q.transpose() * r.Q - Matrix::Identity(4, 4)), 1e-10);
}

TEST(AlsSvd, SpectrumNonIncreasingAndSignConvention) {
  const Matrix X = random_matrix(8, 6, 11);
  const auto r = als_svd(X, 6, {1e-12, 20000});
  for (Index k = 1; k < 6; ++k) EXPECT_LE(r.delta[k], r.delta[k - 1] + 1e-12);
  for (Index k = 0; k < 6; ++k) {
    Index arg = 0;
    r.Q.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(r.Q(arg, k), 0.0);
  }
}

TEST(AlsSvd, RejectsBadRank) {
  EXPECT_THROW(als_svd(Matrix::Ones(2, 3), 3), Error);
  EXPECT_THROW(als_svd(Matrix::Ones(2, 3), 0), Error);
}

TEST(AlsSvd, ReportsNonConvergence) {
  const Matrix X = random_matrix(6, 5, 3);
  const auto r = als_svd(X, 2, {1e-15, 1});
  EXPECT_FALSE(r.all_converged());
}

TEST(AlsGsvd, IdentityMetricsEqualSvd) {
  const Matrix X = random_matrix(5, 4, 5);
  const auto a = als_svd(X, 3);
  const auto b = als_gsvd(X, DiagonalMetric::identity(5), DiagonalMetric::identity(4), 3);
  EXPECT_LT((a.delta - b.delta).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(max_abs(a.P - b.U), 1e-14);
}

TEST(AlsGsvd, PerfectAssociation) {
  Matrix X(2, 2);
  X << .25, -.25, -.25, .25;
  const DiagonalMetric M(Vector::Constant(2, 2.0));
  const auto r = als_gsvd(X, M, M, 1);
  EXPECT_EQ(r.delta[0], 1.0);
}

TEST(AlsGsvd, MetricOrthonormality) {
  const Matrix X = random_matrix(6, 4, 9);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  Vector m(6), w(4);
  for (auto& v : m) v = u(rng);
  for (auto& v : w) v = u(rng);
  const DiagonalMetric M(m), W(w);
  const auto r = als_gsvd(X, M, W, 4, {1e-12, 20000});
  EXPECT_LT(max_abs(r.U.transpose() * m.asDiagonal() * r.U - Matrix::Identity(4, 4)), 1e-10);
  EXPECT_LT(max_abs(r.V.transpose() * w.asDiagonal() * r.V - Matrix::Identity(4, 4)), 1e-10);
  EXPECT_LT(max_abs(r.U * r.delta.asDiagonal() * r.V.transpose() - X), 1e-8);
  EXPECT_EQ(r.U, M.inv_sqrt().asDiagonal() * r.P);
  EXPECT_NEAR(inertia(X, M, W), r.delta.squaredNorm(), 1e-8);
}

TEST(AlsGsvd, DimensionMismatch) {
  try {
    als_gsvd(Matrix::Ones(3, 2), DiagonalMetric::identity(2), DiagonalMetric::identity(2), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Inertia, ZeroAndPerfectAssociation) {
  EXPECT_EQ(inertia(Matrix::Zero(2, 3), DiagonalMetric::identity(2), DiagonalMetric::identity(3)), 0.0);
  Matrix X(2, 2);
  X << .25, -.25, -.25, .25;
  const DiagonalMetric M(Vector::Constant(2, 2.0));
  EXPECT_DOUBLE_EQ(inertia(X, M, M), 1.0);
}

TEST(Inertia, EqualsChiSquareOverN) {
  std::mt19937_64 rng(4);
  const Matrix A = oracle::random_counts(5, 4, rng);
  const Matrix Z = A / A.sum();
  const Vector r = Z.rowwise().sum();
  const Vector c = Z.colwise().sum().transpose();
  const Matrix X = Z - r * c.transpose();
  const double value = inertia(X, DiagonalMetric::inverse_of(r), DiagonalMetric::inverse_of(c));
  EXPECT_NEAR(value, oracle::chi2_over_n(A), 1e-10);
}

TEST(SignNormalize, LargestEntryPositive) {
  Vector v(3);
  v << 0.1, -0.9, 0.3;
  EXPECT_EQ(sign_normalize(v), -1.0);
  EXPECT_GT(v[1], 0.0);
}
