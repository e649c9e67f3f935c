#pragma once

#include "spafac/matrix.hpp"
#include "spafac/projectors.hpp"

#include <span>
#include <vector>

namespace spafac {

// How each half-step is projected onto the constraint intersection.
// Exact: constrained_direction. Pocs: cyclic pocs_project in unit-sphere mode.
enum class StepSolver { Exact, Pocs };

struct SparseGsvdConfig {
  Index rank = 1;
  std::vector<SparsityConstraint> row_constraints;  // one per dimension
  std::vector<SparsityConstraint> col_constraints;
  DiagonalMetric row_metric;
  DiagonalMetric col_metric;
  double epsilon = 1e-9;
  int max_iter = 1000;
  StepSolver solver = StepSolver::Exact;
  Priority priority = Priority::SparsityLast;  // Pocs only
  double pocs_epsilon = 1e-12;
  int pocs_max_cycles = 500;

  /// Same row and column constraint for every dimension.
  static SparseGsvdConfig uniform(Index rank, const SparsityConstraint& rows, const SparsityConstraint& cols,
                                  DiagonalMetric row_metric, DiagonalMetric col_metric);

  PocsOptions pocs_options() const;
};

struct DimensionDiagnostics {
  int iterations = 0;
  bool als_converged = false;
  bool pocs_converged = false;
  int pocs_cycles = 0;              // inner steps used by the last row + column projection
  double row_orthogonality = 0.0;   // max |P_prev^T p|
  double col_orthogonality = 0.0;
  double row_sparsity_excess = 0.0; // max(0, ||p||_G - s_p)
  double col_sparsity_excess = 0.0;
  std::vector<double> objective;    // delta-hat after every ALS step

  bool converged() const noexcept { return als_converged && pocs_converged; }
};

struct SparseGsvdResult {
  // Columns ordered by decreasing pseudo-singular value.
  Matrix P;
  Matrix Q;
  Matrix U;
  Matrix V;
  Vector delta_hat;
  // estimation_order[k] is the ALS step that produced reordered column k.
  std::vector<Index> estimation_order;
  // Everything below is indexed by ALS step.
  std::vector<DimensionDiagnostics> diagnostics;
  std::vector<SparsityConstraint> row_constraints;
  std::vector<SparsityConstraint> col_constraints;
  DiagonalMetric row_metric;
  DiagonalMetric col_metric;
  StepSolver solver = StepSolver::Exact;
  PocsOptions pocs;

  Index rank() const noexcept { return delta_hat.size(); }
  bool all_converged() const noexcept;

  // Views in ALS order.
  Matrix P_estimation() const;
  Matrix Q_estimation() const;
  Vector delta_hat_estimation() const;
};

/// One half-step of the sparse ALS: a unit vector maximizing a^T z under the
/// sparsity constraint and orthogonality to `basis`.
PocsResult constrained_step(const Vector& a, const SparsityConstraint& c, const OrthoBasis& basis, StepSolver solver,
                            const PocsOptions& pocs);

/// Group-sparse GSVD. `init` supplies starting vectors (the plain GSVD of the
/// same X and metrics); it is computed when not given.
SparseGsvdResult gsgsvd(const Matrix& X, const SparseGsvdConfig& cfg, const GsvdResult* init = nullptr);

SparseGsvdResult csvd(const Matrix& X, Index rank, std::span<const double> row_radii,
                      std::span<const double> col_radii, double epsilon = 1e-9, int max_iter = 1000);

SparseGsvdResult sgsvd(const Matrix& X, const DiagonalMetric& M, const DiagonalMetric& W, Index rank,
                       std::span<const double> row_radii, std::span<const double> col_radii,
                       double epsilon = 1e-9, int max_iter = 1000);

/// Sum of the first L squared pseudo-singular values over the sum of the
/// first L squared singular values of the plain decomposition.
double fit_ratio(const SparseGsvdResult& result, const SvdResult& reference, Index L);

}  // namespace spafac
