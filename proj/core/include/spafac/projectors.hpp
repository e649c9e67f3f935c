#pragma once

#include "spafac/matrix.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace spafac {

/// Partition of coordinates 0..n-1 into groups with contiguous ids
/// 0..group_count-1, none of them empty.
class GroupPartition {
 public:
  GroupPartition() = default;
  explicit GroupPartition(std::vector<Index> assignments);

  static GroupPartition singletons(Index n);
  static GroupPartition single_group(Index n);
  /// Consecutive half-open [begin, end) spans covering 0..n-1 in order.
  static GroupPartition from_spans(const std::vector<std::pair<Index, Index>>& spans);

  Index size() const noexcept { return static_cast<Index>(assignments_.size()); }
  Index group_count() const noexcept { return static_cast<Index>(members_.size()); }
  const std::vector<Index>& assignments() const noexcept { return assignments_; }
  const std::vector<std::vector<Index>>& members() const noexcept { return members_; }

  /// Sum over groups of the L2 norm of each sub-vector.
  double norm(const Vector& x) const;
  Vector group_norms(const Vector& x) const;

 private:
  std::vector<Index> assignments_;
  std::vector<std::vector<Index>> members_;
};

struct SparsityConstraint {
  double radius = 1.0;
  std::optional<GroupPartition> partition;  // absent: plain L1

  /// Radius sqrt(dim), for which a unit vector never violates the constraint.
  static SparsityConstraint inactive(Index dim, std::optional<GroupPartition> partition = std::nullopt);

  double norm(const Vector& x) const;
};

/// Orthonormal columns spanning previously accepted singular vectors.
class OrthoBasis {
 public:
  explicit OrthoBasis(Index dimension);
  explicit OrthoBasis(Matrix columns);

  Index dimension() const noexcept { return columns_.rows(); }
  Index count() const noexcept { return columns_.cols(); }
  const Matrix& columns() const noexcept { return columns_; }

  void append(const Vector& column);

 private:
  Matrix columns_;
};

Vector proj_l2_ball(const Vector& x, double radius);
Vector proj_l1_ball(const Vector& x, double radius);
Vector proj_group_ball(const Vector& x, const SparsityConstraint& c);
Vector proj_orthocomplement(const Vector& x, const OrthoBasis& basis);

/// Projection onto {z : ||z||_G <= s, ||z||_2 = 1} by group soft-thresholding
/// with the threshold solved in closed form, then rescaling to unit length.
/// With singleton groups this is the L1/L2-sphere projection used by the
/// constrained SVD. Requires radius >= 1; a zero input maps to zero.
Vector proj_group_unit_sphere(const Vector& x, const SparsityConstraint& c);

enum class Priority { SparsityLast, OrthogonalityLast };

// Ball: the L2 step is the unit-ball projection. UnitSphere: the sparsity and
// L2 steps are fused into proj_group_unit_sphere, which the sparse
// decomposition needs so that accepted vectors have unit length.
enum class NormConstraint { Ball, UnitSphere };

struct PocsOptions {
  Priority priority = Priority::SparsityLast;
  NormConstraint norm = NormConstraint::Ball;
  double epsilon = 1e-12;
  int max_cycles = 500;
};

struct PocsResult {
  Vector x;
  int cycles = 0;
  bool converged = false;
  bool collapsed = false;  // iterate fell to zero: constraints cannot be met from this start
  double orthogonality_residual = 0.0;  // max |B^T x|
  double sparsity_excess = 0.0;         // max(0, ||x||_G - s)
};

PocsResult pocs_project(const Vector& x, const SparsityConstraint& c, const OrthoBasis& basis,
                        const PocsOptions& options = {});

/// argmax of a^T z over unit vectors z with ||z||_G <= s and B^T z = 0.
/// Solved through the dual over the multipliers of B^T z = 0: for fixed
/// multipliers mu the maximizer is proj_group_unit_sphere(a - B mu), and mu is
/// found by damped Newton steps on the convex dual. `cycles` reports Newton
/// steps; `collapsed` is set when no unit feasible point exists.
PocsResult constrained_direction(const Vector& a, const SparsityConstraint& c, const OrthoBasis& basis,
                                 double tolerance = 1e-14, int max_iter = 100);

}  // namespace spafac
