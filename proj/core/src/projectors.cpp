#include "spafac/projectors.hpp"

#include "spafac/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spafac {

GroupPartition::GroupPartition(std::vector<Index> assignments) : assignments_(std::move(assignments)) {
  require(!assignments_.empty(), ErrorCode::InvalidArgument, "partition is empty");
  const Index max_id = *std::max_element(assignments_.begin(), assignments_.end());
  require(*std::min_element(assignments_.begin(), assignments_.end()) >= 0, ErrorCode::InvalidArgument,
          "group ids must be non-negative");
  members_.assign(static_cast<std::size_t>(max_id + 1), {});
  for (Index i = 0; i < size(); ++i) members_[static_cast<std::size_t>(assignments_[static_cast<std::size_t>(i)])].push_back(i);
  for (std::size_t g = 0; g < members_.size(); ++g)
    require(!members_[g].empty(), ErrorCode::InvalidArgument, "group " + std::to_string(g) + " is empty");
}

GroupPartition GroupPartition::singletons(Index n) {
  std::vector<Index> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Index{0});
  return GroupPartition(std::move(ids));
}

GroupPartition GroupPartition::single_group(Index n) {
  return GroupPartition(std::vector<Index>(static_cast<std::size_t>(n), 0));
}

GroupPartition GroupPartition::from_spans(const std::vector<std::pair<Index, Index>>& spans) {
  std::vector<Index> ids;
  Index next = 0;
  for (std::size_t g = 0; g < spans.size(); ++g) {
    const auto [begin, end] = spans[g];
    require(begin == next && end > begin, ErrorCode::InvalidArgument, "spans must be consecutive and non-empty");
    ids.insert(ids.end(), static_cast<std::size_t>(end - begin), static_cast<Index>(g));
    next = end;
  }
  return GroupPartition(std::move(ids));
}

Vector GroupPartition::group_norms(const Vector& x) const {
  require(x.size() == size(), ErrorCode::PartitionMismatch,
          "partition covers " + std::to_string(size()) + " coordinates, vector has " + std::to_string(x.size()));
  Vector sq = Vector::Zero(group_count());
  for (Index i = 0; i < x.size(); ++i) sq[assignments_[static_cast<std::size_t>(i)]] += x[i] * x[i];
  return sq.array().sqrt();
}

double GroupPartition::norm(const Vector& x) const { return group_norms(x).sum(); }

SparsityConstraint SparsityConstraint::inactive(Index dim, std::optional<GroupPartition> partition) {
  return SparsityConstraint{std::sqrt(static_cast<double>(dim)), std::move(partition)};
}

double SparsityConstraint::norm(const Vector& x) const {
  return partition ? partition->norm(x) : x.lpNorm<1>();
}

OrthoBasis::OrthoBasis(Index dimension) : columns_(dimension, 0) {}

OrthoBasis::OrthoBasis(Matrix columns) : columns_(std::move(columns)) {
  if (columns_.cols() == 0) return;
  const Matrix gram = columns_.transpose() * columns_;
  const double err = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  require(err <= 1e-10, ErrorCode::InvalidArgument, "basis columns are not orthonormal");
}

void OrthoBasis::append(const Vector& column) {
  require(column.size() == dimension(), ErrorCode::DimensionMismatch, "basis column has the wrong length");
  columns_.conservativeResize(Eigen::NoChange, columns_.cols() + 1);
  columns_.col(columns_.cols() - 1) = column;
}

Vector proj_l2_ball(const Vector& x, double radius) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
  const double norm = x.norm();
  if (norm <= radius) return x;
  return x * (radius / norm);
}

Vector proj_l1_ball(const Vector& x, double radius) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
  if (x.lpNorm<1>() <= radius) return x;
  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mags[j] - candidate > 0.0) theta = candidate;
  }
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double shrunk = std::abs(x[i]) - theta;
    out[i] = shrunk > 0.0 ? std::copysign(shrunk, x[i]) : 0.0;
  }
  return out;
}

namespace {

// Scales each group of x by factor[g]; zero factors give exact zeros.
Vector rescale_groups(const Vector& x, const GroupPartition& partition, const Vector& factor) {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double f = factor[partition.assignments()[static_cast<std::size_t>(i)]];
    out[i] = f == 0.0 ? 0.0 : x[i] * f;
  }
  return out;
}

GroupPartition partition_for(const SparsityConstraint& c, Index n) {
  if (c.partition) {
    require(c.partition->size() == n, ErrorCode::PartitionMismatch,
            "partition covers " + std::to_string(c.partition->size()) + " coordinates, vector has " +
                std::to_string(n));
    return *c.partition;
  }
  return GroupPartition::singletons(n);
}

}  // namespace

Vector proj_group_ball(const Vector& x, const SparsityConstraint& c) {
  if (!c.partition) return proj_l1_ball(x, c.radius);
  const GroupPartition partition = partition_for(c, x.size());
  const Vector norms = partition.group_norms(x);
  const Vector shrunk = proj_l1_ball(norms, c.radius);
  Vector factor = Vector::Zero(norms.size());
  for (Index g = 0; g < norms.size(); ++g)
    if (norms[g] > 0.0 && shrunk[g] > 0.0) factor[g] = shrunk[g] / norms[g];
  if (shrunk == norms) return x;
  return rescale_groups(x, partition, factor);
}

Vector proj_orthocomplement(const Vector& x, const OrthoBasis& basis) {
  require(basis.dimension() == x.size(), ErrorCode::DimensionMismatch, "basis dimension does not match vector");
  if (basis.count() == 0) return x;
  return x - basis.columns() * (basis.columns().transpose() * x);
}

Vector proj_group_unit_sphere(const Vector& x, const SparsityConstraint& c) {
  require(c.radius >= 1.0, ErrorCode::InvalidArgument, "unit-sphere projection needs a radius of at least 1");
  const double xnorm = x.norm();
  if (xnorm == 0.0) return x;
  const GroupPartition partition = partition_for(c, x.size());
  const Vector norms = partition.group_norms(x);
  const double s = c.radius;
  if (norms.sum() <= s * norms.norm()) return x / xnorm;

  std::vector<double> sorted(norms.data(), norms.data() + norms.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto G = sorted.size();

  // ||shrink(n, lambda)||_1 / ||shrink(n, lambda)||_2 decreases in lambda;
  // walk the breakpoints from the top and solve the quadratic on the
  // interval where it crosses s.
  auto ratio = [&](double lam) {
    double l1 = 0.0;
    double l2sq = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
      const double v = sorted[g] - lam;
      if (v <= 0.0) break;
      l1 += v;
      l2sq += v * v;
    }
    return l2sq > 0.0 ? l1 / std::sqrt(l2sq) : 0.0;
  };
  double lambda = 0.0;
  double top = sorted[0];
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t k = 1; k <= G; ++k) {
    s1 += sorted[k - 1];
    s2 += sorted[k - 1] * sorted[k - 1];
    const double kk = static_cast<double>(k);
    const double lam_end = k < G ? sorted[k] : 0.0;
    const double l1 = s1 - kk * lam_end;
    const double l2sq = std::max(s2 - 2.0 * lam_end * s1 + kk * lam_end * lam_end, 0.0);
    if (l2sq > 0.0 && l1 < s * std::sqrt(l2sq)) continue;
    top = sorted[k - 1];
    if (kk - s * s <= 0.0) {
      lambda = lam_end;
    } else {
      const double spread = std::max(kk * s2 - s1 * s1, 0.0);
      lambda = (s1 - s * std::sqrt(spread / (kk - s * s))) / kk;
      lambda = std::clamp(lambda, lam_end, top);
    }
    break;
  }
  // The closed form loses digits when group norms nearly tie; bisect towards
  // the upper end of the interval until the ratio is met.
  if (ratio(lambda) > s) {
    double lo = lambda;
    double hi = top;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double r = ratio(mid);
      if (r > s || r == 0.0) {
        if (r == 0.0) hi = mid; else lo = mid;
      } else {
        hi = mid;
      }
    }
    lambda = ratio(hi) > 0.0 ? hi : lo;
  }

  Vector factor = Vector::Zero(norms.size());
  for (Index g = 0; g < norms.size(); ++g)
    if (norms[g] > lambda) factor[g] = (norms[g] - lambda) / norms[g];
  Vector y = rescale_groups(x, partition, factor);
  double ynorm = y.norm();
  if (ynorm == 0.0) {
    // Tied leading groups with s below sqrt(ties): keep the first of them.
    Index first = 0;
    norms.maxCoeff(&first);
    factor.setZero();
    factor[first] = 1.0;
    y = rescale_groups(x, partition, factor);
    ynorm = y.norm();
  }
  return y / ynorm;
}

namespace {

Vector sparsity_step(const Vector& x, const SparsityConstraint& c, NormConstraint mode) {
  if (mode == NormConstraint::UnitSphere) return proj_group_unit_sphere(x, c);
  // A radius of sqrt(groups) cannot bind inside the unit ball.
  const double groups = static_cast<double>(c.partition ? c.partition->group_count() : x.size());
  if (c.radius >= std::sqrt(groups) * (1.0 - 1e-12)) return proj_l2_ball(x, 1.0);
  return proj_l2_ball(proj_group_ball(x, c), 1.0);
}

}  // namespace

PocsResult pocs_project(const Vector& x, const SparsityConstraint& c, const OrthoBasis& basis,
                        const PocsOptions& options) {
  require(basis.dimension() == x.size(), ErrorCode::DimensionMismatch, "basis dimension does not match vector");
  if (c.partition)
    require(c.partition->size() == x.size(), ErrorCode::PartitionMismatch, "partition does not cover the vector");
  require(options.max_cycles >= 1, ErrorCode::InvalidArgument, "max_cycles must be positive");

  PocsResult out;
  const double start_norm = x.norm();
  constexpr double kCollapse = 1e-10;
  Vector current = x;
  for (int cycle = 1; cycle <= options.max_cycles; ++cycle) {
    Vector next;
    if (options.priority == Priority::SparsityLast) {
      next = proj_orthocomplement(current, basis);
      if (next.norm() <= kCollapse * start_norm || start_norm == 0.0) {
        out.collapsed = true;
        current = Vector::Zero(x.size());
        out.cycles = cycle;
        break;
      }
      next = sparsity_step(next, c, options.norm);
    } else {
      next = proj_orthocomplement(sparsity_step(current, c, options.norm), basis);
      if (next.norm() <= kCollapse * start_norm || start_norm == 0.0) {
        out.collapsed = true;
        current = Vector::Zero(x.size());
        out.cycles = cycle;
        break;
      }
    }
    const double change = (next - current).norm();
    current = std::move(next);
    out.cycles = cycle;
    if (change < options.epsilon) {
      out.converged = true;
      break;
    }
  }
  if (basis.count() > 0)
    out.orthogonality_residual = (basis.columns().transpose() * current).cwiseAbs().maxCoeff();
  out.sparsity_excess = std::max(0.0, c.norm(current) - c.radius);
  out.x = std::move(current);
  return out;
}

namespace {

struct DualPoint {
  Vector z;
  Vector p;
  Vector grad;  // -B^T p
  double value = 0.0;
};

DualPoint dual_at(const Vector& a, const Matrix& B, const Vector& mu, const SparsityConstraint& c) {
  DualPoint d;
  d.z = a - B * mu;
  d.p = proj_group_unit_sphere(d.z, c);
  d.grad = -(B.transpose() * d.p);
  d.value = d.z.dot(d.p);
  return d;
}

}  // namespace

PocsResult constrained_direction(const Vector& a, const SparsityConstraint& c, const OrthoBasis& basis,
                                 double tolerance, int max_iter) {
  require(basis.dimension() == a.size(), ErrorCode::DimensionMismatch, "basis dimension does not match vector");
  require(tolerance > 0.0 && max_iter >= 1, ErrorCode::InvalidArgument, "tolerance and max_iter must be positive");
  PocsResult out;
  const double scale = a.norm();
  if (scale == 0.0) {
    out.collapsed = true;
    out.x = Vector::Zero(a.size());
    return out;
  }
  if (basis.count() == 0) {
    out.x = proj_group_unit_sphere(a, c);
    out.converged = true;
    out.sparsity_excess = std::max(0.0, c.norm(out.x) - c.radius);
    return out;
  }

  const Matrix& B = basis.columns();
  const Index k = B.cols();
  Vector mu = B.transpose() * a;
  DualPoint cur = dual_at(a, B, mu, c);
  if (cur.z.norm() <= 1e-10 * scale) {
    out.collapsed = true;
    out.x = Vector::Zero(a.size());
    return out;
  }

  int it = 0;
  for (; it < max_iter; ++it) {
    if (cur.grad.lpNorm<Eigen::Infinity>() <= tolerance) {
      out.converged = true;
      break;
    }
    const double h = 1e-7 * std::max(cur.z.norm(), 1e-300);
    Matrix H(k, k);
    for (Index j = 0; j < k; ++j) {
      Vector e = Vector::Zero(k);
      e[j] = h;
      H.col(j) = (dual_at(a, B, mu + e, c).grad - dual_at(a, B, mu - e, c).grad) / (2.0 * h);
    }
    H = 0.5 * (H + H.transpose()).eval();
    H.diagonal().array() += 1e-12 * std::max(H.trace(), 1e-300);
    Vector step = -H.ldlt().solve(cur.grad);
    if (!step.allFinite() || step.dot(cur.grad) >= 0.0) step = -cur.grad * cur.z.norm();

    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      DualPoint trial = dual_at(a, B, mu + t * step, c);
      const double drop = cur.value - trial.value;
      const bool armijo = drop >= -1e-4 * t * step.dot(cur.grad) - 1e-15 * std::abs(cur.value);
      if (armijo || trial.grad.norm() < cur.grad.norm()) {
        mu += t * step;
        cur = std::move(trial);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!out.converged && cur.grad.lpNorm<Eigen::Infinity>() <= tolerance) out.converged = true;
  out.cycles = it;
  if (!out.converged) {
    // The dual is not smooth where the maximizer is not unique; cyclic
    // projections usually still reach a feasible unit vector there.
    PocsOptions po;
    po.norm = NormConstraint::UnitSphere;
    po.epsilon = 1e-13;
    po.max_cycles = 2000;
    PocsResult alt = pocs_project(a, c, basis, po);
    if (!alt.collapsed && alt.converged && alt.orthogonality_residual <= 1e-12) {
      alt.cycles += it;
      return alt;
    }
  }
  if (cur.z.norm() <= 1e-10 * scale || (!out.converged && cur.grad.lpNorm<Eigen::Infinity>() > 1e-8))
    out.collapsed = true;
  out.orthogonality_residual = (B.transpose() * cur.p).cwiseAbs().maxCoeff();
  out.sparsity_excess = std::max(0.0, c.norm(cur.p) - c.radius);
  out.x = std::move(cur.p);
  return out;
}

}  // namespace spafac
