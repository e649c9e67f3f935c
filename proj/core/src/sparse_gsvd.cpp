#include "spafac/sparse_gsvd.hpp"

#include "spafac/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spafac {

SparseGsvdConfig SparseGsvdConfig::uniform(Index rank, const SparsityConstraint& rows, const SparsityConstraint& cols,
                                           DiagonalMetric row_metric, DiagonalMetric col_metric) {
  SparseGsvdConfig cfg;
  cfg.rank = rank;
  cfg.row_constraints.assign(static_cast<std::size_t>(std::max<Index>(rank, 0)), rows);
  cfg.col_constraints.assign(static_cast<std::size_t>(std::max<Index>(rank, 0)), cols);
  cfg.row_metric = std::move(row_metric);
  cfg.col_metric = std::move(col_metric);
  return cfg;
}

PocsOptions SparseGsvdConfig::pocs_options() const {
  PocsOptions o;
  o.priority = priority;
  o.norm = NormConstraint::UnitSphere;
  o.epsilon = pocs_epsilon;
  o.max_cycles = pocs_max_cycles;
  return o;
}

bool SparseGsvdResult::all_converged() const noexcept {
  return std::all_of(diagnostics.begin(), diagnostics.end(), [](const auto& d) { return d.converged(); });
}

Matrix SparseGsvdResult::P_estimation() const {
  Matrix out(P.rows(), P.cols());
  for (Index k = 0; k < P.cols(); ++k) out.col(estimation_order[static_cast<std::size_t>(k)]) = P.col(k);
  return out;
}

Matrix SparseGsvdResult::Q_estimation() const {
  Matrix out(Q.rows(), Q.cols());
  for (Index k = 0; k < Q.cols(); ++k) out.col(estimation_order[static_cast<std::size_t>(k)]) = Q.col(k);
  return out;
}

Vector SparseGsvdResult::delta_hat_estimation() const {
  Vector out(delta_hat.size());
  for (Index k = 0; k < delta_hat.size(); ++k) out[estimation_order[static_cast<std::size_t>(k)]] = delta_hat[k];
  return out;
}

namespace {

void validate_constraints(const std::vector<SparsityConstraint>& list, Index rank, Index dim, const char* side) {
  require(static_cast<Index>(list.size()) == rank, ErrorCode::InvalidArgument,
          std::string(side) + " constraint list must have one entry per dimension");
  const double limit = std::sqrt(static_cast<double>(dim)) * (1.0 + 1e-12);
  for (const auto& c : list) {
    require(std::isfinite(c.radius) && c.radius >= 1.0 && c.radius <= limit, ErrorCode::InvalidArgument,
            std::string(side) + " radius " + std::to_string(c.radius) + " outside [1, sqrt(" + std::to_string(dim) +
                ")]");
    if (c.partition)
      require(c.partition->size() == dim, ErrorCode::PartitionMismatch,
              std::string(side) + " partition does not cover the " + std::to_string(dim) + " coordinates");
  }
}

[[noreturn]] void infeasible(Index l, const char* side) {
  fail(ErrorCode::InfeasibleConstraints, std::string(side) + " constraints for dimension " + std::to_string(l + 1) +
                                             " cannot be met together with orthogonality to earlier dimensions");
}

}  // namespace

PocsResult constrained_step(const Vector& a, const SparsityConstraint& c, const OrthoBasis& basis, StepSolver solver,
                            const PocsOptions& pocs) {
  if (solver == StepSolver::Pocs) return pocs_project(a, c, basis, pocs);
  return constrained_direction(a, c, basis, pocs.epsilon * 0.1, pocs.max_cycles);
}

SparseGsvdResult gsgsvd(const Matrix& X, const SparseGsvdConfig& cfg, const GsvdResult* init) {
  require_finite(X, "gsgsvd input");
  const Index I = X.rows();
  const Index J = X.cols();
  require(cfg.row_metric.size() == I && cfg.col_metric.size() == J, ErrorCode::DimensionMismatch,
          "metric sizes do not conform to the data matrix");
  require(cfg.rank >= 1 && cfg.rank <= std::min(I, J), ErrorCode::InvalidArgument,
          "rank must lie in [1, min(rows, cols)]");
  require(cfg.epsilon > 0.0 && cfg.max_iter >= 1, ErrorCode::InvalidArgument, "epsilon and max_iter must be positive");
  validate_constraints(cfg.row_constraints, cfg.rank, I, "row");
  validate_constraints(cfg.col_constraints, cfg.rank, J, "column");

  GsvdResult computed;
  if (init == nullptr) {
    computed = als_gsvd(X, cfg.row_metric, cfg.col_metric, cfg.rank, {cfg.epsilon, cfg.max_iter});
    init = &computed;
  }
  require(init->P.rows() == I && init->Q.rows() == J && init->rank() >= cfg.rank, ErrorCode::DimensionMismatch,
          "initial decomposition does not conform to the data matrix");

  const Matrix Xt = weighted(X, cfg.row_metric, cfg.col_metric);
  const PocsOptions pocs = cfg.pocs_options();
  const auto R = static_cast<std::size_t>(cfg.rank);
  auto step = [&](const Vector& a, const SparsityConstraint& c, const OrthoBasis& basis) {
    return constrained_step(a, c, basis, cfg.solver, pocs);
  };

  const double signal_floor = 1e-12 * Xt.norm();
  Matrix P(I, cfg.rank);
  Matrix Q(J, cfg.rank);
  Vector dhat(cfg.rank);
  std::vector<DimensionDiagnostics> diags(R);
  OrthoBasis rows_basis(I);
  OrthoBasis cols_basis(J);

  for (Index l = 0; l < cfg.rank; ++l) {
    const auto& rc = cfg.row_constraints[static_cast<std::size_t>(l)];
    const auto& cc = cfg.col_constraints[static_cast<std::size_t>(l)];
    auto& d = diags[static_cast<std::size_t>(l)];
    Vector p = init->P.col(l);
    Vector q = init->Q.col(l);
    PocsResult pr;
    PocsResult qr;
    int t = 0;
    bool converged = false;
    while (t < cfg.max_iter) {
      const Vector a = Xt * q;
      if (a.norm() <= signal_floor)
        fail(ErrorCode::DegenerateInput, "dimension " + std::to_string(l + 1) +
                                             " carries no signal: the requested rank exceeds the numerical rank");
      pr = step(a, rc, rows_basis);
      if (pr.collapsed) infeasible(l, "row");
      qr = step(Xt.transpose() * pr.x, cc, cols_basis);
      if (qr.collapsed) infeasible(l, "column");
      const double dp = (pr.x - p).norm();
      const double dq = (qr.x - q).norm();
      p = pr.x;
      q = qr.x;
      ++t;
      d.objective.push_back(p.dot(Xt * q));
      if (dp < cfg.epsilon && dq < cfg.epsilon) {
        converged = true;
        break;
      }
    }

    const double sign = sign_normalize(q);
    p *= sign;
    d.iterations = t;
    d.als_converged = converged;
    d.pocs_converged = pr.converged && qr.converged;
    d.pocs_cycles = pr.cycles + qr.cycles;
    d.row_orthogonality = pr.orthogonality_residual;
    d.col_orthogonality = qr.orthogonality_residual;
    d.row_sparsity_excess = std::max(0.0, rc.norm(p) - rc.radius);
    d.col_sparsity_excess = std::max(0.0, cc.norm(q) - cc.radius);

    P.col(l) = p;
    Q.col(l) = q;
    dhat[l] = p.dot(Xt * q);
    rows_basis.append(p);
    cols_basis.append(q);
  }

  SparseGsvdResult out;
  out.estimation_order.resize(R);
  std::iota(out.estimation_order.begin(), out.estimation_order.end(), Index{0});
  std::stable_sort(out.estimation_order.begin(), out.estimation_order.end(),
                   [&](Index a, Index b) { return dhat[a] > dhat[b]; });
  out.P.resize(I, cfg.rank);
  out.Q.resize(J, cfg.rank);
  out.delta_hat.resize(cfg.rank);
  for (Index k = 0; k < cfg.rank; ++k) {
    const Index src = out.estimation_order[static_cast<std::size_t>(k)];
    out.P.col(k) = P.col(src);
    out.Q.col(k) = Q.col(src);
    out.delta_hat[k] = dhat[src];
  }
  out.U = cfg.row_metric.inv_sqrt().asDiagonal() * out.P;
  out.V = cfg.col_metric.inv_sqrt().asDiagonal() * out.Q;
  out.diagnostics = std::move(diags);
  out.row_constraints = cfg.row_constraints;
  out.col_constraints = cfg.col_constraints;
  out.row_metric = cfg.row_metric;
  out.col_metric = cfg.col_metric;
  out.solver = cfg.solver;
  out.pocs = pocs;
  return out;
}

namespace {

std::vector<SparsityConstraint> singleton_constraints(std::span<const double> radii, Index rank, const char* side) {
  require(radii.size() == 1 || static_cast<Index>(radii.size()) == rank, ErrorCode::InvalidArgument,
          std::string(side) + " radii: give one value or one per dimension");
  std::vector<SparsityConstraint> out;
  for (Index l = 0; l < rank; ++l)
    out.push_back(SparsityConstraint{radii.size() == 1 ? radii[0] : radii[static_cast<std::size_t>(l)], std::nullopt});
  return out;
}

}  // namespace

SparseGsvdResult sgsvd(const Matrix& X, const DiagonalMetric& M, const DiagonalMetric& W, Index rank,
                       std::span<const double> row_radii, std::span<const double> col_radii, double epsilon,
                       int max_iter) {
  SparseGsvdConfig cfg;
  cfg.rank = rank;
  cfg.row_constraints = singleton_constraints(row_radii, rank, "row");
  cfg.col_constraints = singleton_constraints(col_radii, rank, "column");
  cfg.row_metric = M;
  cfg.col_metric = W;
  cfg.epsilon = epsilon;
  cfg.max_iter = max_iter;
  return gsgsvd(X, cfg);
}

SparseGsvdResult csvd(const Matrix& X, Index rank, std::span<const double> row_radii,
                      std::span<const double> col_radii, double epsilon, int max_iter) {
  return sgsvd(X, DiagonalMetric::identity(X.rows()), DiagonalMetric::identity(X.cols()), rank, row_radii,
               col_radii, epsilon, max_iter);
}

double fit_ratio(const SparseGsvdResult& result, const SvdResult& reference, Index L) {
  require(L >= 1 && L <= result.rank() && L <= reference.rank(), ErrorCode::InvalidArgument,
          "L must not exceed the rank of either decomposition");
  const double denom = reference.delta.head(L).squaredNorm();
  require(denom > 0.0, ErrorCode::DegenerateReference, "reference spectrum is zero");
  return result.delta_hat.head(L).squaredNorm() / denom;
}

}  // namespace spafac
