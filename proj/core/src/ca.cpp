#include "spafac/ca.hpp"

#include "spafac/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace spafac {

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::CA: return "ca";
    case Method::MCA: return "mca";
    case Method::DiSCA: return "disca";
    case Method::DiMCA: return "dimca";
  }
  return "?";
}

bool is_multiple(Method m) noexcept { return m == Method::MCA || m == Method::DiMCA; }
bool is_discriminant(Method m) noexcept { return m == Method::DiSCA || m == Method::DiMCA; }

namespace {

std::vector<std::string> default_labels(const char* prefix, Index n) {
  std::vector<std::string> out;
  for (Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

void check_labels(std::vector<std::string>& labels, Index n, const char* prefix, const char* what) {
  if (labels.empty()) {
    labels = default_labels(prefix, n);
    return;
  }
  require(static_cast<Index>(labels.size()) == n, ErrorCode::DimensionMismatch,
          std::string(what) + " label count does not match the table");
}

}  // namespace

ContingencyTable ContingencyTable::make(Matrix counts, std::vector<std::string> row_labels,
                                        std::vector<std::string> col_labels) {
  require(counts.rows() >= 1 && counts.cols() >= 1, ErrorCode::EmptyTable, "contingency table is empty");
  require(counts.allFinite(), ErrorCode::InvalidArgument, "contingency table has non-finite entries");
  for (Index i = 0; i < counts.rows(); ++i)
    for (Index j = 0; j < counts.cols(); ++j)
      require(counts(i, j) >= 0.0, ErrorCode::NegativeCount,
              "negative count at row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1));
  require(counts.sum() > 0.0, ErrorCode::EmptyTable, "contingency table has a zero grand total");
  ContingencyTable t;
  t.counts = std::move(counts);
  t.row_labels = std::move(row_labels);
  t.col_labels = std::move(col_labels);
  check_labels(t.row_labels, t.counts.rows(), "r", "row");
  check_labels(t.col_labels, t.counts.cols(), "c", "column");
  return t;
}

DisjunctiveTable DisjunctiveTable::make(Matrix indicator, std::vector<Span> spans, std::vector<std::string> row_labels,
                                        std::vector<std::string> level_labels,
                                        std::vector<std::string> variable_names) {
  require(indicator.rows() >= 1 && indicator.cols() >= 1 && !spans.empty(), ErrorCode::EmptyTable,
          "disjunctive table is empty");
  Index next = 0;
  for (const auto& [first, last] : spans) {
    require(first == next && last > first, ErrorCode::InvalidCoding, "variable spans must be consecutive and non-empty");
    next = last;
  }
  require(next == indicator.cols(), ErrorCode::InvalidCoding, "variable spans do not cover every level column");
  for (Index i = 0; i < indicator.rows(); ++i)
    for (Index j = 0; j < indicator.cols(); ++j)
      require(indicator(i, j) == 0.0 || indicator(i, j) == 1.0, ErrorCode::InvalidCoding,
              "indicator entries must be 0 or 1 (row " + std::to_string(i + 1) + ")");
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto [first, last] = spans[k];
    const Matrix block = indicator.middleCols(first, last - first);
    for (Index i = 0; i < indicator.rows(); ++i)
      require(block.row(i).sum() == 1.0, ErrorCode::InvalidCoding,
              "row " + std::to_string(i + 1) + " does not select exactly one level of variable " +
                  std::to_string(k + 1));
  }
  DisjunctiveTable d;
  d.indicator = std::move(indicator);
  d.variable_spans = std::move(spans);
  d.row_labels = std::move(row_labels);
  d.level_labels = std::move(level_labels);
  d.variable_names = std::move(variable_names);
  check_labels(d.row_labels, d.indicator.rows(), "r", "row");
  check_labels(d.level_labels, d.indicator.cols(), "l", "level");
  if (d.variable_names.empty()) d.variable_names = default_labels("v", d.variable_count());
  require(static_cast<Index>(d.variable_names.size()) == d.variable_count(), ErrorCode::DimensionMismatch,
          "variable name count does not match the spans");
  for (Index j = 0; j < d.indicator.cols(); ++j)
    require(d.indicator.col(j).sum() > 0.0, ErrorCode::EmptyLevel,
            "level '" + d.level_labels[static_cast<std::size_t>(j)] +
                "' is never observed; merge or re-bin it before the analysis");
  return d;
}

GroupDesign GroupDesign::from_assignments(std::vector<Index> assignment, std::vector<std::string> labels) {
  require(!assignment.empty(), ErrorCode::GroupMismatch, "group design is empty");
  const Index groups = *std::max_element(assignment.begin(), assignment.end()) + 1;
  require(*std::min_element(assignment.begin(), assignment.end()) >= 0, ErrorCode::GroupMismatch,
          "group ids must be non-negative");
  GroupDesign g;
  g.H = Matrix::Zero(static_cast<Index>(assignment.size()), groups);
  for (std::size_t i = 0; i < assignment.size(); ++i) g.H(static_cast<Index>(i), assignment[i]) = 1.0;
  for (Index k = 0; k < groups; ++k)
    require(g.H.col(k).sum() > 0.0, ErrorCode::GroupMismatch, "group " + std::to_string(k + 1) + " has no members");
  g.assignment = std::move(assignment);
  g.group_labels = std::move(labels);
  check_labels(g.group_labels, groups, "g", "group");
  return g;
}

GroupDesign GroupDesign::from_labels(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, Index> ids;
  std::vector<std::string> names;
  std::vector<Index> assignment;
  for (const auto& l : labels) {
    auto [it, inserted] = ids.emplace(l, static_cast<Index>(names.size()));
    if (inserted) names.push_back(l);
    assignment.push_back(it->second);
  }
  return from_assignments(std::move(assignment), std::move(names));
}

CaInput from_probabilities(Method method, Matrix Z, std::vector<std::string> row_labels,
                           std::vector<std::string> col_labels, std::vector<Span> spans) {
  require(Z.rows() >= 1 && Z.cols() >= 1, ErrorCode::EmptyTable, "probability matrix is empty");
  CaInput in;
  in.method = method;
  in.r = Z.rowwise().sum();
  in.c = Z.colwise().sum().transpose();
  check_labels(row_labels, Z.rows(), "r", "row");
  check_labels(col_labels, Z.cols(), "c", "column");
  for (Index i = 0; i < in.r.size(); ++i)
    require(in.r[i] > 0.0, ErrorCode::ZeroMarginal,
            "row '" + row_labels[static_cast<std::size_t>(i)] + "' has zero mass");
  for (Index j = 0; j < in.c.size(); ++j)
    require(in.c[j] > 0.0, ErrorCode::ZeroMarginal,
            "column '" + col_labels[static_cast<std::size_t>(j)] + "' has zero mass");
  in.X = Z - in.r * in.c.transpose();
  in.Z = std::move(Z);
  in.row_labels = std::move(row_labels);
  in.col_labels = std::move(col_labels);
  in.variable_spans = std::move(spans);
  return in;
}

CaInput preprocess_ca(const ContingencyTable& t) {
  require(t.counts.rows() >= 1 && t.counts.cols() >= 1, ErrorCode::EmptyTable, "contingency table is empty");
  const double N = t.grand_total();
  require(N > 0.0, ErrorCode::EmptyTable, "contingency table has a zero grand total");
  return from_probabilities(Method::CA, t.counts / N, t.row_labels, t.col_labels);
}

CaInput preprocess_mca(const DisjunctiveTable& d) {
  const double scale = static_cast<double>(d.indicator.rows()) * static_cast<double>(d.variable_count());
  return from_probabilities(Method::MCA, d.indicator / scale, d.row_labels, d.level_labels, d.variable_spans);
}

namespace {

Matrix group_sums(const Matrix& A, const GroupDesign& g) {
  require(g.H.rows() == A.rows(), ErrorCode::GroupMismatch,
          "group design has " + std::to_string(g.H.rows()) + " rows, table has " + std::to_string(A.rows()));
  return g.H.transpose() * A;
}

}  // namespace

CaInput preprocess_disca(const ContingencyTable& t, const GroupDesign& g) {
  const Matrix AG = group_sums(t.counts, g);
  const double N = AG.sum();
  require(N > 0.0, ErrorCode::EmptyTable, "contingency table has a zero grand total");
  CaInput in = from_probabilities(Method::DiSCA, AG / N, g.group_labels, t.col_labels);
  return in;
}

CaInput preprocess_dimca(const DisjunctiveTable& d, const GroupDesign& g) {
  const Matrix AG = group_sums(d.indicator, g);
  const double scale = static_cast<double>(d.indicator.rows()) * static_cast<double>(d.variable_count());
  return from_probabilities(Method::DiMCA, AG / scale, g.group_labels, d.level_labels, d.variable_spans);
}

bool CaModel::converged() const noexcept { return sparse ? sparse->all_converged() : reference.all_converged(); }

Vector CaModel::percent_inertia() const {
  if (total_inertia <= 0.0) return Vector::Zero(delta.size());
  return eigenvalues() * (100.0 / total_inertia);
}

namespace {

std::vector<SparsityConstraint> expand(const std::vector<double>& radii, const std::optional<GroupPartition>& groups,
                                       Index rank, const char* side) {
  require(radii.size() == 1 || static_cast<Index>(radii.size()) == rank, ErrorCode::InvalidArgument,
          std::string(side) + " radii: give one value or one per dimension");
  std::vector<SparsityConstraint> out;
  for (Index l = 0; l < rank; ++l)
    out.push_back(SparsityConstraint{radii.size() == 1 ? radii[0] : radii[static_cast<std::size_t>(l)], groups});
  return out;
}

// Scores D^-1 (metric-scaled vectors) times the spectrum; zero spectrum entries give zero scores.
Matrix scores(const Matrix& W, const Vector& masses, const Vector& delta) {
  Matrix out(W.rows(), W.cols());
  for (Index l = 0; l < W.cols(); ++l) out.col(l) = W.col(l).cwiseQuotient(masses) * delta[l];
  return out;
}

}  // namespace

SparseGsvdConfig sparse_config(const CaInput& input, const FitOptions& options) {
  require(options.sparsity.has_value(), ErrorCode::InvalidArgument, "fit options carry no sparsity settings");
  const auto& s = *options.sparsity;
  std::optional<GroupPartition> col_groups = s.col_groups;
  if (is_multiple(input.method)) {
    require(!s.col_groups.has_value(), ErrorCode::InvalidArgument,
            "column groups of MCA models are fixed by the variable blocks");
    col_groups = GroupPartition::from_spans(input.variable_spans);
  }
  SparseGsvdConfig cfg;
  cfg.rank = options.rank;
  cfg.row_constraints = expand(s.row_radii, s.row_groups, options.rank, "row");
  cfg.col_constraints = expand(s.col_radii, col_groups, options.rank, "column");
  cfg.row_metric = DiagonalMetric::inverse_of(input.r);
  cfg.col_metric = DiagonalMetric::inverse_of(input.c);
  cfg.epsilon = options.epsilon;
  cfg.max_iter = options.max_iter;
  cfg.solver = s.solver;
  cfg.priority = s.priority;
  return cfg;
}

CaModel fit(const CaInput& input, const FitOptions& options) {
  const Index I = input.X.rows();
  const Index J = input.X.cols();
  require(options.rank >= 1 && options.rank <= std::min(I, J), ErrorCode::InvalidArgument,
          "rank " + std::to_string(options.rank) + " must lie in [1, " + std::to_string(std::min(I, J)) + "]");
  CaModel m;
  m.method = input.method;
  m.Z = input.Z;
  m.X = input.X;
  m.r = input.r;
  m.c = input.c;
  m.row_metric = DiagonalMetric::inverse_of(input.r);
  m.col_metric = DiagonalMetric::inverse_of(input.c);
  m.row_labels = input.row_labels;
  m.col_labels = input.col_labels;
  m.variable_spans = input.variable_spans;
  m.options = options;
  m.reference = als_gsvd(m.X, m.row_metric, m.col_metric, options.rank, {options.epsilon, options.max_iter});

  if (options.sparsity) {
    m.sparse = gsgsvd(m.X, sparse_config(input, options), &m.reference);
    m.P = m.sparse->P;
    m.Q = m.sparse->Q;
    m.U = m.sparse->U;
    m.V = m.sparse->V;
    m.delta = m.sparse->delta_hat;
  } else {
    m.P = m.reference.P;
    m.Q = m.reference.Q;
    m.U = m.reference.U;
    m.V = m.reference.V;
    m.delta = m.reference.delta;
  }
  m.F = scores(m.U, m.r, m.delta);
  m.G = scores(m.V, m.c, m.delta);
  m.row_contrib = m.P.array().square();
  m.col_contrib = m.Q.array().square();
  m.total_inertia = inertia(m.X, m.row_metric, m.col_metric);
  return m;
}

namespace {

void check_dim(const CaModel& model, Index l) {
  require(l >= 0 && l < model.rank(), ErrorCode::InvalidArgument, "dimension index out of range");
}

const SparseGsvdResult& sparse_of(const CaModel& model) {
  const auto& s = *model.sparse;
  require(static_cast<Index>(s.estimation_order.size()) == s.rank(), ErrorCode::OrderUnavailable,
          "sparse transition needs the estimation order of the dimensions");
  return s;
}

}  // namespace

Vector transition_row_from_col(const CaModel& model, Index l) {
  check_dim(model, l);
  const double d = model.delta[l];
  if (!model.is_sparse()) {
    if (d == 0.0) return Vector::Zero(model.r.size());
    return (model.X * model.G.col(l)).cwiseQuotient(model.r) / d;
  }
  const auto& s = sparse_of(model);
  const Index e = s.estimation_order[static_cast<std::size_t>(l)];
  const Matrix Pe = s.P_estimation();
  const OrthoBasis basis(Matrix(Pe.leftCols(e)));
  const Matrix Xt = weighted(model.X, model.row_metric, model.col_metric);
  const PocsResult p =
      constrained_step(Xt * model.Q.col(l), s.row_constraints[static_cast<std::size_t>(e)], basis, s.solver, s.pocs);
  return model.row_metric.sqrt().cwiseProduct(p.x) * d;
}

Vector transition_col_from_row(const CaModel& model, Index l) {
  check_dim(model, l);
  const double d = model.delta[l];
  if (!model.is_sparse()) {
    if (d == 0.0) return Vector::Zero(model.c.size());
    return (model.X.transpose() * model.F.col(l)).cwiseQuotient(model.c) / d;
  }
  const auto& s = sparse_of(model);
  const Index e = s.estimation_order[static_cast<std::size_t>(l)];
  const Matrix Qe = s.Q_estimation();
  const OrthoBasis basis(Matrix(Qe.leftCols(e)));
  const Matrix Xt = weighted(model.X, model.row_metric, model.col_metric);
  const PocsResult q = constrained_step(Xt.transpose() * model.P.col(l),
                                        s.col_constraints[static_cast<std::size_t>(e)], basis, s.solver, s.pocs);
  return model.col_metric.sqrt().cwiseProduct(q.x) * d;
}

Matrix transition_rows(const CaModel& model) {
  Matrix out(model.r.size(), model.rank());
  for (Index l = 0; l < model.rank(); ++l) out.col(l) = transition_row_from_col(model, l);
  return out;
}

Matrix transition_cols(const CaModel& model) {
  Matrix out(model.c.size(), model.rank());
  for (Index l = 0; l < model.rank(); ++l) out.col(l) = transition_col_from_row(model, l);
  return out;
}

namespace {

Matrix pinv_psd(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  const Vector& w = eig.eigenvalues();
  const double top = w.cwiseAbs().maxCoeff();
  Vector inv = Vector::Zero(w.size());
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] > 1e-12 * top) inv[i] = 1.0 / w[i];
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix reconstruction(const CaModel& model) { return model.U * model.delta.asDiagonal() * model.V.transpose(); }

Vector inverse_spectrum(const Vector& delta) {
  Vector out(delta.size());
  for (Index l = 0; l < delta.size(); ++l) out[l] = delta[l] > 0.0 ? 1.0 / delta[l] : 0.0;
  return out;
}

double profile_total(const Vector& a, Index expected, const char* what) {
  require(a.size() == expected, ErrorCode::DimensionMismatch,
          std::string(what) + " has " + std::to_string(a.size()) + " entries, expected " + std::to_string(expected));
  require(a.allFinite() && a.minCoeff() >= 0.0, ErrorCode::InvalidArgument,
          std::string(what) + " must be finite and non-negative");
  const double total = a.sum();
  require(total > 0.0, ErrorCode::ZeroSupplementary, std::string(what) + " sums to zero");
  return total;
}

}  // namespace

Matrix column_projector(const CaModel& model) {
  if (!model.is_sparse()) return Matrix::Identity(model.c.size(), model.c.size());
  return pinv_psd(model.X.transpose() * model.X) * model.X.transpose() * reconstruction(model);
}

Matrix row_projector(const CaModel& model) {
  if (!model.is_sparse()) return Matrix::Identity(model.r.size(), model.r.size());
  return pinv_psd(model.X * model.X.transpose()) * model.X * reconstruction(model).transpose();
}

Matrix supplementary_rows(const CaModel& model, const Matrix& rows) {
  const Matrix target = model.is_sparse() ? Matrix(column_projector(model) * model.G) : model.G;
  const Vector inv = inverse_spectrum(model.delta);
  Matrix out(rows.rows(), model.rank());
  for (Index i = 0; i < rows.rows(); ++i) {
    const Vector a = rows.row(i).transpose();
    const double total = profile_total(a, model.c.size(), "supplementary row");
    out.row(i) = ((a.transpose() * target) / total).cwiseProduct(inv.transpose());
  }
  return out;
}

Matrix supplementary_cols(const CaModel& model, const Matrix& cols) {
  const Matrix target = model.is_sparse() ? Matrix(row_projector(model) * model.F) : model.F;
  const Vector inv = inverse_spectrum(model.delta);
  Matrix out(cols.cols(), model.rank());
  for (Index j = 0; j < cols.cols(); ++j) {
    const Vector b = cols.col(j);
    const double total = profile_total(b, model.r.size(), "supplementary column");
    out.row(j) = ((b.transpose() * target) / total).cwiseProduct(inv.transpose());
  }
  return out;
}

Vector supplementary_row(const CaModel& model, const Vector& a_sup) {
  return supplementary_rows(model, a_sup.transpose()).row(0).transpose();
}

Vector supplementary_col(const CaModel& model, const Vector& b_sup) {
  return supplementary_cols(model, b_sup).row(0).transpose();
}

AsymmetricScores asymmetric_scores(const CaModel& model) {
  return {scores(model.U, model.r, Vector::Ones(model.rank())), scores(model.V, model.c, Vector::Ones(model.rank()))};
}

const PropertyCheck* PropertyReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool PropertyReport::all_expected_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return !c.applicable || !c.expected || c.passed; });
}

namespace {

bool side_inactive(const std::vector<SparsityConstraint>& cs, Index dim) {
  return std::all_of(cs.begin(), cs.end(), [dim](const SparsityConstraint& c) {
    const Index groups = c.partition ? c.partition->group_count() : dim;
    return c.radius >= std::sqrt(static_cast<double>(groups)) * (1.0 - 1e-12);
  });
}

PropertyCheck make_check(std::string name, double residual, double tol, bool expected, std::string note = {}) {
  PropertyCheck c;
  c.name = std::move(name);
  c.residual = residual;
  c.tolerance = tol;
  c.expected = expected;
  c.passed = residual <= tol;
  c.note = std::move(note);
  return c;
}

// Splits the heaviest row into two proportional halves and refits.
PropertyCheck distributional_equivalence(const CaModel& model, bool expected) {
  const Index I = model.Z.rows();
  Index heavy = 0;
  model.r.maxCoeff(&heavy);
  Matrix Z2(I + 1, model.Z.cols());
  Z2.topRows(I) = model.Z;
  Z2.row(heavy) *= 0.5;
  Z2.row(I) = Z2.row(heavy);
  auto labels = model.row_labels;
  labels.push_back(labels[static_cast<std::size_t>(heavy)] + "'");
  const CaInput in = from_probabilities(model.method, Z2, labels, model.col_labels, model.variable_spans);
  FitOptions opts = model.options;
  if (opts.sparsity && opts.sparsity->row_groups) {
    auto ids = opts.sparsity->row_groups->assignments();
    ids.push_back(ids[static_cast<std::size_t>(heavy)]);
    opts.sparsity->row_groups = GroupPartition(std::move(ids));
  }
  const CaModel split = fit(in, opts);
  double residual = 0.0;
  for (Index l = 0; l < model.rank(); ++l) {
    const double sign = split.G.col(l).dot(model.G.col(l)) < 0.0 ? -1.0 : 1.0;
    residual = std::max(residual, (split.G.col(l) * sign - model.G.col(l)).cwiseAbs().maxCoeff());
    residual = std::max(residual, std::abs(split.F(heavy, l) * sign - model.F(heavy, l)));
    residual = std::max(residual, std::abs(split.F(I, l) * sign - model.F(heavy, l)));
  }
  return make_check("distributional_equivalence", residual, 1e-10, expected,
                    "row '" + model.row_labels[static_cast<std::size_t>(heavy)] + "' split into two halves");
}

}  // namespace

PropertyReport check_properties(const CaModel& model) {
  PropertyReport rep;
  const Index I = model.r.size();
  const Index J = model.c.size();
  const bool sparse = model.is_sparse();
  const bool rows_free = !sparse || side_inactive(model.sparse->row_constraints, I);
  const bool cols_free = !sparse || side_inactive(model.sparse->col_constraints, J);
  const bool multiple = is_multiple(model.method);

  rep.checks.push_back(make_check("row_barycenter", (model.r.transpose() * model.F).cwiseAbs().maxCoeff(), 1e-10,
                                  rows_free));
  rep.checks.push_back(make_check("column_barycenter", (model.c.transpose() * model.G).cwiseAbs().maxCoeff(), 1e-10,
                                  cols_free || multiple));

  PropertyCheck per_var;
  if (multiple) {
    double worst = 0.0;
    for (const auto& [first, last] : model.variable_spans)
      worst = std::max(worst, (model.c.segment(first, last - first).transpose() * model.G.middleRows(first, last - first))
                                  .cwiseAbs()
                                  .maxCoeff());
    per_var = make_check("per_variable_barycenter", worst, 1e-10, true);
  } else {
    per_var.name = "per_variable_barycenter";
    per_var.applicable = false;
    per_var.note = "only defined for multiple correspondence models";
  }
  rep.checks.push_back(per_var);

  if (!multiple) {
    rep.checks.push_back(distributional_equivalence(model, rows_free));
  } else {
    PropertyCheck c;
    c.name = "distributional_equivalence";
    c.applicable = false;
    c.note = "indicator rows cannot be split proportionally";
    rep.checks.push_back(c);
  }

  // Embedded solution: the uncentered matrix has leading triplet (1, r, c).
  const Index full = std::min(I, J);
  const Index embed_rank = std::min(model.rank() + 1, full);
  const GsvdResult emb = als_gsvd(model.Z, model.row_metric, model.col_metric, embed_rank, {1e-13, 20000});
  if (!sparse) {
    const double res = std::max({std::abs(emb.delta[0] - 1.0), (emb.U.col(0) - model.r).cwiseAbs().maxCoeff(),
                                 (emb.V.col(0) - model.c).cwiseAbs().maxCoeff()});
    rep.checks.push_back(make_check("embedded_solution", res, 1e-10, true));
    double rest = 0.0;
    for (Index l = 1; l < embed_rank; ++l) rest = std::max(rest, std::abs(emb.delta[l] - model.delta[l - 1]));
    rep.checks.push_back(make_check("embedded_remaining", rest, 1e-8, true,
                                    "later dimensions of the uncentered matrix match the centered analysis"));
  } else {
    SparseGsvdConfig cfg;
    cfg.rank = 1;
    cfg.row_constraints = {model.sparse->row_constraints.front()};
    cfg.col_constraints = {model.sparse->col_constraints.front()};
    cfg.row_metric = model.row_metric;
    cfg.col_metric = model.col_metric;
    cfg.epsilon = 1e-12;
    cfg.max_iter = 20000;
    cfg.solver = model.sparse->solver;
    cfg.priority = model.sparse->pocs.priority;
    const SparseGsvdResult s = gsgsvd(model.Z, cfg, &emb);
    const double d1 = s.delta_hat[0];
    rep.checks.push_back(make_check("embedded_solution", std::max(0.0, d1 - 1.0), 1e-10, true,
                                    "leading pseudo-singular value " + std::to_string(d1)));
  }

  const AsymmetricScores asym = asymmetric_scores(model);
  const Matrix eye = Matrix::Identity(model.rank(), model.rank());
  const double asym_res =
      std::max((asym.F.transpose() * model.r.asDiagonal() * asym.F - eye).cwiseAbs().maxCoeff(),
               (asym.G.transpose() * model.c.asDiagonal() * asym.G - eye).cwiseAbs().maxCoeff());
  rep.checks.push_back(make_check("asymmetric_unit_inertia", asym_res, 1e-8, true));

  const Matrix lambda = model.eigenvalues().asDiagonal();
  const double var_res = std::max((model.F.transpose() * model.r.asDiagonal() * model.F - lambda).cwiseAbs().maxCoeff(),
                                  (model.G.transpose() * model.c.asDiagonal() * model.G - lambda).cwiseAbs().maxCoeff());
  rep.checks.push_back(make_check("factor_variance", var_res, 1e-8, true));

  const double ctr_res = std::max((model.row_contrib.colwise().sum().array() - 1.0).abs().maxCoeff(),
                                  (model.col_contrib.colwise().sum().array() - 1.0).abs().maxCoeff());
  rep.checks.push_back(make_check("contributions_sum", ctr_res, 1e-10, true));
  return rep;
}

}  // namespace spafac
