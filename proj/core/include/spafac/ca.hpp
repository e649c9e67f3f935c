#pragma once

#include "spafac/matrix.hpp"
#include "spafac/projectors.hpp"
#include "spafac/sparse_gsvd.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spafac {

enum class Method { CA, MCA, DiSCA, DiMCA };

const char* to_string(Method m) noexcept;
bool is_multiple(Method m) noexcept;
bool is_discriminant(Method m) noexcept;

using Span = std::pair<Index, Index>;  // half-open column range [first, second)

struct ContingencyTable {
  Matrix counts;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  /// Validates counts (finite, >= 0, positive total) and fills default
  /// labels when none are given.
  static ContingencyTable make(Matrix counts, std::vector<std::string> row_labels = {},
                               std::vector<std::string> col_labels = {});

  double grand_total() const { return counts.sum(); }
};

struct DisjunctiveTable {
  Matrix indicator;
  std::vector<Span> variable_spans;
  std::vector<std::string> row_labels;
  std::vector<std::string> level_labels;
  std::vector<std::string> variable_names;

  /// Validates 0/1 coding, one 1 per row in every block, and no empty level.
  static DisjunctiveTable make(Matrix indicator, std::vector<Span> spans, std::vector<std::string> row_labels = {},
                               std::vector<std::string> level_labels = {},
                               std::vector<std::string> variable_names = {});

  Index variable_count() const noexcept { return static_cast<Index>(variable_spans.size()); }
};

struct GroupDesign {
  Matrix H;  // I x groups
  std::vector<std::string> group_labels;
  std::vector<Index> assignment;

  /// Group ids per observation; ids must cover 0..groups-1 with no empty group.
  static GroupDesign from_assignments(std::vector<Index> assignment, std::vector<std::string> labels = {});
  /// Groups in order of first appearance of each label.
  static GroupDesign from_labels(const std::vector<std::string>& labels);

  Index group_count() const noexcept { return H.cols(); }
  Index observation_count() const noexcept { return H.rows(); }
};

/// Probability matrix, masses and double-centered matrix ready for the GSVD.
struct CaInput {
  Method method = Method::CA;
  Matrix Z;  // uncentered probabilities
  Matrix X;  // Z - r c^T
  Vector r;
  Vector c;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<Span> variable_spans;  // MCA family only
};

CaInput preprocess_ca(const ContingencyTable& t);
CaInput preprocess_mca(const DisjunctiveTable& d);
CaInput preprocess_disca(const ContingencyTable& t, const GroupDesign& g);
CaInput preprocess_dimca(const DisjunctiveTable& d, const GroupDesign& g);

/// Builds the centered input from a probability matrix (entries summing to 1).
CaInput from_probabilities(Method method, Matrix Z, std::vector<std::string> row_labels,
                           std::vector<std::string> col_labels, std::vector<Span> spans = {});

struct SparsityOptions {
  std::vector<double> row_radii;  // absolute radii: one value or one per dimension
  std::vector<double> col_radii;
  std::optional<GroupPartition> row_groups;
  std::optional<GroupPartition> col_groups;  // rejected for MCA/DiMCA, derived from the variable spans
  StepSolver solver = StepSolver::Exact;
  Priority priority = Priority::SparsityLast;
};

struct FitOptions {
  Index rank = 2;
  double epsilon = 1e-9;
  int max_iter = 1000;
  std::optional<SparsityOptions> sparsity;
};

struct CaModel {
  Method method = Method::CA;
  Matrix Z;
  Matrix X;
  Vector r;
  Vector c;
  DiagonalMetric row_metric;  // diag(r)^-1
  DiagonalMetric col_metric;  // diag(c)^-1
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<Span> variable_spans;
  FitOptions options;

  GsvdResult reference;                     // plain decomposition, always present
  std::optional<SparseGsvdResult> sparse;   // set for sparse fits

  // Reordered dimensions; delta holds pseudo-singular values for sparse fits.
  Matrix P;
  Matrix Q;
  Matrix U;
  Matrix V;
  Vector delta;
  Matrix F;
  Matrix G;
  Matrix row_contrib;
  Matrix col_contrib;
  double total_inertia = 0.0;

  bool is_sparse() const noexcept { return sparse.has_value(); }
  Index rank() const noexcept { return delta.size(); }
  bool converged() const noexcept;
  Vector eigenvalues() const { return delta.array().square(); }
  Vector percent_inertia() const;
};

CaModel fit(const CaInput& input, const FitOptions& options);

/// Builds the sparse decomposition settings a model would use.
SparseGsvdConfig sparse_config(const CaInput& input, const FitOptions& options);

// Transition formulas. For sparse models the nonlinear projection is applied
// with the bases of the estimation order; dimension l is in reported order.
Vector transition_row_from_col(const CaModel& model, Index l);
Vector transition_col_from_row(const CaModel& model, Index l);
Matrix transition_rows(const CaModel& model);
Matrix transition_cols(const CaModel& model);

/// Column-space projector (X^T X)^+ X^T Xhat for sparse models, identity for
/// plain ones (where it is never needed).
Matrix column_projector(const CaModel& model);
Matrix row_projector(const CaModel& model);

Vector supplementary_row(const CaModel& model, const Vector& a_sup);
Vector supplementary_col(const CaModel& model, const Vector& b_sup);
/// Rows of `rows` projected one by one, with the projector computed once.
Matrix supplementary_rows(const CaModel& model, const Matrix& rows);
Matrix supplementary_cols(const CaModel& model, const Matrix& cols);

struct AsymmetricScores {
  Matrix F;  // D_r^-1 U
  Matrix G;  // D_c^-1 V
};
AsymmetricScores asymmetric_scores(const CaModel& model);

struct PropertyCheck {
  std::string name;
  bool applicable = true;
  bool expected = true;  // property holds in theory for this model
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;

  const PropertyCheck* find(const std::string& name) const;
  /// Every applicable check that is expected to hold did hold.
  bool all_expected_pass() const;
};

PropertyReport check_properties(const CaModel& model);

}  // namespace spafac
