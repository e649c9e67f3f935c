#pragma once

#include "spafac/ca.hpp"
#include "spafac/sparse_gsvd.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spafac {

struct ZoneThresholds {
  double near_zero = 0.1;  // a ratio below this counts as close to zero
  double high = 0.9;       // both ratios at or above this: zone 4
};

/// Zones of the fit/zero-ratio map.
/// 1: both ratios near zero. 2: no zeros, fit not near zero.
/// 3: no fit, zero ratio not near zero. 4: both high. 5: compromise.
int classify_zone(double zero_ratio, double fit, const ZoneThresholds& t = {});

struct SparsityIndices {
  Index rank = 0;
  Index zeros_rows = 0;
  Index zeros_cols = 0;
  double zero_ratio_rows = 0.0;
  double zero_ratio_cols = 0.0;
  double zero_ratio = 0.0;
  double fit = 0.0;
  double index_rows = 0.0;
  double index_cols = 0.0;
  double index = 0.0;
  int zone = 0;
};

/// Indices from zero counts of the first L columns of I x L and J x L
/// vector matrices and a fit ratio.
SparsityIndices sparsity_indices(Index zeros_rows, Index I, Index zeros_cols, Index J, Index L, double fit,
                                 const ZoneThresholds& t = {});

/// Counts exact zeros in the first L columns of P and Q.
SparsityIndices sparsity_indices(const SparseGsvdResult& result, const SvdResult& reference, Index L,
                                 const ZoneThresholds& t = {});

enum class IndexSelector { Both, Rows, Cols };

double selected_index(const SparsityIndices& s, IndexSelector which) noexcept;

struct GridSpec {
  // Radii as fractions of sqrt(number of groups); 1 leaves that side unconstrained.
  std::vector<double> row_fractions;
  std::vector<double> col_fractions;
  std::vector<Index> ranks;
  Index min_rank = 1;  // cells below this rank are fitted but never selected
  IndexSelector selector = IndexSelector::Both;
  ZoneThresholds zones;
  std::optional<GroupPartition> row_groups;
  std::optional<GroupPartition> col_groups;  // must stay empty for MCA models
  StepSolver solver = StepSolver::Exact;
  Priority priority = Priority::SparsityLast;
  double epsilon = 1e-9;
  int max_iter = 1000;
  unsigned threads = 1;

  /// Fractions 0.1, 0.2, ..., 1.0 on both sides.
  static std::vector<double> default_fractions();
};

struct GridCell {
  double row_fraction = 0.0;
  double col_fraction = 0.0;
  double row_radius = 0.0;
  double col_radius = 0.0;
  Index rank = 0;
  bool ok = false;         // fitted without error
  bool converged = false;
  std::string error;
  SparsityIndices indices;
};

struct TuningGrid {
  std::vector<GridCell> cells;
  std::optional<std::size_t> best;  // index into cells
  IndexSelector selector = IndexSelector::Both;

  const GridCell* best_cell() const { return best ? &cells[*best] : nullptr; }
};

/// Radius for a fraction of sqrt(groups), clamped to at least 1.
double radius_from_fraction(double fraction, Index groups);

/// Fits every (row fraction, column fraction, rank) cell and selects the
/// converged cell with the largest index. Ties within 1e-12 go to the smaller
/// total fraction, then the smaller row fraction, then the smaller rank.
TuningGrid grid_search(const CaInput& input, const GridSpec& spec);

}  // namespace spafac
