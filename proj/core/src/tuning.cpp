#include "spafac/tuning.hpp"

#include "spafac/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace spafac {

int classify_zone(double zero_ratio, double fit, const ZoneThresholds& t) {
  const bool zeros_low = zero_ratio < t.near_zero;
  const bool fit_low = fit < t.near_zero;
  if (zeros_low && fit_low) return 1;
  if (zeros_low) return 2;
  if (fit_low) return 3;
  if (zero_ratio >= t.high && fit >= t.high) return 4;
  return 5;
}

SparsityIndices sparsity_indices(Index zeros_rows, Index I, Index zeros_cols, Index J, Index L, double fit,
                                 const ZoneThresholds& t) {
  require(I >= 1 && J >= 1 && L >= 1, ErrorCode::InvalidArgument, "dimensions must be positive");
  require(zeros_rows >= 0 && zeros_rows <= I * L && zeros_cols >= 0 && zeros_cols <= J * L,
          ErrorCode::InvalidArgument, "zero counts exceed the number of entries");
  SparsityIndices s;
  s.rank = L;
  s.zeros_rows = zeros_rows;
  s.zeros_cols = zeros_cols;
  s.zero_ratio_rows = static_cast<double>(zeros_rows) / static_cast<double>(I * L);
  s.zero_ratio_cols = static_cast<double>(zeros_cols) / static_cast<double>(J * L);
  s.zero_ratio = static_cast<double>(zeros_rows + zeros_cols) / static_cast<double>((I + J) * L);
  s.fit = fit;
  s.index_rows = s.zero_ratio_rows * fit;
  s.index_cols = s.zero_ratio_cols * fit;
  s.index = s.zero_ratio * fit;
  s.zone = classify_zone(s.zero_ratio, fit, t);
  return s;
}

SparsityIndices sparsity_indices(const SparseGsvdResult& result, const SvdResult& reference, Index L,
                                 const ZoneThresholds& t) {
  const double fit = fit_ratio(result, reference, L);
  const Index zp = (result.P.leftCols(L).array() == 0.0).count();
  const Index zq = (result.Q.leftCols(L).array() == 0.0).count();
  return sparsity_indices(zp, result.P.rows(), zq, result.Q.rows(), L, fit, t);
}

double selected_index(const SparsityIndices& s, IndexSelector which) noexcept {
  switch (which) {
    case IndexSelector::Rows: return s.index_rows;
    case IndexSelector::Cols: return s.index_cols;
    case IndexSelector::Both: break;
  }
  return s.index;
}

std::vector<double> GridSpec::default_fractions() {
  std::vector<double> out;
  for (int k = 1; k <= 10; ++k) out.push_back(k / 10.0);
  return out;
}

double radius_from_fraction(double fraction, Index groups) {
  require(std::isfinite(fraction) && fraction > 0.0 && fraction <= 1.0, ErrorCode::InvalidArgument,
          "radius fractions must lie in (0, 1]");
  return std::max(1.0, fraction * std::sqrt(static_cast<double>(groups)));
}

namespace {

GsvdResult truncate(const GsvdResult& g, Index L) {
  GsvdResult out;
  out.P = g.P.leftCols(L);
  out.Q = g.Q.leftCols(L);
  out.U = g.U.leftCols(L);
  out.V = g.V.leftCols(L);
  out.delta = g.delta.head(L);
  out.iterations.assign(g.iterations.begin(), g.iterations.begin() + L);
  out.converged.assign(g.converged.begin(), g.converged.begin() + L);
  out.row_metric = g.row_metric;
  out.col_metric = g.col_metric;
  return out;
}

// True when a should be preferred over b.
bool better(const GridCell& a, const GridCell& b, IndexSelector sel) {
  const double ia = selected_index(a.indices, sel);
  const double ib = selected_index(b.indices, sel);
  if (std::abs(ia - ib) > 1e-12) return ia > ib;
  const double fa = a.row_fraction + a.col_fraction;
  const double fb = b.row_fraction + b.col_fraction;
  if (fa != fb) return fa < fb;
  if (a.row_fraction != b.row_fraction) return a.row_fraction < b.row_fraction;
  return a.rank < b.rank;
}

}  // namespace

TuningGrid grid_search(const CaInput& input, const GridSpec& spec) {
  require(!spec.row_fractions.empty() && !spec.col_fractions.empty() && !spec.ranks.empty(),
          ErrorCode::InvalidArgument, "tuning grid is empty");
  const Index I = input.X.rows();
  const Index J = input.X.cols();
  const Index max_rank = *std::max_element(spec.ranks.begin(), spec.ranks.end());
  for (Index L : spec.ranks)
    require(L >= 1 && L <= std::min(I, J), ErrorCode::InvalidArgument, "grid rank out of range");

  const Index row_groups = spec.row_groups ? spec.row_groups->group_count() : I;
  Index col_groups = spec.col_groups ? spec.col_groups->group_count() : J;
  if (is_multiple(input.method)) col_groups = static_cast<Index>(input.variable_spans.size());

  const DiagonalMetric M = DiagonalMetric::inverse_of(input.r);
  const DiagonalMetric W = DiagonalMetric::inverse_of(input.c);
  const GsvdResult reference = als_gsvd(input.X, M, W, max_rank, {spec.epsilon, spec.max_iter});

  TuningGrid grid;
  grid.selector = spec.selector;
  for (Index L : spec.ranks)
    for (double fr : spec.row_fractions)
      for (double fc : spec.col_fractions) {
        GridCell cell;
        cell.rank = L;
        cell.row_fraction = fr;
        cell.col_fraction = fc;
        cell.row_radius = radius_from_fraction(fr, row_groups);
        cell.col_radius = radius_from_fraction(fc, col_groups);
        grid.cells.push_back(cell);
      }

  auto run_cell = [&](GridCell& cell) {
    try {
      FitOptions opts;
      opts.rank = cell.rank;
      opts.epsilon = spec.epsilon;
      opts.max_iter = spec.max_iter;
      SparsityOptions so;
      so.row_radii = {cell.row_radius};
      so.col_radii = {cell.col_radius};
      so.row_groups = spec.row_groups;
      so.col_groups = spec.col_groups;
      so.solver = spec.solver;
      so.priority = spec.priority;
      opts.sparsity = so;
      const GsvdResult ref = truncate(reference, cell.rank);
      const SparseGsvdResult res = gsgsvd(input.X, sparse_config(input, opts), &ref);
      cell.indices = sparsity_indices(res, ref, cell.rank, spec.zones);
      cell.converged = res.all_converged();
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(grid.cells.size())));
  if (workers == 1) {
    for (auto& cell : grid.cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < grid.cells.size(); k = next++) run_cell(grid.cells[k]);
      });
    for (auto& t : pool) t.join();
  }

  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    const auto& cell = grid.cells[k];
    if (!cell.ok || !cell.converged || cell.rank < spec.min_rank) continue;
    if (!grid.best || better(cell, grid.cells[*grid.best], spec.selector)) grid.best = k;
  }
  return grid;
}

}  // namespace spafac
