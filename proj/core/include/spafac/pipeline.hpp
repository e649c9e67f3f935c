#pragma once

#include "spafac/ca.hpp"
#include "spafac/io.hpp"
#include "spafac/report.hpp"
#include "spafac/tuning.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spafac {

Method method_from_string(const std::string& name);

struct RunConfig {
  Method method = Method::CA;
  std::filesystem::path input;
  std::optional<std::string> group_column;  // required for DiSCA and DiMCA
  std::vector<std::string> variables;       // MCA family: columns to code, empty for all
  // Radii as fractions of sqrt(number of groups), applied to every dimension.
  std::optional<double> sparsity_rows;
  std::optional<double> sparsity_cols;
  Index rank = 2;
  bool tune = false;
  std::vector<double> row_fractions;  // tuning grids, empty for the default
  std::vector<double> col_fractions;
  Index min_rank = 2;
  Index max_rank = 3;
  IndexSelector selector = IndexSelector::Both;
  double epsilon = 1e-9;
  int max_iter = 1000;
  std::uint64_t seed = 0;
  Priority priority = Priority::SparsityLast;
  StepSolver solver = StepSolver::Exact;
  bool drop_empty = false;
  bool svg = false;
  int bootstrap = 0;  // replicates; 0 skips the bootstrap
  double confidence = 0.95;
  RegionMethod region = RegionMethod::PercentileEllipse;
  int bin_numeric = 0;  // quantile bins for numeric variable columns, 0 keeps them as categories
  unsigned threads = 1;
  std::filesystem::path out;
};

struct RunOutcome {
  ResultBundle bundle;
  std::map<std::string, std::string> files;  // name -> content, written under RunConfig::out
  int exit_code = 0;                         // 0, or 4 when some dimension did not converge
};

/// Runs the whole analysis in memory. Errors are thrown as spafac::Error.
RunOutcome compute(const RunConfig& config);

/// Writes every rendered file into `dir`, creating it when needed.
void write_outputs(const std::filesystem::path& dir, const std::map<std::string, std::string>& files);

/// compute followed by write_outputs.
RunOutcome run(const RunConfig& config);

/// Rendered outputs for a bundle: results.json, CSV tables and optional SVG.
std::map<std::string, std::string> render_outputs(const ResultBundle& bundle, bool svg);

}  // namespace spafac
