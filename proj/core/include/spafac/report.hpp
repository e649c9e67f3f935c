#pragma once

#include "spafac/ca.hpp"
#include "spafac/evaluation.hpp"
#include "spafac/tuning.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spafac {

inline constexpr const char* kResultsSchema = "spafac.results/1";

struct ScoreTable {
  std::vector<std::string> labels;
  Matrix values;  // labels x dimensions
};

struct Spectrum {
  std::vector<double> delta;
  std::vector<double> eigenvalues;
  std::vector<double> percent_inertia;
};

struct SparsitySettings {
  std::vector<double> row_radii;  // per dimension, ALS order
  std::vector<double> col_radii;
  Index row_groups = 0;
  Index col_groups = 0;
  std::string solver;
};

struct ObservationScores {
  std::vector<std::string> labels;
  std::vector<std::string> groups;
  Matrix scores;  // supplementary row scores
};

struct ResultBundle {
  std::string schema = kResultsSchema;
  std::string method;
  Index rank = 0;
  bool sparse = false;
  bool converged = true;
  double total_inertia = 0.0;
  Spectrum spectrum;                     // reported (decreasing) order
  std::vector<Index> estimation_order;   // ALS step behind each reported dimension
  Spectrum spectrum_estimation;          // same values in ALS order
  Spectrum reference;                    // plain decomposition of the same rank
  ScoreTable F;
  ScoreTable G;
  ScoreTable row_contributions;
  ScoreTable col_contributions;
  std::optional<SparsitySettings> sparsity;
  std::optional<SparsityIndices> indices;
  std::optional<TuningGrid> tuning;
  std::vector<PropertyCheck> properties;
  std::vector<DimensionDiagnostics> diagnostics;  // ALS order, sparse fits only
  std::optional<ObservationScores> observations;
  std::optional<ClassificationReport> classification;
  std::optional<BootstrapResult> bootstrap;       // regions only
  std::vector<std::string> notes;
};

/// Summary of a fitted model.
ResultBundle make_bundle(const CaModel& model);

std::string to_json(const ResultBundle& bundle, int indent = 2);
ResultBundle bundle_from_json(std::string_view text);

std::string scores_csv(const ScoreTable& t);
std::string contributions_csv(const ResultBundle& b);
std::string tuning_csv(const TuningGrid& grid);

}  // namespace spafac
