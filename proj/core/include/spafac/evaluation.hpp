#pragma once

#include "spafac/ca.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace spafac {

enum class RegionMethod { PercentileEllipse, HullPeeling };

struct BootstrapSpec {
  int replicates = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  Index dim_x = 0;
  Index dim_y = 1;
  RegionMethod method = RegionMethod::PercentileEllipse;
  unsigned threads = 1;
};

using Point2 = std::array<double, 2>;

struct ConfidenceRegion {
  std::string group;
  Index size = 0;
  bool tiny = false;    // fewer than 3 members: interval unreliable
  Point2 center{};      // mean of the replicate means
  Point2 axis_major{};  // semi-axis vectors of the ellipse (zero for hulls)
  Point2 axis_minor{};
  std::vector<Point2> boundary;  // convex polygon, counter-clockwise
};

struct BootstrapResult {
  Index dim_x = 0;
  Index dim_y = 1;
  std::vector<ConfidenceRegion> regions;  // one per group, in group order
  std::vector<Matrix> replicate_means;    // per group, replicates x 2
};

/// Resamples observations within each group, averages their supplementary
/// scores, and summarizes the replicate means by a confidence region.
BootstrapResult bootstrap_group_means(const CaModel& model, const Matrix& observations, const GroupDesign& groups,
                                      const BootstrapSpec& spec);

/// Same, from precomputed observation scores (observations x rank).
BootstrapResult bootstrap_group_means_from_scores(const Matrix& scores, const GroupDesign& groups,
                                                  const BootstrapSpec& spec);

/// Convex regions intersect (separating-axis test on the boundaries).
bool regions_overlap(const ConfidenceRegion& a, const ConfidenceRegion& b);

struct ClassificationReport {
  double overall_accuracy = 0.0;
  std::vector<double> per_group_accuracy;
  double chance_level = 0.0;
  Matrix confusion;  // true group x assigned group, counts
  std::vector<Index> assigned;
};

/// Assigns each score row to the nearest centroid row (Euclidean).
ClassificationReport classify_nearest(const Matrix& scores, const Matrix& centroids,
                                      const std::vector<Index>& true_groups);

/// Observations projected as supplementary rows and assigned to the
/// closest group factor score of a discriminant model.
ClassificationReport classify_nearest_group(const CaModel& model, const Matrix& observations,
                                            const GroupDesign& groups);

}  // namespace spafac
