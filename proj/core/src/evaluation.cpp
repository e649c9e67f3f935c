#include "spafac/evaluation.hpp"

#include "spafac/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace spafac {

namespace {

constexpr int kEllipsePoints = 128;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain; returns hull vertex indices counter-clockwise.
std::vector<std::size_t> hull_indices(const std::vector<Point2>& pts, const std::vector<std::size_t>& ids) {
  std::vector<std::size_t> sorted = ids;
  std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
  sorted.erase(std::unique(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return pts[a] == pts[b]; }),
               sorted.end());
  if (sorted.size() < 3) return sorted;
  std::vector<std::size_t> h(2 * sorted.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    while (k >= 2 && cross(pts[h[k - 2]], pts[h[k - 1]], pts[sorted[i]]) <= 0.0) --k;
    h[k++] = sorted[i];
  }
  for (std::size_t i = sorted.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(pts[h[k - 2]], pts[h[k - 1]], pts[sorted[i - 1]]) <= 0.0) --k;
    h[k++] = sorted[i - 1];
  }
  h.resize(k - 1);
  return h;
}

void ellipse_region(const Matrix& means, double confidence, ConfidenceRegion& out) {
  const Index B = means.rows();
  const Eigen::Vector2d center = means.colwise().mean().transpose();
  out.center = {center[0], center[1]};
  const Matrix centered = means.rowwise() - center.transpose();
  const Eigen::Matrix2d cov = (centered.transpose() * centered) / static_cast<double>(std::max<Index>(B - 1, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Eigen::Vector2d w = eig.eigenvalues().cwiseMax(0.0);
  const double top = w.maxCoeff();

  double radius = 0.0;
  if (top > 0.0) {
    std::vector<double> d(static_cast<std::size_t>(B));
    for (Index b = 0; b < B; ++b) {
      const Eigen::Vector2d z = eig.eigenvectors().transpose() * centered.row(b).transpose();
      double sq = 0.0;
      for (int k = 0; k < 2; ++k)
        if (w[k] > 1e-14 * top) sq += z[k] * z[k] / w[k];
      d[static_cast<std::size_t>(b)] = std::sqrt(sq);
    }
    std::sort(d.begin(), d.end());
    const auto rank = static_cast<std::size_t>(std::ceil(confidence * static_cast<double>(B))) - 1;
    radius = d[std::min(rank, d.size() - 1)];
  }
  Eigen::Vector2d major = eig.eigenvectors().col(1) * std::sqrt(w[1]) * radius;
  Eigen::Vector2d minor = eig.eigenvectors().col(0) * std::sqrt(w[0] > 1e-14 * top ? w[0] : 0.0) * radius;
  if (major[0] * minor[1] - major[1] * minor[0] < 0.0) minor = -minor;
  out.axis_major = {major[0], major[1]};
  out.axis_minor = {minor[0], minor[1]};
  out.boundary.clear();
  for (int k = 0; k < kEllipsePoints; ++k) {
    const double t = 2.0 * std::numbers::pi * k / kEllipsePoints;
    const Eigen::Vector2d p = center + std::cos(t) * major + std::sin(t) * minor;
    out.boundary.push_back({p[0], p[1]});
  }
}

void hull_region(const Matrix& means, double confidence, ConfidenceRegion& out) {
  std::vector<Point2> pts;
  for (Index b = 0; b < means.rows(); ++b) pts.push_back({means(b, 0), means(b, 1)});
  const Eigen::Vector2d center = means.colwise().mean().transpose();
  out.center = {center[0], center[1]};
  std::vector<std::size_t> alive(pts.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
  const auto keep = static_cast<std::size_t>(std::ceil(confidence * static_cast<double>(pts.size())));
  // Peel whole hull layers while the remainder still holds the target share.
  while (true) {
    const auto h = hull_indices(pts, alive);
    std::vector<std::size_t> rest;
    for (std::size_t id : alive)
      if (std::find(h.begin(), h.end(), id) == h.end()) rest.push_back(id);
    bool on_hull_dup = false;
    for (std::size_t id : rest)
      for (std::size_t v : h)
        if (pts[id] == pts[v]) on_hull_dup = true;
    if (rest.size() < keep || rest.size() < 3 || on_hull_dup) break;
    alive = std::move(rest);
  }
  out.boundary.clear();
  for (std::size_t id : hull_indices(pts, alive)) out.boundary.push_back(pts[id]);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t group, std::uint64_t replicate) {
  // splitmix64 over the combined key
  std::uint64_t z = seed ^ (group * 0x9E3779B97F4A7C15ULL) ^ (replicate * 0xBF58476D1CE4E5B9ULL + 0x94D049BB133111EBULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

BootstrapResult bootstrap_group_means_from_scores(const Matrix& scores, const GroupDesign& groups,
                                                  const BootstrapSpec& spec) {
  require(spec.replicates >= 1, ErrorCode::InvalidArgument, "replicates must be at least 1");
  require(spec.confidence > 0.0 && spec.confidence < 1.0, ErrorCode::InvalidArgument,
          "confidence must lie strictly between 0 and 1");
  require(scores.rows() == groups.observation_count(), ErrorCode::GroupMismatch,
          "group design does not match the observations");
  require(spec.dim_x >= 0 && spec.dim_y >= 0 && spec.dim_x < scores.cols() && spec.dim_y < scores.cols() &&
              spec.dim_x != spec.dim_y,
          ErrorCode::InvalidArgument, "bootstrap dimensions must be two distinct retained dimensions");

  const Index G = groups.group_count();
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(G));
  for (std::size_t i = 0; i < groups.assignment.size(); ++i)
    members[static_cast<std::size_t>(groups.assignment[i])].push_back(static_cast<Index>(i));

  BootstrapResult out;
  out.dim_x = spec.dim_x;
  out.dim_y = spec.dim_y;
  out.regions.resize(static_cast<std::size_t>(G));
  out.replicate_means.assign(static_cast<std::size_t>(G), Matrix(spec.replicates, 2));

  auto replicate = [&](Index g, int b) {
    const auto& mem = members[static_cast<std::size_t>(g)];
    std::mt19937_64 rng(stream_seed(spec.seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(b)));
    std::uniform_int_distribution<std::size_t> pick(0, mem.size() - 1);
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const Index i = mem[pick(rng)];
      sx += scores(i, spec.dim_x);
      sy += scores(i, spec.dim_y);
    }
    auto& M = out.replicate_means[static_cast<std::size_t>(g)];
    M(b, 0) = sx / static_cast<double>(mem.size());
    M(b, 1) = sy / static_cast<double>(mem.size());
  };

  const std::size_t jobs = static_cast<std::size_t>(G) * static_cast<std::size_t>(spec.replicates);
  const unsigned workers = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(jobs)));
  if (workers == 1) {
    for (Index g = 0; g < G; ++g)
      for (int b = 0; b < spec.replicates; ++b) replicate(g, b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < jobs; k = next++)
          replicate(static_cast<Index>(k / static_cast<std::size_t>(spec.replicates)),
                    static_cast<int>(k % static_cast<std::size_t>(spec.replicates)));
      });
    for (auto& t : pool) t.join();
  }

  for (Index g = 0; g < G; ++g) {
    auto& region = out.regions[static_cast<std::size_t>(g)];
    region.group = groups.group_labels[static_cast<std::size_t>(g)];
    region.size = static_cast<Index>(members[static_cast<std::size_t>(g)].size());
    region.tiny = region.size < 3;
    const auto& M = out.replicate_means[static_cast<std::size_t>(g)];
    if (spec.method == RegionMethod::PercentileEllipse)
      ellipse_region(M, spec.confidence, region);
    else
      hull_region(M, spec.confidence, region);
  }
  return out;
}

BootstrapResult bootstrap_group_means(const CaModel& model, const Matrix& observations, const GroupDesign& groups,
                                      const BootstrapSpec& spec) {
  return bootstrap_group_means_from_scores(supplementary_rows(model, observations), groups, spec);
}

bool regions_overlap(const ConfidenceRegion& a, const ConfidenceRegion& b) {
  require(!a.boundary.empty() && !b.boundary.empty(), ErrorCode::InvalidArgument, "region has no boundary");
  auto separated_along = [&](const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& p = poly[i];
      const Point2& q = poly[(i + 1) % n];
      double nx = q[1] - p[1];
      double ny = p[0] - q[0];
      if (nx == 0.0 && ny == 0.0) {
        if (n > 1) continue;
        nx = 1.0;
      }
      auto span = [&](const std::vector<Point2>& pts) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& v : pts) {
          const double t = v[0] * nx + v[1] * ny;
          lo = std::min(lo, t);
          hi = std::max(hi, t);
        }
        return std::pair{lo, hi};
      };
      const auto [alo, ahi] = span(a.boundary);
      const auto [blo, bhi] = span(b.boundary);
      if (ahi < blo || bhi < alo) return true;
    }
    return false;
  };
  if (separated_along(a.boundary) || separated_along(b.boundary)) return false;
  // Degenerate (point or segment) regions: also test the axis between centers.
  const double dx = b.center[0] - a.center[0];
  const double dy = b.center[1] - a.center[1];
  if (dx != 0.0 || dy != 0.0) {
    double ahi = -std::numeric_limits<double>::infinity();
    double blo = std::numeric_limits<double>::infinity();
    for (const auto& v : a.boundary) ahi = std::max(ahi, v[0] * dx + v[1] * dy);
    for (const auto& v : b.boundary) blo = std::min(blo, v[0] * dx + v[1] * dy);
    if (ahi < blo) return false;
  }
  return true;
}

ClassificationReport classify_nearest(const Matrix& scores, const Matrix& centroids,
                                      const std::vector<Index>& true_groups) {
  require(static_cast<Index>(true_groups.size()) == scores.rows(), ErrorCode::GroupMismatch,
          "one true group per observation is required");
  require(scores.cols() == centroids.cols(), ErrorCode::DimensionMismatch, "scores and centroids differ in rank");
  const Index G = centroids.rows();
  require(G >= 1, ErrorCode::InvalidArgument, "no centroids");
  ClassificationReport rep;
  rep.confusion = Matrix::Zero(G, G);
  rep.chance_level = 1.0 / static_cast<double>(G);
  Index correct = 0;
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index g = 0; g < G; ++g) {
      const double d = (scores.row(i) - centroids.row(g)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = g;
      }
    }
    const Index truth = true_groups[static_cast<std::size_t>(i)];
    require(truth >= 0 && truth < G, ErrorCode::GroupMismatch, "true group id out of range");
    rep.confusion(truth, best) += 1.0;
    rep.assigned.push_back(best);
    if (best == truth) ++correct;
  }
  rep.overall_accuracy = scores.rows() > 0 ? static_cast<double>(correct) / static_cast<double>(scores.rows()) : 0.0;
  for (Index g = 0; g < G; ++g) {
    const double total = rep.confusion.row(g).sum();
    rep.per_group_accuracy.push_back(total > 0.0 ? rep.confusion(g, g) / total : 0.0);
  }
  return rep;
}

ClassificationReport classify_nearest_group(const CaModel& model, const Matrix& observations,
                                            const GroupDesign& groups) {
  require(is_discriminant(model.method), ErrorCode::InvalidArgument,
          "nearest-group classification needs a discriminant model");
  require(groups.group_count() == model.F.rows(), ErrorCode::GroupMismatch,
          "group design does not match the model rows");
  return classify_nearest(supplementary_rows(model, observations), model.F, groups.assignment);
}

}  // namespace spafac
