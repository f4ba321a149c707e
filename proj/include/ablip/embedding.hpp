#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ablip/frames.hpp"
#include "ablip/point_cloud.hpp"
#include "ablip/slog.hpp"

namespace ablip {

// Block matrix for Phi(x) = sum_k k^-delta phi_k(x) (x) e_k, with one
// disjoint coordinate block per scale. Target norm is euclidean.
struct EmbeddingMap {
  double delta = 0.0;
  std::vector<std::size_t> block_offsets;  // row offset of each scale block
  std::vector<std::size_t> block_sizes;    // m_k per scale
  Eigen::MatrixXd matrix;                  // D x m, D = sum m_k
  double op_norm_bound = 0.0;              // sqrt(sum k^-2delta m_k)
  double R = 0.0;
  NormKind ambient_norm = NormKind::Euclidean;
  bool hypothesis_met = true;  // delta > (1 + alpha + beta)/2 advisory flag

  Eigen::VectorXd apply(const Vec& x) const {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                         static_cast<Eigen::Index>(x.size()));
    return matrix * xv;
  }
};

inline EmbeddingMap build_embedding(const PointCloud& x, double delta,
                                    const std::vector<ScaleFrame>& frames) {
  if (frames.empty()) throw std::invalid_argument("build_embedding: no frames");
  if (!(delta > 0.0)) throw std::domain_error("build_embedding: delta must be positive");

  EmbeddingMap map;
  map.delta = delta;
  map.ambient_norm = x.norm_kind;
  map.R = frames.front().R;

  std::size_t total_rows = 0;
  double bound_sq = 0.0;
  for (const auto& frame : frames) {
    map.block_offsets.push_back(total_rows);
    map.block_sizes.push_back(frame.m_n);
    total_rows += frame.m_n;
    bound_sq += std::pow(static_cast<double>(frame.n), -2.0 * delta) *
                static_cast<double>(frame.m_n);
  }
  map.op_norm_bound = std::sqrt(bound_sq);

  const std::size_t m = x.dim();
  map.matrix.setZero(static_cast<Eigen::Index>(total_rows),
                     static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& frame = frames[k];
    const double scale = std::pow(static_cast<double>(frame.n), -delta);
    for (std::size_t j = 0; j < frame.m_n; ++j) {
      const auto& w = frame.functionals[j].weights;
      for (std::size_t c = 0; c < m; ++c)
        map.matrix(static_cast<Eigen::Index>(map.block_offsets[k] + j),
                   static_cast<Eigen::Index>(c)) = scale * w[c];
    }
  }
  return map;
}

// Per-pair distortion statistics of a linear map against the symmetric-log
// weakened lower bound and the plain Lipschitz upper bound.
struct DistortionReport {
  double delta = 0.0;
  double lower_constant = 0.0;  // smallest C with ||z|| <= C |Lz| slog(||z||)^delta
  double upper_constant = 0.0;  // Lipschitz constant over all pairs
  std::pair<std::size_t, std::size_t> worst_pair{0, 0};
  std::size_t skipped_pairs = 0;   // x = y pairs
  std::size_t violations = 0;      // of the frame-implied k^-delta/4 bound
  std::size_t informative_pairs = 0;
  bool pass = false;
};

// Checks the scale-resolved lower bound ||Phi(x-y)|| >= k^-delta ||x-y||/4
// for every pair, and reports the realized slog-form constants.
inline DistortionReport verify_lower_bound(
    const EmbeddingMap& map, const PointCloud& x,
    double budget = std::numeric_limits<double>::infinity()) {
  DistortionReport report;
  report.delta = map.delta;

  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec z = sub(x.points[i], x.points[j]);
      const double d = norm_of(z, x.norm_kind);
      if (d == 0.0) {
        ++report.skipped_pairs;
        continue;
      }
      ++report.informative_pairs;
      const std::size_t k = annulus_index(map.R, d);
      const double image = map.apply(z).norm();
      const double frame_bound =
          std::pow(static_cast<double>(k), -map.delta) * d / 4.0;
      if (image < frame_bound * (1.0 - 1e-12)) ++report.violations;

      const double lower_c =
          (image > 0.0)
              ? d / (image * std::pow(slog(d), map.delta))
              : std::numeric_limits<double>::infinity();
      if (lower_c > report.lower_constant) {
        report.lower_constant = lower_c;
        report.worst_pair = {i, j};
      }
      report.upper_constant = std::max(report.upper_constant, image / d);
    }
  }
  report.pass = report.violations == 0 &&
                std::isfinite(report.lower_constant) &&
                report.lower_constant <= budget;
  return report;
}

inline PointCloud embed_cloud(const EmbeddingMap& map, const PointCloud& x) {
  std::vector<Vec> pts;
  pts.reserve(x.size());
  for (const auto& p : x.points) {
    const Eigen::VectorXd img = map.apply(p);
    pts.emplace_back(img.data(), img.data() + img.size());
  }
  if (pts.front().empty()) {
    // zero-row map (all frames empty); keep a one-dimensional zero image
    for (auto& p : pts) p.assign(1, 0.0);
  }
  return PointCloud(std::move(pts), NormKind::Euclidean, x.label + "/image");
}

struct InvarianceCheck {
  HomogeneityParams image_params;
  bool pass = false;
};

// Refits homogeneity at the origin of Phi(X)-Phi(X) on the source grid and
// compares exponents against the (alpha + delta s, beta) inflation law.
inline InvarianceCheck verify_image_invariance(const EmbeddingMap& map,
                                               const PointCloud& x,
                                               const HomogeneityParams& source,
                                               double delta,
                                               double tolerance = 0.5) {
  if (!source.at_origin)
    throw std::invalid_argument("verify_image_invariance: source params must be at-origin");
  InvarianceCheck check;
  const PointCloud image = embed_cloud(map, x);
  const DifferenceSet image_diffs = difference_set(image);
  std::vector<std::pair<double, double>> grid = source.scale_grid;
  if (grid.empty()) grid.emplace_back(1.0, 0.125);
  check.image_params = fit_homogeneity(image_diffs, true, grid);
  check.pass =
      check.image_params.alpha <= source.alpha + delta * source.s + tolerance &&
      check.image_params.beta <= source.beta + tolerance;
  return check;
}

}  // namespace ablip
