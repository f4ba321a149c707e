#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ablip {

using Vec = std::vector<double>;

enum class NormKind { Sup, Euclidean, L1 };

inline std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::Sup: return "sup";
    case NormKind::Euclidean: return "euclidean";
    case NormKind::L1: return "l1";
  }
  return "?";
}

inline NormKind norm_kind_from_string(const std::string& s) {
  if (s == "sup") return NormKind::Sup;
  if (s == "euclidean") return NormKind::Euclidean;
  if (s == "l1") return NormKind::L1;
  throw std::invalid_argument("unknown norm kind: " + s);
}

inline double norm_of(const Vec& v, NormKind kind) {
  double acc = 0.0;
  switch (kind) {
    case NormKind::Sup:
      for (double x : v) acc = std::max(acc, std::fabs(x));
      return acc;
    case NormKind::Euclidean:
      for (double x : v) acc += x * x;
      return std::sqrt(acc);
    case NormKind::L1:
      for (double x : v) acc += std::fabs(x);
      return acc;
  }
  return acc;
}

// Dual pairing norm: l1 for sup ambient, l2 for euclidean, sup for l1.
inline NormKind dual_norm_kind(NormKind kind) {
  switch (kind) {
    case NormKind::Sup: return NormKind::L1;
    case NormKind::Euclidean: return NormKind::Euclidean;
    case NormKind::L1: return NormKind::Sup;
  }
  return kind;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double distance(const Vec& a, const Vec& b, NormKind kind) {
  return norm_of(sub(a, b), kind);
}

// Finite set of vectors in a normed ambient space. Duplicate points are kept
// but flagged: distortion checks must skip x = y pairs explicitly.
struct PointCloud {
  std::vector<Vec> points;
  NormKind norm_kind = NormKind::Euclidean;
  std::string label;
  bool has_duplicates = false;

  PointCloud() = default;
  PointCloud(std::vector<Vec> pts, NormKind kind, std::string lbl = "")
      : points(std::move(pts)), norm_kind(kind), label(std::move(lbl)) {
    validate();
  }

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }

  void validate() {
    if (points.empty())
      throw std::invalid_argument("PointCloud: at least one point required");
    const std::size_t m = points.front().size();
    if (m == 0) throw std::invalid_argument("PointCloud: zero-dimensional points");
    for (const auto& p : points)
      if (p.size() != m)
        throw std::invalid_argument("PointCloud: inconsistent point dimensions");
    std::map<Vec, int> seen;
    has_duplicates = false;
    for (const auto& p : points)
      if (++seen[p] > 1) has_duplicates = true;
  }
};

// Distance-matrix metric space; triangle inequality verified on load.
struct FiniteMetricSpace {
  std::size_t n = 0;
  std::vector<std::vector<double>> dist;

  FiniteMetricSpace() = default;
  explicit FiniteMetricSpace(std::vector<std::vector<double>> d)
      : n(d.size()), dist(std::move(d)) {
    validate();
  }

  void validate() const {
    if (n == 0) throw std::invalid_argument("FiniteMetricSpace: empty");
    for (const auto& row : dist)
      if (row.size() != n)
        throw std::invalid_argument("FiniteMetricSpace: non-square matrix");
    const double tol = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(dist[i][i]) > tol)
        throw std::invalid_argument("FiniteMetricSpace: nonzero diagonal");
      for (std::size_t j = 0; j < n; ++j) {
        if (dist[i][j] < 0.0)
          throw std::invalid_argument("FiniteMetricSpace: negative distance");
        if (std::fabs(dist[i][j] - dist[j][i]) > tol)
          throw std::invalid_argument("FiniteMetricSpace: not symmetric");
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (dist[i][j] > dist[i][k] + dist[k][j] + tol)
            throw std::invalid_argument(
                "FiniteMetricSpace: triangle inequality violated");
  }
};

// All pairwise differences x - y, deduplicated. Contains 0 and is closed
// under negation by construction.
struct DifferenceSet {
  std::vector<Vec> elements;
  // element index -> first ordered source pair (i, j) with x_i - x_j = element
  std::vector<std::pair<std::size_t, std::size_t>> pair_index;
  NormKind norm_kind = NormKind::Euclidean;
};

// Kuratowski embedding x_i -> (d(i,1), ..., d(i,n)) into R^n with sup norm.
// Exact isometry for any valid finite metric space.
inline PointCloud kuratowski_embed(const FiniteMetricSpace& space) {
  std::vector<Vec> pts;
  pts.reserve(space.n);
  for (std::size_t i = 0; i < space.n; ++i) pts.push_back(space.dist[i]);
  return PointCloud(std::move(pts), NormKind::Sup, "kuratowski");
}

inline DifferenceSet difference_set(const PointCloud& cloud) {
  DifferenceSet z;
  z.norm_kind = cloud.norm_kind;
  std::map<Vec, std::size_t> index;
  const std::size_t n = cloud.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Vec d = sub(cloud.points[i], cloud.points[j]);
      auto [it, inserted] = index.try_emplace(std::move(d), z.elements.size());
      if (inserted) {
        z.elements.push_back(it->first);
        z.pair_index.emplace_back(i, j);
      }
    }
  }
  return z;
}

inline constexpr double kEnclosingPad = 1e-6;

// R = max(6 + pad, 2 max||z||), so Z lies in the ball of radius R/2 and the
// scale-indexing floor R > 6 always holds.
inline double enclosing_radius(const DifferenceSet& z) {
  if (z.elements.empty())
    throw std::invalid_argument("enclosing_radius: empty difference set");
  double mx = 0.0;
  for (const auto& e : z.elements) mx = std::max(mx, norm_of(e, z.norm_kind));
  return std::max(6.0 + kEnclosingPad, 2.0 * mx);
}

}  // namespace ablip
