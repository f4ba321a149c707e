#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ablip/point_cloud.hpp"
#include "ablip/rng.hpp"

namespace ablip {

// Reference datasets with known dimension targets:
//   interval_grid       d_B ~ 1
//   square_grid         d_B ~ 2
//   cantor_dust         d_B ~ log 2 / log 3
//   orthogonal_sequence difference set needs log corrections at the origin
//   two_scale_cluster   stress case for the d_B <= s + beta check
struct GeneratorSpec {
  std::string shape;
  std::size_t n = 101;        // interval_grid point count
  std::size_t side = 11;      // square_grid side
  std::size_t depth = 6;      // cantor_dust depth
  std::size_t k = 64;         // orthogonal_sequence length
  double decay = 0.5;         // orthogonal_sequence exponent
  std::size_t clusters = 8;   // two_scale_cluster coarse count
  std::size_t per_cluster = 8;
  std::uint64_t seed = 0;
};

inline PointCloud interval_grid(std::size_t n) {
  if (n < 1) throw std::invalid_argument("interval_grid: n >= 1");
  std::vector<Vec> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({n == 1 ? 0.0
                          : static_cast<double>(i) / static_cast<double>(n - 1)});
  return PointCloud(std::move(pts), NormKind::Sup, "interval_grid");
}

inline PointCloud square_grid(std::size_t side) {
  if (side < 1) throw std::invalid_argument("square_grid: side >= 1");
  std::vector<Vec> pts;
  pts.reserve(side * side);
  const double h = side == 1 ? 0.0 : 1.0 / static_cast<double>(side - 1);
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j)
      pts.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
  return PointCloud(std::move(pts), NormKind::Euclidean, "square_grid");
}

// Left endpoints of the level-`depth` middle-thirds construction.
inline PointCloud cantor_dust(std::size_t depth) {
  if (depth < 1 || depth > 20)
    throw std::invalid_argument("cantor_dust: depth in [1, 20]");
  std::vector<Vec> pts;
  pts.reserve(std::size_t{1} << depth);
  for (std::size_t code = 0; code < (std::size_t{1} << depth); ++code) {
    double x = 0.0, scale = 1.0;
    for (std::size_t b = 0; b < depth; ++b) {
      scale /= 3.0;
      if (code & (std::size_t{1} << b)) x += 2.0 * scale;
    }
    pts.push_back({x});
  }
  return PointCloud(std::move(pts), NormKind::Sup, "cantor_dust");
}

// {0} united with {n^-decay e_n : n <= K} in R^K.
inline PointCloud orthogonal_sequence(std::size_t K, double decay = 0.5) {
  if (K < 1) throw std::invalid_argument("orthogonal_sequence: K >= 1");
  std::vector<Vec> pts;
  pts.reserve(K + 1);
  pts.emplace_back(K, 0.0);
  for (std::size_t n = 1; n <= K; ++n) {
    Vec e(K, 0.0);
    e[n - 1] = std::pow(static_cast<double>(n), -decay);
    pts.push_back(std::move(e));
  }
  return PointCloud(std::move(pts), NormKind::Euclidean, "orthogonal_sequence");
}

// Coarse clusters far apart, each filled with a fine grid: two covering
// regimes with a gap between their scales.
inline PointCloud two_scale_cluster(std::size_t clusters,
                                    std::size_t per_cluster,
                                    std::uint64_t seed = 0) {
  if (clusters < 1 || per_cluster < 1)
    throw std::invalid_argument("two_scale_cluster: positive sizes required");
  auto rng = make_rng(seed, 0x25ca1e);
  std::uniform_real_distribution<double> jitter(-0.001, 0.001);
  std::vector<Vec> pts;
  pts.reserve(clusters * per_cluster);
  const double fine = 0.01 / static_cast<double>(per_cluster);
  for (std::size_t c = 0; c < clusters; ++c) {
    const double cx = static_cast<double>(c);
    for (std::size_t p = 0; p < per_cluster; ++p)
      pts.push_back({cx + static_cast<double>(p) * fine + jitter(rng),
                     jitter(rng)});
  }
  return PointCloud(std::move(pts), NormKind::Euclidean, "two_scale_cluster");
}

inline PointCloud generate(const GeneratorSpec& spec) {
  if (spec.shape == "interval_grid") return interval_grid(spec.n);
  if (spec.shape == "square_grid") return square_grid(spec.side);
  if (spec.shape == "cantor_dust") return cantor_dust(spec.depth);
  if (spec.shape == "orthogonal_sequence")
    return orthogonal_sequence(spec.k, spec.decay);
  if (spec.shape == "two_scale_cluster")
    return two_scale_cluster(spec.clusters, spec.per_cluster, spec.seed);
  throw std::invalid_argument("generate: unknown shape " + spec.shape);
}

}  // namespace ablip
