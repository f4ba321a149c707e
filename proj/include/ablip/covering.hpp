#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "ablip/point_cloud.hpp"
#include "ablip/slog.hpp"

namespace ablip {

struct Cover {
  std::vector<std::size_t> center_indices;  // indices into the covered set
  double radius = 0.0;
  std::size_t covered_set_size = 0;
};

// Farthest-point greedy net: the returned centers are radius-separated, so
// the count is sandwiched between the exact covering number and the packing
// number at the same radius.
inline Cover greedy_cover(std::span<const Vec> target, double radius,
                          NormKind kind) {
  if (target.empty()) throw std::invalid_argument("greedy_cover: empty target");
  if (!(radius > 0.0)) throw std::domain_error("greedy_cover: radius must be positive");

  Cover cover;
  cover.radius = radius;
  cover.covered_set_size = target.size();

  std::vector<double> min_dist(target.size(),
                               std::numeric_limits<double>::infinity());
  std::size_t next = 0;  // deterministic start
  while (true) {
    cover.center_indices.push_back(next);
    const Vec& c = target[next];
    double worst = 0.0;
    std::size_t worst_idx = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      min_dist[i] = std::min(min_dist[i], distance(target[i], c, kind));
      if (min_dist[i] > worst) {
        worst = min_dist[i];
        worst_idx = i;
      }
    }
    if (worst <= radius) break;
    next = worst_idx;
  }
  return cover;
}

inline bool cover_is_valid(std::span<const Vec> target, const Cover& cover,
                           NormKind kind, double tol = 1e-12) {
  for (const auto& p : target) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t ci : cover.center_indices)
      best = std::min(best, distance(p, target[ci], kind));
    if (best > cover.radius + tol) return false;
  }
  return true;
}

// Exact minimal cover by balls centred in the set, exhaustive over subsets.
// Exponential; gated to 16 points.
inline std::size_t exact_cover_number(std::span<const Vec> target, double radius,
                                      NormKind kind) {
  const std::size_t n = target.size();
  if (n == 0) throw std::invalid_argument("exact_cover_number: empty target");
  if (n > 16) throw std::invalid_argument("exact_cover_number: oracle limited to 16 points");
  if (!(radius > 0.0)) throw std::domain_error("exact_cover_number: radius must be positive");

  std::vector<std::uint32_t> mask(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (distance(target[i], target[j], kind) <= radius + 1e-12)
        mask[i] |= (1u << j);

  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  std::vector<std::uint8_t> best(full + 1u, 255);
  best[0] = 0;
  for (std::uint32_t covered = 0; covered < full; ++covered) {
    if (best[covered] == 255) continue;
    // branch on the lowest uncovered point; some ball must cover it
    std::uint32_t uncovered = full & ~covered;
    const int p = __builtin_ctz(uncovered);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask[i] & (1u << p))) continue;
      const std::uint32_t nxt = covered | mask[i];
      if (best[covered] + 1 < best[nxt])
        best[nxt] = static_cast<std::uint8_t>(best[covered] + 1);
    }
  }
  return best[full];
}

// N(B_r(0) cap Z, rho) with centres in Z, via the greedy net. Returns 0 when
// the ball is empty.
inline std::size_t covering_number_at_origin(const DifferenceSet& z, double r,
                                             double rho) {
  if (!(rho > 0.0) || !(rho < r))
    throw std::domain_error("covering_number_at_origin: need 0 < rho < r");
  std::vector<Vec> slice;
  for (const auto& e : z.elements)
    if (norm_of(e, z.norm_kind) <= r) slice.push_back(e);
  if (slice.empty()) return 0;
  return greedy_cover(slice, rho, z.norm_kind).center_indices.size();
}

struct DimensionEstimate {
  enum class Kind { BoxCounting, Assouad };
  Kind kind = Kind::BoxCounting;
  double value = 0.0;
  double residual = 0.0;
  std::vector<double> scales_used;  // strictly decreasing
};

inline DimensionEstimate box_counting_estimate(std::span<const Vec> cloud,
                                               NormKind kind, double eps_hi,
                                               double eps_lo, std::size_t steps) {
  if (!(eps_lo < eps_hi) || !(eps_lo > 0.0))
    throw std::domain_error("box_counting_estimate: need 0 < eps_lo < eps_hi");
  if (steps < 3) throw std::invalid_argument("box_counting_estimate: steps >= 3");
  if (cloud.empty()) throw std::invalid_argument("box_counting_estimate: empty cloud");

  DimensionEstimate est;
  est.kind = DimensionEstimate::Kind::BoxCounting;
  if (cloud.size() == 1) return est;  // degenerate: dimension 0

  std::vector<std::pair<double, std::size_t>> pairs;
  auto eps_grid = log_spaced(eps_hi, eps_lo, steps);
  for (double eps : eps_grid) {
    const std::size_t count =
        greedy_cover(cloud, eps, kind).center_indices.size();
    pairs.emplace_back(eps, count);
    est.scales_used.push_back(eps);
  }
  const auto fit = loglog_fit(pairs);
  est.value = std::max(0.0, fit.slope);
  est.residual = fit.residual;
  return est;
}

// Upper-envelope fit of N(r, rho) <= M (r/rho)^s slog(r)^a slog(rho)^b.
struct HomogeneityParams {
  double M = 1.0;
  double s = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;  // mean slack of the envelope
  bool at_origin = true;
  std::vector<std::pair<double, double>> scale_grid;  // (r, rho) cells used
};

namespace detail {

struct EnvelopeCell {
  double log_n;     // log of measured covering number
  double log_ratio; // log(r / rho)
  double u;         // log slog(r)
  double v;         // log slog(rho)
};

// log M needed for exponents (s, alpha, beta); M >= 1 enforced.
inline double envelope_log_m(std::span<const EnvelopeCell> cells, double s,
                             double a, double b) {
  double m = 0.0;
  for (const auto& c : cells)
    m = std::max(m, c.log_n - s * c.log_ratio - a * c.u - b * c.v);
  return m;
}

}  // namespace detail

// Minimises log M + penalty(s, alpha, beta) over the envelope-feasible cone,
// by coarse-to-fine grid search. The penalty weights prefer a small power
// exponent over log corrections, and log corrections over a huge constant.
inline HomogeneityParams fit_homogeneity(
    const DifferenceSet& z, bool at_origin,
    std::span<const std::pair<double, double>> grid,
    std::size_t global_center_cap = 64) {
  if (grid.empty()) throw std::invalid_argument("fit_homogeneity: empty grid");
  for (const auto& [r, rho] : grid)
    if (!(rho > 0.0) || !(rho < r))
      throw std::domain_error("fit_homogeneity: need 0 < rho < r in every cell");

  HomogeneityParams params;
  params.at_origin = at_origin;

  std::vector<detail::EnvelopeCell> cells;
  for (const auto& [r, rho] : grid) {
    std::size_t count = 0;
    if (at_origin) {
      count = covering_number_at_origin(z, r, rho);
    } else {
      // global fit quantifies over every centre; cap by deterministic
      // subsampling
      const std::size_t n = z.elements.size();
      const std::size_t stride = std::max<std::size_t>(1, n / global_center_cap);
      for (std::size_t i = 0; i < n; i += stride) {
        std::vector<Vec> ball;
        for (const auto& e : z.elements)
          if (distance(e, z.elements[i], z.norm_kind) <= r) ball.push_back(e);
        if (!ball.empty())
          count = std::max(
              count, greedy_cover(ball, rho, z.norm_kind).center_indices.size());
      }
    }
    if (count == 0) continue;  // empty cell carries no constraint
    cells.push_back({std::log(static_cast<double>(count)), std::log(r / rho),
                     std::log(slog(r)), std::log(slog(rho))});
    params.scale_grid.emplace_back(r, rho);
  }
  if (cells.empty()) return params;  // every cell empty: trivial parameters

  // Penalties are weighted by each covariate's leverage over the grid, so the
  // objective does not depend on the units the scale grid happens to live in.
  // Without this, slog(rho) factors are artificially cheap on grids with small
  // rho and the fit dumps everything into beta.
  const double lambda = 0.05;
  double w_s = 0.0, w_a = 0.0, w_b = 0.0;
  for (const auto& c : cells) {
    w_s = std::max(w_s, std::fabs(c.log_ratio));
    w_a = std::max(w_a, std::fabs(c.u));
    w_b = std::max(w_b, std::fabs(c.v));
  }
  w_s = std::max(w_s, 1e-9);
  w_a = std::max(w_a, 1e-9);
  w_b = std::max(w_b, 1e-9);
  auto objective = [&](double s, double a, double b) {
    return detail::envelope_log_m(cells, s, a, b) +
           lambda * (s * w_s + a * w_a + b * w_b);
  };

  double bs = 0.0, ba = 0.0, bb = 0.0, bobj = objective(0, 0, 0);
  // log-correction exponents are searched on [0, 2]; past that the power s
  // absorbs the growth anyway and the fit loses meaning
  const double ab_cap = 2.0;
  double s_lo = 0.0, s_hi = 6.0, ab_lo = 0.0, ab_hi = ab_cap;
  double s_step = 0.25, ab_step = 0.25;
  for (int pass = 0; pass < 4; ++pass) {
    for (double s = s_lo; s <= s_hi + 1e-9; s += s_step) {
      for (double a = ab_lo; a <= ab_hi + 1e-9; a += ab_step) {
        for (double b = ab_lo; b <= ab_hi + 1e-9; b += ab_step) {
          const double obj = objective(s, a, b);
          if (obj < bobj - 1e-12) {
            bobj = obj;
            bs = s;
            ba = a;
            bb = b;
          }
        }
      }
    }
    // refine around the incumbent
    s_lo = std::max(0.0, bs - 2 * s_step);
    s_hi = bs + 2 * s_step;
    ab_lo = std::max(0.0, std::min(ba, bb) - 2 * ab_step);
    ab_hi = std::min(ab_cap, std::max(ba, bb) + 2 * ab_step);
    s_step /= 4.0;
    ab_step /= 4.0;
  }

  params.s = bs;
  params.alpha = ba;
  params.beta = bb;
  params.M = std::exp(detail::envelope_log_m(cells, bs, ba, bb));
  double slack = 0.0;
  const double log_m = std::log(params.M);
  for (const auto& c : cells)
    slack += log_m + bs * c.log_ratio + ba * c.u + bb * c.v - c.log_n;
  params.residual = slack / static_cast<double>(cells.size());
  return params;
}

inline bool envelope_holds(const HomogeneityParams& p, const DifferenceSet& z,
                           double tol = 1e-9) {
  for (const auto& [r, rho] : p.scale_grid) {
    const std::size_t n = covering_number_at_origin(z, r, rho);
    const double bound = p.M * std::pow(r / rho, p.s) *
                         std::pow(slog(r), p.alpha) * std::pow(slog(rho), p.beta);
    if (static_cast<double>(n) > bound * (1.0 + tol)) return false;
  }
  return true;
}

// Finite-scale form of d_B(X-X) <= beta + s.
inline bool check_dbaa(const HomogeneityParams& params,
                       const DimensionEstimate& dim, double tolerance = 0.3) {
  if (!params.at_origin)
    throw std::invalid_argument("check_dbaa: params must be fitted at the origin");
  if (dim.kind != DimensionEstimate::Kind::BoxCounting)
    throw std::invalid_argument("check_dbaa: dimension estimate must be box-counting");
  return dim.value <= params.beta + params.s + tolerance;
}

// Default dyadic (r, rho) grid: r = R 2^-i, rho/r in {1/4, 1/8, 1/16},
// stopping above the smallest nonzero norm so finite-set saturation does not
// bias the exponents.
inline std::vector<std::pair<double, double>> dyadic_homogeneity_grid(
    const DifferenceSet& z, double R, std::size_t max_depth = 12) {
  double min_nonzero = std::numeric_limits<double>::infinity();
  for (const auto& e : z.elements) {
    const double nz = norm_of(e, z.norm_kind);
    if (nz > 0.0) min_nonzero = std::min(min_nonzero, nz);
  }
  std::vector<std::pair<double, double>> grid;
  for (std::size_t i = 1; i <= max_depth; ++i) {
    const double r = R * std::pow(2.0, -static_cast<double>(i));
    for (double ratio : {0.25, 0.125, 0.0625}) {
      const double rho = r * ratio;
      if (rho < min_nonzero) continue;
      grid.emplace_back(r, rho);
    }
  }
  if (grid.empty()) grid.emplace_back(R / 2.0, R / 8.0);
  return grid;
}

}  // namespace ablip
