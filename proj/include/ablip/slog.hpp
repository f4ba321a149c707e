#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace ablip {

// Symmetric logarithm: slog(x) = log(x + 1/x). Minimum log 2 at x = 1,
// invariant under x <-> 1/x.
inline double slog(double x) {
  if (!(x > 0.0)) throw std::domain_error("slog: argument must be positive");
  return std::log(x + 1.0 / x);
}

// Constants certified on a finite grid for the standard slog inequalities:
//   1. |log x| <= slog(x) <= log 2 + |log x|
//   2. A_C slog(x) <= slog(Cx) <= B_C slog(x)
//   3. a_gamma slog(x) <= slog(x slog(x)^gamma) <= b_gamma slog(x)
//   4. slog(x) >= c slog(2^-k)  for x in [2^-(k+1), 2^-k]
// Valid only on [grid_lo, grid_hi]; downstream checks must not extrapolate.
struct SLogBounds {
  double gamma = 0.0;
  double a_gamma = 1.0;
  double b_gamma = 1.0;
  double A_C = 1.0;
  double B_C = 1.0;
  double c = 1.0;
  double grid_lo = 0.0;
  double grid_hi = 0.0;
};

inline SLogBounds certify_slog_bounds(double C, double gamma,
                                      std::span<const double> grid) {
  if (!(C > 0.0)) throw std::domain_error("certify_slog_bounds: C must be positive");
  if (gamma < 0.0) throw std::domain_error("certify_slog_bounds: gamma must be >= 0");
  if (grid.empty()) throw std::invalid_argument("certify_slog_bounds: empty grid");

  SLogBounds b;
  b.gamma = gamma;
  b.grid_lo = std::numeric_limits<double>::infinity();
  b.grid_hi = 0.0;
  b.A_C = std::numeric_limits<double>::infinity();
  b.B_C = 0.0;
  b.a_gamma = std::numeric_limits<double>::infinity();
  b.b_gamma = 0.0;
  b.c = std::numeric_limits<double>::infinity();

  const double log2v = std::log(2.0);
  for (double x : grid) {
    const double sx = slog(x);
    b.grid_lo = std::min(b.grid_lo, x);
    b.grid_hi = std::max(b.grid_hi, x);

    // item 1 holds identically; the grid scan keeps us honest about rounding
    const double al = std::fabs(std::log(x));
    if (sx < al - 1e-12 || sx > log2v + al + 1e-12)
      throw std::logic_error("certify_slog_bounds: item 1 violated on grid");

    const double ratio_c = slog(C * x) / sx;
    b.A_C = std::min(b.A_C, ratio_c);
    b.B_C = std::max(b.B_C, ratio_c);

    const double ratio_g = slog(x * std::pow(sx, gamma)) / sx;
    b.a_gamma = std::min(b.a_gamma, ratio_g);
    b.b_gamma = std::max(b.b_gamma, ratio_g);

    // item 4: dyadic shelf containing x
    const double k = std::floor(-std::log2(x));
    b.c = std::min(b.c, sx / slog(std::pow(2.0, -k)));
  }
  return b;
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit
};

// OLS of log(count) against -log(scale).
inline LogLogFit loglog_fit(
    std::span<const std::pair<double, std::size_t>> pairs) {
  if (pairs.size() < 3)
    throw std::invalid_argument("loglog_fit: need at least 3 pairs");
  std::vector<double> xs, ys;
  xs.reserve(pairs.size());
  ys.reserve(pairs.size());
  for (const auto& [scale, count] : pairs) {
    if (!(scale > 0.0)) throw std::domain_error("loglog_fit: scale must be positive");
    if (count == 0) throw std::domain_error("loglog_fit: count must be positive");
    xs.push_back(-std::log(scale));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] == xs[j])
        throw std::invalid_argument("loglog_fit: repeated scales");

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LogLogFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                     static_cast<double>(n - 1)));
  return out;
}

}  // namespace ablip
