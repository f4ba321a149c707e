#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ablip/covering.hpp"
#include "ablip/embedding.hpp"
#include "ablip/frames.hpp"
#include "ablip/point_cloud.hpp"
#include "ablip/probe.hpp"
#include "ablip/slog.hpp"

namespace ablip {

struct ExperimentConfig {
  double delta = 3.0;
  double gamma = 1.5;
  std::size_t N = 4;       // target dimension
  double theta = 0.2;      // Hoelder exponent, in (0,1)
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  Eigen::MatrixXd f_offset;  // fixed map of the prevalence argument; empty = 0

  void validate() const {
    if (!(delta > 0.0)) throw std::domain_error("ExperimentConfig: delta > 0");
    if (!(gamma > 1.0)) throw std::domain_error("ExperimentConfig: gamma > 1");
    if (!(theta > 0.0 && theta < 1.0))
      throw std::domain_error("ExperimentConfig: theta in (0,1)");
    if (N < 1 || trials < 1)
      throw std::domain_error("ExperimentConfig: N >= 1, trials >= 1");
  }
};

struct QnEstimate {
  std::size_t n = 0;
  double empirical_measure = 0.0;
  double theoretical_bound = 0.0;
  std::size_t annulus_size = 0;
  bool empty_annulus = false;
};

inline std::vector<Vec> annulus_elements(const DifferenceSet& z, double R,
                                         std::size_t n) {
  const double lo = R * std::pow(2.0, -static_cast<double>(n + 1));
  const double hi = R * std::pow(2.0, -static_cast<double>(n));
  std::vector<Vec> out;
  for (const auto& e : z.elements) {
    const double nz = norm_of(e, z.norm_kind);
    if (nz >= lo && nz <= hi) out.push_back(e);
  }
  return out;
}

// Exponent of the mu(Q_n) bound as printed in the source analysis, including
// the covering-count term alpha + beta.
inline double qn_exponent(const HomogeneityParams& p, double delta, double gamma,
                          std::size_t N) {
  const double nd = static_cast<double>(N);
  return delta * p.s + p.alpha + p.beta +
         (p.alpha + p.beta) / 2.0 * nd + gamma * nd - delta * nd;
}

// Exponent of the summability display, which drops the additive alpha + beta.
inline double summability_exponent(const HomogeneityParams& p, double delta,
                                   double gamma, std::size_t N) {
  const double nd = static_cast<double>(N);
  return delta * p.s + (p.alpha + p.beta) / 2.0 * nd + gamma * nd - delta * nd;
}

// Fraction of sampled maps admitting some annulus vector z with
// |(f+L)(z)| <= n^-delta 2^-n. Trials share derived seed streams so sweeps
// across n reuse the same maps.
inline QnEstimate estimate_qn(const DifferenceSet& z,
                              const SubspaceSequence& seq,
                              const ExperimentConfig& cfg, std::size_t n) {
  cfg.validate();
  QnEstimate est;
  est.n = n;
  const auto zn = annulus_elements(z, seq.R, n);
  est.annulus_size = zn.size();
  if (zn.empty()) {
    est.empty_annulus = true;
    return est;
  }
  const double threshold = std::pow(static_cast<double>(n), -cfg.delta) *
                           std::pow(2.0, -static_cast<double>(n));
  std::size_t bad = 0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const ProbeSample L = sample_probe(seq, cfg.gamma, cfg.N, seq.bases.size(),
                                       derive_seed(cfg.seed, t + 1));
    for (const auto& zv : zn) {
      Eigen::VectorXd image = L.apply(zv);
      if (cfg.f_offset.size() > 0)
        image += cfg.f_offset *
                 Eigen::Map<const Eigen::VectorXd>(
                     zv.data(), static_cast<Eigen::Index>(zv.size()));
      if (image.norm() <= threshold) {
        ++bad;
        break;
      }
    }
  }
  est.empirical_measure =
      static_cast<double>(bad) / static_cast<double>(cfg.trials);
  return est;
}

// Sweep over n = 1..n_max; the bound constant C is calibrated at the first
// scale with nonzero empirical measure (the analysis leaves C implicit).
inline std::vector<QnEstimate> qn_sweep(const DifferenceSet& z,
                                        const SubspaceSequence& seq,
                                        const ExperimentConfig& cfg,
                                        const HomogeneityParams& params,
                                        std::size_t n_max) {
  std::vector<QnEstimate> estimates;
  for (std::size_t n = 1; n <= n_max; ++n)
    estimates.push_back(estimate_qn(z, seq, cfg, n));

  const double exponent = qn_exponent(params, cfg.delta, cfg.gamma, cfg.N);
  double C = 1.0;
  for (const auto& est : estimates) {
    if (est.empirical_measure > 0.0) {
      C = est.empirical_measure /
          std::pow(static_cast<double>(est.n), exponent);
      break;
    }
  }
  for (auto& est : estimates)
    est.theoretical_bound =
        C * std::pow(static_cast<double>(est.n), exponent);
  return estimates;
}

inline constexpr std::size_t kNRequiredUnbounded =
    std::numeric_limits<std::size_t>::max();

struct SummabilityCheck {
  double exponent = 0.0;       // summability display exponent at cfg.N
  double exponent_full = 0.0;  // with the alpha + beta covering-count term
  bool summable = false;       // exponent < -1
  std::size_t N_required = kNRequiredUnbounded;
};

// Integer scan of ((alpha+beta)/2 + gamma) N + 1 < delta (N - s).
inline SummabilityCheck check_summability(const HomogeneityParams& params,
                                          const ExperimentConfig& cfg) {
  SummabilityCheck check;
  check.exponent = summability_exponent(params, cfg.delta, cfg.gamma, cfg.N);
  check.exponent_full = qn_exponent(params, cfg.delta, cfg.gamma, cfg.N);
  check.summable = check.exponent < -1.0;

  const double rate = (params.alpha + params.beta) / 2.0 + cfg.gamma;
  if (cfg.delta <= rate) return check;  // hypothesis violated, no N works
  const std::size_t n_lo =
      static_cast<std::size_t>(std::max(1.0, std::floor(params.s) + 1.0));
  for (std::size_t N = n_lo; N <= 1'000'000; ++N) {
    const double nd = static_cast<double>(N);
    if (nd <= params.s) continue;
    if ((rate * nd + 1.0) / (nd - params.s) < cfg.delta) {
      check.N_required = N;
      break;
    }
  }
  return check;
}

// Exhaustive pairwise check of the weakened bi-Lipschitz inequality for a
// concrete matrix map. Non-injective maps get an infinite lower constant.
inline DistortionReport verify_wem(
    const Eigen::MatrixXd& L, const PointCloud& x, double delta,
    double budget = std::numeric_limits<double>::infinity()) {
  if (static_cast<std::size_t>(L.cols()) != x.dim())
    throw std::invalid_argument("verify_wem: map dimension mismatch");
  DistortionReport report;
  report.delta = delta;
  const std::size_t n = x.size();
  bool injective = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec z = sub(x.points[i], x.points[j]);
      const double d = norm_of(z, x.norm_kind);
      if (d == 0.0) {
        ++report.skipped_pairs;
        continue;
      }
      ++report.informative_pairs;
      const double image =
          (L * Eigen::Map<const Eigen::VectorXd>(
                   z.data(), static_cast<Eigen::Index>(z.size())))
              .norm();
      if (image == 0.0) {
        injective = false;
        report.lower_constant = std::numeric_limits<double>::infinity();
        report.worst_pair = {i, j};
        continue;
      }
      const double lower_c = d / (image * std::pow(slog(d), delta));
      if (lower_c > report.lower_constant) {
        report.lower_constant = lower_c;
        report.worst_pair = {i, j};
      }
      report.upper_constant = std::max(report.upper_constant, image / d);
    }
  }
  report.pass = injective && std::isfinite(report.lower_constant) &&
                report.lower_constant <= budget;
  return report;
}

struct HolderCheck {
  double C = 0.0;
  double theta = 0.0;
  double theta_threshold = 0.0;  // (k - d_B)/(k (1 + d_B)) from the fitted d_B
  bool theta_admissible = false;
  bool pass = false;
};

inline HolderCheck verify_holder(const Eigen::MatrixXd& L, const PointCloud& x,
                                 double theta, double box_dim) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::domain_error("verify_holder: theta in (0,1)");
  HolderCheck check;
  check.theta = theta;
  const double k = static_cast<double>(L.rows());
  check.theta_threshold = (k - box_dim) / (k * (1.0 + box_dim));
  check.theta_admissible = theta < check.theta_threshold;

  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec z = sub(x.points[i], x.points[j]);
      const double d = norm_of(z, x.norm_kind);
      if (d == 0.0) continue;
      const double image =
          (L * Eigen::Map<const Eigen::VectorXd>(
                   z.data(), static_cast<Eigen::Index>(z.size())))
              .norm();
      if (image == 0.0) {
        check.C = std::numeric_limits<double>::infinity();
        check.pass = false;
        return check;
      }
      check.C = std::max(check.C, d / std::pow(image, theta));
    }
  }
  check.pass = std::isfinite(check.C);
  return check;
}

// First scale threshold after which the sampled map never nearly annihilates
// an annulus vector (the Borel-Cantelli conclusion at finite depth).
inline std::size_t borel_cantelli_threshold(const Eigen::MatrixXd& L,
                                            const DifferenceSet& z, double R,
                                            double delta, std::size_t n_max) {
  std::size_t n_L = 1;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double threshold = std::pow(static_cast<double>(n), -delta) *
                             std::pow(2.0, -static_cast<double>(n));
    for (const auto& zv : annulus_elements(z, R, n)) {
      const double image =
          (L * Eigen::Map<const Eigen::VectorXd>(
                   zv.data(), static_cast<Eigen::Index>(zv.size())))
              .norm();
      if (image <= threshold) {
        n_L = n + 1;
        break;
      }
    }
  }
  return n_L;
}

// Combines the small-distance (WEM) and large-distance (Hoelder) regimes at
// the split scale n_L and checks the assembled constant against the
// per-regime constants.
inline bool two_regime_check(const Eigen::MatrixXd& L, const PointCloud& x,
                             double R, double delta, double theta,
                             std::size_t n_L) {
  const double split = R * std::pow(2.0, -static_cast<double>(n_L));
  double c_small = 0.0, c_large = 0.0, c_holder = 0.0, combined = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec z = sub(x.points[i], x.points[j]);
      const double d = norm_of(z, x.norm_kind);
      if (d == 0.0) continue;
      const double image =
          (L * Eigen::Map<const Eigen::VectorXd>(
                   z.data(), static_cast<Eigen::Index>(z.size())))
              .norm();
      if (image == 0.0) return false;
      const double ratio = d / (image * std::pow(slog(d), delta));
      combined = std::max(combined, ratio);
      if (d <= split) {
        c_small = std::max(c_small, ratio);
      } else {
        c_holder = std::max(c_holder, d / std::pow(image, theta));
      }
    }
  }
  // large-regime constant assembled from the realized Hoelder constant:
  // |Lz| >= (d / C_H)^(1/theta)  =>  ratio <= d (C_H/d)^(1/theta) / slog(d)^delta
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec z = sub(x.points[i], x.points[j]);
      const double d = norm_of(z, x.norm_kind);
      if (d == 0.0 || d <= split) continue;
      c_large = std::max(c_large, d * std::pow(c_holder / d, 1.0 / theta) /
                                      std::pow(slog(d), delta));
    }
  }
  if (!std::isfinite(combined)) return false;
  const double regime_bound = std::max(c_small, c_large);
  return combined <= regime_bound * (1.0 + 1e-9) || regime_bound == 0.0;
}

}  // namespace ablip
