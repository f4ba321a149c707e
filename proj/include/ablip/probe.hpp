#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ablip/frames.hpp"
#include "ablip/point_cloud.hpp"
#include "ablip/rng.hpp"

namespace ablip {

// Subspaces V_n spanned by the scale functionals, rank-reduced so each basis
// is a linearly independent subset of the original norming functionals.
struct SubspaceBasis {
  std::size_t n = 0;          // scale index
  Eigen::MatrixXd rows;       // d_n x m, rows are functional weight vectors
  std::size_t d_n = 0;
  NormKind ambient_norm = NormKind::Euclidean;
};

struct SubspaceSequence {
  std::vector<SubspaceBasis> bases;  // one per scale, possibly empty
  double R = 0.0;
  std::size_t ambient_dim = 0;
};

inline SubspaceSequence make_subspace_sequence(
    const std::vector<ScaleFrame>& frames) {
  SubspaceSequence seq;
  if (!frames.empty()) seq.R = frames.front().R;
  for (const auto& frame : frames)
    if (!frame.centers.empty()) seq.ambient_dim = frame.centers.front().size();
  for (const auto& frame : frames) {
    SubspaceBasis basis;
    basis.n = frame.n;
    basis.ambient_norm = frame.norm_kind;
    std::vector<Eigen::VectorXd> kept;
    for (const auto& f : frame.functionals) {
      Eigen::Map<const Eigen::VectorXd> w(
          f.weights.data(), static_cast<Eigen::Index>(f.weights.size()));
      Eigen::VectorXd resid = w;
      for (const auto& q : kept) resid -= q.dot(w) / q.squaredNorm() * q;
      if (resid.norm() > 1e-10) {
        kept.emplace_back(w);  // keep the original row, track span via resid
        if (basis.rows.rows() == 0)
          basis.rows.resize(0, w.size());
        basis.rows.conservativeResize(basis.rows.rows() + 1, w.size());
        basis.rows.row(basis.rows.rows() - 1) = w.transpose();
        // replace span tracker by the orthogonalised direction
        kept.back() = resid;
      }
    }
    basis.d_n = static_cast<std::size_t>(basis.rows.rows());
    seq.bases.push_back(std::move(basis));
  }
  return seq;
}

inline double dual_norm_of_row(const Eigen::RowVectorXd& w, NormKind ambient) {
  switch (dual_norm_kind(ambient)) {
    case NormKind::L1: return w.lpNorm<1>();
    case NormKind::Euclidean: return w.norm();
    case NormKind::Sup: return w.lpNorm<Eigen::Infinity>();
  }
  return w.norm();
}

struct UnitBallDraw {
  Eigen::VectorXd coefficients;   // in U_n
  Eigen::RowVectorXd functional;  // realized row = coefficients' basis combo
};

namespace detail {

inline Eigen::VectorXd uniform_in_euclidean_ball(std::size_t d,
                                                 std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  const double r = std::pow(unif(rng), 1.0 / static_cast<double>(d));
  return v * (r / v.norm());
}

inline Eigen::VectorXd uniform_in_l1_ball(std::size_t d, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  double total = expo(rng);  // slack coordinate makes the radius uniform
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = expo(rng);
    total += v(i);
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) /= total;
    if (unif(rng) < 0.5) v(i) = -v(i);
  }
  return v;
}

// True when every basis row is a signed unit coordinate vector and the
// active coordinates are distinct; then U_n is exactly the l1 ball.
inline bool is_signed_coordinate_basis(const Eigen::MatrixXd& rows) {
  std::vector<bool> used(static_cast<std::size_t>(rows.cols()), false);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::Index active = -1;
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      const double v = rows(i, j);
      if (v == 0.0) continue;
      if (active >= 0 || std::fabs(std::fabs(v) - 1.0) > 1e-12) return false;
      active = j;
    }
    if (active < 0 || used[static_cast<std::size_t>(active)]) return false;
    used[static_cast<std::size_t>(active)] = true;
  }
  return true;
}

}  // namespace detail

// Uniform sample from U_n = {c : dual-norm(sum c_j f_j) <= 1}. Exact direct
// samplers cover the euclidean (ellipsoid) and sup (cross-polytope) cases;
// the general polytope case falls back to rejection with a conditioning guard.
inline UnitBallDraw sample_unit_ball(const SubspaceBasis& basis,
                                     std::mt19937_64& rng) {
  if (basis.d_n == 0)
    throw std::invalid_argument("sample_unit_ball: empty basis");
  UnitBallDraw draw;
  const auto& B = basis.rows;

  if (basis.ambient_norm == NormKind::Euclidean) {
    const Eigen::MatrixXd G = B * B.transpose();
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("sample_unit_ball: Gram matrix not positive definite");
    const Eigen::VectorXd u = detail::uniform_in_euclidean_ball(basis.d_n, rng);
    draw.coefficients = llt.matrixU().solve(u);  // c^T G c = |u|^2 <= 1
  } else if (basis.ambient_norm == NormKind::Sup &&
             detail::is_signed_coordinate_basis(B)) {
    draw.coefficients = detail::uniform_in_l1_ball(basis.d_n, rng);
  } else {
    // bounding box half-width from the smallest singular value
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 0.0))
      throw std::runtime_error("sample_unit_ball: basis nearly dependent");
    const double half_width =
        std::sqrt(static_cast<double>(B.cols())) / smin;
    std::uniform_real_distribution<double> unif(-half_width, half_width);
    const std::size_t max_attempts = 20'000'000;
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
      Eigen::VectorXd c(static_cast<Eigen::Index>(basis.d_n));
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = unif(rng);
      Eigen::RowVectorXd w = c.transpose() * B;
      if (dual_norm_of_row(w, basis.ambient_norm) <= 1.0) {
        draw.coefficients = c;
        break;
      }
      if (attempt == max_attempts)
        throw std::runtime_error(
            "sample_unit_ball: acceptance rate below 1e-6; rank-reduce first");
    }
  }

  draw.functional = draw.coefficients.transpose() * B;
  if (dual_norm_of_row(draw.functional, basis.ambient_norm) > 1.0 + 1e-10)
    throw std::logic_error("sample_unit_ball: drawn functional leaves the unit ball");
  return draw;
}

// Random linear map from the probe measure: rows L_i = sum_n n^-gamma phi_i,n
// with phi_i,n uniform in the unit ball of V_n. Deterministic under a fixed
// seed, and row i depends only on (seed, i), so maps with more rows extend
// maps with fewer rows under a shared seed.
struct ProbeSample {
  double gamma = 0.0;
  std::size_t k = 0;
  std::vector<std::vector<Eigen::VectorXd>> coefficients;  // [row][scale]
  Eigen::MatrixXd matrix;  // k x m
  std::uint64_t seed = 0;

  Eigen::VectorXd apply(const Vec& x) const {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                         static_cast<Eigen::Index>(x.size()));
    return matrix * xv;
  }
};

inline ProbeSample sample_probe(const SubspaceSequence& seq, double gamma,
                                std::size_t k, std::size_t n_max,
                                std::uint64_t seed) {
  if (!(gamma > 1.0)) throw std::domain_error("sample_probe: gamma must exceed 1");
  if (k == 0) throw std::invalid_argument("sample_probe: k >= 1");
  if (seq.bases.empty()) throw std::invalid_argument("sample_probe: empty sequence");
  if (seq.ambient_dim == 0)
    throw std::invalid_argument("sample_probe: all scales empty");
  const std::size_t ambient = seq.ambient_dim;

  ProbeSample sample;
  sample.gamma = gamma;
  sample.k = k;
  sample.seed = seed;
  sample.matrix.setZero(static_cast<Eigen::Index>(k),
                        static_cast<Eigen::Index>(ambient));
  sample.coefficients.resize(k);

  const std::size_t depth = std::min(n_max, seq.bases.size());
  for (std::size_t i = 0; i < k; ++i) {
    sample.coefficients[i].resize(depth);
    for (std::size_t idx = 0; idx < depth; ++idx) {
      const auto& basis = seq.bases[idx];
      if (basis.d_n == 0) continue;  // empty scales contribute nothing
      auto rng = make_rng(seed, i + 1, basis.n);
      const UnitBallDraw draw = sample_unit_ball(basis, rng);
      sample.coefficients[i][idx] = draw.coefficients;
      sample.matrix.row(static_cast<Eigen::Index>(i)) +=
          std::pow(static_cast<double>(basis.n), -gamma) * draw.functional;
    }
  }
  return sample;
}

// Uniform Lipschitz constant over the probe space, sum n^-gamma sqrt(m_n)
// across the truncated scales (empty deeper slices contribute exactly zero).
inline double probe_lipschitz_bound(const SubspaceSequence& seq, double gamma,
                                    std::size_t n_max) {
  double total = 0.0;
  for (const auto& basis : seq.bases) {
    if (basis.n > n_max) break;
    total += std::pow(static_cast<double>(basis.n), -gamma) *
             std::sqrt(static_cast<double>(basis.d_n));
  }
  return total;
}

struct Lemma16Result {
  double empirical = 0.0;   // fraction of samples with |(f+L)(x)| < eps
  double bound = 0.0;       // (n^gamma d_n eps / |g(x)|)^k as printed
  double bound_normalized = 0.0;  // variant with the U_n volume normalisation
  double std_error = 0.0;   // Monte-Carlo standard error of `empirical`
  double g_response = 0.0;  // |g(x)| for the best frame functional
};

namespace detail {

inline double unit_ball_volume(std::size_t d) {
  return std::pow(M_PI, static_cast<double>(d) / 2.0) /
         std::tgamma(static_cast<double>(d) / 2.0 + 1.0);
}

// box-to-U_n volume ratio, clamped at 1 so the variant never undercuts the
// printed bound
inline double box_volume_ratio(const SubspaceBasis& basis) {
  const double box = std::pow(2.0, static_cast<double>(basis.d_n));
  double vol = box;
  if (basis.ambient_norm == NormKind::Euclidean) {
    const Eigen::MatrixXd G = basis.rows * basis.rows.transpose();
    vol = unit_ball_volume(basis.d_n) / std::sqrt(G.determinant());
  } else if (basis.ambient_norm == NormKind::Sup &&
             is_signed_coordinate_basis(basis.rows)) {
    vol = box / std::tgamma(static_cast<double>(basis.d_n) + 1.0);
  }
  return std::max(1.0, box / vol);
}

}  // namespace detail

inline Lemma16Result verify_lemma_1_6(const SubspaceSequence& seq, double gamma,
                                      std::size_t k, const Vec& x,
                                      const Eigen::MatrixXd& f_offset,
                                      std::size_t n, double eps,
                                      std::size_t trials, std::uint64_t seed) {
  if (trials < 1000)
    throw std::invalid_argument("verify_lemma_1_6: trials >= 1000");
  if (eps < 0.0) throw std::domain_error("verify_lemma_1_6: eps >= 0");
  const SubspaceBasis* basis = nullptr;
  for (const auto& b : seq.bases)
    if (b.n == n) basis = &b;
  if (basis == nullptr || basis->d_n == 0)
    throw std::invalid_argument("verify_lemma_1_6: no basis at scale n");

  Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                       static_cast<Eigen::Index>(x.size()));
  double g_best = 0.0;
  for (Eigen::Index i = 0; i < basis->rows.rows(); ++i)
    g_best = std::max(g_best, std::fabs(basis->rows.row(i).dot(xv)));
  if (!(g_best > 0.0))
    throw std::runtime_error("verify_lemma_1_6: all frame functionals vanish on x");

  std::size_t hits = 0;
  const std::size_t depth = seq.bases.size();
  for (std::size_t t = 0; t < trials; ++t) {
    const ProbeSample L =
        sample_probe(seq, gamma, k, depth, derive_seed(seed, t + 1));
    Eigen::VectorXd image = L.apply(x);
    if (f_offset.size() > 0) image += f_offset * xv;
    if (image.norm() < eps) ++hits;
  }

  Lemma16Result result;
  result.g_response = g_best;
  result.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  result.bound = std::pow(std::pow(static_cast<double>(n), gamma) *
                              static_cast<double>(basis->d_n) * eps / g_best,
                          static_cast<double>(k));
  result.bound_normalized =
      result.bound *
      std::pow(detail::box_volume_ratio(*basis), static_cast<double>(k));
  result.std_error = std::sqrt(
      std::max(result.empirical * (1.0 - result.empirical), 1e-12) /
      static_cast<double>(trials));
  return result;
}

}  // namespace ablip
