#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ablip/covering.hpp"
#include "ablip/point_cloud.hpp"

namespace ablip {

// Unit dual-norm functional f with f(z) = ||z|| for its centre. Explicit in
// the three supported ambient norms, standing in for Hahn-Banach.
struct NormingFunctional {
  Vec weights;
  double dual_norm = 1.0;
  std::size_t normed_center_index = 0;

  double operator()(const Vec& x) const { return dot(weights, x); }
};

inline NormingFunctional norming_functional(const Vec& z, NormKind kind) {
  const double nz = norm_of(z, kind);
  if (!(nz > 0.0))
    throw std::invalid_argument("norming_functional: zero vector has no norming functional");
  NormingFunctional f;
  f.weights.assign(z.size(), 0.0);
  switch (kind) {
    case NormKind::Sup: {
      // signed indicator of the argmax coordinate, lowest index tie-break
      std::size_t jstar = 0;
      double best = -1.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (std::fabs(z[j]) > best) {
          best = std::fabs(z[j]);
          jstar = j;
        }
      }
      f.weights[jstar] = (z[jstar] >= 0.0) ? 1.0 : -1.0;
      break;
    }
    case NormKind::Euclidean:
      for (std::size_t j = 0; j < z.size(); ++j) f.weights[j] = z[j] / nz;
      break;
    case NormKind::L1:
      for (std::size_t j = 0; j < z.size(); ++j)
        f.weights[j] = (z[j] > 0.0) ? 1.0 : (z[j] < 0.0 ? -1.0 : 0.0);
      break;
  }
  f.dual_norm = norm_of(f.weights, dual_norm_kind(kind));
  if (std::fabs(f.dual_norm - 1.0) > 1e-10)
    throw std::logic_error("norming_functional: dual norm not 1");
  if (std::fabs(f(z) - nz) > 1e-10 * std::max(1.0, nz))
    throw std::logic_error("norming_functional: norming identity failed");
  return f;
}

// Per-scale cover of Z cap B_{R 2^-n}(0) at radius R 2^-(n+3), with one
// norming functional per nonzero centre. Guarantees
// max_j |f^n_j(z)| >= ||z||/4 on the annulus R 2^-(n+1) <= ||z|| <= R 2^-n.
struct ScaleFrame {
  std::size_t n = 0;
  double R = 0.0;
  NormKind norm_kind = NormKind::Euclidean;
  std::vector<Vec> centers;                    // nonzero cover centres
  std::vector<NormingFunctional> functionals;  // one per centre
  std::size_t m_n = 0;

  double cover_radius() const {
    return R * std::pow(2.0, -static_cast<double>(n + 3));
  }
  double slice_radius() const {
    return R * std::pow(2.0, -static_cast<double>(n));
  }
  double annulus_lo() const {
    return R * std::pow(2.0, -static_cast<double>(n + 1));
  }
  double op_norm_bound() const {
    return std::sqrt(static_cast<double>(m_n));
  }
  // best functional response on x
  double phi_max(const Vec& x) const {
    double best = 0.0;
    for (const auto& f : functionals) best = std::max(best, std::fabs(f(x)));
    return best;
  }
};

inline ScaleFrame build_scale_frame(const DifferenceSet& z, double R,
                                    std::size_t n) {
  if (n < 1) throw std::invalid_argument("build_scale_frame: scale index n >= 1");
  if (!(R > 6.0)) throw std::domain_error("build_scale_frame: R must exceed 6");

  ScaleFrame frame;
  frame.n = n;
  frame.R = R;
  frame.norm_kind = z.norm_kind;

  std::vector<Vec> slice;
  for (const auto& e : z.elements)
    if (norm_of(e, z.norm_kind) <= frame.slice_radius()) slice.push_back(e);
  if (slice.empty()) return frame;

  const Cover cover = greedy_cover(slice, frame.cover_radius(), z.norm_kind);
  for (std::size_t ci : cover.center_indices) {
    const Vec& c = slice[ci];
    if (!(norm_of(c, z.norm_kind) > 0.0)) continue;  // zero norms nothing
    NormingFunctional f = norming_functional(c, z.norm_kind);
    f.normed_center_index = frame.centers.size();
    frame.centers.push_back(c);
    frame.functionals.push_back(std::move(f));
  }
  frame.m_n = frame.functionals.size();

  // Coverage: every slice point beyond the cover radius must be within the
  // cover radius of a nonzero centre (the zero centre only absorbs points it
  // can actually reach).
  for (const auto& p : slice) {
    if (norm_of(p, z.norm_kind) <= frame.cover_radius() + 1e-12) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : frame.centers)
      best = std::min(best, distance(p, c, z.norm_kind));
    if (best > frame.cover_radius() + 1e-12)
      throw std::logic_error("build_scale_frame: cover invariant violated");
  }
  // Annulus guarantee, exhaustive over slice members.
  for (const auto& p : slice) {
    const double np = norm_of(p, z.norm_kind);
    if (np < frame.annulus_lo() || np > frame.slice_radius()) continue;
    if (frame.phi_max(p) < np / 4.0)
      throw std::logic_error("build_scale_frame: annulus lower bound violated");
  }
  return frame;
}

inline double min_nonzero_norm(const DifferenceSet& z) {
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& e : z.elements) {
    const double nz = norm_of(e, z.norm_kind);
    if (nz > 0.0) mn = std::min(mn, nz);
  }
  return mn;
}

// Depth so that every nonzero difference lands in some annulus n <= n_max.
inline std::size_t default_frame_depth(const DifferenceSet& z, double R) {
  const double mn = min_nonzero_norm(z);
  if (!std::isfinite(mn)) return 1;
  const double depth = std::ceil(std::log2(R / mn)) + 1.0;
  return static_cast<std::size_t>(std::clamp(depth, 1.0, 60.0));
}

inline std::vector<ScaleFrame> stack_frames(const DifferenceSet& z, double R,
                                            std::size_t n_max) {
  if (n_max < 1) throw std::invalid_argument("stack_frames: n_max >= 1");
  std::vector<ScaleFrame> frames;
  frames.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n)
    frames.push_back(build_scale_frame(z, R, n));
  return frames;
}

// Canonical dyadic scale of a distance d in (0, R]: the annulus
// [R 2^-(n+1), R 2^-n] containing d, boundaries assigned to the smaller n.
inline std::size_t annulus_index(double R, double d) {
  if (!(d > 0.0) || !(d <= R))
    throw std::domain_error("annulus_index: need 0 < d <= R");
  const double x = std::log2(R / d);
  const double k = std::ceil(x) - 1.0;
  return static_cast<std::size_t>(std::max(1.0, k));
}

}  // namespace ablip
