// Acceptance gate: one line per criterion, exit 0 only if all pass.
// Tolerances are pinned here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ablip/covering.hpp"
#include "ablip/embedding.hpp"
#include "ablip/frames.hpp"
#include "ablip/generators.hpp"
#include "ablip/prevalence.hpp"
#include "ablip/probe.hpp"
#include "ablip/slog.hpp"

using namespace ablip;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok,
            const std::string& detail = "") {
  std::cout << "criterion " << id << " (" << name << "): "
            << (ok ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << "\n";
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct CorpusEntry {
  std::string name;
  PointCloud cloud;
};

std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> out;
  out.push_back({"interval_grid", interval_grid(81)});
  out.push_back({"square_grid", square_grid(9)});
  out.push_back({"cantor_dust", cantor_dust(6)});
  out.push_back({"orthogonal_sequence", orthogonal_sequence(64)});
  out.push_back({"two_scale_cluster", two_scale_cluster(8, 8, 1)});
  return out;
}

HomogeneityParams fit_corpus(const DifferenceSet& z, double R) {
  return fit_homogeneity(z, true, dyadic_homogeneity_grid(z, R));
}

// ---------------------------------------------------------------- criterion 1

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> grid =
      log_spaced(std::pow(2.0, -40), std::pow(2.0, 40), 10000);
  bool ok = true;
  const double log2v = std::log(2.0);

  SLogBounds b;
  try {
    b = certify_slog_bounds(8.0, 2.0, grid);
  } catch (const std::exception&) {
    ok = false;
  }
  for (double x : grid) {
    const double sx = slog(x);
    const double al = std::fabs(std::log(x));
    // item 1, exact to 1e-12
    if (sx < al - 1e-12 || sx > log2v + al + 1e-12) ok = false;
    // items 2-4 with the grid-certified constants
    const double s8 = slog(8.0 * x);
    if (s8 < b.A_C * sx - 1e-9 || s8 > b.B_C * sx + 1e-9) ok = false;
    const double sg = slog(x * sx * sx);
    if (sg < b.a_gamma * sx - 1e-9 || sg > b.b_gamma * sx + 1e-9) ok = false;
    const double k = std::floor(-std::log2(x));
    if (sx < b.c * slog(std::pow(2.0, -k)) - 1e-9) ok = false;
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 1.0) ok = false;
  std::ostringstream d;
  d << "A_C=" << b.A_C << " B_C=" << b.B_C << " c=" << b.c << " t=" << elapsed
    << "s";
  report(1, "slog suite", ok, d.str());
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 11;  // up to 12 points
    const std::size_t dim = 1 + rng() % 2;
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < n; ++i) {
      Vec p;
      for (std::size_t c = 0; c < dim; ++c) p.push_back(unif(rng));
      pts.push_back(std::move(p));
    }
    const double radius = 0.05 + 0.6 * unif(rng);
    const NormKind kind = (trial % 3 == 0)   ? NormKind::Sup
                          : (trial % 3 == 1) ? NormKind::Euclidean
                                             : NormKind::L1;
    const std::size_t exact = exact_cover_number(pts, radius, kind);
    const Cover cover = greedy_cover(pts, radius, kind);
    if (!cover_is_valid(pts, cover, kind)) ok = false;
    if (cover.center_indices.size() < exact) ok = false;
    if (cover.center_indices.size() > 2 * exact) ok = false;
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 30.0) ok = false;
  report(2, "covering oracle equivalence", ok,
         "200 instances, t=" + std::to_string(elapsed) + "s");
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream d;

  const PointCloud interval = interval_grid(10001);
  const double d1 = box_counting_estimate(interval.points, interval.norm_kind,
                                          0.5, 0.01, 8)
                        .value;
  if (std::fabs(d1 - 1.0) > 0.15) ok = false;

  const PointCloud square = square_grid(101);
  const double d2 =
      box_counting_estimate(square.points, square.norm_kind, 0.25, 0.025, 8)
          .value;
  if (std::fabs(d2 - 2.0) > 0.2) ok = false;

  const PointCloud cantor = cantor_dust(6);
  const double d3 = box_counting_estimate(cantor.points, cantor.norm_kind,
                                          std::pow(3.0, -1.0),
                                          std::pow(3.0, -5.0), 8)
                        .value;
  const double target = std::log(2.0) / std::log(3.0);
  if (std::fabs(d3 - target) > 0.1) ok = false;

  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) ok = false;
  d << "interval=" << d1 << " square=" << d2 << " cantor=" << d3
    << " t=" << elapsed << "s";
  report(3, "dimension recovery", ok, d.str());
}

// ---------------------------------------------------------------- criterion 4

void criterion_4() {
  bool ok = true;
  std::size_t checked = 0;
  std::ostringstream d;
  for (const auto& entry : corpus()) {
    const DifferenceSet z = difference_set(entry.cloud);
    const double R = enclosing_radius(z);
    // single-ratio grid: multi-ratio grids mix saturated coarse cells into
    // the mean slack and push every residual over the filter
    std::vector<std::pair<double, double>> grid;
    const double mn = min_nonzero_norm(z);
    for (int i = 1; i <= 12; ++i) {
      const double r = R * std::pow(2.0, -i);
      if (r / 8.0 >= mn) grid.emplace_back(r, r / 8.0);
    }
    if (grid.empty()) grid.emplace_back(R / 2.0, R / 8.0);
    const HomogeneityParams p = fit_homogeneity(z, true, grid);
    if (p.residual >= 0.1) continue;
    ++checked;
    double hi = 0.0;
    for (const auto& e : z.elements)
      hi = std::max(hi, norm_of(e, z.norm_kind));
    const double lo = std::max(min_nonzero_norm(z), hi / 200.0);
    double dim = 0.0;
    if (lo < hi / 2.0)
      dim = box_counting_estimate(z.elements, z.norm_kind, hi / 2.0, lo, 8)
                .value;
    if (dim > p.s + p.beta + 0.3) {
      ok = false;
      d << entry.name << ": d_B=" << dim << " > s+beta+0.3=" << p.s + p.beta + 0.3
        << "; ";
    }
  }
  if (checked == 0) ok = false;  // vacuous filter would prove nothing
  d << checked << "/5 datasets under the residual filter";
  report(4, "dimension vs envelope exponents", ok, d.str());
}

// ---------------------------------------------------------------- criterion 5

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::size_t violations = 0;
  for (const auto& entry : corpus()) {
    const DifferenceSet z = difference_set(entry.cloud);
    const double R = enclosing_radius(z);
    std::vector<ScaleFrame> frames;
    try {
      frames = stack_frames(z, R, default_frame_depth(z, R));
    } catch (const std::logic_error&) {
      ok = false;
      continue;
    }
    for (const auto& fr : frames) {
      // norming identities to 1e-10
      for (std::size_t j = 0; j < fr.centers.size(); ++j) {
        const double nc = norm_of(fr.centers[j], z.norm_kind);
        if (std::fabs(fr.functionals[j](fr.centers[j]) - nc) >
            1e-10 * std::max(1.0, nc))
          ++violations;
        if (std::fabs(norm_of(fr.functionals[j].weights,
                              dual_norm_kind(z.norm_kind)) -
                      1.0) > 1e-10)
          ++violations;
      }
      // annulus lower bound, exhaustive
      for (const auto& e : z.elements) {
        const double ne = norm_of(e, z.norm_kind);
        if (ne < fr.annulus_lo() || ne > fr.slice_radius()) continue;
        if (fr.phi_max(e) < ne / 4.0 - 1e-12) ++violations;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  if (violations > 0 || elapsed >= 60.0) ok = false;
  report(5, "frame annulus guarantee", ok,
         std::to_string(violations) + " violations, t=" +
             std::to_string(elapsed) + "s");
}

// ---------------------------------------------------------------- criterion 6

void criterion_6() {
  bool ok = true;
  std::size_t violations = 0;
  std::mt19937_64 rng(66);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& entry : corpus()) {
    const DifferenceSet z = difference_set(entry.cloud);
    const double R = enclosing_radius(z);
    const auto frames = stack_frames(z, R, default_frame_depth(z, R));
    for (double delta : {1.5, 2.0, 3.0}) {
      const EmbeddingMap map = build_embedding(entry.cloud, delta, frames);
      const DistortionReport rep = verify_lower_bound(map, entry.cloud);
      violations += rep.violations;
      // operator norm invariant on random unit vectors
      for (int t = 0; t < 1000; ++t) {
        Vec x(entry.cloud.dim());
        double nx = 0.0;
        while (nx == 0.0) {
          for (auto& c : x) c = gauss(rng);
          nx = norm_of(x, entry.cloud.norm_kind);
        }
        for (auto& c : x) c /= nx;
        if (map.apply(x).norm() > map.op_norm_bound + 1e-9) ++violations;
      }
    }
  }
  if (violations > 0) ok = false;
  report(6, "embedding lower bound and operator norm", ok,
         std::to_string(violations) + " violations");
}

// ---------------------------------------------------------------- criterion 7

void criterion_7() {
  bool ok = true;
  std::ostringstream d;
  const double delta = 2.0;
  for (const auto& entry : corpus()) {
    const DifferenceSet z = difference_set(entry.cloud);
    const double R = enclosing_radius(z);
    const auto frames = stack_frames(z, R, default_frame_depth(z, R));
    const HomogeneityParams source = fit_corpus(z, R);
    const EmbeddingMap map = build_embedding(entry.cloud, delta, frames);
    const InvarianceCheck check =
        verify_image_invariance(map, entry.cloud, source, delta);
    if (!check.pass) {
      ok = false;
      d << entry.name << ": (a'=" << check.image_params.alpha
        << ", b'=" << check.image_params.beta << ") vs (a=" << source.alpha
        << ", s=" << source.s << ", b=" << source.beta << "); ";
    }
  }
  report(7, "image invariance", ok, d.str());
}

// ---------------------------------------------------------------- criterion 8

void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  const PointCloud cloud = square_grid(7);
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const auto seq =
      make_subspace_sequence(stack_frames(z, R, default_frame_depth(z, R)));
  const Vec x{1.0, 1.0};
  const Eigen::MatrixXd no_offset;
  const std::vector<double> eps_grid = log_spaced(1e-3, 1e-1, 6);

  std::size_t cells = 0, raw_ok = 0, norm_ok = 0;
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::size_t n = 1; n <= 4; ++n) {
      for (double eps : eps_grid) {
        const auto res = verify_lemma_1_6(seq, 1.5, k, x, no_offset, n, eps,
                                          10000, 254 + k * 10 + n);
        ++cells;
        if (res.empirical <= res.bound + 3.0 * res.std_error) ++raw_ok;
        if (res.empirical <= res.bound_normalized) ++norm_ok;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  const bool ok = raw_ok * 100 >= cells * 95 && norm_ok == cells &&
                  elapsed < 300.0;
  std::ostringstream d;
  d << "raw " << raw_ok << "/" << cells << ", normalized " << norm_ok << "/"
    << cells << ", t=" << elapsed << "s";
  report(8, "small-ball Monte-Carlo bound", ok, d.str());
}

// ---------------------------------------------------------------- criterion 9

void criterion_9() {
  HomogeneityParams a;
  a.s = 1.0;
  ExperimentConfig ca;
  ca.delta = 2.0;
  ca.gamma = 1.1;
  const auto ra = check_summability(a, ca);

  HomogeneityParams b;
  b.s = 1.0;
  b.alpha = 1.0;
  b.beta = 1.0;
  ExperimentConfig cb;
  cb.delta = 3.0;
  cb.gamma = 1.5;
  const auto rb = check_summability(b, cb);

  const bool ok = ra.N_required == 4 && rb.N_required == 9;
  std::ostringstream d;
  d << "N_required=" << ra.N_required << "," << rb.N_required
    << " (want 4, 9)";
  report(9, "summability arithmetic", ok, d.str());
}

// --------------------------------------------------------------- criterion 10

struct PrevalenceOutcome {
  bool ok = true;
  std::string detail;
};

PrevalenceOutcome prevalence_for(const std::string& name,
                                 const PointCloud& cloud) {
  PrevalenceOutcome out;
  std::ostringstream d;
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const std::size_t depth = default_frame_depth(z, R);
  const auto seq = make_subspace_sequence(stack_frames(z, R, depth));
  const HomogeneityParams params = fit_corpus(z, R);

  ExperimentConfig cfg;
  cfg.delta = 3.0;
  cfg.gamma = 1.5;
  cfg.trials = 200;
  cfg.seed = 1010;
  const auto summability = check_summability(params, cfg);
  if (summability.N_required == kNRequiredUnbounded) {
    out.ok = false;
    out.detail = name + ": N_required unbounded";
    return out;
  }
  const std::size_t n_req = summability.N_required;

  double rates[2] = {0.0, 0.0};
  int idx = 0;
  for (std::size_t N : {n_req, 2 * n_req}) {
    std::size_t pass = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const ProbeSample L =
          sample_probe(seq, cfg.gamma, N, depth, derive_seed(cfg.seed, t + 1));
      if (verify_wem(L.matrix, cloud, cfg.delta).pass) ++pass;
    }
    rates[idx++] =
        static_cast<double>(pass) / static_cast<double>(cfg.trials);
  }
  if (rates[0] < 0.9) out.ok = false;
  if (rates[1] < rates[0]) out.ok = false;

  // Qn slope against the theoretical exponent, over scales with mass
  cfg.N = n_req;
  const auto sweep = qn_sweep(z, seq, cfg, params, depth);
  std::vector<std::pair<double, double>> mass;
  for (const auto& est : sweep)
    if (est.empirical_measure > 0.0)
      mass.emplace_back(std::log(static_cast<double>(est.n)),
                        std::log(est.empirical_measure));
  const double exponent = qn_exponent(params, cfg.delta, cfg.gamma, cfg.N);
  double slope = -std::numeric_limits<double>::infinity();
  if (mass.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [mx, my] : mass) {
      sx += mx;
      sy += my;
      sxx += mx * mx;
      sxy += mx * my;
    }
    const double m = static_cast<double>(mass.size());
    slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (slope > exponent + 0.5) out.ok = false;
  }
  d << name << ": N_req=" << n_req << " wem=" << rates[0] << "/"
    << rates[1] << " qn_scales_with_mass=" << mass.size();
  if (mass.size() >= 2) d << " slope=" << slope << " exponent=" << exponent;
  out.detail = d.str();
  return out;
}

void criterion_10() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = prevalence_for("interval", interval_grid(101));
  const auto b = prevalence_for("ortho", orthogonal_sequence(64));
  const double elapsed = seconds_since(t0);
  const bool ok = a.ok && b.ok && elapsed < 600.0;
  report(10, "prevalence proxy", ok,
         a.detail + "; " + b.detail + "; t=" + std::to_string(elapsed) + "s");
}

// --------------------------------------------------------------- criterion 11

void criterion_11() {
  const PointCloud cloud = interval_grid(101);
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const std::size_t depth = default_frame_depth(z, R);
  const auto seq = make_subspace_sequence(stack_frames(z, R, depth));
  const double d_b =
      box_counting_estimate(cloud.points, cloud.norm_kind, 0.5, 0.01, 8).value;
  const double k = 4.0;
  const double threshold = (k - d_b) / (k * (1.0 + d_b));
  const double theta = 0.8 * threshold;
  std::size_t pass = 0;
  const std::size_t trials = 200;
  bool admissible = true;
  for (std::size_t t = 0; t < trials; ++t) {
    const ProbeSample L =
        sample_probe(seq, 1.5, 4, depth, derive_seed(1111, t + 1));
    const HolderCheck check = verify_holder(L.matrix, cloud, theta, d_b);
    if (!check.theta_admissible) admissible = false;
    if (check.pass) ++pass;
  }
  const double rate = static_cast<double>(pass) / static_cast<double>(trials);
  const bool ok = rate >= 0.9 && admissible;
  std::ostringstream d;
  d << "d_B=" << d_b << " theta=" << theta << " rate=" << rate;
  report(11, "Hoelder proxy", ok, d.str());
}

// --------------------------------------------------------------- criterion 12

#ifndef ABLIP_CLI_PATH
#define ABLIP_CLI_PATH "ablip_cli"
#endif

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return "<missing:" + path + ">";
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void criterion_12() {
  const char* tmpdir = std::getenv("TMPDIR");
  const std::string base = std::string(tmpdir ? tmpdir : "/tmp") + "/ablip_acc_";
  const std::string cli = ABLIP_CLI_PATH;
  const std::string cloud = base + "cloud.json";
  bool ok = true;

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " 2>/dev/null";
    return std::system(cmd.c_str());
  };

  if (run("gen --shape interval_grid --n 41 --output " + cloud) != 0)
    ok = false;
  const std::vector<std::string> commands = {
      "dim --eps-hi 0.5 --eps-lo 0.02 --input " + cloud,
      "homog --origin --input " + cloud,
      "embed --delta 2 --seed 7 --input " + cloud,
      "probe --gamma 1.5 --k 3 --seed 7 --input " + cloud,
      "prevalence --delta 3 --gamma 1.5 --trials 20 --seed 7 --input " + cloud,
  };
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const std::string r1 = base + "r" + std::to_string(i) + "a.json";
    const std::string r2 = base + "r" + std::to_string(i) + "b.json";
    run(commands[i] + " --output " + r1);
    run(commands[i] + " --output " + r2);
    if (slurp(r1) != slurp(r2) || slurp(r1).empty()) ok = false;
  }
  report(12, "byte-identical reports", ok);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  std::cout << (failures == 0 ? "ALL CRITERIA PASS"
                              : std::to_string(failures) + " CRITERIA FAILED")
            << "\n";
  return failures == 0 ? 0 : 1;
}
