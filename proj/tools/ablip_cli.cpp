// Command-line front end: synthetic data generation, dimension and
// homogeneity estimation, frame construction, embedding verification, probe
// sampling, and the prevalence experiment sweep. Reports are deterministic
// JSON keyed by (command, config, input digest, seed); timing goes to stderr
// so repeated runs are byte-identical.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ablip/generators.hpp"
#include "ablip/io.hpp"

namespace {

using namespace ablip;

struct CommonOpts {
  std::string input;
  std::string output;
  std::string csv_norm = "euclidean";
  std::uint64_t seed = 0;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ABLIP_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

void emit_report(const CommonOpts& opts, json report) {
  const std::string bytes = report.dump(2) + "\n";
  if (opts.output.empty())
    std::cout << bytes;
  else
    atomic_write(opts.output, bytes);
}

json base_report(const std::string& command, const CommonOpts& opts,
                 const std::string& input_bytes) {
  json j;
  j["command"] = command;
  j["seed"] = opts.seed;
  j["input_digest"] = input_bytes.empty() ? "" : content_digest(input_bytes);
  return j;
}

struct LoadedCloud {
  PointCloud cloud;
  std::string bytes;
};

LoadedCloud load_input(const CommonOpts& opts) {
  std::string bytes = read_file(opts.input);
  PointCloud cloud = load_cloud(opts.input, norm_kind_from_string(opts.csv_norm));
  return {std::move(cloud), std::move(bytes)};
}

void write_tsv(const std::string& path,
               const std::vector<std::pair<double, double>>& rows) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [a, b] : rows) out << a << '\t' << b << '\n';
  atomic_write(path, out.str());
}

int run_gen(const CommonOpts& opts, const GeneratorSpec& spec) {
  const PointCloud cloud = generate(spec);
  json j = cloud_to_json(cloud);
  emit_report(opts, j);
  return 0;
}

int run_dim(const CommonOpts& opts, double eps_hi, double eps_lo,
            std::size_t steps) {
  auto [cloud, bytes] = load_input(opts);
  const auto est =
      box_counting_estimate(cloud.points, cloud.norm_kind, eps_hi, eps_lo, steps);
  json j = base_report("dim", opts, bytes);
  j["config"] = {{"eps_hi", eps_hi}, {"eps_lo", eps_lo}, {"steps", steps}};
  j["dimension"] = dimension_to_json(est);
  emit_report(opts, j);
  return 0;
}

int run_homog(const CommonOpts& opts, bool at_origin, std::size_t depth) {
  auto [cloud, bytes] = load_input(opts);
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const auto grid = dyadic_homogeneity_grid(z, R, depth);
  const auto params = fit_homogeneity(z, at_origin, grid);
  json j = base_report("homog", opts, bytes);
  j["config"] = {{"origin", at_origin}, {"depth", depth}, {"R", R}};
  j["homogeneity"] = homogeneity_to_json(params);
  emit_report(opts, j);
  return params.residual >= 0.0 ? 0 : 1;
}

int run_frames(const CommonOpts& opts, std::size_t n_max) {
  auto [cloud, bytes] = load_input(opts);
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const std::size_t depth = n_max > 0 ? n_max : default_frame_depth(z, R);
  const auto frames = stack_frames(z, R, depth);
  json j = base_report("frames", opts, bytes);
  j["config"] = {{"n_max", depth}, {"R", R}};
  j["frames"] = frames_to_json(frames);
  emit_report(opts, j);
  return 0;
}

int run_embed(const CommonOpts& opts, double delta, std::size_t depth) {
  auto [cloud, bytes] = load_input(opts);
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const std::size_t n_max = depth > 0 ? depth : default_frame_depth(z, R);
  const auto frames = stack_frames(z, R, n_max);
  const auto source = fit_homogeneity(z, true, dyadic_homogeneity_grid(z, R));
  EmbeddingMap map = build_embedding(cloud, delta, frames);
  map.hypothesis_met = delta > (1.0 + source.alpha + source.beta) / 2.0;
  const auto lower = verify_lower_bound(map, cloud);
  const auto invariance = verify_image_invariance(map, cloud, source, delta);

  json j = base_report("embed", opts, bytes);
  j["config"] = {{"delta", delta}, {"n_max", n_max}, {"R", R}};
  j["hypothesis_met"] = map.hypothesis_met;
  j["op_norm_bound"] = map.op_norm_bound;
  j["source_homogeneity"] = homogeneity_to_json(source);
  j["lower_bound"] = distortion_to_json(lower);
  j["image_homogeneity"] = homogeneity_to_json(invariance.image_params);
  j["invariance_pass"] = invariance.pass;
  emit_report(opts, j);
  return (lower.violations == 0 && invariance.pass) ? 0 : 1;
}

int run_probe(const CommonOpts& opts, double gamma, std::size_t k,
              std::size_t n_max) {
  auto [cloud, bytes] = load_input(opts);
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const std::size_t depth = n_max > 0 ? n_max : default_frame_depth(z, R);
  const auto seq = make_subspace_sequence(stack_frames(z, R, depth));
  const auto sample = sample_probe(seq, gamma, k, depth, opts.seed);
  json j = base_report("probe", opts, bytes);
  j["config"] = {{"gamma", gamma}, {"k", k}, {"n_max", depth}};
  j["probe"] = probe_to_json(sample);
  emit_report(opts, j);
  return 0;
}

int run_lemma16(const CommonOpts& opts, double gamma, std::size_t k,
                std::size_t n, double eps, std::size_t trials) {
  auto [cloud, bytes] = load_input(opts);
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const auto seq =
      make_subspace_sequence(stack_frames(z, R, default_frame_depth(z, R)));
  // probe the farthest point from the origin; it has the strongest response
  const Vec* x = &cloud.points.front();
  double best = -1.0;
  for (const auto& p : cloud.points) {
    const double np = norm_of(p, cloud.norm_kind);
    if (np > best) {
      best = np;
      x = &p;
    }
  }
  const auto result = verify_lemma_1_6(seq, gamma, k, *x, Eigen::MatrixXd(), n,
                                       eps, trials, opts.seed);
  json j = base_report("lemma16", opts, bytes);
  j["config"] = {{"gamma", gamma}, {"k", k},        {"n", n},
                 {"eps", eps},     {"trials", trials}};
  j["empirical"] = result.empirical;
  j["bound"] = result.bound;
  j["bound_normalized"] = result.bound_normalized;
  j["std_error"] = result.std_error;
  emit_report(opts, j);
  return result.empirical <= result.bound + 3.0 * result.std_error ? 0 : 1;
}

int run_prevalence(const CommonOpts& opts, double delta, double gamma,
                   std::size_t N, double theta, std::size_t trials,
                   const std::string& plot_prefix) {
  auto [cloud, bytes] = load_input(opts);
  const DifferenceSet z = difference_set(cloud);
  const double R = enclosing_radius(z);
  const std::size_t depth = default_frame_depth(z, R);
  const auto frames = stack_frames(z, R, depth);
  const auto seq = make_subspace_sequence(frames);
  const auto params = fit_homogeneity(z, true, dyadic_homogeneity_grid(z, R));
  const auto dim = box_counting_estimate(z.elements, z.norm_kind, R / 4.0,
                                         min_nonzero_norm(z), 8);

  ExperimentConfig cfg;
  cfg.delta = delta;
  cfg.gamma = gamma;
  cfg.theta = theta;
  cfg.trials = trials;
  cfg.seed = opts.seed;
  const auto summability = check_summability(params, cfg);
  cfg.N = N > 0 ? N
                : (summability.N_required == kNRequiredUnbounded
                       ? 4
                       : summability.N_required);

  const auto estimates = qn_sweep(z, seq, cfg, params, depth);

  std::size_t wem_pass = 0, holder_pass = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto L = sample_probe(seq, gamma, cfg.N, depth,
                                derive_seed(cfg.seed, t + 1));
    if (verify_wem(L.matrix, cloud, delta).pass) ++wem_pass;
    if (verify_holder(L.matrix, cloud, theta, dim.value).pass) ++holder_pass;
  }

  json j = base_report("prevalence", opts, bytes);
  j["config"] = {{"delta", delta},   {"gamma", gamma}, {"N", cfg.N},
                 {"theta", theta},   {"trials", trials}};
  j["homogeneity"] = homogeneity_to_json(params);
  j["box_dimension"] = dimension_to_json(dim);
  j["summability"] = {
      {"exponent", summability.exponent},
      {"exponent_full", summability.exponent_full},
      {"summable", summability.summable},
      {"N_required", summability.N_required == kNRequiredUnbounded
                         ? json("inf")
                         : json(summability.N_required)}};
  j["qn"] = qn_to_json(estimates);
  j["wem_pass_rate"] =
      static_cast<double>(wem_pass) / static_cast<double>(trials);
  j["holder_pass_rate"] =
      static_cast<double>(holder_pass) / static_cast<double>(trials);
  emit_report(opts, j);

  if (!plot_prefix.empty()) {
    std::vector<std::pair<double, double>> qn_rows;
    for (const auto& e : estimates)
      if (e.empirical_measure > 0.0)
        qn_rows.emplace_back(std::log(static_cast<double>(e.n)),
                             std::log(e.empirical_measure));
    write_tsv(plot_prefix + "_qn.tsv", qn_rows);
  }
  const bool ok = j["wem_pass_rate"].get<double>() >= 0.9;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"almost bi-Lipschitz embedding lab"};
  app.require_subcommand(1);

  CommonOpts opts;
  opts.seed = default_seed();

  GeneratorSpec spec;
  double eps_hi = 0.5, eps_lo = 0.01, delta = 2.0, gamma = 1.5, eps = 0.01,
         theta = 0.2;
  std::size_t steps = 8, depth = 0, n_max = 0, k = 1, n_scale = 1, trials = 1000,
              N = 0;
  bool at_origin = false;
  std::string plot_prefix;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input)
      cmd->add_option("--input", opts.input, "input cloud (json or csv)")
          ->required();
    cmd->add_option("--output", opts.output, "report path (default stdout)");
    cmd->add_option("--norm", opts.csv_norm, "norm for csv inputs");
    cmd->add_option("--seed", opts.seed, "base random seed");
  };

  auto* gen = app.add_subcommand("gen", "generate a synthetic cloud");
  gen->add_option("--shape", spec.shape, "shape name")->required();
  gen->add_option("--n", spec.n, "interval point count");
  gen->add_option("--side", spec.side, "square grid side");
  gen->add_option("--depth", spec.depth, "cantor depth");
  gen->add_option("--k", spec.k, "orthogonal sequence length");
  gen->add_option("--decay", spec.decay, "orthogonal sequence decay");
  gen->add_option("--clusters", spec.clusters, "cluster count");
  gen->add_option("--per-cluster", spec.per_cluster, "points per cluster");
  add_common(gen, false);

  auto* dim = app.add_subcommand("dim", "box-counting dimension estimate");
  dim->add_option("--eps-hi", eps_hi, "largest scale");
  dim->add_option("--eps-lo", eps_lo, "smallest scale");
  dim->add_option("--steps", steps, "scale count");
  add_common(dim, true);

  auto* homog = app.add_subcommand("homog", "homogeneity envelope fit");
  homog->add_flag("--origin", at_origin, "fit at the origin of X-X");
  homog->add_option("--depth", depth, "dyadic grid depth")->default_val(12);
  add_common(homog, true);

  auto* frames = app.add_subcommand("frames", "scale frame construction");
  frames->add_option("--n-max", n_max, "frame depth (0 = auto)");
  add_common(frames, true);

  auto* embed = app.add_subcommand("embed", "build and verify the embedding");
  embed->add_option("--delta", delta, "log-correction exponent");
  embed->add_option("--n-max", n_max, "frame depth (0 = auto)");
  add_common(embed, true);

  auto* probe = app.add_subcommand("probe", "draw a probe-space sample");
  probe->add_option("--gamma", gamma, "scale decay exponent (> 1)");
  probe->add_option("--k", k, "target dimension");
  probe->add_option("--n-max", n_max, "scale truncation (0 = auto)");
  add_common(probe, true);

  auto* lemma16 = app.add_subcommand("lemma16", "small-ball bound check");
  lemma16->add_option("--gamma", gamma, "scale decay exponent (> 1)");
  lemma16->add_option("--k", k, "target dimension");
  lemma16->add_option("--n", n_scale, "scale index");
  lemma16->add_option("--eps", eps, "small-ball radius");
  lemma16->add_option("--trials", trials, "Monte-Carlo trials");
  add_common(lemma16, true);

  auto* prevalence = app.add_subcommand("prevalence", "prevalence proxy sweep");
  prevalence->add_option("--delta", delta, "log-correction exponent");
  prevalence->add_option("--gamma", gamma, "scale decay exponent (> 1)");
  prevalence->add_option("--N", N, "target dimension (0 = from summability)");
  prevalence->add_option("--theta", theta, "Hoelder exponent");
  prevalence->add_option("--trials", trials, "probe samples");
  prevalence->add_option("--plot-prefix", plot_prefix, "TSV plot data prefix");
  add_common(prevalence, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  int rc = 2;
  try {
    if (gen->parsed()) rc = run_gen(opts, spec);
    else if (dim->parsed()) rc = run_dim(opts, eps_hi, eps_lo, steps);
    else if (homog->parsed()) rc = run_homog(opts, at_origin, depth);
    else if (frames->parsed()) rc = run_frames(opts, n_max);
    else if (embed->parsed()) rc = run_embed(opts, delta, n_max);
    else if (probe->parsed()) rc = run_probe(opts, gamma, k, n_max);
    else if (lemma16->parsed())
      rc = run_lemma16(opts, gamma, k, n_scale, eps, trials);
    else if (prevalence->parsed())
      rc = run_prevalence(opts, delta, gamma, N, theta, trials, plot_prefix);
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "assertion failure: " << e.what() << "\n";
    return 1;
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  std::cerr << "wall_time_ms " << elapsed << "\n";
  return rc;
}
