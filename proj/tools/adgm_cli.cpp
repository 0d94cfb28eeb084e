// Command-line front end: synthetic data, model building, solving, benchmark
// sweeps and the exhaustive oracle.

#include "adgm/discretize.hpp"
#include "adgm/harness.hpp"
#include "adgm/io.hpp"
#include "adgm/models.hpp"
#include "adgm/solver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 1;
constexpr int kRefusal = 2;

struct SolverFlags {
  std::string variant = "adgm1";
  std::optional<double> rho0;
  int t1 = 300;
  int t2 = 50;
  double beta = 2.0;
  std::optional<double> eps;
  int max_iter = 10000;
  std::optional<std::uint64_t> seed;

  adgm::SolverConfig config() const {
    adgm::SolverConfig c;
    c.variant = adgm::parse_variant(variant);
    c.rho0 = rho0;
    c.t1 = t1;
    c.t2 = t2;
    c.beta = beta;
    c.eps = eps;
    c.max_iter = max_iter;
    c.seed = seed;
    return c;
  }
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--variant", f.variant, "adgm1 or adgm2")->check(CLI::IsMember({"adgm1", "adgm2"}));
  app->add_option("--rho0", f.rho0, "initial penalty (default n/1000)");
  app->add_option("--t1", f.t1, "iterations before the penalty may grow");
  app->add_option("--t2", f.t2, "penalty check interval");
  app->add_option("--beta", f.beta, "penalty growth factor");
  app->add_option("--eps", f.eps, "residual threshold (default 1e-6*n)");
  app->add_option("--max-iter", f.max_iter, "iteration cap");
  app->add_option("--seed", f.seed, "random initialization seed");
}

template <typename Stream>
Stream open_file(const fs::path& path) {
  Stream s(path);
  if (!s) throw std::invalid_argument("cannot open " + path.string());
  return s;
}

Eigen::MatrixXd read_matrix(const fs::path& path, Eigen::Index rows, Eigen::Index cols) {
  auto in = open_file<std::ifstream>(path);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> m(i, j))) throw std::invalid_argument("unary matrix in " + path.string() + " is too short");
    }
  }
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph and hypergraph matching by alternating direction methods"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic point-set pair");
  long inliers = 10, outliers = 0;
  double noise = 0.0, rotation = 0.0, scale = 1.0, tx = 0.0, ty = 0.0, extent = 1.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out = ".";
  gen->add_option("--inliers", inliers, "inlier count")->check(CLI::PositiveNumber);
  gen->add_option("--outliers", outliers, "outliers added to the second set")->check(CLI::NonNegativeNumber);
  gen->add_option("--noise", noise, "Gaussian noise sigma");
  gen->add_option("--rotation", rotation, "rotation in radians");
  gen->add_option("--scale", scale, "scale factor");
  gen->add_option("--tx", tx, "translation x");
  gen->add_option("--ty", ty, "translation y");
  gen->add_option("--extent", extent, "coordinate multiplier applied to both sets");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output directory");

  // build
  auto* build = app.add_subcommand("build", "Build a matching instance from point sets");
  std::string p1_path, p2_path, model = "c", build_out = "instance.txt", unary_path, edges1_path, edges2_path,
                                   truth_path, rows_mode, cols_mode;
  adgm::ModelParams params;
  double eta = 0.5;
  std::uint64_t build_seed = 0;
  build->add_option("--p1", p1_path, "first point set")->required();
  build->add_option("--p2", p2_path, "second point set")->required();
  build->add_option("--model", model, "a, b, c or third")->check(CLI::IsMember({"a", "b", "c", "third"}));
  build->add_option("--eta", eta, "weight of the length term (models a, c)");
  build->add_option("--sigma2", params.sigma2, "model b scale");
  build->add_option("--sigma-l", params.a.sigma_l, "model a length scale");
  build->add_option("--sigma-a", params.a.sigma_a, "model a angle scale");
  build->add_option("--unary-offset", params.a.unary_offset, "model a constant added to unaries");
  build->add_option("--unary", unary_path, "model a unary matrix (n1 rows of n2 values)");
  build->add_option("--edges1", edges1_path, "model a edges of the first graph (default Delaunay)");
  build->add_option("--edges2", edges2_path, "model a edges of the second graph (default Delaunay)");
  build->add_option("--knn", params.third.knn, "third-order nearest neighbours");
  build->add_option("--triangles", params.third.triangle_budget, "third-order triangle budget");
  build->add_option("--gamma", params.third.gamma, "third-order kernel width override");
  build->add_option("--seed", build_seed, "triangle sampling seed");
  build->add_option("--truth", truth_path, "ground-truth correspondence file");
  build->add_option("--rows", rows_mode, "exactly_one, at_most_one or unconstrained");
  build->add_option("--cols", cols_mode, "exactly_one, at_most_one or unconstrained");
  build->add_option("--out", build_out, "instance file to write");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file");
  std::string instance_path, solution_out, trace_out;
  SolverFlags solve_flags;
  solve_cmd->add_option("instance", instance_path, "instance file")->required();
  add_solver_flags(solve_cmd, solve_flags);
  solve_cmd->add_option("--out", solution_out, "solution file to write");
  solve_cmd->add_option("--trace", trace_out, "per-iteration trace CSV to write");

  // bench
  auto* bench = app.add_subcommand("bench", "Run an experiment sweep from a config file");
  std::string config_path, bench_out;
  std::optional<std::uint64_t> bench_seed;
  std::vector<std::string> bench_variants;
  bench->add_option("config", config_path, "experiment config (key = value)")->required();
  bench->add_option("--out", bench_out, "output directory (overrides the config)");
  bench->add_option("--seed", bench_seed, "experiment seed (overrides the config)");
  bench->add_option("--variant", bench_variants, "solver variants (override the config)")
      ->check(CLI::IsMember({"adgm1", "adgm2"}));

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum of a small instance");
  std::string oracle_path, oracle_out;
  oracle->add_option("instance", oracle_path, "instance file")->required();
  oracle->add_option("--out", oracle_out, "solution file to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*gen) {
      adgm::Transform transform;
      transform.rotation = rotation;
      transform.scale = scale;
      transform.translation = {tx, ty};
      auto pair = adgm::generate_synthetic(inliers, outliers, noise, transform, gen_seed);
      pair.first.coords *= extent;
      pair.second.coords *= extent;
      fs::create_directories(gen_out);
      auto p1 = open_file<std::ofstream>(fs::path(gen_out) / "points1.txt");
      adgm::write_points(p1, pair.first);
      auto p2 = open_file<std::ofstream>(fs::path(gen_out) / "points2.txt");
      adgm::write_points(p2, pair.second);
      auto truth = open_file<std::ofstream>(fs::path(gen_out) / "truth.txt");
      adgm::write_correspondences(truth, pair.truth);
      std::cout << "wrote " << pair.first.size() << " + " << pair.second.size() << " points to " << gen_out << '\n';
    } else if (*build) {
      auto in1 = open_file<std::ifstream>(p1_path);
      auto in2 = open_file<std::ifstream>(p2_path);
      const adgm::PointSet p = adgm::read_points(in1);
      const adgm::PointSet q = adgm::read_points(in2);
      params.a.eta = params.eta_c = eta;
      params.third.seed = build_seed;
      if (!rows_mode.empty() || !cols_mode.empty()) {
        adgm::Sides sides = adgm::default_sides(p.size(), q.size());
        if (!rows_mode.empty()) sides.rows = adgm::parse_side_mode(rows_mode);
        if (!cols_mode.empty()) sides.cols = adgm::parse_side_mode(cols_mode);
        params.sides = sides;
      }
      adgm::MatchingInstance instance;
      switch (adgm::parse_model(model)) {
        case adgm::ModelKind::A: {
          auto edges = [](const std::string& path, const adgm::PointSet& pts) {
            if (path.empty()) return adgm::delaunay_edges(pts);
            auto in = open_file<std::ifstream>(path);
            return adgm::read_edges(in);
          };
          const Eigen::MatrixXd unary = unary_path.empty() ? Eigen::MatrixXd::Zero(p.size(), q.size())
                                                           : read_matrix(unary_path, p.size(), q.size());
          instance = adgm::build_pairwise_A(p, q, edges(edges1_path, p), edges(edges2_path, q), unary, params.a,
                                            params.sides);
          break;
        }
        case adgm::ModelKind::B:
          instance = adgm::build_pairwise_B(p, q, params.sigma2, params.sides);
          break;
        case adgm::ModelKind::C:
          instance = adgm::build_pairwise_C(p, q, params.eta_c, params.sides);
          break;
        case adgm::ModelKind::Third:
          instance = adgm::build_third_order(p, q, params.third, params.sides);
          break;
      }
      if (!truth_path.empty()) {
        auto in = open_file<std::ifstream>(truth_path);
        instance.ground_truth = adgm::assignment_from_map(adgm::read_correspondences(in, p.size()), instance.spec);
      }
      adgm::save_instance(build_out, instance);
      std::cout << "wrote " << instance.n1() << "x" << instance.n2() << " instance to " << build_out << '\n';
    } else if (*solve_cmd) {
      const auto instance = adgm::load_instance(instance_path);
      adgm::SolverConfig config = solve_flags.config();
      config.record_trace = !trace_out.empty();
      const auto result = adgm::solve(instance, config);
      std::cout.precision(12);
      std::cout << "energy " << result.energy_discrete << "\ncontinuous_energy " << result.energy_continuous
                << "\niterations " << result.iterations << "\nconverged " << (result.converged ? "yes" : "no")
                << "\ntime_s " << result.wall_time << '\n';
      if (!solution_out.empty()) {
        auto out = open_file<std::ofstream>(solution_out);
        adgm::write_solution(out, result, instance.spec);
      }
      if (!trace_out.empty()) {
        auto out = open_file<std::ofstream>(trace_out);
        adgm::write_trace_csv(out, result.trace);
      }
    } else if (*bench) {
      auto config = adgm::load_experiment_config(config_path);
      if (!bench_out.empty()) config.out_dir = bench_out;
      if (bench_seed) config.seed = *bench_seed;
      if (!bench_variants.empty()) {
        const adgm::SolverConfig base = config.solvers.front().config;
        config.solvers.clear();
        for (const auto& v : bench_variants) {
          adgm::SolverConfig s = base;
          s.variant = adgm::parse_variant(v);
          config.solvers.push_back({v, s});
        }
      }
      const auto report = adgm::run_experiment(config);
      adgm::write_summary_csv(std::cout, config.sweep_name, report.summary);
    } else if (*oracle) {
      const auto instance = adgm::load_instance(oracle_path);
      const auto best = adgm::brute_force_optimum(instance);
      std::cout.precision(12);
      std::cout << "energy " << best.energy << "\ncandidates " << best.candidates << '\n';
      if (!oracle_out.empty()) {
        adgm::SolverResult as_result;
        as_result.discrete = best.assignment;
        as_result.continuous = best.assignment;
        as_result.energy_discrete = as_result.energy_continuous = best.energy;
        as_result.converged = true;
        auto out = open_file<std::ofstream>(oracle_out);
        adgm::write_solution(out, as_result, instance.spec);
      }
    }
  } catch (const adgm::OracleRefusal& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kRefusal;
  } catch (const adgm::ConfigError& e) {
    std::cerr << "solver configuration rejected: " << e.what() << '\n';
    return kRefusal;
  } catch (const adgm::Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kRefusal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return 0;
}
