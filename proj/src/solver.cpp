#include "adgm/solver.hpp"

#include "adgm/discretize.hpp"

#include <chrono>
#include <ostream>
#include <random>
#include <span>

namespace adgm {

std::string to_string(Variant variant) { return variant == Variant::ADGM1 ? "adgm1" : "adgm2"; }

Variant parse_variant(const std::string& text) {
  if (text == "adgm1" || text == "ADGM1") return Variant::ADGM1;
  if (text == "adgm2" || text == "ADGM2") return Variant::ADGM2;
  throw std::invalid_argument("unknown variant `" + text + "`");
}

void SolverConfig::validate() const {
  if (rho0 && !(*rho0 > 0.0)) throw ConfigError("rho0 must be positive");
  if (!(beta > 1.0)) throw ConfigError("beta must be greater than 1");
  if (t2 < 1) throw ConfigError("t2 must be at least 1");
  if (t2 > t1) throw ConfigError("t2 must not exceed t1");
  if (eps && !(*eps > 0.0)) throw ConfigError("eps must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
}

std::vector<BlockSet> assign_constraint_sets(int D) {
  if (D < 2) throw std::invalid_argument("assign_constraint_sets: need at least two blocks");
  std::vector<BlockSet> sets;
  for (int d = 1; d <= D; ++d) sets.push_back(d % 2 == 1 ? BlockSet::Rowwise : BlockSet::Colwise);
  return sets;
}

Problem make_problem(const MatchingInstance& instance) {
  instance.validate();
  Problem problem;
  problem.spec = instance.spec;
  problem.potentials = instance.potentials;
  if (problem.potentials.size() == 1) problem.potentials.emplace_back(2, instance.size());
  for (auto& F : problem.potentials) {
    if (instance.sense == Sense::Maximize) F.transform_values([](double v) { return -v; });
    F.canonicalize();
  }
  problem.sets = assign_constraint_sets(problem.order());
  return problem;
}

Eigen::VectorXd potential_gradient(int d, const SolverState& state, const Problem& problem) {
  const std::span<const Eigen::VectorXd> blocks(state.blocks);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(problem.spec.size());
  for (int i = d; i <= problem.order(); ++i) {
    const auto& F = problem.potentials[static_cast<std::size_t>(i - 1)];
    if (F.empty()) continue;
    p += partial_contraction(F, d, blocks.first(static_cast<std::size_t>(d - 1)),
                             blocks.subspan(static_cast<std::size_t>(d), static_cast<std::size_t>(i - d)));
  }
  return p;
}

Eigen::VectorXd compute_c(Variant variant, int d, const SolverState& state, const Problem& problem) {
  const int D = problem.order();
  const double rho = state.rho;
  const Eigen::VectorXd p = potential_gradient(d, state, problem);

  if (d == 1) {
    if (variant == Variant::ADGM1) {
      Eigen::VectorXd sum_x = state.x(2);
      Eigen::VectorXd sum_y = state.y(2);
      for (int j = 3; j <= D; ++j) {
        sum_x += state.x(j);
        sum_y += state.y(j);
      }
      return (sum_x - (sum_y + p) / rho) / static_cast<double>(D - 1);
    }
    return state.x(2) - (state.y(2) + p) / rho;
  }
  if (variant == Variant::ADGM1) return state.x(1) + (state.y(d) - p) / rho;
  if (d == D) return state.x(D - 1) + (state.y(D) - p) / rho;
  return 0.5 * (state.x(d - 1) + state.x(d + 1)) + (state.y(d) - state.y(d + 1) - p) / (2.0 * rho);
}

double residual(const SolverState& state, Variant variant) {
  const int D = static_cast<int>(state.blocks.size());
  auto moved = [&](int d) {
    return (state.blocks[static_cast<std::size_t>(d - 1)] - state.previous[static_cast<std::size_t>(d - 1)])
        .squaredNorm();
  };
  double r = 0.0;
  if (variant == Variant::ADGM1) {
    for (int d = 2; d <= D; ++d) r += (state.x(1) - state.x(d)).squaredNorm();
    r += static_cast<double>(D - 1) * moved(1);
    for (int d = 2; d <= D; ++d) r += moved(d);
  } else {
    for (int d = 2; d <= D; ++d) r += (state.x(d - 1) - state.x(d)).squaredNorm();
    for (int d = 1; d <= D; ++d) r += (d == 1 || d == D ? 1.0 : 2.0) * moved(d);
  }
  return r;
}

void update_multipliers(SolverState& state, Variant variant) {
  const int D = static_cast<int>(state.blocks.size());
  for (int d = 2; d <= D; ++d) {
    const auto& anchor = variant == Variant::ADGM1 ? state.x(1) : state.x(d - 1);
    state.y(d) += state.rho * (anchor - state.x(d));
  }
}

bool adapt_penalty(SolverState& state, const SolverConfig& config) {
  if (state.residual_history.empty()) return false;
  const int k = state.iter - 1;
  state.window_best = std::min(state.window_best, state.residual_history.back());
  if (k < config.t1) return false;
  if (state.last_check < 0) {
    state.reference_best = state.window_best;
    state.window_best = std::numeric_limits<double>::infinity();
    state.last_check = k;
    return false;
  }
  if (k - state.last_check < config.t2) return false;
  const bool stalled = state.window_best >= state.reference_best - 1e-12;
  if (stalled) {
    state.rho *= config.beta;
    state.rho_increases.push_back(k);
  }
  state.reference_best = state.window_best;
  state.window_best = std::numeric_limits<double>::infinity();
  state.last_check = k;
  return stalled;
}

SolverState initial_state(const Problem& problem, const SolverConfig& config) {
  const auto& spec = problem.spec;
  const int D = problem.order();
  SolverState state;
  state.rho = config.initial_rho(spec.size());
  AssignmentVector start;
  if (config.seed) {
    std::mt19937_64 rng(*config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    start.resize(spec.size());
    for (auto& v : start) v = unit(rng);
  } else {
    start = AssignmentVector::Constant(spec.size(), 1.0 / static_cast<double>(std::max(spec.n1, spec.n2)));
  }
  for (int d = 1; d <= D; ++d) {
    if (config.seed) {
      const bool rows = problem.sets[static_cast<std::size_t>(d - 1)] == BlockSet::Rowwise;
      state.blocks.push_back(rows ? project_rowwise(start, spec) : project_colwise(start, spec));
    } else {
      state.blocks.push_back(start);
    }
  }
  state.previous = state.blocks;
  state.multipliers.assign(static_cast<std::size_t>(D - 1), Eigen::VectorXd::Zero(spec.size()));
  return state;
}

double iterate(SolverState& state, const Problem& problem, const SolverConfig& config) {
  const int D = problem.order();
  state.previous = state.blocks;
  for (int d = 1; d <= D; ++d) {
    const Eigen::VectorXd c = compute_c(config.variant, d, state, problem);
    auto& block = state.blocks[static_cast<std::size_t>(d - 1)];
    block = problem.sets[static_cast<std::size_t>(d - 1)] == BlockSet::Rowwise
                ? project_rowwise(c, problem.spec)
                : project_colwise(c, problem.spec);
  }
  update_multipliers(state, config.variant);
  const double r = residual(state, config.variant);
  state.residual_history.push_back(r);
  ++state.iter;
  adapt_penalty(state, config);
  return r;
}

SolverResult solve(const MatchingInstance& instance, const SolverConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = make_problem(instance);
  SolverState state = initial_state(problem, config);
  const double eps = config.threshold(instance.size());

  SolverResult result;
  while (state.iter < config.max_iter) {
    const double r = iterate(state, problem, config);
    if (config.record_trace) {
      result.trace.push_back({state.iter - 1, r, state.rho, energy(instance, state.x(1))});
    }
    if (r <= eps) {
      result.converged = true;
      break;
    }
  }

  result.continuous = state.x(1);
  result.discrete = discretize(result.continuous, instance.spec);
  result.energy_continuous = energy(instance, result.continuous);
  result.energy_discrete = energy(instance, result.discrete);
  result.iterations = state.iter;
  result.residual_trace = std::move(state.residual_history);
  result.rho_increases = std::move(state.rho_increases);
  result.final_rho = state.rho;
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iteration,residual,rho,energy\n";
  const auto old_precision = os.precision(12);
  for (const auto& row : trace) {
    os << row.iteration << ',' << row.residual << ',' << row.rho << ',' << row.energy << '\n';
  }
  os.precision(old_precision);
}

}  // namespace adgm
