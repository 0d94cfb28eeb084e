#ifndef ADGM_SOLVER_HPP
#define ADGM_SOLVER_HPP

#include "adgm/constraints.hpp"
#include "adgm/instance.hpp"
#include "adgm/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace adgm {

// ADGM1 couples every block to the first one (x_1 = x_d), ADGM2 couples
// consecutive blocks (x_{d-1} = x_d). Both coincide for two blocks.
enum class Variant { ADGM1, ADGM2 };

enum class BlockSet { Rowwise, Colwise };

std::string to_string(Variant variant);
Variant parse_variant(const std::string& text);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
  Variant variant = Variant::ADGM1;
  std::optional<double> rho0;  // n / 1000 when unset
  int t1 = 300;
  int t2 = 50;
  double beta = 2.0;
  std::optional<double> eps;  // 1e-6 * n when unset
  int max_iter = 10000;
  // When set, the blocks start from a seeded random point instead of the
  // uniform vector.
  std::optional<std::uint64_t> seed;
  bool record_trace = false;

  double initial_rho(Eigen::Index n) const { return rho0 ? *rho0 : static_cast<double>(n) / 1000.0; }
  double threshold(Eigen::Index n) const { return eps ? *eps : 1e-6 * static_cast<double>(n); }

  // Throws ConfigError.
  void validate() const;
};

// The solver's working form of an instance: minimization potentials of
// orders 1..D with D >= 2, all canonical, plus the set each block lives in.
struct Problem {
  ConstraintSpec spec;
  std::vector<SparseTensord> potentials;
  std::vector<BlockSet> sets;

  int order() const { return static_cast<int>(potentials.size()); }
};

// Negates Maximize potentials and lifts unary-only instances to two blocks.
Problem make_problem(const MatchingInstance& instance);

struct SolverState {
  std::vector<AssignmentVector> blocks;    // x_1 .. x_D
  std::vector<AssignmentVector> previous;  // blocks before the last iteration
  std::vector<Eigen::VectorXd> multipliers;  // y_2 .. y_D
  double rho = 0.0;
  int iter = 0;  // completed iterations
  std::vector<double> residual_history;
  std::vector<int> rho_increases;  // iterations (0-based) at which rho grew

  // Adaptive penalty bookkeeping.
  double window_best = std::numeric_limits<double>::infinity();
  double reference_best = std::numeric_limits<double>::infinity();
  int last_check = -1;

  Eigen::VectorXd& y(int d) { return multipliers[static_cast<std::size_t>(d - 2)]; }
  const Eigen::VectorXd& y(int d) const { return multipliers[static_cast<std::size_t>(d - 2)]; }
  const AssignmentVector& x(int d) const { return blocks[static_cast<std::size_t>(d - 1)]; }
};

struct TraceRow {
  int iteration = 0;
  double residual = 0.0;
  double rho = 0.0;
  double energy = 0.0;  // energy of x_1 in the instance's sense
};

struct SolverResult {
  AssignmentVector continuous;
  AssignmentVector discrete;
  double energy_continuous = 0.0;
  double energy_discrete = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_trace;
  std::vector<int> rho_increases;
  double final_rho = 0.0;
  std::vector<TraceRow> trace;  // filled when config.record_trace
  double wall_time = 0.0;       // seconds
};

// Odd blocks are row-constrained, even blocks column-constrained.
std::vector<BlockSet> assign_constraint_sets(int D);

// Sum over orders i >= d of the contraction of F^i with mode d open, blocks
// 1..d-1 on the left and d+1..i on the right, taken from state.blocks.
Eigen::VectorXd potential_gradient(int d, const SolverState& state, const Problem& problem);

// Point whose projection onto M_d is the block-d update. Blocks before d must
// already hold their new iterates.
Eigen::VectorXd compute_c(Variant variant, int d, const SolverState& state, const Problem& problem);

// Primal infeasibility plus weighted iterate change of the last iteration.
double residual(const SolverState& state, Variant variant);

void update_multipliers(SolverState& state, Variant variant);

// Reads the latest residual; returns true when rho was multiplied by beta.
bool adapt_penalty(SolverState& state, const SolverConfig& config);

SolverState initial_state(const Problem& problem, const SolverConfig& config);

// One full iteration: block updates 1..D, multipliers, residual, penalty.
// Returns the residual.
double iterate(SolverState& state, const Problem& problem, const SolverConfig& config);

SolverResult solve(const MatchingInstance& instance, const SolverConfig& config);

// CSV with header `iteration,residual,rho,energy`.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace adgm

#endif  // ADGM_SOLVER_HPP
