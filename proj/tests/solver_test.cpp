#include "adgm/discretize.hpp"
#include "adgm/models.hpp"
#include "adgm/solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using adgm::BlockSet;
using adgm::ConstraintSpec;
using adgm::SideMode;
using adgm::SolverConfig;
using adgm::SolverState;
using adgm::Variant;
using Eigen::VectorXd;

namespace {

ConstraintSpec spec(Eigen::Index n1, Eigen::Index n2, SideMode rows = SideMode::AtMostOne,
                    SideMode cols = SideMode::AtMostOne) {
  ConstraintSpec s;
  s.n1 = n1;
  s.n2 = n2;
  s.row_mode = rows;
  s.col_mode = cols;
  return s;
}

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST(Energy, Examples) {
  auto empty = adgm::make_instance(spec(2, 2), 3, adgm::Sense::Minimize);
  EXPECT_EQ(adgm::energy(empty, VectorXd::Constant(4, 0.3)), 0.0);

  auto unary = adgm::make_instance(spec(1, 1), 1, adgm::Sense::Minimize);
  unary.potentials[0].add({0}, 5.0);
  unary.potentials[0].canonicalize();
  EXPECT_DOUBLE_EQ(adgm::energy(unary, VectorXd::Ones(1)), 5.0);
  EXPECT_THROW(adgm::energy(unary, VectorXd::Ones(2)), std::invalid_argument);
}

TEST(Energy, MatchesDenseEvaluation) {
  std::mt19937_64 rng(7);
  auto inst = adgm::make_instance(spec(2, 3), 3, adgm::Sense::Minimize);
  for (int d = 1; d <= 3; ++d) inst.potentials[static_cast<std::size_t>(d - 1)] = oracle::random_tensor(rng, d, 6, 20);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorXd x = oracle::random_vector(rng, 6, 0.0, 1.0);
    EXPECT_NEAR(adgm::energy(inst, x), oracle::dense_energy(inst, x), 1e-12);
  }
}

TEST(ConstraintSets, Pattern) {
  using enum BlockSet;
  EXPECT_EQ(adgm::assign_constraint_sets(2), (std::vector<BlockSet>{Rowwise, Colwise}));
  EXPECT_EQ(adgm::assign_constraint_sets(3), (std::vector<BlockSet>{Rowwise, Colwise, Rowwise}));
  EXPECT_EQ(adgm::assign_constraint_sets(4), (std::vector<BlockSet>{Rowwise, Colwise, Rowwise, Colwise}));
  EXPECT_THROW(adgm::assign_constraint_sets(1), std::invalid_argument);
}

TEST(ComputeC, ZeroPotentialsCollapse) {
  auto inst = adgm::make_instance(spec(2, 2), 2, adgm::Sense::Minimize);
  const auto problem = adgm::make_problem(inst);
  std::mt19937_64 rng(1);
  auto state = oracle::random_state(rng, problem);
  state.multipliers[0].setZero();
  for (Variant v : {Variant::ADGM1, Variant::ADGM2}) {
    EXPECT_EQ(adgm::compute_c(v, 1, state, problem), state.x(2));
    EXPECT_EQ(adgm::compute_c(v, 2, state, problem), state.x(1));
  }
}

TEST(ComputeC, HandSubstitution) {
  auto inst = adgm::make_instance(spec(1, 2), 2, adgm::Sense::Minimize);
  inst.potentials[1].add({0, 1}, 1.0);
  inst.potentials[1].canonicalize();
  const auto problem = adgm::make_problem(inst);
  SolverState state;
  state.rho = 1.0;
  state.blocks = {vec({0.4, 0.6}), vec({0.3, 0.7})};
  state.previous = state.blocks;
  state.multipliers = {vec({0.1, -0.2})};
  // c_1 = x_2 - (y_2 + F(., x_2)) / rho, with F(., x_2) = (x_2[1], 0).
  const VectorXd c1 = adgm::compute_c(Variant::ADGM1, 1, state, problem);
  EXPECT_NEAR(c1(0), 0.3 - 0.1 - 0.7, 1e-14);
  EXPECT_NEAR(c1(1), 0.7 + 0.2, 1e-14);
  // c_2 = x_1 + (y_2 - F(x_1, .)) / rho, with F(x_1, .) = (0, x_1[0]).
  const VectorXd c2 = adgm::compute_c(Variant::ADGM1, 2, state, problem);
  EXPECT_NEAR(c2(0), 0.4 + 0.1, 1e-14);
  EXPECT_NEAR(c2(1), 0.6 - 0.2 - 0.4, 1e-14);
}

TEST(ComputeC, FiniteDifferenceStationarity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int D = 2 + trial % 2;
    const auto problem = oracle::random_problem(rng, D, 2, 3);
    for (Variant variant : {Variant::ADGM1, Variant::ADGM2}) {
      auto state = oracle::random_state(rng, problem);
      for (int d = 1; d <= D; ++d) {
        const VectorXd c = adgm::compute_c(variant, d, state, problem);
        const VectorXd g = oracle::block_gradient_fd(problem, variant, state, d, c);
        const VectorXd g_old = oracle::block_gradient_fd(problem, variant, state, d, state.x(d));
        EXPECT_LE(g.norm(), 1e-4 * std::max(1.0, g_old.norm())) << "D=" << D << " d=" << d;
        state.blocks[static_cast<std::size_t>(d - 1)] = c;
      }
    }
  }
}

TEST(Residual, Examples) {
  SolverState state;
  state.blocks = {vec({0.5, 0.5}), vec({0.5, 0.5}), vec({0.5, 0.5})};
  state.previous = state.blocks;
  EXPECT_EQ(adgm::residual(state, Variant::ADGM1), 0.0);
  EXPECT_EQ(adgm::residual(state, Variant::ADGM2), 0.0);

  state.blocks = {vec({1.0, 0.0}), vec({0.0, 0.0})};
  state.previous = state.blocks;
  EXPECT_DOUBLE_EQ(adgm::residual(state, Variant::ADGM1), 1.0);
}

TEST(Residual, MatchesExplicitMatrices) {
  std::mt19937_64 rng(17);
  for (int D = 2; D <= 4; ++D) {
    const auto problem = oracle::random_problem(rng, D, 2, 2);
    auto state = oracle::random_state(rng, problem);
    for (auto& p : state.previous) p = oracle::random_vector(rng, 4, 0.0, 1.0);
    for (Variant v : {Variant::ADGM1, Variant::ADGM2}) {
      EXPECT_NEAR(adgm::residual(state, v), oracle::explicit_residual(v, state.blocks, state.previous), 1e-12);
    }
  }
}

TEST(Residual, ZeroIffCoupledAndStill) {
  std::mt19937_64 rng(19);
  const VectorXd x = oracle::random_vector(rng, 6, 0.0, 1.0);
  SolverState state;
  state.blocks = {x, x, x};
  state.previous = state.blocks;
  EXPECT_LE(adgm::residual(state, Variant::ADGM2), 1e-12);
  state.previous[1](0) += 1e-3;
  EXPECT_GT(adgm::residual(state, Variant::ADGM2), 0.0);
  state.previous = state.blocks;
  state.blocks[2](3) += 1e-3;
  EXPECT_GT(adgm::residual(state, Variant::ADGM1), 0.0);
}

TEST(Multipliers, Examples) {
  SolverState state;
  state.rho = 2.0;
  state.blocks = {vec({1.0, 0.0}), vec({0.0, 0.0})};
  state.multipliers = {VectorXd::Zero(2)};
  adgm::update_multipliers(state, Variant::ADGM1);
  EXPECT_EQ(state.y(2), vec({2.0, 0.0}));

  state.blocks = {vec({0.2, 0.8}), vec({0.2, 0.8}), vec({0.2, 0.8})};
  state.multipliers = {vec({1, 2}), vec({3, 4})};
  const auto before = state.multipliers;
  adgm::update_multipliers(state, Variant::ADGM2);
  EXPECT_EQ(state.multipliers, before);
}

TEST(Multipliers, MatchExplicitUpdate) {
  std::mt19937_64 rng(23);
  for (int D = 2; D <= 4; ++D) {
    const auto problem = oracle::random_problem(rng, D, 2, 3);
    for (Variant v : {Variant::ADGM1, Variant::ADGM2}) {
      auto state = oracle::random_state(rng, problem);
      const auto blocks = state.blocks;
      const VectorXd expected = oracle::stack(state.multipliers) +
                                state.rho * oracle::coupling_matrix(v, D, 6) * oracle::stack(state.blocks);
      adgm::update_multipliers(state, v);
      EXPECT_LE((oracle::stack(state.multipliers) - expected).lpNorm<Eigen::Infinity>(), 1e-14);
      EXPECT_EQ(state.blocks, blocks);
    }
  }
}

TEST(AdaptPenalty, ConstantResidualSchedule) {
  SolverConfig config;
  config.rho0 = 0.5;
  SolverState state;
  state.rho = 0.5;
  std::vector<double> rho_trace;
  for (int k = 0; k < 460; ++k) {
    state.residual_history.push_back(1.0);
    ++state.iter;
    adgm::adapt_penalty(state, config);
    rho_trace.push_back(state.rho);
  }
  EXPECT_EQ(state.rho_increases, (std::vector<int>{350, 400, 450}));
  EXPECT_EQ(rho_trace[349], 0.5);
  EXPECT_EQ(rho_trace[350], 1.0);
  EXPECT_EQ(rho_trace[400], 2.0);
  for (std::size_t k = 1; k < rho_trace.size(); ++k) {
    EXPECT_TRUE(rho_trace[k] == rho_trace[k - 1] || rho_trace[k] == 2.0 * rho_trace[k - 1]);
  }
}

TEST(AdaptPenalty, DecreasingResidualKeepsRho) {
  SolverConfig config;
  SolverState state;
  state.rho = 0.01;
  for (int k = 0; k < 2000; ++k) {
    state.residual_history.push_back(1.0 / (1.0 + k));
    ++state.iter;
    adgm::adapt_penalty(state, config);
  }
  EXPECT_EQ(state.rho, 0.01);
  EXPECT_TRUE(state.rho_increases.empty());
}

TEST(Config, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.rho0 = 0.0;
  EXPECT_THROW(c.validate(), adgm::ConfigError);
  c = SolverConfig{};
  c.beta = 1.0;
  EXPECT_THROW(c.validate(), adgm::ConfigError);
  c = SolverConfig{};
  c.t2 = 400;
  EXPECT_THROW(c.validate(), adgm::ConfigError);
  c = SolverConfig{};
  c.eps = -1.0;
  EXPECT_THROW(c.validate(), adgm::ConfigError);
  EXPECT_DOUBLE_EQ(SolverConfig{}.initial_rho(900), 0.9);
  EXPECT_DOUBLE_EQ(SolverConfig{}.threshold(900), 9e-4);

  auto inst = adgm::make_instance(spec(2, 2), 2, adgm::Sense::Minimize);
  c = SolverConfig{};
  c.beta = 0.5;
  EXPECT_THROW(adgm::solve(inst, c), adgm::ConfigError);
  EXPECT_EQ(adgm::parse_variant("adgm2"), Variant::ADGM2);
  EXPECT_THROW(adgm::parse_variant("adgm3"), std::invalid_argument);
}

TEST(Solve, SingleAssignment) {
  auto inst = adgm::make_instance(spec(1, 1, SideMode::ExactlyOne, SideMode::ExactlyOne), 1, adgm::Sense::Minimize);
  inst.potentials[0].add({0}, -3.0);
  inst.potentials[0].canonicalize();
  const auto r = adgm::solve(inst, SolverConfig{});
  EXPECT_EQ(r.discrete, VectorXd::Ones(1));
  EXPECT_DOUBLE_EQ(r.energy_discrete, -3.0);
  EXPECT_TRUE(r.converged);
}

TEST(Solve, IdenticalPointSetsUnderModelC) {
  Eigen::Matrix2Xd pts(2, 3);
  pts << 0.0, 1.0, 0.2, 0.0, 0.1, 1.0;
  const adgm::PointSet p(pts);
  auto inst = adgm::build_pairwise_C(p, p, 0.5, adgm::Sides{SideMode::ExactlyOne, SideMode::ExactlyOne});
  const auto best = adgm::brute_force_optimum(inst);
  for (Variant v : {Variant::ADGM1, Variant::ADGM2}) {
    SolverConfig config;
    config.variant = v;
    const auto r = adgm::solve(inst, config);
    EXPECT_EQ(adgm::map_from_assignment(r.discrete, inst.spec), (std::vector<Eigen::Index>{0, 1, 2}));
    EXPECT_NEAR(r.energy_discrete, best.energy, 1e-12);
  }
}

TEST(Solve, BlocksFeasibleAfterEveryUpdate) {
  std::mt19937_64 rng(29);
  for (int D = 2; D <= 4; ++D) {
    auto problem = oracle::random_problem(rng, D, 3, 4);
    problem.spec.row_mode = SideMode::ExactlyOne;
    for (Variant v : {Variant::ADGM1, Variant::ADGM2}) {
      SolverConfig config;
      config.variant = v;
      auto state = adgm::initial_state(problem, config);
      for (int k = 0; k < 30; ++k) {
        adgm::iterate(state, problem, config);
        for (int d = 1; d <= D; ++d) {
          const bool rows = problem.sets[static_cast<std::size_t>(d - 1)] == BlockSet::Rowwise;
          const double viol = rows ? adgm::row_violation(state.x(d), problem.spec)
                                   : adgm::col_violation(state.x(d), problem.spec);
          EXPECT_LE(viol, 1e-12);
          EXPECT_GE(state.x(d).minCoeff(), 0.0);
        }
      }
    }
  }
}

TEST(Solve, ConvergedImpliesSmallResidualAndConsensus) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const int D = 2 + trial % 2;
    auto problem = oracle::random_problem(rng, D, 3, 3);
    SolverConfig config;
    config.variant = trial % 4 < 2 ? Variant::ADGM1 : Variant::ADGM2;
    const double eps = config.threshold(problem.spec.size());
    auto state = adgm::initial_state(problem, config);
    double r = 0.0;
    while (state.iter < config.max_iter && (r = adgm::iterate(state, problem, config)) > eps) {
    }
    ASSERT_LE(r, eps);
    for (int d = 2; d <= D; ++d) EXPECT_LE((state.x(1) - state.x(d)).norm(), std::sqrt(eps));
  }
}

TEST(Solve, VariantsBitwiseIdenticalAtTwoBlocks) {
  std::mt19937_64 rng(37);
  auto inst = oracle::random_pairwise(rng, spec(3, 4), adgm::Sense::Minimize);
  const auto problem = adgm::make_problem(inst);
  SolverConfig c1, c2;
  c1.variant = Variant::ADGM1;
  c2.variant = Variant::ADGM2;
  auto s1 = adgm::initial_state(problem, c1);
  auto s2 = adgm::initial_state(problem, c2);
  for (int k = 0; k < 50; ++k) {
    EXPECT_EQ(adgm::iterate(s1, problem, c1), adgm::iterate(s2, problem, c2));
    EXPECT_EQ(s1.blocks, s2.blocks);
    EXPECT_EQ(s1.multipliers, s2.multipliers);
  }
}

TEST(Solve, MaximizeReportsNativeEnergy) {
  std::mt19937_64 rng(41);
  auto inst = oracle::random_pairwise(rng, spec(3, 3, SideMode::ExactlyOne, SideMode::ExactlyOne),
                                      adgm::Sense::Maximize);
  const auto r = adgm::solve(inst, SolverConfig{});
  EXPECT_NEAR(r.energy_discrete, oracle::dense_energy(inst, r.discrete), 1e-12);
  EXPECT_TRUE(adgm::feasibility(r.discrete, inst.spec, true).feasible);
}

TEST(Solve, UnaryOnlyIsLifted) {
  auto inst = adgm::make_instance(spec(2, 2, SideMode::ExactlyOne, SideMode::ExactlyOne), 1, adgm::Sense::Minimize);
  inst.potentials[0].add({0}, 1.0);
  inst.potentials[0].add({1}, -1.0);
  inst.potentials[0].add({2}, -1.0);
  inst.potentials[0].add({3}, 1.0);
  inst.potentials[0].canonicalize();
  const auto r = adgm::solve(inst, SolverConfig{});
  EXPECT_EQ(adgm::map_from_assignment(r.discrete, inst.spec), (std::vector<Eigen::Index>{1, 0}));
}

TEST(Solve, SeededInitializationIsDeterministic) {
  std::mt19937_64 rng(43);
  auto inst = oracle::random_pairwise(rng, spec(3, 4), adgm::Sense::Minimize);
  SolverConfig config;
  config.seed = 9;
  const auto a = adgm::solve(inst, config);
  const auto b = adgm::solve(inst, config);
  EXPECT_EQ(a.continuous, b.continuous);
  EXPECT_EQ(a.residual_trace, b.residual_trace);
}

TEST(Solve, TraceCsv) {
  std::mt19937_64 rng(47);
  auto inst = oracle::random_pairwise(rng, spec(2, 3), adgm::Sense::Minimize);
  SolverConfig config;
  config.record_trace = true;
  const auto r = adgm::solve(inst, config);
  ASSERT_EQ(r.trace.size(), static_cast<std::size_t>(r.iterations));
  std::ostringstream os;
  adgm::write_trace_csv(os, r.trace);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "iteration,residual,rho,energy");
}
