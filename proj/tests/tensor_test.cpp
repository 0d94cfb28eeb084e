#include "adgm/tensor.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using adgm::SparseTensord;
using Eigen::VectorXd;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

VectorXd dense_vector(const SparseTensord& F) {
  VectorXd v = VectorXd::Zero(F.dim());
  for (std::size_t e = 0; e < F.size(); ++e) v(F.index(e)[0]) += F.value(e);
  return v;
}

}  // namespace

TEST(Tensor, MultilinearFormExamples) {
  SparseTensord F(2, 2);
  F.add({0, 0}, 1.0);
  F.add({0, 1}, 2.0);
  F.canonicalize();
  std::vector<VectorXd> xs{VectorXd::Ones(2), VectorXd::Unit(2, 0)};
  EXPECT_DOUBLE_EQ(adgm::multilinear_form(F, std::span<const VectorXd>(xs)), 1.0);
  xs[0].setZero();
  EXPECT_EQ(adgm::multilinear_form(F, std::span<const VectorXd>(xs)), 0.0);
}

TEST(Tensor, MultilinearFormDimensionMismatchNamesMode) {
  SparseTensord F(2, 3);
  std::vector<VectorXd> xs{VectorXd::Ones(3), VectorXd::Ones(2)};
  try {
    adgm::multilinear_form(F, std::span<const VectorXd>(xs));
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("mode 2"), std::string::npos) << e.what();
  }
}

TEST(Tensor, AddValidatesIndices) {
  SparseTensord F(2, 3);
  EXPECT_THROW(F.add({0, 3}, 1.0), std::invalid_argument);
  EXPECT_THROW(F.add({0}, 1.0), std::invalid_argument);
  EXPECT_THROW(F.add({-1, 0}, 1.0), std::invalid_argument);
}

TEST(Tensor, ThirdOrderAgainstDenseEnumeration) {
  std::mt19937_64 rng(3);
  const auto F = oracle::random_tensor(rng, 3, 2, 4);
  const auto T = oracle::densify(F);
  std::vector<VectorXd> xs;
  for (int m = 0; m < 3; ++m) xs.push_back(oracle::random_vector(rng, 2));
  double brute = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) brute += T.cells[static_cast<std::size_t>(i * 4 + j * 2 + k)] * xs[0](i) * xs[1](j) * xs[2](k);
  EXPECT_NEAR(adgm::multilinear_form(F, std::span<const VectorXd>(xs)), brute, 1e-14);
}

TEST(Tensor, ModeProductExamples) {
  SparseTensord F(2, 2);
  F.add({0, 1}, 3.0);
  F.canonicalize();
  VectorXd v(2);
  v << 0.0, 2.0;
  const auto G = adgm::mode_product(F, 2, v);
  ASSERT_EQ(G.order(), 1);
  ASSERT_EQ(G.size(), 1u);
  EXPECT_EQ(G.index(0)[0], 0);
  EXPECT_DOUBLE_EQ(G.value(0), 6.0);

  EXPECT_TRUE(adgm::mode_product(F, 1, VectorXd::Zero(2)).empty());
  EXPECT_THROW(adgm::mode_product(F, 3, v), std::invalid_argument);
  EXPECT_THROW(adgm::mode_product(F, 0, v), std::invalid_argument);
}

TEST(Tensor, ModeProductAgainstDense) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto F = oracle::random_tensor(rng, 3, 4, 5);
    const VectorXd v = oracle::random_vector(rng, 4);
    const auto G = adgm::mode_product(F, 2, v);
    const auto expected = oracle::dense_mode_product(oracle::densify(F), 2, v);
    const auto got = oracle::densify(G);
    ASSERT_EQ(got.cells.size(), expected.cells.size());
    for (std::size_t c = 0; c < got.cells.size(); ++c) EXPECT_NEAR(got.cells[c], expected.cells[c], 1e-14);
  }
}

TEST(Tensor, PartialContractionExamples) {
  SparseTensord F1(1, 3);
  F1.add({2}, 4.0);
  F1.add({0}, -1.0);
  F1.canonicalize();
  const VectorXd g = adgm::partial_contraction<double>(F1, 1, {}, {});
  EXPECT_EQ(g, dense_vector(F1));

  SparseTensord F2(2, 2);
  F2.add({0, 0}, 1.0);
  F2.add({1, 1}, 2.0);
  F2.canonicalize();
  std::vector<VectorXd> right{VectorXd::Ones(2)};
  const VectorXd h = adgm::partial_contraction<double>(F2, 1, {}, right);
  EXPECT_DOUBLE_EQ(h(0), 1.0);
  EXPECT_DOUBLE_EQ(h(1), 2.0);

  std::vector<VectorXd> two{VectorXd::Ones(2), VectorXd::Ones(2)};
  EXPECT_THROW(adgm::partial_contraction<double>(F2, 1, {}, two), std::invalid_argument);
  EXPECT_THROW(adgm::partial_contraction<double>(F2, 1, right, right), std::invalid_argument);
}

TEST(Tensor, PartialContractionAgainstDense) {
  std::mt19937_64 rng(11);
  const auto F = oracle::random_tensor(rng, 3, 5, 30);
  const auto T = oracle::densify(F);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<VectorXd> xs{oracle::random_vector(rng, 5), VectorXd::Zero(5), oracle::random_vector(rng, 5)};
    const VectorXd expected = oracle::dense_partial(T, 2, xs);
    std::vector<VectorXd> left{xs[0]}, right{xs[2]};
    const VectorXd got = adgm::partial_contraction<double>(F, 2, left, right);
    EXPECT_LE((got - expected).lpNorm<Eigen::Infinity>(), 1e-13);
  }
}

TEST(Tensor, NonCanonicalFallbackMatchesCanonical) {
  std::mt19937_64 rng(17);
  auto F = oracle::random_tensor(rng, 3, 4, 20);
  auto G = F;
  G.add({1, 2, 3}, 0.25);
  G.add({1, 2, 3}, -0.25);
  ASSERT_FALSE(G.is_canonical());
  std::vector<VectorXd> left{oracle::random_vector(rng, 4)}, right{oracle::random_vector(rng, 4)};
  const VectorXd a = adgm::partial_contraction<double>(F, 2, left, right);
  const VectorXd b = adgm::partial_contraction<double>(G, 2, left, right);
  EXPECT_LE((a - b).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(Tensor, MultilinearityProperty) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> alpha_dist(-2.0, 2.0);
  for (int order = 1; order <= 4; ++order) {
    const auto F = oracle::random_tensor(rng, order, 6, 40);
    for (int slot = 0; slot < order; ++slot) {
      std::vector<VectorXd> xs;
      for (int m = 0; m < order; ++m) xs.push_back(oracle::random_vector(rng, 6));
      const VectorXd u = oracle::random_vector(rng, 6), v = oracle::random_vector(rng, 6);
      const double alpha = alpha_dist(rng);
      auto eval = [&](const VectorXd& z) {
        auto ys = xs;
        ys[static_cast<std::size_t>(slot)] = z;
        return adgm::multilinear_form(F, std::span<const VectorXd>(ys));
      };
      EXPECT_LE(rel(eval(alpha * u + v), alpha * eval(u) + eval(v)), 1e-12);
    }
  }
}

TEST(Tensor, ContractionConsistentWithForm) {
  std::mt19937_64 rng(29);
  for (int order = 1; order <= 4; ++order) {
    const auto F = oracle::random_tensor(rng, order, 7, 50);
    std::vector<VectorXd> xs;
    for (int m = 0; m < order; ++m) xs.push_back(oracle::random_vector(rng, 7));
    const double value = adgm::multilinear_form(F, std::span<const VectorXd>(xs));
    for (int d = 1; d <= order; ++d) {
      std::span<const VectorXd> all(xs);
      const VectorXd g = adgm::partial_contraction<double>(F, d, all.first(static_cast<std::size_t>(d - 1)),
                                                           all.subspan(static_cast<std::size_t>(d)));
      EXPECT_LE(rel(g.dot(xs[static_cast<std::size_t>(d - 1)]), value), 1e-12);
    }
  }
}

TEST(Tensor, ModeProductChainReproducesForm) {
  std::mt19937_64 rng(31);
  for (int order = 2; order <= 4; ++order) {
    const auto F = oracle::random_tensor(rng, order, 5, 40);
    std::vector<VectorXd> xs;
    for (int m = 0; m < order; ++m) xs.push_back(oracle::random_vector(rng, 5));
    SparseTensord G = F;
    for (int m = 0; m < order - 1; ++m) G = adgm::mode_product(G, 1, xs[static_cast<std::size_t>(m)]);
    ASSERT_EQ(G.order(), 1);
    const double chained = dense_vector(G).dot(xs.back());
    EXPECT_LE(rel(chained, adgm::multilinear_form(F, std::span<const VectorXd>(xs))), 1e-12);
  }
}

TEST(Tensor, SymmetrizeExamples) {
  SparseTensord F(2, 2);
  F.add({0, 1}, 2.0);
  F.canonicalize();
  const auto S = adgm::symmetrize(F);
  ASSERT_EQ(S.size(), 2u);
  EXPECT_DOUBLE_EQ(S.value(0), 1.0);
  EXPECT_DOUBLE_EQ(S.value(1), 1.0);
  EXPECT_EQ(adgm::symmetrize(S), S);

  SparseTensord T(3, 3);
  T.add({0, 1, 2}, 6.0);
  T.canonicalize();
  const auto U = adgm::symmetrize(T);
  ASSERT_EQ(U.size(), 6u);
  for (std::size_t e = 0; e < U.size(); ++e) EXPECT_DOUBLE_EQ(U.value(e), 1.0);
}

TEST(Tensor, SymmetrizePreservesDiagonalForm) {
  std::mt19937_64 rng(37);
  for (int order = 1; order <= 4; ++order) {
    const auto F = oracle::random_tensor(rng, order, 6, 30);
    const VectorXd x = oracle::random_vector(rng, 6);
    EXPECT_LE(rel(adgm::homogeneous_form(F, x), adgm::homogeneous_form(adgm::symmetrize(F), x)), 1e-12);
  }
}

TEST(Tensor, CanonicalizeMergesDropsAndIsIdempotent) {
  SparseTensord F(2, 3);
  F.add({2, 1}, 1.5);
  F.add({0, 0}, 1.0);
  F.add({2, 1}, -1.5);
  F.add({0, 0}, 2.0);
  F.canonicalize();
  ASSERT_EQ(F.size(), 1u);
  EXPECT_DOUBLE_EQ(F.value(0), 3.0);
  auto G = F;
  G.canonicalize();
  EXPECT_EQ(F, G);
}

TEST(Tensor, TextRoundTrip) {
  std::mt19937_64 rng(41);
  const auto F = oracle::random_tensor(rng, 3, 6, 25);
  std::stringstream ss;
  adgm::write_tensor(ss, F);
  const auto G = adgm::read_tensor<double>(ss);
  EXPECT_EQ(F, G);
}
