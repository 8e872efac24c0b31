#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "deskcech/cochain.hpp"
#include "deskcech/errors.hpp"
#include "oracles.hpp"

using namespace deskcech::cochain;

namespace {

CoefficientBlock coeffs(std::vector<double> v, std::vector<double> a = {}) { return {std::move(v), std::move(a)}; }

double value0(const std::optional<ValueBlock>& v) { return std::get<CoefficientBlock>(*v).values.at(0); }

std::vector<std::vector<bool>> adjacency(const Nerve& n) {
  std::vector<std::vector<bool>> a(std::size_t(n.index_count()), std::vector<bool>(std::size_t(n.index_count()), false));
  for (int i = 0; i < n.index_count(); ++i)
    for (int j = 0; j < n.index_count(); ++j) a[std::size_t(i)][std::size_t(j)] = i != j && n.adjacent(i, j);
  return a;
}

}  // namespace

TEST(SortWithSign, Parity) {
  MultiIndex a{2, 0, 1};
  EXPECT_EQ(sort_with_sign(a), 1);
  EXPECT_EQ(a, (MultiIndex{0, 1, 2}));
  MultiIndex b{1, 0, 2};
  EXPECT_EQ(sort_with_sign(b), -1);
  MultiIndex c{3, 1, 3};
  EXPECT_EQ(sort_with_sign(c), 0);
}

TEST(Cochain, AntisymmetricRead) {
  Cochain c(2);
  c.set({0, 1, 2}, coeffs({3.0}));
  EXPECT_EQ(value0(c.get({0, 1, 2})), 3.0);
  EXPECT_EQ(value0(c.get({1, 0, 2})), -3.0);
  EXPECT_EQ(value0(c.get({2, 0, 1})), 3.0);
  EXPECT_EQ(value0(c.get({0, 2, 1})), -3.0);
  EXPECT_FALSE(c.get({0, 0, 1}).has_value());
  EXPECT_FALSE(c.get({0, 1, 3}).has_value());
}

TEST(Cochain, SetWithOddPermutationStoresNegated) {
  Cochain c(1);
  c.set({4, 2}, coeffs({1.5}));
  EXPECT_EQ(value0(c.get({2, 4})), -1.5);
}

TEST(Coboundary, ConstantZeroCochainIsClosed) {
  const auto nerve = Nerve::from_edges(2, {{0, 1}});
  Cochain c(0);
  c.set({0}, coeffs({1.0}));
  c.set({1}, coeffs({1.0}));
  const auto d = coboundary(c, nerve);
  ASSERT_TRUE(d.get({0, 1}).has_value());
  EXPECT_EQ(value0(d.get({0, 1})), 0.0);
}

TEST(Coboundary, DegreeZeroSignConvention) {
  const auto nerve = Nerve::from_edges(2, {{0, 1}});
  Cochain c(0);
  c.set({0}, coeffs({1.0}));
  c.set({1}, coeffs({5.0}));
  EXPECT_EQ(value0(coboundary(c, nerve).get({0, 1})), 4.0);  // c_j - c_i
}

TEST(Coboundary, SupportOfSingleComponent) {
  const auto nerve = Nerve::from_edges(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
  Cochain c(1);
  c.set({1, 2}, coeffs({1.0}));
  const auto d = coboundary(c, nerve);
  for (const auto& beta : nerve.simplices(2)) {
    const bool contains = std::find(beta.begin(), beta.end(), 1) != beta.end() &&
                          std::find(beta.begin(), beta.end(), 2) != beta.end();
    auto v = d.get(beta);
    const bool nonzero = v && !block_is_zero(*v);
    EXPECT_EQ(contains, nonzero);
  }
}

TEST(Coboundary, MatchesExplicitAlternatingSum) {
  for (std::uint64_t s = 1; s <= 40; ++s) {
    const auto nerve = random_nerve(s, 9, 5, 0.6);
    const auto adj = adjacency(nerve);
    for (int sigma = 0; sigma <= 2; ++sigma) {
      const auto c = random_cochain(nerve, sigma, s * 7 + std::uint64_t(sigma), false, 1);
      oracle::Scalar sc;
      for (const auto& [alpha, v] : c.components()) sc[alpha] = std::get<CoefficientBlock>(v).values[0];
      const auto ref = oracle::delta(adj, sc, sigma);
      const auto got = coboundary(c, nerve);
      for (const auto& [beta, v] : ref) {
        const auto g = got.get(beta);
        const double gv = g ? std::get<CoefficientBlock>(*g).values[0] : 0.0;
        EXPECT_NEAR(gv, v, 1e-14);
      }
    }
  }
}

TEST(Coboundary, MatrixSquaresToZero) {
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const auto nerve = random_nerve(s, 10, 6, 0.7);
    for (int sigma = 0; sigma <= 2; ++sigma) {
      const auto d0 = coboundary_matrix(nerve, sigma);
      const auto d1 = coboundary_matrix(nerve, sigma + 1);
      if (d0.size() == 0 || d1.size() == 0) continue;
      EXPECT_EQ((d1 * d0).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(Coboundary, IntegerDeltaDeltaIsExactlyZero) {
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const auto nerve = random_nerve(s, 10, 8);
    for (int sigma = 0; sigma <= 2; ++sigma) {
      const auto c = random_cochain(nerve, sigma, s + 100, true);
      const auto dd = coboundary(coboundary(c, nerve), nerve);
      for (const auto& [beta, v] : dd.components())
        EXPECT_TRUE(block_is_zero(v));
    }
  }
}

TEST(Coboundary, EmptyBeyondNerveBound) {
  const auto nerve = Nerve::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_EQ(nerve.overlap_bound(), 2);
  Cochain c(2);
  c.set({0, 1, 2}, coeffs({1.0}));
  EXPECT_TRUE(coboundary(c, nerve).empty());
}

TEST(Nerve, ExtensionSetsShrink) {
  const auto nerve = random_nerve(3, 12, 6, 0.7);
  for (const auto& alpha : nerve.simplices(1)) {
    const auto big = nerve.extension_set({alpha[0]});
    for (int j : nerve.extension_set(alpha)) EXPECT_TRUE(std::find(big.begin(), big.end(), j) != big.end());
    EXPECT_LE(int(nerve.extension_set(alpha).size()), nerve.overlap_bound());
  }
  for (const auto& s : nerve.simplices(nerve.overlap_bound() + 1)) (void)s, ADD_FAILURE() << "M+2 clique";
}

TEST(WeightedNorm, Basics) {
  WeightSystem C(1.0);
  Cochain zero(0);
  EXPECT_EQ(weighted_norm(zero, C, 0), 0.0);
  Cochain c(1);
  c.set({0, 1}, coeffs({2.0}));
  WeightSystem half(0.5);
  EXPECT_EQ(weighted_norm(c, half, 0), 1.0);
  EXPECT_DOUBLE_EQ(weighted_norm(c.scaled(-3.0), half, 0), 3.0);
}

TEST(WeightedNorm, NondecreasingInGrade) {
  const auto nerve = random_nerve(4, 8, 4);
  const auto c = random_cochain(nerve, 1, 9, false, 4);
  WeightSystem C(0.7);
  double prev = 0.0;
  for (int n = 0; n < 6; ++n) {
    const double v = weighted_norm(c, C, n);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(WeightDominates, Cases) {
  const auto nerve = Nerve::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_TRUE(weight_dominates(WeightSystem(1.0), WeightSystem(1.0), nerve, 0));
  WeightSystem C(0.5), D(0.5);
  D.set({0, 1}, 0.6);
  EXPECT_FALSE(weight_dominates(C, D, nerve, 0));
}

TEST(WeightDominates, ExponentialWeightsFromCover) {
  const deskcech::covering::Field phi = [](deskcech::covering::PointView x) { return 1.0 + std::abs(x[0]); };
  const auto cover = deskcech::covering::build_cube_cover(phi, 1, 3.0);
  const auto nerve = Nerve::from_cover(cover);
  for (int sigma = 0; sigma <= 1; ++sigma) {
    const auto C = exponential_weights(phi, cover, nerve, sigma);
    const auto D = exponential_weights(phi, cover, nerve, sigma + 1);
    EXPECT_TRUE(weight_dominates(C, D, nerve, sigma));
  }
}

TEST(NormBound, ZeroCochain) {
  const auto nerve = random_nerve(1, 6, 3);
  const auto rep = coboundary_norm_bound_check(Cochain(1), WeightSystem(1.0), WeightSystem(1.0), nerve, 0);
  EXPECT_EQ(rep.lhs, 0.0);
  EXPECT_EQ(rep.rhs, 0.0);
  EXPECT_TRUE(rep.pass);
}

TEST(NormBound, SingleComponentHandCount) {
  const auto nerve = Nerve::from_edges(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 3}});
  Cochain c(1);
  c.set({0, 1}, coeffs({1.0}));
  const auto rep = coboundary_norm_bound_check(c, WeightSystem(1.0), WeightSystem(1.0), nerve, 0);
  // two triangles {0,1,2}, {0,1,3} each pick up |c_01| once
  EXPECT_EQ(rep.lhs, 2.0);
  EXPECT_EQ(rep.rhs, 3.0 * 3.0 * 1.0);
  EXPECT_TRUE(rep.pass);
}

TEST(NormBound, RandomTrials) {
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const auto nerve = random_nerve(s, 12, 1 + int(s % 16));
    const int sigma = int(s % 3);
    const auto c = random_cochain(nerve, sigma, s + 5, false, 3);
    const auto [C, D] = random_dominated_weights(nerve, sigma, s + 9);
    ASSERT_TRUE(weight_dominates(C, D, nerve, sigma));
    for (int n = 0; n < 3; ++n) EXPECT_TRUE(coboundary_norm_bound_check(c, C, D, nerve, n).pass);
  }
}

TEST(NormBound, ViolatedDominanceRejected) {
  const auto nerve = Nerve::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  Cochain c(0);
  c.set({0}, coeffs({1.0}));
  EXPECT_THROW(coboundary_norm_bound_check(c, WeightSystem(0.1), WeightSystem(1.0), nerve, 0),
               deskcech::DomainError);
}

TEST(GammaClass, Cases) {
  using namespace deskcech::covering;
  const Field five = [](PointView) { return 5.0; };
  const auto cover = build_cube_cover(five, 2, 3.0);
  EXPECT_TRUE(gamma_class_check(five, cover, 1.01));
  const Field absx = [](PointView x) { return std::hypot(x[0], x[1]); };
  EXPECT_FALSE(gamma_class_check(absx, cover, 3.0));
}

TEST(GammaClass, OscillationControlledCoverPasses) {
  using namespace deskcech::covering;
  const Field psi = [](PointView x) { return std::exp(std::abs(x[0])); };
  const double gamma = 2.0;
  const std::vector<Box> ex{{{-2.0}, {2.0}}, {{-6.0}, {6.0}}};
  const auto cover = oscillation_controlled_cover(psi, gamma, ex, 3.5);
  EXPECT_TRUE(gamma_class_check(psi, cover, gamma * (1 + 1e-9)));
}

TEST(SampleBlock, NormByGrade) {
  SampleBlock b{{1, 2, 3}, {0, 1, 2}, {1.0, -3.0, 2.0}};
  const ValueBlock v = b;
  EXPECT_EQ(block_norm(v, 0), 1.0);
  EXPECT_EQ(block_norm(v, 1), 3.0);
  EXPECT_EQ(block_norm(v, 5), 3.0);
}
