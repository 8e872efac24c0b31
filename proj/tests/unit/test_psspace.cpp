#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "deskcech/psspace.hpp"
#include "oracles.hpp"

using namespace deskcech::psspace;

TEST(PowerNorm, UnitAndZero) {
  ExponentSequence a({0.0, 1.0, 2.0});
  EXPECT_DOUBLE_EQ(power_norm({0.0, 0.0, 1.0}, a, 3.0), std::exp(6.0));
  EXPECT_EQ(power_norm({0.0, 0.0, 0.0}, a, 3.0), 0.0);
}

TEST(PowerNorm, DecayingVectorSumsDirectly) {
  const auto a = ExponentSequence::root(2, 200);
  const double rho = 1.5;
  Coefficients x;
  double ref = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    x.emplace_back(std::exp(-(rho + 1.0) * a[k]), 0.0);
    ref += std::exp(-a[k]);
  }
  EXPECT_NEAR(power_norm(x, a, rho), ref, 1e-12 * ref);
}

TEST(PowerNorm, NormLawsAndMonotone) {
  const auto a = ExponentSequence::root(1, 20);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    Coefficients x(20), y(20);
    for (int k = 0; k < 20; ++k) {
      x[std::size_t(k)] = {g(rng), g(rng)};
      y[std::size_t(k)] = {g(rng), g(rng)};
    }
    Coefficients s(20);
    for (int k = 0; k < 20; ++k) s[std::size_t(k)] = x[std::size_t(k)] + y[std::size_t(k)];
    const double rho = 0.3;
    const double nx = power_norm(x, a, rho), ny = power_norm(y, a, rho);
    EXPECT_LE(power_norm(s, a, rho), (nx + ny) * (1 + 1e-12));
    Coefficients lx(x);
    for (auto& v : lx) v *= std::complex<double>(-2.0, 1.0);
    EXPECT_NEAR(power_norm(lx, a, rho), std::sqrt(5.0) * nx, 1e-12 * nx);
    EXPECT_LE(nx, power_norm(x, a, rho + 0.1));
  }
}

TEST(Dn, UnitVectorRatioExactlyOne) {
  const auto a = ExponentSequence::root(1, 8);
  Coefficients e(8, 0.0);
  e[3] = 1.0;
  const auto c = dn_standard_constant({e}, weighted_l2(a), 1, 5);
  for (double v : c.constants) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Dn, RandomVectorsAtMostOne) {
  const auto a = ExponentSequence::root(2, 15);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<Coefficients> xs;
  for (int t = 0; t < 2000; ++t) {
    Coefficients x(15);
    for (auto& v : x) v = {g(rng), g(rng)};
    xs.push_back(x);
  }
  xs.push_back(Coefficients(15, 0.0));
  const auto c = dn_standard_constant(xs, weighted_l2(a), 1, 6);
  EXPECT_EQ(c.skipped, 1u);
  for (double v : c.constants) EXPECT_LE(v, 1.0 + 1e-9);
  const auto d = dn_standard_constant(xs, weighted_l2_dual(a), 1, 6);
  for (double v : d.constants) EXPECT_LE(v, 1.0 + 1e-9);
  // l1 grading: finite, reported only
  const auto l1 = dn_standard_constant(xs, weighted_l1(a), 1, 6);
  for (double v : l1.constants) EXPECT_TRUE(std::isfinite(v));
}

TEST(Monomials, CountsMatchBruteForce) {
  for (int N = 1; N <= 4; ++N) {
    const int m_max = N <= 2 ? 30 : (N == 3 ? 20 : 12);
    const auto e = enumerate_monomials(N, std::size_t(binomial(std::uint64_t(N + m_max), std::uint64_t(m_max))));
    for (int m = 0; m <= m_max; ++m) {
      EXPECT_EQ(e.counts[std::size_t(m)], oracle::monomials_up_to(N, m)) << N << " " << m;
      EXPECT_EQ(double(e.counts[std::size_t(m)]), oracle::pascal(N + m, m));
    }
  }
}

TEST(Monomials, Examples) {
  const auto one = enumerate_monomials(1, 5);
  for (std::size_t m = 0; m < one.counts.size(); ++m) EXPECT_EQ(one.counts[m], m + 1);
  EXPECT_EQ(enumerate_monomials(2, 6).counts[2], 6u);
  EXPECT_EQ(binomial(6, 3), 20u);
  EXPECT_EQ(binomial_big(60, 30), "118264581564861424");
}

TEST(Monomials, OrderedByDegreeThenLex) {
  const auto e = enumerate_monomials(3, 84);
  for (std::size_t k = 1; k < e.size(); ++k) {
    const int d0 = total_degree(e.monomials[k - 1]), d1 = total_degree(e.monomials[k]);
    EXPECT_LE(d0, d1);
    if (d0 == d1) EXPECT_TRUE(std::lexicographical_compare(e.monomials[k - 1].begin(), e.monomials[k - 1].end(),
                                                          e.monomials[k].begin(), e.monomials[k].end()) ||
                              std::lexicographical_compare(e.monomials[k].begin(), e.monomials[k].end(),
                                                           e.monomials[k - 1].begin(), e.monomials[k - 1].end()));
  }
}

TEST(Ratios, OneVariable) {
  const auto st = monomial_ratio_study(1, 10000);
  EXPECT_TRUE(st.sandwich_holds);
  EXPECT_LT(st.final_gap, 1e-3);
}

TEST(Ratios, TwoVariablesNearRootTwo) {
  const auto st = monomial_ratio_study(2, 10000);
  EXPECT_TRUE(st.sandwich_holds);
  EXPECT_NEAR(st.limit, std::sqrt(2.0), 1e-15);
  EXPECT_LT(st.final_gap / st.limit, 0.05);
  for (std::size_t m = 6; m < st.bound_gap.size(); ++m) EXPECT_LE(st.bound_gap[m], st.bound_gap[m - 1]);
}

TEST(Tame, MonomialB1ExactlyOne) {
  const auto e = enumerate_monomials(2, 66);
  const auto table = monomial_norm_table(e, 6);
  const auto rep = tame_basis_check(table, degree_sequence(e), 1.0, 0.0);
  EXPECT_TRUE(rep.b1_bounded);
  for (double c : rep.b1_constants) EXPECT_EQ(c, 1.0);
}

TEST(Tame, CauchyInequalities) {
  const auto e = enumerate_monomials(2, 28);
  const auto table = monomial_norm_table(e, 4);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<CoefficientFunctional> fam;
  for (int t = 0; t < 10; ++t) {
    CoefficientFunctional f;
    for (std::size_t k = 0; k < e.size(); ++k) f.lambda.emplace_back(g(rng), g(rng));
    for (int m = 0; m <= 4; ++m) f.grade_norms.push_back(torus_sup(e, f.lambda, m, 8));
    fam.push_back(f);
  }
  const auto rep = tame_basis_check(table, degree_sequence(e), 1.0, 0.0, fam);
  EXPECT_TRUE(rep.b2_checked);
  EXPECT_TRUE(rep.b2_holds);
  EXPECT_LE(rep.b2_worst, 1.0);
}

TEST(Tame, SuperExponentialTableUnbounded) {
  NormTable t;
  for (int k = 0; k < 30; ++k) {
    std::vector<double> row;
    for (int n = 0; n < 6; ++n) row.push_back(std::exp(double(n * n) * k));
    t.push_back(row);
  }
  const auto rep = tame_basis_check(t, 1, 1.0, 0.0);
  EXPECT_FALSE(rep.b1_bounded);
}

TEST(Tame, CsvShape) {
  const auto csv = norm_table_csv({{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_NE(csv.find('\n'), std::string::npos);
}
