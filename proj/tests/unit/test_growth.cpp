#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "deskcech/errors.hpp"
#include "deskcech/growth.hpp"
#include "oracles.hpp"

using namespace deskcech::growth;

namespace {

std::vector<double> grid(double a, double b, double step) {
  std::vector<double> r;
  for (int i = 0; a + i * step <= b + 1e-12; ++i) r.push_back(a + i * step);
  return r;
}

GrowthProfile from_fn(const std::vector<double>& r, const std::function<double(double)>& f) {
  std::vector<double> v;
  for (double x : r) v.push_back(f(x));
  return GrowthProfile::from_values(r, v);
}

double lognorm(std::span<const std::complex<double>> p) {
  double s = 0.0;
  for (auto z : p) s += std::norm(z);
  return 0.5 * std::log1p(s);
}

}  // namespace

TEST(Profile, LogModulusOnPlane) {
  const auto V = SampledVariety::builtin("identity", 3.0, 600, 64);
  const CField phi = [](std::span<const std::complex<double>> p) { return std::log(std::abs(p[0])); };
  const auto f = growth_profile(phi, V, {0.0, 1.0, 2.0});
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(f.m[i].has_value());
    EXPECT_NEAR(*f.m[i], double(i), 0.02);
  }
}

TEST(Profile, ConstantAndMonotone) {
  const auto V = SampledVariety::builtin("parabola", 4.0, 300, 64);
  const auto f = growth_profile([](std::span<const std::complex<double>>) { return 2.5; }, V, grid(0, 4, 0.5));
  for (const auto& v : f.m) EXPECT_EQ(v.value_or(2.5), 2.5);
  const auto g = growth_profile(lognorm, V, grid(0, 4, 0.1));
  const auto ys = g.ys();
  for (std::size_t i = 1; i < ys.size(); ++i) EXPECT_GE(ys[i], ys[i - 1]);
}

TEST(Profile, HadamardCubeIsLinear) {
  const auto r = grid(0, 3, 0.25);
  const auto h = hadamard_profile({0.0, 0.0, 0.0, 1.0}, r);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(h[i], 3 * r[i], 1e-12);
  EXPECT_GE(min_second_difference(r, h), -1e-9);
}

TEST(Profile, HadamardRandomConvex) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  const auto r = grid(-2, 3, 0.05);
  for (int t = 0; t < 10; ++t) {
    std::vector<std::complex<double>> c;
    for (int j = 0; j <= 5; ++j) c.emplace_back(g(rng), g(rng));
    EXPECT_GE(min_second_difference(r, hadamard_profile(c, r)), -1e-9);
  }
}

TEST(Minorant, ConvexInputReproduced) {
  const auto r = grid(0, 3, 0.1);
  const auto f = from_fn(r, [](double x) { return x * x; });
  const auto h = convex_minorant(f);
  for (double x : r) EXPECT_NEAR(h(x), x * x, 1e-9);
}

TEST(Minorant, StepHull) {
  const auto r = grid(0, 2, 0.25);
  const auto f = from_fn(r, [](double x) { return x >= 1.0 ? 1.0 : 0.0; });
  const auto h = convex_minorant(f);
  // hull runs from (0.75, 0) straight to (2, 1)
  for (double x : r) EXPECT_NEAR(h(x), x <= 0.75 ? 0.0 : (x - 0.75) * 0.8, 1e-12) << x;
}

TEST(Minorant, ConcaveGivesChord) {
  const auto r = grid(0, 4, 0.25);
  const auto h = convex_minorant(from_fn(r, [](double x) { return std::sqrt(x); }));
  for (double x : r) EXPECT_NEAR(h(x), 0.5 * x, 1e-12);
}

TEST(Minorant, AgreesWithChordOracleAndIsIdempotent) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const auto r = grid(0, 5, 0.125);
    std::vector<double> v;
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) v.push_back(acc += u(rng) * u(rng));
    const auto f = GrowthProfile::from_values(r, v);
    const auto h = convex_minorant(f);
    const auto ref = oracle::hull_by_chords(r, v);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(h(r[i]), ref[i], 1e-12);
    const auto hh = convex_minorant(h.as_profile(h.x));
    ASSERT_EQ(hh.x.size(), h.x.size());
    for (std::size_t i = 0; i < h.x.size(); ++i) EXPECT_EQ(hh.h[i], h.h[i]);
  }
}

TEST(Minorant, TooFewSamplesRejected) {
  EXPECT_THROW(convex_minorant(GrowthProfile::from_values({0.0}, {1.0})), deskcech::DomainError);
}

TEST(WeakConvexity, ConvexPasses) {
  const auto f = from_fn(grid(0, 3, 0.1), [](double x) { return std::exp(x); });
  EXPECT_TRUE(weak_convexity_check(f, 1.0, 0.0).pass);
}

TEST(WeakConvexity, KinkPassesBumpFails) {
  const auto r = grid(0, 3, 0.05);
  const auto kink = [](double x) { return std::max(x, 2 * x - 1); };
  EXPECT_TRUE(weak_convexity_check(from_fn(r, kink), 1.0, 0.0).pass);
  const auto bumped = from_fn(r, [&](double x) {
    const double d = (x - 1.0) / 0.3;
    return kink(x) + (std::abs(d) < 1 ? 0.2 * (1 - d * d) : 0.0);
  });
  const auto res = weak_convexity_check(bumped, 1.0, 0.0);
  EXPECT_FALSE(res.pass);
  EXPECT_LT(res.worst_margin, 0.0);
  EXPECT_LE(res.r1, res.r2);
}

TEST(WeakConvexity, ShiftInvariantVerdict) {
  const auto r = grid(0, 3, 0.05);
  const auto fn = [](double x) { return std::sqrt(x); };
  for (double b : {0.0, 0.5, 1.0}) {
    const auto a = weak_convexity_check(from_fn(r, fn), 1.0, b);
    const auto s = weak_convexity_check(from_fn(r, [&](double x) { return fn(x) + 7.0; }), 1.0, b);
    EXPECT_EQ(a.pass, s.pass);
  }
}

TEST(WeakConvexity, ParabolaWithShiftOne) {
  const auto V = SampledVariety::builtin("parabola", 6.5, 1600, 256);
  const auto f = growth_profile(lognorm, V, grid(0, 6, 0.1));
  WeakConvexityOptions o;
  o.tolerance = 1e-9 + sampling_tolerance(f);
  EXPECT_TRUE(weak_convexity_check(f, 1.0, 1.0, o).pass);
}

TEST(Equivalence, ConvexBothDirections) {
  const auto f = from_fn(grid(0, 3, 0.1), [](double x) { return std::exp(x); });
  const auto e = minorant_equivalence_check(f, 1.0, 0.0);
  EXPECT_TRUE(e.premise1 && e.direction1);
  EXPECT_TRUE(e.premise2 && e.direction2);
}

TEST(Equivalence, DipRepairedByShift) {
  const auto r = grid(0, 3, 0.05);
  const auto f = from_fn(r, [](double x) {
    const double d = (x - 1.5) / 0.3;
    return std::max(x, 2 * x - 1) - (std::abs(d) < 1 ? 0.1 * (1 - d * d) : 0.0);
  });
  const auto e = minorant_equivalence_check(f, 1.0, 0.5);
  EXPECT_TRUE(e.premise1 && e.direction1);
  EXPECT_TRUE(e.premise2 && e.direction2);
}

TEST(Probe, ConvexFamilyGetsOneZero) {
  const auto r = grid(0, 16, 0.1);
  std::vector<GrowthProfile> fam{from_fn(r, [](double x) { return x; }), from_fn(r, [](double x) { return x * x; }),
                                 from_fn(r, [](double x) { return std::exp(x / 4); })};
  ProbeOptions o;
  o.b_max = 4.0;
  const auto res = lk_family_probe(fam, o);
  ASSERT_TRUE(res.family.has_value());
  EXPECT_EQ(res.family->first, 1.0);
  EXPECT_EQ(res.family->second, 0.0);
}

TEST(Probe, ExceedsBudgetIsAnOutcome) {
  const auto r = grid(0, 16, 0.1);
  // a tall concave step that no shift within the budget repairs
  std::vector<GrowthProfile> fam{from_fn(r, [](double x) { return x < 1.0 ? 0.0 : 50.0; })};
  ProbeOptions o;
  o.b_max = 0.5;
  o.a_values = {1.0};
  const auto res = lk_family_probe(fam, o);
  EXPECT_FALSE(res.family.has_value());
  EXPECT_FALSE(res.members[0].ab.has_value());
}

TEST(Interpolate, EdgesAndInterior) {
  const std::vector<double> x{0, 1, 2}, y{0, 2, 3};
  EXPECT_EQ(*interpolate(x, y, 0.5), 1.0);
  EXPECT_FALSE(interpolate(x, y, 2.5).has_value());
  EXPECT_FALSE(interpolate(x, y, -0.1).has_value());
}

TEST(ExpTail, MatchesDirectEvaluationForSmallZ) {
  const auto f = exp_tail_field(3);
  const std::complex<double> z(0.7, 0.4);
  const std::vector<std::complex<double>> p{z, std::exp(z)};
  const double direct = std::log(std::abs(std::exp(z) - 1.0 - z - z * z / 2.0)) / 3.0;
  EXPECT_NEAR(f(p), direct, 1e-9);
}
