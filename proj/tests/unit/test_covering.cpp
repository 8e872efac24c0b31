#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "deskcech/covering.hpp"
#include "deskcech/errors.hpp"

using namespace deskcech::covering;

namespace {

double norm2(PointView x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Box cube_box(int N, double r) { return {Point(std::size_t(N), -r), Point(std::size_t(N), r)}; }

// Independent law check: walks the sequence with exact dyadic arithmetic.
void expect_step_laws(const StepSequence& s, double range_limit) {
  ASSERT_GE(s.size(), 2u);
  EXPECT_EQ(s.t[0], 0.0);
  EXPECT_EQ(s.step(1), std::ldexp(1.0, -s.n0));
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double st = s.step(k);
    ASSERT_GT(st, 0.0);
    if (k + 1 < s.size()) {
      const double q = s.step(k + 1) / st;
      EXPECT_TRUE(q == 1.0 || q == 0.5) << "k=" << k << " ratio " << q;
    }
    const double m = s.t[k] / st;
    EXPECT_EQ(m, std::round(m)) << "k=" << k;
    int e = 0;
    const double frac = std::frexp(s.step(1) / st, &e);
    EXPECT_EQ(frac, 0.5) << "step not a power-of-two fraction of the first";
  }
  for (int l = 1; l <= int(std::floor(range_limit)); ++l)
    EXPECT_TRUE(std::find(s.t.begin(), s.t.end(), double(l)) != s.t.end()) << "integer " << l;
}

}  // namespace

TEST(StepSequence, ConstantTwoGivesHalfSteps) {
  const auto s = build_step_sequence([](double) { return 2.0; }, 3.0);
  EXPECT_EQ(s.n0, 1);
  const std::vector<double> expect{0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  ASSERT_GE(s.size(), expect.size());
  for (std::size_t k = 0; k < expect.size(); ++k) EXPECT_EQ(s.t[k], expect[k]);
  EXPECT_EQ(step_sequence_violation(s, 3.0), "");
}

TEST(StepSequence, LegalHandSequenceIsIntegerMultiple) {
  StepSequence s;
  s.t = {0, 0.5, 1.0, 1.25, 1.5, 1.75, 2.0};
  s.n0 = 1;
  EXPECT_EQ(s.t[3], 5 * s.step(3));
  EXPECT_EQ(step_sequence_violation(s, 2.0), "");
}

TEST(StepSequence, DoublingIsAViolation) {
  StepSequence s;
  s.t = {0, 0.25, 0.75, 1.0};
  s.n0 = 2;
  EXPECT_NE(step_sequence_violation(s, 1.0), "");
}

TEST(StepSequence, StepBelowProfileAndIntegersHit) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = u(rng), b = u(rng);
    auto prof = [a, b](double x) { return a + 0.5 * std::sin(b * x) * a * 0.9; };
    const auto s = build_step_sequence(prof, 5.0);
    expect_step_laws(s, 5.0);
    for (double x = 0.0; x < 5.0; x += 0.01) EXPECT_LT(s.value_at(x), prof(x)) << x;
  }
}

TEST(StepSequence, FromInfimaFollowsSmallIntervals) {
  const auto s = step_sequence_from_infima({1.0, 0.3, 0.3, 1.0, 1.0}, 5.0);
  expect_step_laws(s, 5.0);
  for (double x = 1.0; x < 3.0; x += 0.01) EXPECT_LT(s.value_at(x), 0.3);
}

TEST(StepSequence, NonPositiveInfimumRejected) {
  EXPECT_THROW(build_step_sequence([](double x) { return 1.0 - x; }, 3.0), deskcech::DomainError);
}

TEST(CubeCover, OneDimensionalConstant) {
  const Field phi = [](PointView) { return 3.0; };
  const auto c = build_cube_cover(phi, 1, 4.0);
  EXPECT_LE(c.max_overlap(), 2u);
  const auto rep = verify_cover(c, phi, 4.0, 4, 100, 3);
  EXPECT_TRUE(rep.overlap_ok && rep.side_ratio_ok && rep.enlargement_ok && rep.dominance_ok && rep.covers_region);
}

TEST(CubeCover, OverlapBoundFormula) {
  EXPECT_EQ(CubeCover::overlap_bound(1), 2);
  EXPECT_EQ(CubeCover::overlap_bound(2), 12);
  EXPECT_EQ(CubeCover::overlap_bound(3), 56);
}

TEST(CubeCover, AffineGrowthSidesNeverGrowOutward) {
  const Field phi = [](PointView x) { return 1.0 + norm2(x); };
  const auto c = build_cube_cover(phi, 2, 8.0);
  const auto rep = verify_cover(c, phi, 8.0, 4, 1000, 11);
  EXPECT_TRUE(rep.dominance_ok) << rep.dominance_violations;
  EXPECT_GT(rep.worst_dominance_margin, 0.0);
  EXPECT_TRUE(rep.overlap_ok);
  EXPECT_TRUE(rep.side_ratio_ok);
  // steps only keep or halve, so shells further out never get larger cubes
  double inner = 1e9, outer = 0.0;
  for (const auto& q : c.base_cubes) {
    const double r = norm2(q.center());
    if (r < 1.5) inner = std::min(inner, q.side);
    if (r > 7.0) outer = std::max(outer, q.side);
  }
  EXPECT_LE(outer, inner);
}

TEST(CubeCover, IndependentNeighborRecount) {
  const auto phi = random_lipschitz_field(2, 5);
  const auto c = build_cube_cover(phi, 2, 5.0);
  // brute-force pairwise open intersection of the enlarged cubes
  std::size_t worst = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::size_t cnt = 0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (i == j) continue;
      bool meet = true;
      for (int a = 0; a < 2; ++a) {
        const double lo = std::max(c.cubes[i].lower[std::size_t(a)], c.cubes[j].lower[std::size_t(a)]);
        const double hi = std::min(c.cubes[i].upper(std::size_t(a)), c.cubes[j].upper(std::size_t(a)));
        meet = meet && lo < hi;
      }
      if (meet) {
        ++cnt;
        const double q = c.base_cubes[i].side / c.base_cubes[j].side;
        EXPECT_TRUE(q == 0.5 || q == 1.0 || q == 2.0);
      }
    }
    EXPECT_EQ(cnt, c.neighbors[i].size());
    worst = std::max(worst, cnt);
  }
  EXPECT_LE(std::int64_t(worst), CubeCover::overlap_bound(2));
}

TEST(CubeCover, NonPositivePhiRejected) {
  const Field phi = [](PointView x) { return x[0]; };
  EXPECT_THROW(build_cube_cover(phi, 1, 2.0), deskcech::DomainError);
}

TEST(Glue, SingleLevel) {
  const auto psi = glue_decreasing_profile({cube_box(2, 1.0)}, {1.0});
  for (double v : psi.sample(9)) {
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Glue, TwoLevels) {
  const auto psi = glue_decreasing_profile({cube_box(1, 1.0), cube_box(1, 3.0)}, {1.0, 0.5});
  for (double x = -3.0; x <= 3.0; x += 0.01) {
    const double v = psi(Point{x});
    EXPECT_GT(v, 0.0);
    if (std::abs(x) > 1.0) EXPECT_LE(v, 0.5) << x;
    else EXPECT_LE(v, 1.0) << x;
  }
}

TEST(Glue, IncreasingDeltasRejected) {
  EXPECT_THROW(glue_decreasing_profile({cube_box(1, 1.0), cube_box(1, 2.0)}, {0.5, 1.0}),
               deskcech::DomainError);
}

TEST(Oscillation, ConstantPsiAnyRadius) {
  const Field psi = [](PointView) { return 4.0; };
  const auto xi = oscillation_radius(psi, 2.0, {cube_box(1, 2.0)});
  for (double v : xi.sample(5)) EXPECT_GT(v, 0.0);
}

TEST(Oscillation, ExponentialWithGammaE) {
  const Field psi = [](PointView x) { return std::exp(norm2(x)); };
  const std::vector<Box> ex{cube_box(1, 2.0), cube_box(1, 4.0)};
  const auto xi = oscillation_radius(psi, std::exp(1.0), ex);
  for (double x = -4.0; x <= 4.0; x += 0.05) {
    const double r = xi(Point{x});
    ASSERT_GT(r, 0.0);
    // interval of diameter below the radius at its left end
    const double y = x + 0.999 * r;
    if (y > 4.0) continue;
    double hi = 0.0, lo = 1e300;
    for (int q = 0; q <= 50; ++q) {
      const double v = psi(Point{x + (y - x) * q / 50.0});
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    EXPECT_LE(hi, std::exp(1.0) * lo * (1 + 1e-9));
  }
}

TEST(Oscillation, GammaAtMostOneRejected) {
  const Field psi = [](PointView) { return 1.0; };
  EXPECT_THROW(oscillation_radius(psi, 1.0, {cube_box(1, 1.0)}), deskcech::DomainError);
}

TEST(Oscillation, ControlledCoverRatio) {
  const Field psi = [](PointView x) { return std::exp(norm2(x)); };
  const std::vector<Box> ex{cube_box(2, 2.0), cube_box(2, 6.0)};
  const double gamma = std::exp(1.0);
  const auto c = oscillation_controlled_cover(psi, gamma, ex, 3.0);
  EXPECT_LE(max_probe_ratio(psi, c), gamma + 1e-9);
}

TEST(LipschitzField, PositiveAndLipschitz) {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto f = random_lipschitz_field(2, s);
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int q = 0; q < 200; ++q) {
      Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
      EXPECT_GT(f(a), 0.0);
      const double d = std::hypot(a[0] - b[0], a[1] - b[1]);
      EXPECT_LE(std::abs(f(a) - f(b)), d * (1 + 1e-12));
    }
  }
}
