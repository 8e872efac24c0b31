#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "deskcech/chase.hpp"
#include "deskcech/cochain.hpp"
#include "deskcech/covering.hpp"
#include "deskcech/dbar.hpp"
#include "deskcech/growth.hpp"
#include "deskcech/psspace.hpp"

namespace {

void BM_CubeCover(benchmark::State& st) {
  const int N = int(st.range(0));
  const auto phi = deskcech::covering::random_lipschitz_field(N, 1);
  std::size_t cubes = 0;
  for (auto _ : st) {
    auto c = deskcech::covering::build_cube_cover(phi, N, 10.0);
    cubes = c.size();
    benchmark::DoNotOptimize(c);
  }
  st.counters["cubes"] = double(cubes);
}
BENCHMARK(BM_CubeCover)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Coboundary(benchmark::State& st) {
  using namespace deskcech::cochain;
  const auto nerve = random_nerve(3, int(st.range(0)), 16, 0.6);
  const auto c = random_cochain(nerve, 1, 4, false, 8);
  for (auto _ : st) benchmark::DoNotOptimize(coboundary(coboundary(c, nerve), nerve));
}
BENCHMARK(BM_Coboundary)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Chase(benchmark::State& st) {
  using namespace deskcech::chase;
  RandomDiagramOptions o;
  o.rows = o.cols = 5;
  const auto g = random_exact_diagram(7, o);
  const auto x = random_admissible(g, 2, 0, 8);
  for (auto _ : st) benchmark::DoNotOptimize(chase_solve(g, 2, 0, x));
}
BENCHMARK(BM_Chase);

void BM_Neumann(benchmark::State& st) {
  using namespace deskcech::chase;
  const int n = int(st.range(0));
  const auto op = random_graded_operator(5, n, 3, 0.9);
  const Vector v = Vector::Ones(n);
  for (auto _ : st) benchmark::DoNotOptimize(neumann_inverse(op, v, 2));
}
BENCHMARK(BM_Neumann)->Arg(16)->Arg(128);

void BM_CauchySolve(benchmark::State& st) {
  using namespace deskcech::dbar;
  const double h = 1.0 / double(st.range(0));
  const Lattice lat{0.0, 0.0, h};
  const auto f = GridFunction::sample(lat, window_of(lat, {-2, 2, -2, 2}), [](Complex z) {
    const double r2 = std::norm(z);
    return Complex(r2 < 1.0 ? std::pow(1.0 - r2, 3) : 0.0, 0.0);
  });
  const auto tgt = window_of(lat, {-1, 1, -1, 1});
  for (auto _ : st) benchmark::DoNotOptimize(cauchy_solve(f, tgt));
}
BENCHMARK(BM_CauchySolve)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_MittagLeffler(benchmark::State& st) {
  using namespace deskcech::dbar;
  std::vector<Pole> poles;
  for (int n = -5; n <= 5; ++n) poles.push_back({Complex(n, 0), {1.0}});
  for (auto _ : st) {
    const auto p = mittag_leffler_problem(poles);
    benchmark::DoNotOptimize(cousin_solve(p.cocycle, p.pou));
  }
}
BENCHMARK(BM_MittagLeffler)->Unit(benchmark::kMillisecond);

void BM_Monomials(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(deskcech::psspace::monomial_ratio_study(int(st.range(0)), 10000));
}
BENCHMARK(BM_Monomials)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ConvexMinorant(benchmark::State& st) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> r, y;
  double acc = 0.0;
  for (int i = 0; i < st.range(0); ++i) {
    r.push_back(0.01 * i);
    y.push_back(acc += u(rng));
  }
  const auto f = deskcech::growth::GrowthProfile::from_values(r, y);
  for (auto _ : st) benchmark::DoNotOptimize(deskcech::growth::convex_minorant(f));
}
BENCHMARK(BM_ConvexMinorant)->Arg(1000)->Arg(100000);

void BM_WeakConvexity(benchmark::State& st) {
  std::vector<double> r, y;
  for (int i = 0; i <= 160; ++i) {
    r.push_back(0.1 * i);
    y.push_back(r.back() * r.back());
  }
  const auto f = deskcech::growth::GrowthProfile::from_values(r, y);
  for (auto _ : st) benchmark::DoNotOptimize(deskcech::growth::weak_convexity_check(f, 1.0, 0.5));
}
BENCHMARK(BM_WeakConvexity)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
