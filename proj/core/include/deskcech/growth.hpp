#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace deskcech::growth {

using CPoint = std::vector<std::complex<double>>;
using CField = std::function<double(std::span<const std::complex<double>>)>;

// r grid with sampled values; entries whose ball holds no finite sample are absent.
struct GrowthProfile {
  std::vector<double> r;
  std::vector<std::optional<double>> m;
  // r minus log of the largest sampled norm in the ball; empty when not sampled.
  std::vector<double> shortfall;

  std::size_t size() const { return r.size(); }
  // Present (r, m) pairs, in order.
  std::vector<double> xs() const;
  std::vector<double> ys() const;
  static GrowthProfile from_values(std::vector<double> r, const std::vector<double>& values);
};

// Finite sample of a one-parameter chart t -> point in C^N.
struct SampledVariety {
  std::string name;
  int dimension = 0;
  std::vector<std::complex<double>> params;
  std::vector<CPoint> points;
  std::vector<double> norms;  // Euclidean |point|

  static SampledVariety from_chart(std::string name, int dimension,
                                   const std::function<CPoint(std::complex<double>)>& chart,
                                   std::vector<std::complex<double>> params);
  // identity (C), line {(t,0)}, parabola {(t,t^2)}, cubic {(t,t^3)}, expgraph {(t,e^t)}.
  static SampledVariety builtin(const std::string& name, double log_rho_max,
                                int radial = 200, int angular = 128);
  static std::vector<std::string> builtin_names();
};

// Origin plus t = e^{u + i theta}, u on [log_rho_min, log_rho_max] in `radial` steps.
std::vector<std::complex<double>> log_polar_grid(double log_rho_min, double log_rho_max, int radial,
                                                 int angular);

// m(r) = max phi over samples with |point| <= e^r.
GrowthProfile growth_profile(const CField& phi, const SampledVariety& V,
                             const std::vector<double>& r_grid);

// How far sampled sups may sit below the true ones: max over the grid of
// shortfall times the local secant slope (over a window of at least `window`
// in r). Zero for profiles without shortfall data.
double sampling_tolerance(const GrowthProfile& f, double window = 0.25);

struct ConvexMinorant {
  std::vector<double> x;  // breakpoints, increasing
  std::vector<double> h;
  double operator()(double t) const;  // linear between breakpoints, clamped outside
  GrowthProfile as_profile(const std::vector<double>& r) const;
};

// Lower convex envelope of the present samples.
ConvexMinorant convex_minorant(const GrowthProfile& f);

// Monotone piecewise-linear interpolation over the present samples; nullopt
// beyond the right edge or before the first sample.
std::optional<double> interpolate(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double t);

struct WeakConvexityOptions {
  double tolerance = 1e-9;
  // Extra lambda values beyond the ones placing the left side on a sample.
  std::vector<double> lambdas;
  // Only r1, r2 <= r_limit enter; keeps the triple set fixed across (a, b).
  std::optional<double> r_limit;
};

struct WeakConvexityResult {
  bool pass = true;
  double worst_margin = 0.0;  // min of right side minus left side
  double lambda = 0.0, r1 = 0.0, r2 = 0.0;  // worst triple
  std::size_t checked = 0;
  std::size_t excluded = 0;  // edge-clamped triples
};

// Triples (r1, x, r2): r1, r2 range over the samples and the pullbacks
// (x_k - b)/a of samples, x over the samples strictly between.
WeakConvexityResult weak_convexity_check(const GrowthProfile& f, double a, double b,
                                         const WeakConvexityOptions& opt = {});

struct EquivalenceResult {
  ConvexMinorant h;
  // 2 => 1: whether f <= h(a x + b) holds, and if so whether the weak
  // convexity check then passes.
  bool premise2 = false;
  bool direction2 = false;
  double premise2_worst = 0.0;
  // 1 => 2: whether the weak convexity check passes, and if so whether
  // f <= h(a x + b) + tolerance at interior samples.
  bool premise1 = false;
  bool direction1 = false;
  double direction1_worst = 0.0;  // max of f(x) - h(a x + b)
  std::size_t interior = 0;
};

EquivalenceResult minorant_equivalence_check(const GrowthProfile& f, double a, double b,
                                             double tolerance = 1e-6,
                                             const WeakConvexityOptions& opt = {});

struct ProbeOptions {
  std::vector<double> a_values{1.0, 2.0, 3.0};
  double b_step = 0.25;
  double b_max = 2.0;
  double tolerance = 1e-9;
  // Adds sampling_tolerance(profile) per member on top of `tolerance`.
  bool sampling_aware = true;
};

struct ProbeEntry {
  std::optional<std::pair<double, double>> ab;  // nullopt: exceeds budget
  double tolerance = 0.0;  // what the member was checked with
};

struct ProbeResult {
  std::vector<ProbeEntry> members;
  std::optional<std::pair<double, double>> family;  // lexicographic max; nullopt if any exceeds
  double r_limit = 0.0;
};

ProbeResult lk_family_probe(const std::vector<GrowthProfile>& profiles, const ProbeOptions& opt = {});
ProbeResult lk_family_probe(const std::vector<CField>& family, const SampledVariety& V,
                            const std::vector<double>& r_grid, const ProbeOptions& opt = {});

// (1/k) log|w - sum_{j<k} z^j / j!| evaluated without cancellation on the graph w = e^z.
CField exp_tail_field(int k);

// max over |z| = e^r of log|F(z)|, F given by coefficients c_0 + c_1 z + ...
std::vector<double> hadamard_profile(const std::vector<std::complex<double>>& coeffs,
                                     const std::vector<double>& r_grid, int samples = 1024);

// Smallest discrete second difference (nonuniform grid allowed).
double min_second_difference(const std::vector<double>& x, const std::vector<double>& y);

std::string profile_csv(const GrowthProfile& f);
std::string minorant_csv(const ConvexMinorant& h);

}  // namespace deskcech::growth
