#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace deskcech::covering {

using Point = std::vector<double>;
using PointView = std::span<const double>;
using Field = std::function<double(PointView)>;
using Profile = std::function<double(double)>;

// Dyadic break points 0 = t[0] < t[1] < ... of a step function f with
// f(x) = t[k] - t[k-1] on [t[k-1], t[k]).
struct StepSequence {
  std::vector<double> t;
  int n0 = 1;

  std::size_t size() const { return t.size(); }
  double step(std::size_t k) const { return t[k] - t[k - 1]; }
  double value_at(double x) const;
};

// floor + sum of four damped sine ridges; Lipschitz constant at most 1.
Field random_lipschitz_field(int N, std::uint64_t seed, double floor = 1.0);

struct StepOptions {
  int samples_per_unit = 512;
  double safety = 1.0;  // multiplies each sampled interval infimum
};

// a[l] is the infimum of the profile over [l, l+1]; used directly (no sampling).
StepSequence step_sequence_from_infima(const std::vector<double>& interval_inf,
                                       double range_limit);

StepSequence build_step_sequence(const Profile& profile, double range_limit,
                                 const StepOptions& options = {});

// Checks the three laws; returns an empty string when all hold.
std::string step_sequence_violation(const StepSequence& seq, double range_limit);

struct Cube {
  Point lower;
  double side = 0.0;

  std::size_t dim() const { return lower.size(); }
  double upper(std::size_t j) const { return lower[j] + side; }
  Point center() const;
  bool contains_open(PointView x) const;
};

bool closed_intersect(const Cube& a, const Cube& b);
bool open_intersect(const Cube& a, const Cube& b);

// per_axis^N cell-centred points plus the 2^N corners.
std::vector<Point> probe_grid(const Cube& c, int per_axis);

struct CubeCover {
  int dimension = 0;
  std::vector<Cube> base_cubes;  // lattice cubes before enlargement
  std::vector<Cube> cubes;       // enlarged open cubes
  std::vector<std::vector<int>> neighbors;       // j != i with cubes[i], cubes[j] meeting
  std::vector<std::vector<int>> base_neighbors;  // j != i with closed base cubes touching
  StepSequence steps;

  std::size_t size() const { return cubes.size(); }
  std::size_t max_overlap() const;
  static std::int64_t overlap_bound(int N);
};

struct CoverOptions {
  double growth = 0.25;     // initial enlargement factor minus one
  double margin = 1e-9;     // relative gap kept between side and probed minimum
  double safety = 0.75;     // shrinks sampled shell infima before stepping
  int probes_per_axis = 4;
  int shell_samples_per_unit = 0;  // 0 picks 16 for N <= 2 and 8 otherwise
  int max_rebuilds = 8;
};

CubeCover build_cube_cover(const Field& phi, int N, double region_radius,
                           const CoverOptions& options = {});

// Neighbor lists over a cube list, by open (enlarged) or closed (base) intersection.
std::vector<std::vector<int>> intersecting_pairs(const std::vector<Cube>& cubes, bool closed);

struct CoverReport {
  std::size_t cube_count = 0;
  std::size_t max_overlap = 0;
  std::int64_t overlap_bound = 0;
  bool overlap_ok = false;
  bool side_ratio_ok = false;     // intersecting cubes have base sides in ratio 1/2, 1, 2
  bool enlargement_ok = false;    // base inside enlarged interior, l < s, K meets only if L meets
  bool dominance_ok = false;      // phi > s at every probe
  bool covers_region = false;
  std::size_t dominance_violations = 0;
  double worst_dominance_margin = 0.0;  // min over probes of phi - s
};

// random_probes per cube are drawn from a generator seeded with seed.
CoverReport verify_cover(const CubeCover& cover, const Field& phi, double region_radius,
                         int probes_per_axis = 4, int random_probes = 0,
                         std::uint64_t seed = 1);

struct Box {
  Point lower;
  Point upper;

  std::size_t dim() const { return lower.size(); }
  bool contains(PointView x) const;
  bool strictly_inside(const Box& outer) const;
  Box scaled_about_center(double factor) const;
};

// A positive continuous function given by an exact evaluator together with the
// rectangular region and grid it is sampled on.
struct ModulusFunction {
  Box region;
  std::function<double(PointView)> eval;

  double operator()(PointView x) const { return eval(x); }
  // Values at the per_axis^N lattice points of region (row-major, last axis fastest).
  std::vector<double> sample(int per_axis) const;
};

ModulusFunction glue_decreasing_profile(const std::vector<Box>& exhaustion,
                                        const std::vector<double>& deltas);

struct OscillationOptions {
  double r_start = 1.0;   // largest dyadic radius tried
  int max_halvings = 40;
  int grid_per_radius = 4;  // lattice points per radius length
};

// Per-level dyadic radii, already made nonincreasing.
std::vector<double> oscillation_radii(const Field& psi, double gamma,
                                      const std::vector<Box>& exhaustion,
                                      const OscillationOptions& options = {});

ModulusFunction oscillation_radius(const Field& psi, double gamma,
                                   const std::vector<Box>& exhaustion,
                                   const OscillationOptions& options = {});

// Cover whose cubes have Euclidean diameter below the oscillation radius.
CubeCover oscillation_controlled_cover(const Field& psi, double gamma,
                                       const std::vector<Box>& exhaustion,
                                       double region_radius,
                                       const CoverOptions& cover_options = {},
                                       const OscillationOptions& options = {});

// Max over cubes of sup/inf of psi on the probe grid.
double max_probe_ratio(const Field& psi, const CubeCover& cover, int probes_per_axis = 4);

}  // namespace deskcech::covering
