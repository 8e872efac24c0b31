#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace deskcech::dbar {

using Complex = std::complex<double>;

// Points x0 + i h, y0 + j h for integer i, j.
struct Lattice {
  double x0 = 0.0, y0 = 0.0, h = 0.0;
  Complex point(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
  bool operator==(const Lattice&) const = default;
};

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  bool contains(Complex z, double slack = 0.0) const {
    return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack &&
           z.imag() <= y1 + slack;
  }
  Rect translated(Complex d) const {
    return {x0 + d.real(), x1 + d.real(), y0 + d.imag(), y1 + d.imag()};
  }
};

// Index block [i0, i0+nx) x [j0, j0+ny).
struct Window {
  int i0 = 0, j0 = 0, nx = 0, ny = 0;
  bool empty() const { return nx <= 0 || ny <= 0; }
  std::size_t size() const { return empty() ? 0 : std::size_t(nx) * std::size_t(ny); }
  bool contains(int i, int j) const { return i >= i0 && i < i0 + nx && j >= j0 && j < j0 + ny; }
  Window intersect(const Window& o) const;
  Window expanded(int cells) const { return {i0 - cells, j0 - cells, nx + 2 * cells, ny + 2 * cells}; }
  bool operator==(const Window&) const = default;
};

// Lattice points inside the closed rectangle.
Window window_of(const Lattice& lat, const Rect& r);

struct GridFunction {
  Lattice lattice;
  Window window;
  std::vector<Complex> values;  // row-major, j outer

  GridFunction() = default;
  GridFunction(const Lattice& lat, const Window& w, Complex fill = 0.0);
  static GridFunction sample(const Lattice& lat, const Window& w,
                             const std::function<Complex(Complex)>& f);

  Complex& at(int i, int j) { return values[offset(i, j)]; }
  Complex at(int i, int j) const { return values[offset(i, j)]; }
  std::size_t offset(int i, int j) const {
    return std::size_t(j - window.j0) * std::size_t(window.nx) + std::size_t(i - window.i0);
  }
  // Copy onto another window; points outside this one become zero.
  GridFunction restricted(const Window& w) const;
  double sup() const;
  double sup_on(const Window& w) const;
};

// 0.5 (d/dx + i d/dy): centered inside, one-sided on the window edge.
GridFunction dbar(const GridFunction& u);

// u(z) = -(1/pi) sum over cells of f(zeta) h^2 / (zeta - z), evaluated on
// `target`. The constant part of f on the cell at z integrates to zero by
// symmetry; with `cell_correction` its linear part (h^2 df/dz) is added.
// f must extend at least `min_margin` cells past the target on every side.
GridFunction cauchy_solve(const GridFunction& f, const Window& target, int min_margin = 4,
                          bool cell_correction = true);

// Rectangles U_i relatively open in a rectangular domain, sampled on one lattice.
struct PlaneCover {
  Lattice lattice;
  Rect domain;
  Window domain_window;
  std::vector<Rect> patches;
  std::vector<Window> windows;

  static PlaneCover make(const Rect& domain, double h, std::vector<Rect> patches);
  std::size_t size() const { return patches.size(); }
  Window overlap(std::size_t i, std::size_t j) const { return windows[i].intersect(windows[j]); }
  bool operator==(const PlaneCover& o) const {
    return lattice == o.lattice && domain_window == o.domain_window && windows == o.windows;
  }
};

struct PartitionOfUnity {
  PlaneCover cover;
  std::vector<Rect> refinement;       // W_i
  std::vector<GridFunction> chi;      // on the patch windows
  std::vector<GridFunction> dbar_chi;        // centred differences
  std::vector<GridFunction> dbar_chi_exact;  // differentiated tapers
  GridFunction phi;                   // real weight, stored in the real part

  struct Check {
    double sum_error = 0.0;     // max |sum chi - 1|
    double range_error = 0.0;   // how far chi leaves [0, 1]
    double support_error = 0.0; // max |chi| outside W
    double weight_excess = 0.0; // max of (sum |dbar chi|)^2 e^{-phi} - 1
  };
  Check check() const;
};

// Product of quintic smoothstep tapers of width `ramp` inside each W_i,
// normalized; edges on the domain boundary are left untapered.
PartitionOfUnity build_pou(const PlaneCover& cover, const std::vector<Rect>& refinement,
                           double ramp);

// Antisymmetric family on pairwise overlaps, stored for i < j.
struct Cocycle1 {
  PlaneCover cover;
  std::map<std::pair<int, int>, GridFunction> values;

  // c_ij with c_ji = -c_ij; zero on the diagonal.
  Complex get(int i, int j, int gi, int gj) const;
  bool has(int i, int j) const;
  double sup() const;
  double cocycle_residual() const;  // max |c_ij + c_jk + c_ki| on triple overlaps
  Cocycle1 scaled(Complex s) const;
  Cocycle1 plus(const Cocycle1& o) const;

  // c_ij = h_j - h_i on each overlap.
  static Cocycle1 coboundary(const PlaneCover& cover, const std::function<Complex(int, Complex)>& h);
};

struct CousinOptions {
  int margin_cells = 4;
  // glue dbar b from differentiated tapers instead of centred differences of chi
  bool exact_taper_slopes = true;
  bool cell_correction = true;
  double cocycle_tol = 1e-10;  // relative to 1 + |c|
  std::optional<std::pair<int, int>> anchor;  // lattice point; domain centre by default
};

struct CousinSolution {
  std::vector<GridFunction> cprime;  // on each patch window
  std::vector<GridFunction> b;
  GridFunction f;  // glued dbar b on the domain
  GridFunction g;  // normalized Cauchy solve on the domain
  std::pair<int, int> anchor{0, 0};
  double patch_disagreement = 0.0;  // max difference of the per-patch dbar b
  double cocycle_residual = 0.0;    // max |(c'_j - c'_i) - c_ij|
  std::vector<double> dbar_residual;  // sup |dbar c'_i| per patch
  double max_dbar_residual() const;
};

CousinSolution cousin_solve(const Cocycle1& c, const PartitionOfUnity& pou,
                            const CousinOptions& opt = {});

struct Pole {
  Complex center;
  std::vector<Complex> coefficients;  // a_1/(z-p) + a_2/(z-p)^2 + ...
  Complex principal_part(Complex z) const;
};

struct MittagLefflerOptions {
  double h = 0.02;
  double half_width = 0.75;   // pole patch half extent along the axis
  double half_height = 0.6;   // pole patch half extent across the axis
  double band = 0.2;          // upper/lower patches start at |y| = band
  double cap_gap = 0.25;      // end caps stop this far from the outer poles
  double inset = 0.05;        // W_i inside U_i
  double ramp = 0.4;
  double end_margin = 1.5;    // domain extends this far past the outer poles
  double height = 2.5;        // domain is |y| <= height
  double exclusion_cells = 3.0;
};

// Poles on the real axis, increasing, at least 1 apart.
struct MittagLefflerProblem {
  std::vector<Pole> poles;
  PlaneCover cover;
  std::vector<Rect> refinement;
  std::vector<int> pole_of_patch;  // -1 for patches without a pole
  MittagLefflerOptions options;
  Cocycle1 cocycle;
  PartitionOfUnity pou;

  // Principal part of patch i, zero inside the exclusion disc.
  Complex local_part(int patch, Complex z) const;
  Complex oracle(Complex z) const;  // sum of principal parts
  double pole_distance(Complex z) const;
};

MittagLefflerProblem mittag_leffler_problem(std::vector<Pole> poles, const MittagLefflerOptions& opt = {});

struct MittagLefflerComparison {
  std::vector<std::pair<int, int>> points;
  std::pair<int, int> match_point{0, 0};
  std::vector<Complex> reconstructed;  // after matching
  std::vector<Complex> exact;
  double max_relative_error = 0.0;  // |M - P| / max(|P|, 1) after matching
  double max_abs_error = 0.0;
};

// Global meromorphic reconstruction p_i - c'_i against the partial fractions,
// matched at the first test point. Test points are lattice points at least
// `min_distance` from the poles inside `region`.
MittagLefflerComparison compare_with_oracle(const MittagLefflerProblem& p, const CousinSolution& s,
                                            const Rect& region, int count, double min_distance,
                                            unsigned long long seed);

struct WeightedReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  // lhs / rhs, 0 when both vanish, inf when only rhs does
};

// lhs = sum_i sup_{K_i} e^{-gamma phi - loss} sup_{K_i} |c'_i|
// rhs = sum_{i<j} sup_{U_i cap U_j} e^{-phi} sup |c_ij|
WeightedReport weighted_solution_report(const Cocycle1& c, const std::vector<GridFunction>& cprime,
                                        const std::function<double(Complex)>& phi, double gamma,
                                        const std::vector<Rect>& compacts,
                                        const std::function<double(Complex)>& loss = {});

}  // namespace deskcech::dbar
