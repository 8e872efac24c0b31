#include <cmath>
#include <sstream>

#include "common.hpp"
#include "deskcech/dbar.hpp"

namespace deskcech::cli {

namespace {

using namespace deskcech::dbar;

Complex complex_from(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw InputError("field '" + where + "': expected a number or [re, im]");
}

std::vector<Pole> poles_from(const json& v) {
  if (!v.is_array()) throw InputError("field 'poles': expected an array");
  std::vector<Pole> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& e = v[i];
    const std::string where = "poles[" + std::to_string(i) + "]";
    Pole p;
    if (e.is_object()) {
      if (!e.contains("center")) throw InputError("field '" + where + "': missing 'center'");
      for (const auto& [k, _] : e.items())
        if (k != "center" && k != "coefficients") throw InputError("field '" + where + "." + k + "': unknown");
      p.center = complex_from(e["center"], where + ".center");
      if (e.contains("coefficients")) {
        for (std::size_t j = 0; j < e["coefficients"].size(); ++j)
          p.coefficients.push_back(
              complex_from(e["coefficients"][j], where + ".coefficients[" + std::to_string(j) + "]"));
      }
    } else {
      p.center = complex_from(e, where);
    }
    if (p.coefficients.empty()) p.coefficients.push_back(1.0);
    out.push_back(p);
  }
  return out;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

struct Outcome {
  double cocycle_residual = 0.0;
  double cocycle_bound = 0.0;
  double dbar_residual = 0.0;
  double relative_error = 0.0;
  double abs_error = 0.0;
  MittagLefflerProblem problem;
  CousinSolution solution;
  MittagLefflerComparison comparison;
};

class CousinCommand : public Command {
 public:
  std::string name() const override { return "cousin"; }
  std::string help() const override { return "Cousin-I / Mittag-Leffler solve on a planar rectangle cover"; }
  double default_tolerance() const override { return 1e-3; }

  void setup(Params& p, std::string&) override {
    p.add("step", h_, "grid step h");
    auto* poles = p.add("poles", centers_, "pole centres on the real axis, unit residues");
    // the scenario form also takes {center, coefficients} objects
    p.bind("poles", poles, [this](const json& v) { poles_ = poles_from(v); });
    p.add("test-points", test_points_, "comparison points");
    p.add("min-distance", min_distance_, "test points keep this distance from the poles");
    p.flag("refine", refine_, "repeat at h/2 and report the dbar residual ratio");
    p.flag("grids", grids_, "write solution grids as CSV");
  }

  void execute(Run& r) override {
    if (!(h_ > 0.0)) throw InputError("field 'step': must be positive");
    if (test_points_ < 1) throw InputError("field 'test-points': must be positive");
    std::vector<Pole> poles = poles_;
    if (poles.empty())
      for (double c : centers_) poles.push_back({Complex(c, 0.0), {1.0}});
    if (poles.empty()) throw InputError("field 'poles': no poles given");
    for (const auto& p : poles)
      if (p.center.imag() != 0.0) throw InputError("field 'poles': centres must lie on the real axis");

    json pj = json::array();
    for (const auto& p : poles) {
      json cs = json::array();
      for (auto c : p.coefficients) cs.push_back(complex_json(c));
      pj.push_back({{"center", p.center.real()}, {"coefficients", cs}});
    }
    r.meta["h"] = h_;
    r.meta["poles"] = pj;
    r.meta["test_points"] = test_points_;
    r.meta["min_distance"] = min_distance_;

    const auto base = solve(poles, h_, r.seed);
    const auto ck = base.problem.pou.check();
    const double pou_err = std::max({ck.sum_error, ck.range_error, ck.support_error});
    r.check("cousin.partition", pou_err <= 1e-12 && ck.weight_excess <= 1e-9,
            "max error " + num(pou_err) + ", weight excess " + num(ck.weight_excess));
    r.check("cousin.cocycle", base.cocycle_residual <= base.cocycle_bound,
            num(base.cocycle_residual) + " <= " + num(base.cocycle_bound));
    r.check("cousin.oracle", base.relative_error < r.tolerance,
            "max relative error " + num(base.relative_error) + " at " +
                std::to_string(base.comparison.points.size()) + " points");

    json body;
    body["patches"] = base.problem.cover.size();
    body["partition"] = {{"sum_error", ck.sum_error},
                         {"range_error", ck.range_error},
                         {"support_error", ck.support_error},
                         {"weight_excess", ck.weight_excess}};
    body["patch_disagreement"] = base.solution.patch_disagreement;
    body["cocycle_residual"] = base.cocycle_residual;
    body["cocycle_bound"] = base.cocycle_bound;
    body["dbar_residual"] = base.solution.dbar_residual;
    body["max_relative_error"] = base.relative_error;
    body["max_abs_error"] = base.abs_error;

    if (refine_) {
      const auto fine = solve(poles, h_ / 2.0, r.seed);
      const double ratio = fine.dbar_residual > 0.0 ? base.dbar_residual / fine.dbar_residual : 0.0;
      r.check("cousin.refinement", ratio >= 1.5 && ratio <= 2.5,
              "dbar residual " + num(base.dbar_residual) + " -> " + num(fine.dbar_residual) + ", ratio " +
                  num(ratio));
      body["refinement"] = {{"h", h_ / 2.0},
                            {"dbar_residual", fine.dbar_residual},
                            {"ratio", ratio},
                            {"max_relative_error", fine.relative_error},
                            {"cocycle_residual", fine.cocycle_residual}};
    }
    r.write_json("cousin_report.json", body);

    std::ostringstream cmp;
    cmp.precision(17);
    cmp << "x,y,reconstructed_re,reconstructed_im,oracle_re,oracle_im\n";
    const auto& P = base.problem;
    const auto& S = base.solution;
    const auto lat = P.cover.lattice;
    const auto& C = base.comparison;
    for (std::size_t q = 0; q < C.points.size(); ++q) {
      const Complex z = lat.point(C.points[q].first, C.points[q].second);
      const Complex m = C.reconstructed[q], o = C.exact[q];
      cmp << z.real() << "," << z.imag() << "," << m.real() << "," << m.imag() << "," << o.real() << ","
          << o.imag() << "\n";
    }
    r.write("comparison.csv", cmp.str());

    if (grids_) {
      std::ostringstream g;
      g.precision(17);
      g << "x,y,re,im\n";
      const auto& w = S.g.window;
      for (int j = w.j0; j < w.j0 + w.ny; ++j)
        for (int i = w.i0; i < w.i0 + w.nx; ++i) {
          const Complex z = lat.point(i, j), v = S.g.at(i, j);
          g << z.real() << "," << z.imag() << "," << v.real() << "," << v.imag() << "\n";
        }
      r.write("g.csv", g.str());
      std::ostringstream c;
      c.precision(17);
      c << "patch,x,y,re,im\n";
      for (std::size_t k = 0; k < S.cprime.size(); ++k) {
        const auto& f = S.cprime[k];
        for (int j = f.window.j0; j < f.window.j0 + f.window.ny; ++j)
          for (int i = f.window.i0; i < f.window.i0 + f.window.nx; ++i) {
            const Complex z = lat.point(i, j), v = f.at(i, j);
            c << k << "," << z.real() << "," << z.imag() << "," << v.real() << "," << v.imag() << "\n";
          }
      }
      r.write("cprime.csv", c.str());
    }
  }

 private:
  Outcome solve(const std::vector<Pole>& poles, double h, std::uint64_t seed) const {
    Outcome o;
    MittagLefflerOptions mo;
    mo.h = h;
    o.problem = mittag_leffler_problem(poles, mo);
    o.solution = cousin_solve(o.problem.cocycle, o.problem.pou);
    o.cocycle_residual = o.solution.cocycle_residual;
    o.cocycle_bound = 1e-8 * (1.0 + o.problem.cocycle.sup());
    o.dbar_residual = o.solution.max_dbar_residual();
    const double lo = poles.front().center.real(), hi = poles.back().center.real();
    const Rect region{lo - 0.5, hi + 0.5, -1.0, 1.0};
    o.comparison = compare_with_oracle(o.problem, o.solution, region, test_points_, min_distance_, seed);
    o.relative_error = o.comparison.max_relative_error;
    o.abs_error = o.comparison.max_abs_error;
    return o;
  }

  double h_ = 0.02;
  std::vector<double> centers_{-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5};
  std::vector<Pole> poles_;
  int test_points_ = 50;
  double min_distance_ = 0.2;
  bool refine_ = true;
  bool grids_ = false;
};

}  // namespace

std::unique_ptr<Command> make_cousin() { return std::make_unique<CousinCommand>(); }

}  // namespace deskcech::cli
