#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "deskcech/cochain.hpp"

namespace deskcech::cli {

namespace {

using namespace deskcech::cochain;

double max_abs(const Cochain& c) {
  double m = 0.0;
  for (const auto& [alpha, v] : c.components()) m = std::max(m, block_max_abs(v));
  return m;
}

bool all_zero(const Cochain& c) {
  return std::all_of(c.components().begin(), c.components().end(),
                     [](const auto& kv) { return block_is_zero(kv.second); });
}

class CochainCommand : public Command {
 public:
  std::string name() const override { return "cochain"; }
  std::string help() const override { return "random cochains: delta delta = 0 and the weighted coboundary bound"; }
  double default_tolerance() const override { return 1e-12; }

  void setup(Params& p, std::string&) override {
    p.add("trials", trials_, "random cochains per kind");
    p.add("indices", indices_, "cover index count");
    p.add("max-degree", max_degree_, "nerve degree cap (overlap bound M)")->check(CLI::Range(1, 16));
    p.add("sigma", sigma_, "cochain degree")->check(CLI::Range(0, 2));
    p.add("length", length_, "coefficients per block");
    p.add("edge-probability", edge_probability_, "nerve edge probability");
    p.add("grades", grades_, "norm grades 0..grades-1 for the bound");
  }

  void execute(Run& r) override {
    if (trials_ < 1 || indices_ < 1 || length_ < 1 || grades_ < 1)
      throw InputError("field 'trials'/'indices'/'length'/'grades': must be positive");
    r.meta["trials"] = trials_;
    r.meta["indices"] = indices_;
    r.meta["max_degree"] = max_degree_;
    r.meta["sigma"] = sigma_;

    bool int_ok = true, float_ok = true, bound_ok = true;
    double worst_float = 0.0, worst_bound_ratio = 0.0;
    int worst_M = 0;
    json rows = json::array();
    for (int t = 0; t < trials_; ++t) {
      const auto s = trial_seed(r.seed, std::uint64_t(t));
      const Nerve nerve = random_nerve(s, indices_, max_degree_, edge_probability_);
      worst_M = std::max(worst_M, nerve.overlap_bound());

      const Cochain ci = random_cochain(nerve, sigma_, s + 1, true, length_);
      const bool iz = all_zero(coboundary(coboundary(ci, nerve), nerve));
      int_ok = int_ok && iz;

      const Cochain cf = random_cochain(nerve, sigma_, s + 2, false, length_);
      const double scale = max_abs(cf);
      const double dd = max_abs(coboundary(coboundary(cf, nerve), nerve));
      const double rel = scale > 0.0 ? dd / scale : dd;
      worst_float = std::max(worst_float, rel);
      float_ok = float_ok && rel <= r.tolerance;

      const auto [C, D] = random_dominated_weights(nerve, sigma_, s + 3);
      double ratio = 0.0;
      for (int n = 0; n < grades_; ++n) {
        const auto rep = coboundary_norm_bound_check(cf, C, D, nerve, n);
        bound_ok = bound_ok && rep.pass;
        if (rep.rhs > 0.0) ratio = std::max(ratio, rep.lhs / rep.rhs);
      }
      worst_bound_ratio = std::max(worst_bound_ratio, ratio);
      rows.push_back({{"trial", t},
                      {"overlap_bound", nerve.overlap_bound()},
                      {"simplices", nerve.simplices(sigma_).size()},
                      {"dd_integer_zero", iz},
                      {"dd_float_relative", rel},
                      {"bound_ratio", ratio}});
    }
    r.check("cochain.dd_integer", int_ok, std::to_string(trials_) + " trials exact");
    r.check("cochain.dd_float", float_ok, "worst relative " + num(worst_float));
    r.check("cochain.norm_bound", bound_ok, "worst lhs/rhs " + num(worst_bound_ratio) + ", max M " + std::to_string(worst_M));
    r.write_json("cochain_report.json", {{"dd_integer_ok", int_ok},
                                          {"dd_float_ok", float_ok},
                                          {"worst_dd_float", worst_float},
                                          {"norm_bound_ok", bound_ok},
                                          {"worst_bound_ratio", worst_bound_ratio},
                                          {"max_overlap_bound", worst_M},
                                          {"trials", rows}});
  }

 private:
  int trials_ = 200;
  int indices_ = 10;
  int max_degree_ = 4;
  int sigma_ = 1;
  int length_ = 3;
  double edge_probability_ = 0.5;
  int grades_ = 3;
};

}  // namespace

std::unique_ptr<Command> make_cochain() { return std::make_unique<CochainCommand>(); }

}  // namespace deskcech::cli
