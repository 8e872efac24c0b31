#include <cmath>
#include <random>
#include <sstream>

#include "common.hpp"
#include "deskcech/growth.hpp"

namespace deskcech::cli {

namespace {

using namespace deskcech::growth;
using C = std::complex<double>;

int parse_int(const std::string& s, const std::string& spec) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("field 'field': bad integer in '" + spec + "'");
}

double parse_double(const std::string& s, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("field 'field': bad number in '" + spec + "'");
}

// lognorm | maxlog | logabs:j | logdist:c | exptail:k
CField parse_field(const std::string& spec, int dimension) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "lognorm")
    return [](std::span<const C> p) {
      double s = 0.0;
      for (auto v : p) s += std::norm(v);
      return 0.5 * std::log1p(s);
    };
  if (kind == "maxlog")
    return [](std::span<const C> p) {
      double s = 0.0;
      for (auto v : p) s += std::norm(v);
      return std::max(0.0, 0.5 * std::log(s));
    };
  if (kind == "logabs") {
    const int j = parse_int(rest, spec);
    if (j < 0 || j >= dimension) throw InputError("field 'field': coordinate out of range in '" + spec + "'");
    return [j](std::span<const C> p) { return std::log(std::abs(p[std::size_t(j)])); };
  }
  if (kind == "logdist") {
    const double c = parse_double(rest, spec);
    return [c](std::span<const C> p) { return std::log(std::abs(p.back() - c)); };
  }
  if (kind == "exptail") {
    if (dimension != 2) throw InputError("field 'field': exptail needs a variety in C^2");
    const int k = parse_int(rest, spec);
    if (k < 1) throw InputError("field 'field': exptail needs k >= 1");
    return exp_tail_field(k);
  }
  throw InputError("field 'field': unknown '" + spec + "' (lognorm, maxlog, logabs:j, logdist:c, exptail:k)");
}

std::vector<double> grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw InputError("field 'r-min'/'r-max'/'r-step': need r-min < r-max, step > 0");
  std::vector<double> r;
  const int n = int(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) r.push_back(lo + i * step);
  return r;
}

class GrowthCommand : public Command {
 public:
  std::string name() const override { return "growth"; }
  std::string help() const override { return "growth profiles, convex minorants, weak convexity and the family probe"; }

  void setup(Params& p, std::string& mode) override {
    mode = "profile";
    p.mode(mode, {"profile", "minorant", "check", "probe"});
    p.add("variety", variety_, "identity | line | parabola | cubic | expgraph");
    p.add("field", field_, "lognorm | maxlog | logabs:j | logdist:c | exptail:k");
    p.add("fields", fields_, "family for the probe");
    p.add("r-min", r_min_, "first r");
    p.add("r-max", r_max_, "last r (0: 6, or 16 for the probe)");
    p.add("r-step", r_step_, "r spacing");
    p.add("radial", radial_, "chart samples along log|t|");
    p.add("angular", angular_, "chart samples per circle");
    p.add("a", a_, "weak convexity slope (check)");
    p.add("b", b_, "weak convexity shift (check)");
    p.add("a-values", a_values_, "probe slopes");
    p.add("b-max", b_max_, "probe shift budget");
    p.add("b-step", b_step_, "probe shift step");
    p.flag("sampling-aware", sampling_aware_, "widen tolerances by the sampling resolution");
    p.add("polynomials", polynomials_, "random polynomials for the Hadamard check (profile)");
    p.add("degree", degree_, "their degree");
    p.add("trials", trials_, "random monotone profiles (minorant)");
  }

  void execute(Run& r) override {
    if (r_max_ == 0.0) r_max_ = r.mode == "probe" ? 16.0 : 6.0;
    r.meta["variety"] = variety_;
    r.meta["r_grid"] = {{"min", r_min_}, {"max", r_max_}, {"step", r_step_}};
    r.meta["sampling"] = {{"radial", radial_}, {"angular", angular_}};
    if (r.mode == "probe") return probe(r);
    r.meta["field"] = field_;
    if (r.mode == "profile") return profile(r);
    if (r.mode == "minorant") return minorant(r);
    check(r);
  }

 private:
  SampledVariety variety() const {
    if (radial_ < 1 || angular_ < 1) throw InputError("field 'radial'/'angular': must be positive");
    const auto names = SampledVariety::builtin_names();
    if (std::find(names.begin(), names.end(), variety_) == names.end())
      throw InputError("field 'variety': unknown '" + variety_ + "' (" + join(names, ", ") + ")");
    return SampledVariety::builtin(variety_, r_max_, radial_, angular_);
  }

  GrowthProfile field_profile(const SampledVariety& V) const {
    return growth_profile(parse_field(field_, V.dimension), V, grid(r_min_, r_max_, r_step_));
  }

  void profile(Run& r) {
    const auto V = variety();
    const auto f = field_profile(V);
    bool monotone = true;
    std::optional<double> prev;
    for (const auto& v : f.m) {
      if (v && prev && *v < *prev) monotone = false;
      if (v) prev = v;
    }
    r.check("growth.profile", monotone && f.xs().size() >= 2,
            std::to_string(f.xs().size()) + " of " + std::to_string(f.size()) + " radii present");
    r.write("profile.csv", profile_csv(f));

    if (polynomials_ > 0) {
      std::mt19937_64 rng(r.seed);
      std::normal_distribution<double> g(0.0, 1.0);
      const auto rs = grid(r_min_, r_max_, r_step_);
      double worst = 0.0;
      std::ostringstream csv;
      csv.precision(17);
      csv << "polynomial,r,M\n";
      for (int q = 0; q < polynomials_; ++q) {
        std::vector<C> coeffs;
        for (int k = 0; k <= degree_; ++k) coeffs.emplace_back(g(rng), g(rng));
        const auto M = hadamard_profile(coeffs, rs);
        worst = std::min(worst, min_second_difference(rs, M));
        for (std::size_t i = 0; i < rs.size(); ++i) csv << q << "," << rs[i] << "," << M[i] << "\n";
      }
      r.check("growth.hadamard", worst >= -1e-9, "min second difference " + num(worst));
      r.write("hadamard.csv", csv.str());
    }
  }

  void minorant(Run& r) {
    const auto V = variety();
    const auto f = field_profile(V);
    const auto h = convex_minorant(f);
    const auto hh = convex_minorant(h.as_profile(h.x));
    const double second = min_second_difference(h.x, h.h);
    double above = 0.0;
    const auto xs = f.xs(), ys = f.ys();
    for (std::size_t i = 0; i < xs.size(); ++i) above = std::max(above, h(xs[i]) - ys[i]);
    bool convex = second >= -1e-12, below = above <= 1e-12, idem = hh.x == h.x && hh.h == h.h;

    std::mt19937_64 rng(r.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < trials_; ++t) {
      const int n = 3 + int(rng() % 60);
      std::vector<double> rr, vals;
      double x = 0.0, y = 0.0;
      for (int i = 0; i < n; ++i) {
        rr.push_back(x);
        vals.push_back(y);
        x += 0.01 + u(rng);
        y += u(rng) < 0.3 ? 0.0 : 2.0 * u(rng);
      }
      const auto g = GrowthProfile::from_values(rr, vals);
      const auto hg = convex_minorant(g);
      convex = convex && min_second_difference(hg.x, hg.h) >= -1e-12;
      for (std::size_t i = 0; i < rr.size(); ++i) below = below && hg(rr[i]) <= vals[i] + 1e-12;
      const auto again = convex_minorant(hg.as_profile(hg.x));
      idem = idem && again.x == hg.x && again.h == hg.h;
    }
    const std::string extra = trials_ > 0 ? " (+" + std::to_string(trials_) + " random profiles)" : "";
    r.check("growth.minorant_convex", convex, "min second difference " + num(second) + extra);
    r.check("growth.minorant_below", below, "max h - f " + num(above) + extra);
    r.check("growth.minorant_idempotent", idem, std::to_string(h.x.size()) + " breakpoints" + extra);
    r.write("profile.csv", profile_csv(f));
    r.write("minorant.csv", minorant_csv(h));
  }

  void check(Run& r) {
    const auto V = variety();
    const auto f = field_profile(V);
    WeakConvexityOptions opt;
    opt.tolerance = r.tolerance + (sampling_aware_ ? sampling_tolerance(f) : 0.0);
    r.meta["a"] = a_;
    r.meta["b"] = b_;
    r.meta["effective_tolerance"] = opt.tolerance;
    const auto w = weak_convexity_check(f, a_, b_, opt);
    const auto eq = minorant_equivalence_check(f, a_, b_, std::max(1e-6, opt.tolerance), opt);
    r.check("growth.weak_convexity", w.pass,
            "worst margin " + num(w.worst_margin) + " at lambda " + num(w.lambda) + ", r1 " + num(w.r1) +
                ", r2 " + num(w.r2));
    const bool consistent = (!eq.premise1 || eq.direction1) && (!eq.premise2 || eq.direction2);
    r.check("growth.equivalence", consistent,
            std::string("1=>2 ") + (eq.premise1 ? (eq.direction1 ? "holds" : "fails") : "n/a") + ", 2=>1 " +
                (eq.premise2 ? (eq.direction2 ? "holds" : "fails") : "n/a"));
    r.write_json("check.json", {{"pass", w.pass},
                                {"worst_margin", w.worst_margin},
                                {"lambda", w.lambda},
                                {"r1", w.r1},
                                {"r2", w.r2},
                                {"checked", w.checked},
                                {"excluded", w.excluded},
                                {"premise1", eq.premise1},
                                {"direction1", eq.direction1},
                                {"direction1_worst", eq.direction1_worst},
                                {"premise2", eq.premise2},
                                {"direction2", eq.direction2},
                                {"premise2_worst", eq.premise2_worst},
                                {"interior", eq.interior}});
    r.write("profile.csv", profile_csv(f));
  }

  void probe(Run& r) {
    const auto V = variety();
    ProbeOptions opt;
    opt.a_values = a_values_;
    opt.b_max = b_max_;
    opt.b_step = b_step_;
    opt.tolerance = r.tolerance;
    opt.sampling_aware = sampling_aware_;
    r.meta["fields"] = fields_;
    r.meta["a_values"] = a_values_;
    r.meta["b_max"] = b_max_;
    r.meta["b_step"] = b_step_;
    std::vector<CField> family;
    for (const auto& s : fields_) family.push_back(parse_field(s, V.dimension));
    if (family.empty()) throw InputError("field 'fields': empty family");
    const auto res = lk_family_probe(family, V, grid(r_min_, r_max_, r_step_), opt);
    json members = json::array();
    std::vector<std::string> seq;
    for (std::size_t i = 0; i < res.members.size(); ++i) {
      const auto& m = res.members[i];
      json e = {{"field", fields_[i]}, {"tolerance", m.tolerance}};
      if (m.ab) {
        e["a"] = m.ab->first;
        e["b"] = m.ab->second;
        seq.push_back("(" + num(m.ab->first) + "," + num(m.ab->second) + ")");
      } else {
        e["exceeds_budget"] = true;
        seq.push_back("exceeds");
      }
      members.push_back(e);
    }
    json body = {{"r_limit", res.r_limit}, {"members", members}};
    if (res.family) body["family"] = {res.family->first, res.family->second};
    else body["family"] = "exceeds budget";
    r.check("growth.probe", res.family.has_value(),
            (res.family ? "family (" + num(res.family->first) + "," + num(res.family->second) + ")"
                        : std::string("exceeds budget")) +
                ", members " + join(seq, " "));
    r.write_json("probe.json", body);
  }

  std::string variety_ = "parabola";
  std::string field_ = "lognorm";
  std::vector<std::string> fields_{"exptail:2", "exptail:4", "exptail:8", "exptail:16"};
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  double r_step_ = 0.1;
  int radial_ = 1600;
  int angular_ = 256;
  double a_ = 1.0;
  double b_ = 0.0;
  std::vector<double> a_values_{1.0, 2.0, 3.0};
  double b_max_ = 4.0;
  double b_step_ = 0.25;
  bool sampling_aware_ = true;
  int polynomials_ = 0;
  int degree_ = 6;
  int trials_ = 0;
};

}  // namespace

std::unique_ptr<Command> make_growth() { return std::make_unique<GrowthCommand>(); }

}  // namespace deskcech::cli
