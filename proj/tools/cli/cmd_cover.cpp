#include <cmath>

#include "common.hpp"
#include "deskcech/cochain.hpp"
#include "deskcech/covering.hpp"

namespace deskcech::cli {

namespace {

using covering::Field;
using covering::PointView;

double euclid(PointView x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double parse_number(const std::string& text, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError("field 'phi': bad number '" + text + "' in '" + spec + "'");
  }
}

// const:c | affine:a,b (a + b|x|) | exp (e^|x|) | random[:floor]
Field parse_phi(const std::string& spec, int N, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "const") {
    const double c = parse_number(rest, spec);
    if (!(c > 0.0)) throw InputError("field 'phi': constant must be positive");
    return [c](PointView) { return c; };
  }
  if (kind == "affine") {
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw InputError("field 'phi': affine needs 'a,b'");
    const double a = parse_number(rest.substr(0, comma), spec);
    const double b = parse_number(rest.substr(comma + 1), spec);
    if (!(a > 0.0) || b < 0.0) throw InputError("field 'phi': affine needs a > 0 and b >= 0");
    return [a, b](PointView x) { return a + b * euclid(x); };
  }
  if (kind == "exp" && rest.empty()) return [](PointView x) { return std::exp(euclid(x)); };
  if (kind == "random") {
    const double floor = rest.empty() ? 1.0 : parse_number(rest, spec);
    if (!(floor > 0.0)) throw InputError("field 'phi': random floor must be positive");
    return covering::random_lipschitz_field(N, seed, floor);
  }
  throw InputError("field 'phi': unknown profile '" + spec + "' (const:c, affine:a,b, exp, random[:floor])");
}

json cubes_json(const std::vector<covering::Cube>& cubes) {
  json arr = json::array();
  for (const auto& c : cubes) arr.push_back({{"corner", c.lower}, {"side", c.side}});
  return arr;
}

class CoverCommand : public Command {
 public:
  std::string name() const override { return "cover"; }
  std::string help() const override { return "adaptive cube cover with overlap and dominance report"; }

  void setup(Params& p, std::string&) override {
    p.add("phi", phi_, "const:c | affine:a,b | exp | random[:floor]");
    p.add("dim", dim_, "dimension N")->check(CLI::Range(1, 6));
    p.add("radius", radius_, "half-width of the covered box");
    p.add("gamma", gamma_, "also check sup <= gamma inf of phi per cube (0: off)");
    p.add("probes", probes_, "probe points per axis and cube");
    p.add("random-probes", random_probes_, "extra random probes per cube");
  }

  void execute(Run& r) override {
    if (!(radius_ > 0.0)) throw InputError("field 'radius': must be positive");
    if (probes_ < 1) throw InputError("field 'probes': must be at least 1");
    const Field phi = parse_phi(phi_, dim_, r.seed);
    r.meta["phi"] = phi_;
    r.meta["dimension"] = dim_;
    r.meta["radius"] = radius_;
    r.meta["probes"] = probes_;

    covering::CoverOptions opt;
    opt.probes_per_axis = probes_;
    const auto cover = covering::build_cube_cover(phi, dim_, radius_, opt);
    const auto rep = covering::verify_cover(cover, phi, radius_, probes_, random_probes_, r.seed);
    const auto steps = covering::step_sequence_violation(cover.steps, std::ceil(radius_));

    r.check("cover.steps", steps.empty(), steps.empty() ? std::to_string(cover.steps.size()) + " break points" : steps);
    r.check("cover.overlap", rep.overlap_ok,
            "max " + std::to_string(rep.max_overlap) + " <= " + std::to_string(rep.overlap_bound));
    r.check("cover.side_ratio", rep.side_ratio_ok, std::to_string(rep.cube_count) + " cubes");
    r.check("cover.enlargement", rep.enlargement_ok, "");
    r.check("cover.dominance", rep.dominance_ok,
            "min phi - s = " + num(rep.worst_dominance_margin) + ", violations " +
                std::to_string(rep.dominance_violations));
    r.check("cover.region", rep.covers_region, "");
    bool gamma_ok = true;
    if (gamma_ > 0.0) {
      gamma_ok = cochain::gamma_class_check(phi, cover, gamma_, 1.0, probes_);
      r.check("cover.gamma_class", gamma_ok, "gamma " + num(gamma_));
    }

    json doc;
    doc["dimension"] = cover.dimension;
    doc["cubes"] = cubes_json(cover.cubes);
    doc["base_cubes"] = cubes_json(cover.base_cubes);
    doc["neighbors"] = cover.neighbors;
    doc["steps"] = cover.steps.t;
    r.write_json("cover.json", doc);

    json report;
    report["cube_count"] = rep.cube_count;
    report["max_overlap"] = rep.max_overlap;
    report["overlap_bound"] = rep.overlap_bound;
    report["overlap_ok"] = rep.overlap_ok;
    report["side_ratio_ok"] = rep.side_ratio_ok;
    report["enlargement_ok"] = rep.enlargement_ok;
    report["dominance_ok"] = rep.dominance_ok;
    report["dominance_violations"] = rep.dominance_violations;
    report["worst_dominance_margin"] = rep.worst_dominance_margin;
    report["covers_region"] = rep.covers_region;
    report["step_violation"] = steps;
    if (gamma_ > 0.0) report["gamma_class_ok"] = gamma_ok;
    r.write_json("cover_report.json", report);
  }

 private:
  std::string phi_ = "const:1";
  int dim_ = 2;
  double radius_ = 4.0;
  double gamma_ = 0.0;
  int probes_ = 4;
  int random_probes_ = 0;
};

}  // namespace

std::unique_ptr<Command> make_cover() { return std::make_unique<CoverCommand>(); }

}  // namespace deskcech::cli
