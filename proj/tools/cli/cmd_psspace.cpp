#include <cmath>
#include <random>
#include <sstream>

#include "common.hpp"
#include "deskcech/psspace.hpp"

namespace deskcech::cli {

namespace {

using namespace deskcech::psspace;

class PsspaceCommand : public Command {
 public:
  std::string name() const override { return "psspace"; }
  std::string help() const override { return "monomial counts, root ratios, DN constants and tame basis checks"; }
  double default_tolerance() const override { return 0.05; }

  void setup(Params& p, std::string& mode) override {
    mode = "counts";
    p.mode(mode, {"counts", "ratios", "dn", "tame"});
    p.add("vars", vars_, "number of variables N")->check(CLI::Range(1, 8));
    p.add("max-degree", max_degree_, "largest total degree (counts, tame)");
    p.add("k", k_, "enumerated monomials (ratios)");
    p.add("samples", samples_, "random vectors (dn)");
    p.add("polynomials", polynomials_, "random test polynomials (tame)");
    p.add("length", length_, "vector length (dn)");
    p.add("d", d_, "exponents k^(1/d) (dn)");
    p.add("grades", grades_, "grades checked");
    p.add("slope", slope_, "tame grade map n -> slope n + shift");
    p.add("shift", shift_, "tame grade map shift");
  }

  void execute(Run& r) override {
    r.meta["vars"] = vars_;
    if (r.mode == "counts") return counts(r);
    if (r.mode == "ratios") return ratios(r);
    if (r.mode == "dn") return dn(r);
    tame(r);
  }

 private:
  void counts(Run& r) {
    if (max_degree_ < 0) throw InputError("field 'max-degree': must be nonnegative");
    r.meta["max_degree"] = max_degree_;
    const auto total = binomial(std::uint64_t(vars_) + std::uint64_t(max_degree_), std::uint64_t(max_degree_));
    const auto e = enumerate_monomials(vars_, std::size_t(total));
    std::ostringstream csv;
    csv << "m,count,binomial\n";
    bool ok = e.counts.size() == std::size_t(max_degree_) + 1;
    std::vector<std::string> listed;
    for (int m = 0; m <= max_degree_ && std::size_t(m) < e.counts.size(); ++m) {
      const auto b = binomial(std::uint64_t(vars_) + std::uint64_t(m), std::uint64_t(m));
      ok = ok && e.counts[std::size_t(m)] == b;
      csv << m << "," << e.counts[std::size_t(m)] << "," << b << "\n";
      listed.push_back(std::to_string(e.counts[std::size_t(m)]));
    }
    r.check("psspace.counts", ok, join(listed, ","));
    r.write("counts.csv", csv.str());
  }

  void ratios(Run& r) {
    if (k_ < 1) throw InputError("field 'k': must be positive");
    r.meta["k"] = k_;
    const auto st = monomial_ratio_study(vars_, std::size_t(k_));
    std::ostringstream csv;
    csv.precision(17);
    csv << "k,degree,ratio,lower,upper,within\n";
    for (const auto& row : st.rows)
      csv << row.k << "," << row.degree << "," << row.ratio << "," << row.lower << "," << row.upper << ","
          << (row.within ? 1 : 0) << "\n";
    r.write("ratios.csv", csv.str());
    const double rel = st.final_gap / st.limit;
    r.check("psspace.sandwich", st.sandwich_holds, std::to_string(st.rows.size()) + " rows");
    r.check("psspace.limit", rel <= r.tolerance,
            "ratio " + num(st.rows.back().ratio) + " vs " + num(st.limit) + ", relative gap " + num(rel));
  }

  void dn(Run& r) {
    if (samples_ < 1 || length_ < 1 || grades_ < 1 || d_ < 1)
      throw InputError("field 'samples'/'length'/'grades'/'d': must be positive");
    r.meta["samples"] = samples_;
    r.meta["length"] = length_;
    r.meta["d"] = d_;
    r.meta["grades"] = grades_;
    const auto a = ExponentSequence::root(d_, std::size_t(length_));
    std::mt19937_64 rng(r.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> decay(0.0, 2.0);
    std::vector<Coefficients> xs;
    for (int s = 0; s < samples_; ++s) {
      Coefficients x(static_cast<std::size_t>(length_));
      const double q = decay(rng);
      for (int k = 0; k < length_; ++k)
        x[std::size_t(k)] = std::complex<double>(g(rng), g(rng)) * std::exp(-q * grades_ * a[std::size_t(k)]);
      xs.push_back(std::move(x));
    }
    const auto primal = dn_standard_constant(xs, weighted_l2(a), 1, grades_);
    const auto dual = dn_standard_constant(xs, weighted_l2_dual(a), 1, grades_);
    double worst_p = 0.0, worst_d = 0.0;
    std::ostringstream csv;
    csv.precision(17);
    csv << "n,dn_constant,dual_constant\n";
    for (std::size_t i = 0; i < primal.grades.size(); ++i) {
      worst_p = std::max(worst_p, primal.constants[i]);
      worst_d = std::max(worst_d, dual.constants[i]);
      csv << primal.grades[i] << "," << primal.constants[i] << "," << dual.constants[i] << "\n";
    }
    r.write("dn.csv", csv.str());
    r.check("psspace.dn", worst_p <= 1.0 + 1e-9, "max constant " + num(worst_p));
    r.check("psspace.dn_dual", worst_d <= 1.0 + 1e-9, "max constant " + num(worst_d));
  }

  void tame(Run& r) {
    if (max_degree_ < 0 || grades_ < 1 || polynomials_ < 0)
      throw InputError("field 'max-degree'/'grades'/'polynomials': out of range");
    if (slope_ < 1.0 || shift_ < 0.0) throw InputError("field 'slope'/'shift': need slope >= 1, shift >= 0");
    r.meta["max_degree"] = max_degree_;
    r.meta["grades"] = grades_;
    r.meta["slope"] = slope_;
    r.meta["shift"] = shift_;
    const auto total = binomial(std::uint64_t(vars_) + std::uint64_t(max_degree_), std::uint64_t(max_degree_));
    const auto e = enumerate_monomials(vars_, std::size_t(total));
    const auto table = monomial_norm_table(e, grades_);
    const auto a = degree_sequence(e);

    // Cauchy test functionals: random polynomials, sup over sampled tori; with
    // more points per circle than the degree no coefficient aliases.
    std::vector<CoefficientFunctional> family;
    std::mt19937_64 rng(r.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const int top = int(std::ceil(slope_ * grades_ + shift_));
    for (int s = 0; s < polynomials_; ++s) {
      CoefficientFunctional f;
      for (std::size_t k = 0; k < e.size(); ++k) f.lambda.emplace_back(g(rng), g(rng));
      for (int m = 0; m <= top; ++m) f.grade_norms.push_back(torus_sup(e, f.lambda, m, max_degree_ + 1));
      family.push_back(std::move(f));
    }
    const auto rep = tame_basis_check(table, a, slope_, shift_, family);
    bool exact_one = true;
    double worst = 0.0;
    for (double c : rep.b1_constants) {
      exact_one = exact_one && c == 1.0;
      worst = std::max(worst, std::abs(c - 1.0));
    }
    r.check("psspace.b1", rep.b1_bounded, std::to_string(rep.b1_constants.size()) + " grades");
    if (slope_ == 1.0 && shift_ == 0.0)
      r.check("psspace.b1_exact", exact_one, "max |C_n - 1| " + num(worst));
    if (rep.b2_checked) r.check("psspace.b2", rep.b2_holds, "worst ratio " + num(rep.b2_worst));
    r.write("norm_table.csv", norm_table_csv(table));
    json body;
    body["b1_constants"] = rep.b1_constants;
    body["b1_bounded"] = rep.b1_bounded;
    body["b2_checked"] = rep.b2_checked;
    body["b2_holds"] = rep.b2_holds;
    body["b2_worst"] = rep.b2_worst;
    r.write_json("tame.json", body);
  }

  int vars_ = 2;
  int max_degree_ = 5;
  int k_ = 10000;
  int samples_ = 10000;
  int polynomials_ = 20;
  int length_ = 12;
  int d_ = 1;
  int grades_ = 6;
  double slope_ = 1.0;
  double shift_ = 0.0;
};

}  // namespace

std::unique_ptr<Command> make_psspace() { return std::make_unique<PsspaceCommand>(); }

}  // namespace deskcech::cli
