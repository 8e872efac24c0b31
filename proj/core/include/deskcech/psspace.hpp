#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace deskcech::psspace {

using Coefficients = std::vector<std::complex<double>>;

// Nondecreasing nonnegative exponents a_k, k = 0..K_max.
class ExponentSequence {
 public:
  explicit ExponentSequence(std::vector<double> a);
  static ExponentSequence root(int d, std::size_t count);  // a_k = k^{1/d}
  std::size_t size() const { return a_.size(); }
  double operator[](std::size_t k) const { return a_[k]; }
  const std::vector<double>& values() const { return a_; }

 private:
  std::vector<double> a_;
};

// sum_k |x_k| e^{rho a_k}
double power_norm(const Coefficients& x, const ExponentSequence& a, double rho);

// Grade-n norm of a finite vector.
using GradedNorm = std::function<double(const Coefficients&, int)>;

// (sum_k |x_k|^2 e^{2 n a_k})^{1/2} and its dual (weights e^{-n a_k}).
GradedNorm weighted_l2(const ExponentSequence& a);
GradedNorm weighted_l2_dual(const ExponentSequence& a);
// power_norm at rho = n and its dual max_k |y_k| e^{-n a_k}.
GradedNorm weighted_l1(const ExponentSequence& a);
GradedNorm weighted_linf_dual(const ExponentSequence& a);

struct StandardConstants {
  std::vector<int> grades;         // interior grades n
  std::vector<double> constants;   // max ratio |x|_n^2 / (|x|_{n-1} |x|_{n+1})
  std::size_t skipped = 0;         // zero vectors
};

StandardConstants dn_standard_constant(const std::vector<Coefficients>& samples,
                                       const GradedNorm& norm, int n_min, int n_max);

using Exponents = std::vector<int>;

struct MonomialEnumeration {
  int N = 0;
  std::vector<Exponents> monomials;  // nondecreasing total degree, lexicographic inside a degree
  std::vector<std::uint64_t> counts;  // counts[m] = #{k : s(z_k) <= m} for complete degrees m
  std::size_t size() const { return monomials.size(); }
};

int total_degree(const Exponents& e);

// At least K monomials; the last degree is completed.
MonomialEnumeration enumerate_monomials(int N, std::size_t K);

// Exact binomial(N+m, m) with overflow checking.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);
// Decimal string of binomial(n, k) in arbitrary precision.
std::string binomial_big(unsigned n, unsigned k);

struct RatioRow {
  std::size_t k = 0;  // 1-based position
  int degree = 0;
  double ratio = 0.0;  // s(z_k) / k^{1/N}
  double lower = 0.0;  // m / binom(N+m, m)^{1/N}
  double upper = 0.0;  // m / (binom(N+m-1, m-1) + 1)^{1/N}
  bool within = false;  // exact integer comparison
};

struct RatioStudy {
  int N = 0;
  std::vector<RatioRow> rows;
  bool sandwich_holds = false;
  double limit = 0.0;      // (N!)^{1/N}
  double final_gap = 0.0;  // |ratio - limit| at the largest k
  std::vector<double> bound_gap;  // upper - lower per complete degree m >= 1
};

RatioStudy monomial_ratio_study(int N, std::size_t K);

// table[k][n] = |f_k|_n
using NormTable = std::vector<std::vector<double>>;

struct TameReport {
  std::vector<double> b1_constants;       // per grade n
  std::vector<bool> attained_at_edge;     // sup reached at the last k with growth toward it
  bool b1_bounded = false;
  bool b2_checked = false;
  bool b2_holds = false;
  double b2_worst = 0.0;  // max of |lambda_k| / (|f|_{an+b} e^{-n a_k})
};

// One test function: coefficients lambda_k and the values |f|_m for grades m.
struct CoefficientFunctional {
  Coefficients lambda;
  std::vector<double> grade_norms;
};

TameReport tame_basis_check(const NormTable& table, const ExponentSequence& a, double slope,
                            double shift, const std::vector<CoefficientFunctional>& family = {});
TameReport tame_basis_check(const NormTable& table, int d, double slope, double shift,
                            const std::vector<CoefficientFunctional>& family = {});

// Polydisc sup norms e^{n s(alpha)} of the enumerated monomials, grades 0..n_max.
NormTable monomial_norm_table(const MonomialEnumeration& e, int n_max);
ExponentSequence degree_sequence(const MonomialEnumeration& e);

// sup over the torus |z_j| = e^n of |sum_alpha c_alpha z^alpha|, sampled on
// `per_axis` points per circle.
double torus_sup(const MonomialEnumeration& e, const Coefficients& c, double n, int per_axis);

std::string norm_table_csv(const NormTable& t);

}  // namespace deskcech::psspace
