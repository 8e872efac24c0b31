#include "deskcech/psspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "deskcech/errors.hpp"

namespace deskcech::psspace {

ExponentSequence::ExponentSequence(std::vector<double> a) : a_(std::move(a)) {
  if (a_.empty()) throw DomainError("exponent sequence is empty");
  for (std::size_t k = 0; k < a_.size(); ++k) {
    if (!(a_[k] >= 0.0)) throw DomainError("exponents must be nonnegative");
    if (k > 0 && a_[k] < a_[k - 1]) throw DomainError("exponents must be nondecreasing");
  }
}

ExponentSequence ExponentSequence::root(int d, std::size_t count) {
  if (d < 1) throw DomainError("d must be positive");
  std::vector<double> a(count);
  for (std::size_t k = 0; k < count; ++k) a[k] = std::pow(double(k), 1.0 / d);
  return ExponentSequence(std::move(a));
}

double power_norm(const Coefficients& x, const ExponentSequence& a, double rho) {
  if (x.size() > a.size()) throw DomainError("vector longer than its exponent sequence");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += std::abs(x[k]) * std::exp(rho * a[k]);
  return s;
}

GradedNorm weighted_l2(const ExponentSequence& a) {
  return [a](const Coefficients& x, int n) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += std::norm(x[k]) * std::exp(2.0 * n * a[k]);
    return std::sqrt(s);
  };
}

GradedNorm weighted_l2_dual(const ExponentSequence& a) {
  return [a](const Coefficients& y, int n) {
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) s += std::norm(y[k]) * std::exp(-2.0 * n * a[k]);
    return std::sqrt(s);
  };
}

GradedNorm weighted_l1(const ExponentSequence& a) {
  return [a](const Coefficients& x, int n) { return power_norm(x, a, double(n)); };
}

GradedNorm weighted_linf_dual(const ExponentSequence& a) {
  return [a](const Coefficients& y, int n) {
    double m = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) m = std::max(m, std::abs(y[k]) * std::exp(-double(n) * a[k]));
    return m;
  };
}

StandardConstants dn_standard_constant(const std::vector<Coefficients>& samples,
                                       const GradedNorm& norm, int n_min, int n_max) {
  StandardConstants out;
  for (int n = n_min; n <= n_max; ++n) {
    out.grades.push_back(n);
    out.constants.push_back(0.0);
  }
  for (const auto& x : samples) {
    bool zero = std::all_of(x.begin(), x.end(), [](auto v) { return v == 0.0; });
    if (zero) {
      ++out.skipped;
      continue;
    }
    for (std::size_t i = 0; i < out.grades.size(); ++i) {
      const int n = out.grades[i];
      const double a = norm(x, n - 1), b = norm(x, n), c = norm(x, n + 1);
      if (!(a > 0.0 && c > 0.0)) throw DomainError("norm vanishes on a nonzero sample");
      out.constants[i] = std::max(out.constants[i], (b * b) / (a * c));
    }
  }
  return out;
}

int total_degree(const Exponents& e) {
  int s = 0;
  for (int v : e) s += v;
  return s;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ typedef unsigned __int128 u128;
  u128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) throw DomainError("binomial overflows 64 bits");
  }
  return std::uint64_t(r);
}

std::string binomial_big(unsigned n, unsigned k) {
  using boost::multiprecision::cpp_int;
  if (k > n) return "0";
  cpp_int r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r.str();
}

namespace {

// Exponent tuples of total degree m in descending lexicographic order.
void degree_block(int N, int m, std::vector<Exponents>& out) {
  Exponents e(std::size_t(N), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == N - 1) {
      e[std::size_t(pos)] = left;
      out.push_back(e);
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[std::size_t(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, m);
}

}  // namespace

MonomialEnumeration enumerate_monomials(int N, std::size_t K) {
  if (N < 1 || K < 1) throw DomainError("need N >= 1 and K >= 1");
  MonomialEnumeration e;
  e.N = N;
  for (int m = 0; e.monomials.size() < K; ++m) {
    degree_block(N, m, e.monomials);
    e.counts.push_back(e.monomials.size());
  }
  return e;
}

RatioStudy monomial_ratio_study(int N, std::size_t K) {
  RatioStudy st;
  st.N = N;
  auto e = enumerate_monomials(N, K);
  double fact = 1.0;
  for (int i = 2; i <= N; ++i) fact *= i;
  st.limit = std::pow(fact, 1.0 / N);
  st.sandwich_holds = true;
  for (std::size_t i = 0; i < e.size() && i < K; ++i) {
    RatioRow r;
    r.k = i + 1;
    r.degree = total_degree(e.monomials[i]);
    const double root = std::pow(double(r.k), 1.0 / N);
    r.ratio = r.degree / root;
    if (r.degree == 0) {
      r.within = true;
    } else {
      const auto m = std::uint64_t(r.degree);
      const std::uint64_t top = binomial(std::uint64_t(N) + m, m);
      const std::uint64_t below = binomial(std::uint64_t(N) + m - 1, m - 1);
      r.lower = r.degree / std::pow(double(top), 1.0 / N);
      r.upper = r.degree / std::pow(double(below + 1), 1.0 / N);
      // m / top^{1/N} <= m / k^{1/N} <= m / (below+1)^{1/N}  iff  below + 1 <= k <= top
      r.within = below + 1 <= r.k && r.k <= top;
    }
    st.sandwich_holds = st.sandwich_holds && r.within;
    st.rows.push_back(r);
  }
  const int top_degree = st.rows.empty() ? 0 : st.rows.back().degree;
  for (int m = 1; m <= top_degree; ++m) {
    const auto mm = std::uint64_t(m);
    const double lo = m / std::pow(double(binomial(std::uint64_t(N) + mm, mm)), 1.0 / N);
    const double hi = m / std::pow(double(binomial(std::uint64_t(N) + mm - 1, mm - 1) + 1), 1.0 / N);
    st.bound_gap.push_back(hi - lo);
  }
  if (!st.rows.empty()) st.final_gap = std::abs(st.rows.back().ratio - st.limit);
  return st;
}

TameReport tame_basis_check(const NormTable& table, const ExponentSequence& a, double slope,
                            double shift, const std::vector<CoefficientFunctional>& family) {
  TameReport r;
  if (table.empty()) return r;
  const std::size_t K = table.size();
  if (a.size() < K) throw DomainError("exponent sequence shorter than the table");
  const std::size_t grades = table.front().size();
  r.b1_bounded = true;
  for (std::size_t n = 0; n < grades; ++n) {
    const double e = slope * double(n) + shift;
    double best = 0.0;
    std::size_t arg = 0;
    std::vector<double> ratio(K);
    for (std::size_t k = 0; k < K; ++k) {
      const double v = table[k][n];
      double q = v / std::exp(e * a[k]);
      if (!std::isfinite(q)) q = std::exp(std::log(v) - e * a[k]);
      ratio[k] = q;
      if (q > best) {
        best = q;
        arg = k;
      }
    }
    const bool edge = K >= 2 && arg == K - 1 && ratio[K - 1] > ratio[K - 2];
    r.b1_constants.push_back(best);
    r.attained_at_edge.push_back(edge);
    if (edge || !std::isfinite(best)) r.b1_bounded = false;
  }
  if (!family.empty()) {
    r.b2_checked = true;
    r.b2_holds = true;
    for (const auto& f : family) {
      for (std::size_t n = 0;; ++n) {
        const double g = slope * double(n) + shift;
        const long gi = std::lround(g);
        if (std::abs(g - double(gi)) > 1e-12 || gi < 0 || std::size_t(gi) >= f.grade_norms.size()) break;
        const double fn = f.grade_norms[std::size_t(gi)];
        for (std::size_t k = 0; k < f.lambda.size() && k < a.size(); ++k) {
          const double lam = std::abs(f.lambda[k]);
          if (lam == 0.0) continue;
          const double bound = fn * std::exp(-double(n) * a[k]);
          const double q = bound > 0.0 ? lam / bound : std::numeric_limits<double>::infinity();
          r.b2_worst = std::max(r.b2_worst, q);
          if (q > 1.0 + 1e-12) r.b2_holds = false;
        }
      }
    }
  }
  return r;
}

TameReport tame_basis_check(const NormTable& table, int d, double slope, double shift,
                            const std::vector<CoefficientFunctional>& family) {
  return tame_basis_check(table, ExponentSequence::root(d, table.size()), slope, shift, family);
}

ExponentSequence degree_sequence(const MonomialEnumeration& e) {
  std::vector<double> a;
  a.reserve(e.size());
  for (const auto& m : e.monomials) a.push_back(double(total_degree(m)));
  return ExponentSequence(std::move(a));
}

NormTable monomial_norm_table(const MonomialEnumeration& e, int n_max) {
  NormTable t(e.size(), std::vector<double>(std::size_t(n_max) + 1));
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double s = double(total_degree(e.monomials[k]));
    for (int n = 0; n <= n_max; ++n) t[k][std::size_t(n)] = std::exp(double(n) * s);
  }
  return t;
}

double torus_sup(const MonomialEnumeration& e, const Coefficients& c, double n, int per_axis) {
  const int N = e.N;
  const double radius = std::exp(n);
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<int> idx(std::size_t(N), 0);
  std::vector<std::complex<double>> z(static_cast<std::size_t>(N));
  double best = 0.0;
  while (true) {
    for (int j = 0; j < N; ++j) z[std::size_t(j)] = std::polar(radius, two_pi * idx[std::size_t(j)] / per_axis);
    std::complex<double> v = 0.0;
    for (std::size_t k = 0; k < c.size() && k < e.size(); ++k) {
      if (c[k] == 0.0) continue;
      std::complex<double> term = c[k];
      for (int j = 0; j < N; ++j) term *= std::pow(z[std::size_t(j)], e.monomials[k][std::size_t(j)]);
      v += term;
    }
    best = std::max(best, std::abs(v));
    int j = 0;
    while (j < N && ++idx[std::size_t(j)] == per_axis) idx[std::size_t(j++)] = 0;
    if (j == N) break;
  }
  return best;
}

std::string norm_table_csv(const NormTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << "k";
  const std::size_t grades = t.empty() ? 0 : t.front().size();
  for (std::size_t n = 0; n < grades; ++n) os << ",n" << n;
  os << "\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << k;
    for (double v : t[k]) os << "," << v;
    os << "\n";
  }
  return os.str();
}

}  // namespace deskcech::psspace
