#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "deskcech/covering.hpp"

namespace deskcech::cochain {

using MultiIndex = std::vector<int>;

// Sorts alpha in place; returns the parity sign of the sorting permutation,
// or 0 when an index repeats.
int sort_with_sign(MultiIndex& alpha);

// Flag complex over a symmetric adjacency: a multi-index has nonempty
// intersection iff its entries are pairwise adjacent. Exact for boxes.
class Nerve {
 public:
  Nerve() = default;
  explicit Nerve(std::vector<std::vector<int>> neighbor_lists);
  static Nerve from_edges(int index_count, const std::vector<std::pair<int, int>>& edges);
  static Nerve from_cover(const covering::CubeCover& cover);

  int index_count() const { return int(adj_.size()); }
  const std::vector<int>& neighbors(int i) const { return adj_[std::size_t(i)]; }
  bool adjacent(int i, int j) const;
  bool has_simplex(const MultiIndex& alpha) const;  // any order, distinct entries
  // I_alpha: indices outside alpha meeting every member of alpha.
  std::vector<int> extension_set(const MultiIndex& alpha) const;
  // All increasing multi-indices of length sigma+1 with nonempty intersection.
  std::vector<MultiIndex> simplices(int sigma) const;
  // M = max |I_alpha|; attained on single indices.
  int overlap_bound() const;

 private:
  std::vector<std::vector<int>> adj_;
};

// Coefficients with graded norm sum |v_k| e^{n a_k}; restriction is the identity.
struct CoefficientBlock {
  std::vector<double> values;
  std::vector<double> exponents;  // empty: every a_k = 0
};

// Grid samples: keys identify sample points, grade[p] is the first n with the
// point in the sample set A_n; norm_n = max |value| over points of grade <= n.
struct SampleBlock {
  std::vector<std::int64_t> keys;  // strictly increasing
  std::vector<int> grades;
  std::vector<std::complex<double>> values;
};

using ValueBlock = std::variant<CoefficientBlock, SampleBlock>;

double block_norm(const ValueBlock& v, int n);
ValueBlock scaled(const ValueBlock& v, double s);
bool block_is_zero(const ValueBlock& v);
// Largest entry modulus.
double block_max_abs(const ValueBlock& v);

class Cochain {
 public:
  explicit Cochain(int degree = 0) : degree_(degree) {}

  int degree() const { return degree_; }
  const std::map<MultiIndex, ValueBlock>& components() const { return values_; }

  // Stores v at alpha; alpha may be in any order, the sign is absorbed.
  void set(MultiIndex alpha, const ValueBlock& v);
  // Antisymmetric read; nullopt when absent or when alpha repeats an index.
  std::optional<ValueBlock> get(MultiIndex alpha) const;

  Cochain scaled(double s) const;
  bool empty() const { return values_.empty(); }

 private:
  int degree_;
  std::map<MultiIndex, ValueBlock> values_;
};

// (delta c)_beta = sum_j (-1)^j c_{beta without beta_j}, restricted to beta.
Cochain coboundary(const Cochain& c, const Nerve& nerve);

// Permutation-invariant positive weights; unspecified indices read default_value.
class WeightSystem {
 public:
  explicit WeightSystem(double default_value = 1.0);
  void set(MultiIndex alpha, double w);
  double at(MultiIndex alpha) const;
  double default_value() const { return default_; }
  const std::map<MultiIndex, double>& entries() const { return w_; }

 private:
  double default_;
  std::map<MultiIndex, double> w_;
};

// Sum over stored increasing indices of C_alpha * norm_n(c_alpha).
double weighted_norm(const Cochain& c, const WeightSystem& C, int n);

// C over (sigma+1)-indices dominates D over (sigma+2)-indices.
bool weight_dominates(const WeightSystem& C, const WeightSystem& D, const Nerve& nerve,
                      int sigma);

struct NormBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  int overlap_bound = 0;
  bool pass = false;
};

NormBoundReport coboundary_norm_bound_check(const Cochain& c, const WeightSystem& C,
                                            const WeightSystem& D, const Nerve& nerve, int n);

// sup phi <= gamma^exponent * inf phi and phi >= 0 on every cube's probe grid.
bool gamma_class_check(const covering::Field& phi, const covering::CubeCover& cover,
                       double gamma, double exponent = 1.0, int probes_per_axis = 4);

// Matrix of delta on scalar cochains: rows index simplices(sigma+1), columns simplices(sigma).
Eigen::MatrixXd coboundary_matrix(const Nerve& nerve, int sigma);

// C_alpha = max over probes of the intersection box of exp(-phi), raised to the
// weight of any extension alpha i so the weights shrink along the nerve.
WeightSystem exponential_weights(const covering::Field& phi, const covering::CubeCover& cover,
                                 const Nerve& nerve, int sigma, int probes_per_axis = 4);

// Random flag complex on index_count vertices with every degree <= max_degree.
Nerve random_nerve(std::uint64_t seed, int index_count, int max_degree, double edge_probability = 0.5);

// Random cochain on every sigma-simplex; integer entries in [-9, 9] or reals in
// [-1, 1], `length` coefficients per block over one shared nondecreasing
// exponent sequence.
Cochain random_cochain(const Nerve& nerve, int sigma, std::uint64_t seed, bool integer,
                       int length = 3);

// Weights on sigma- and (sigma+1)-simplices with C dominating D.
std::pair<WeightSystem, WeightSystem> random_dominated_weights(const Nerve& nerve, int sigma,
                                                               std::uint64_t seed);

}  // namespace deskcech::cochain
