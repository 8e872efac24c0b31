#include "deskcech/cochain.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "deskcech/errors.hpp"

namespace deskcech::cochain {

int sort_with_sign(MultiIndex& a) {
  int sign = 1;
  // insertion sort counts adjacent transpositions
  for (std::size_t i = 1; i < a.size(); ++i) {
    for (std::size_t j = i; j > 0 && a[j - 1] > a[j]; --j) {
      std::swap(a[j - 1], a[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < a.size(); ++i)
    if (a[i] == a[i - 1]) return 0;
  return sign;
}

Nerve::Nerve(std::vector<std::vector<int>> lists) : adj_(std::move(lists)) {
  const int n = int(adj_.size());
  for (int i = 0; i < n; ++i) {
    auto& v = adj_[std::size_t(i)];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (int j : v) {
      if (j < 0 || j >= n || j == i) throw DomainError("neighbor index out of range or self");
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j : adj_[std::size_t(i)])
      if (!adjacent(j, i)) throw DomainError("intersection predicate is not symmetric");
}

Nerve Nerve::from_edges(int index_count, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> lists(static_cast<std::size_t>(index_count));
  for (auto [i, j] : edges) {
    if (i == j) continue;
    lists[std::size_t(i)].push_back(j);
    lists[std::size_t(j)].push_back(i);
  }
  return Nerve(std::move(lists));
}

Nerve Nerve::from_cover(const covering::CubeCover& cover) { return Nerve(cover.neighbors); }

bool Nerve::adjacent(int i, int j) const {
  const auto& v = adj_[std::size_t(i)];
  return std::binary_search(v.begin(), v.end(), j);
}

bool Nerve::has_simplex(const MultiIndex& alpha) const {
  for (std::size_t a = 0; a < alpha.size(); ++a) {
    if (alpha[a] < 0 || alpha[a] >= index_count()) return false;
    for (std::size_t b = a + 1; b < alpha.size(); ++b)
      if (!adjacent(alpha[a], alpha[b])) return false;
  }
  return !alpha.empty();
}

std::vector<int> Nerve::extension_set(const MultiIndex& alpha) const {
  std::vector<int> out;
  if (alpha.empty()) return out;
  for (int i : adj_[std::size_t(alpha[0])]) {
    bool all = true;
    for (std::size_t a = 1; a < alpha.size() && all; ++a) all = i != alpha[a] && adjacent(i, alpha[a]);
    if (all && std::find(alpha.begin(), alpha.end(), i) == alpha.end()) out.push_back(i);
  }
  return out;
}

std::vector<MultiIndex> Nerve::simplices(int sigma) const {
  std::vector<MultiIndex> out;
  if (sigma < 0) return out;
  MultiIndex cur;
  // extend increasing cliques using higher neighbors only
  auto rec = [&](auto&& self, const std::vector<int>& cand) -> void {
    if (int(cur.size()) == sigma + 1) {
      out.push_back(cur);
      return;
    }
    for (std::size_t a = 0; a < cand.size(); ++a) {
      const int v = cand[a];
      std::vector<int> next;
      for (std::size_t b = a + 1; b < cand.size(); ++b)
        if (adjacent(v, cand[b])) next.push_back(cand[b]);
      cur.push_back(v);
      self(self, next);
      cur.pop_back();
    }
  };
  std::vector<int> all(static_cast<std::size_t>(index_count()));
  for (int i = 0; i < index_count(); ++i) all[std::size_t(i)] = i;
  rec(rec, all);
  return out;
}

int Nerve::overlap_bound() const {
  std::size_t m = 0;
  for (const auto& v : adj_) m = std::max(m, v.size());
  return int(m);
}

namespace {

const char* kMixed = "cochain mixes coefficient and sample blocks";

void add_into(ValueBlock& acc, const ValueBlock& v, double sign) {
  if (auto* a = std::get_if<CoefficientBlock>(&acc)) {
    const auto* b = std::get_if<CoefficientBlock>(&v);
    if (!b) throw DomainError(kMixed);
    if (b->values.size() != a->values.size() || b->exponents != a->exponents)
      throw DomainError("coefficient blocks have different shapes");
    for (std::size_t k = 0; k < a->values.size(); ++k) a->values[k] += sign * b->values[k];
    return;
  }
  auto& a = std::get<SampleBlock>(acc);
  const auto* b = std::get_if<SampleBlock>(&v);
  if (!b) throw DomainError(kMixed);
  // keep only keys present in both (restriction to the smaller sample set)
  SampleBlock r;
  std::size_t p = 0, q = 0;
  while (p < a.keys.size() && q < b->keys.size()) {
    if (a.keys[p] < b->keys[q]) ++p;
    else if (b->keys[q] < a.keys[p]) ++q;
    else {
      r.keys.push_back(a.keys[p]);
      r.grades.push_back(std::max(a.grades[p], b->grades[q]));
      r.values.push_back(a.values[p] + sign * b->values[q]);
      ++p;
      ++q;
    }
  }
  a = std::move(r);
}

}  // namespace

double block_norm(const ValueBlock& v, int n) {
  if (const auto* c = std::get_if<CoefficientBlock>(&v)) {
    double s = 0.0;
    for (std::size_t k = 0; k < c->values.size(); ++k) {
      const double a = c->exponents.empty() ? 0.0 : c->exponents[k];
      s += std::abs(c->values[k]) * std::exp(double(n) * a);
    }
    return s;
  }
  const auto& s = std::get<SampleBlock>(v);
  double m = 0.0;
  for (std::size_t p = 0; p < s.keys.size(); ++p)
    if (s.grades[p] <= n) m = std::max(m, std::abs(s.values[p]));
  return m;
}

ValueBlock scaled(const ValueBlock& v, double f) {
  ValueBlock out = v;
  if (auto* c = std::get_if<CoefficientBlock>(&out)) {
    for (auto& x : c->values) x *= f;
  } else {
    for (auto& x : std::get<SampleBlock>(out).values) x *= f;
  }
  return out;
}

double block_max_abs(const ValueBlock& v) {
  double m = 0.0;
  if (const auto* c = std::get_if<CoefficientBlock>(&v)) {
    for (double x : c->values) m = std::max(m, std::abs(x));
  } else {
    for (auto x : std::get<SampleBlock>(v).values) m = std::max(m, std::abs(x));
  }
  return m;
}

bool block_is_zero(const ValueBlock& v) { return block_max_abs(v) == 0.0; }

void Cochain::set(MultiIndex alpha, const ValueBlock& v) {
  if (int(alpha.size()) != degree_ + 1) throw DomainError("multi-index length must be degree + 1");
  const int sign = sort_with_sign(alpha);
  if (sign == 0) throw DomainError("multi-index repeats an index");
  values_[alpha] = sign > 0 ? v : cochain::scaled(v, -1.0);
}

std::optional<ValueBlock> Cochain::get(MultiIndex alpha) const {
  if (int(alpha.size()) != degree_ + 1) return std::nullopt;
  const int sign = sort_with_sign(alpha);
  if (sign == 0) return std::nullopt;
  auto it = values_.find(alpha);
  if (it == values_.end()) return std::nullopt;
  return sign > 0 ? it->second : cochain::scaled(it->second, -1.0);
}

Cochain Cochain::scaled(double s) const {
  Cochain c(degree_);
  for (const auto& [k, v] : values_) c.values_[k] = cochain::scaled(v, s);
  return c;
}

Cochain coboundary(const Cochain& c, const Nerve& nerve) {
  const int sigma = c.degree();
  Cochain out(sigma + 1);
  std::set<MultiIndex> targets;
  for (const auto& [alpha, v] : c.components()) {
    if (!nerve.has_simplex(alpha)) throw DomainError("cochain is supported on an empty intersection");
    for (int i : nerve.extension_set(alpha)) {
      MultiIndex beta = alpha;
      beta.insert(std::upper_bound(beta.begin(), beta.end(), i), i);
      targets.insert(std::move(beta));
    }
  }
  for (const auto& beta : targets) {
    std::optional<ValueBlock> acc;
    for (std::size_t j = 0; j < beta.size(); ++j) {
      MultiIndex face;
      face.reserve(beta.size() - 1);
      for (std::size_t q = 0; q < beta.size(); ++q)
        if (q != j) face.push_back(beta[q]);
      auto it = c.components().find(face);
      if (it == c.components().end()) continue;
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      if (!acc) acc = cochain::scaled(it->second, sign);
      else add_into(*acc, it->second, sign);
    }
    if (acc) out.set(beta, *acc);
  }
  return out;
}

WeightSystem::WeightSystem(double default_value) : default_(default_value) {
  if (!(default_value > 0.0 && default_value <= 1.0)) throw DomainError("weights must lie in (0, 1]");
}

void WeightSystem::set(MultiIndex alpha, double w) {
  if (!(w > 0.0 && w <= 1.0)) throw DomainError("weights must lie in (0, 1]");
  if (sort_with_sign(alpha) == 0) throw DomainError("multi-index repeats an index");
  w_[alpha] = w;
}

double WeightSystem::at(MultiIndex alpha) const {
  sort_with_sign(alpha);
  auto it = w_.find(alpha);
  return it == w_.end() ? default_ : it->second;
}

double weighted_norm(const Cochain& c, const WeightSystem& C, int n) {
  double s = 0.0;
  for (const auto& [alpha, v] : c.components()) s += C.at(alpha) * block_norm(v, n);
  return s;
}

bool weight_dominates(const WeightSystem& C, const WeightSystem& D, const Nerve& nerve,
                      int sigma) {
  for (const auto& alpha : nerve.simplices(sigma)) {
    const double ca = C.at(alpha);
    for (int i : nerve.extension_set(alpha)) {
      MultiIndex beta = alpha;
      beta.push_back(i);
      if (D.at(beta) > ca) return false;
    }
  }
  return true;
}

NormBoundReport coboundary_norm_bound_check(const Cochain& c, const WeightSystem& C,
                                            const WeightSystem& D, const Nerve& nerve, int n) {
  if (!weight_dominates(C, D, nerve, c.degree()))
    throw DomainError("weight system C does not dominate D on this nerve");
  NormBoundReport r;
  r.overlap_bound = nerve.overlap_bound();
  r.lhs = weighted_norm(coboundary(c, nerve), D, n);
  r.rhs = double(r.overlap_bound) * double(c.degree() + 2) * weighted_norm(c, C, n);
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

bool gamma_class_check(const covering::Field& phi, const covering::CubeCover& cover,
                       double gamma, double exponent, int probes_per_axis) {
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
  const double bound = std::pow(gamma, exponent);
  for (const auto& k : cover.cubes) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& x : covering::probe_grid(k, probes_per_axis)) {
      const double v = phi(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(lo >= 0.0) || hi > bound * lo) return false;
  }
  return true;
}

Eigen::MatrixXd coboundary_matrix(const Nerve& nerve, int sigma) {
  const auto cols = nerve.simplices(sigma);
  const auto rows = nerve.simplices(sigma + 1);
  std::map<MultiIndex, int> col_of;
  for (std::size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = int(j);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& beta = rows[r];
    for (std::size_t j = 0; j < beta.size(); ++j) {
      MultiIndex face;
      for (std::size_t q = 0; q < beta.size(); ++q)
        if (q != j) face.push_back(beta[q]);
      m(Eigen::Index(r), col_of.at(face)) += (j % 2 == 0) ? 1.0 : -1.0;
    }
  }
  return m;
}

WeightSystem exponential_weights(const covering::Field& phi, const covering::CubeCover& cover,
                                 const Nerve& nerve, int sigma, int probes_per_axis) {
  const std::size_t N = std::size_t(cover.dimension);
  // sup of exp(-phi) over a probe lattice spanning the closed intersection box
  auto sampled_sup = [&](const MultiIndex& alpha) {
    covering::Point lo(N, -std::numeric_limits<double>::infinity());
    covering::Point hi(N, std::numeric_limits<double>::infinity());
    for (int i : alpha) {
      const auto& k = cover.cubes[std::size_t(i)];
      for (std::size_t j = 0; j < N; ++j) {
        lo[j] = std::max(lo[j], k.lower[j]);
        hi[j] = std::min(hi[j], k.upper(j));
      }
    }
    double best = 0.0;
    std::vector<int> idx(N, 0);
    covering::Point x(N);
    while (true) {
      for (std::size_t j = 0; j < N; ++j)
        x[j] = lo[j] + (hi[j] - lo[j]) * (double(idx[j]) / std::max(1, probes_per_axis));
      best = std::max(best, std::exp(-phi(x)));
      std::size_t j = 0;
      while (j < N && ++idx[j] > probes_per_axis) idx[j++] = 0;
      if (j == N) break;
    }
    return best;
  };
  // Sub-boxes are probed on their own lattices, so a plain sampled sup can rise
  // when passing to a smaller intersection. Folding in the weights of every
  // extension keeps C_alpha >= C_{alpha i} at any grade, which makes the weights
  // of consecutive degrees dominate each other.
  std::map<MultiIndex, double> memo;
  std::function<double(const MultiIndex&)> weight = [&](const MultiIndex& alpha) {
    if (auto it = memo.find(alpha); it != memo.end()) return it->second;
    double v = sampled_sup(alpha);
    for (int i : nerve.extension_set(alpha)) {
      MultiIndex beta = alpha;
      beta.push_back(i);
      std::sort(beta.begin(), beta.end());
      v = std::max(v, weight(beta));
    }
    memo.emplace(alpha, v);
    return v;
  };
  WeightSystem w(1.0);
  for (const auto& alpha : nerve.simplices(sigma))
    w.set(alpha, std::min(1.0, std::max(weight(alpha), std::numeric_limits<double>::min())));
  return w;
}

Nerve random_nerve(std::uint64_t seed, int index_count, int max_degree, double edge_probability) {
  if (index_count < 1 || max_degree < 0) throw DomainError("bad random nerve size");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(edge_probability);
  std::vector<int> degree(std::size_t(index_count), 0);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < index_count; ++i)
    for (int j = i + 1; j < index_count; ++j) {
      if (!keep(rng)) continue;
      if (degree[std::size_t(i)] >= max_degree || degree[std::size_t(j)] >= max_degree) continue;
      ++degree[std::size_t(i)];
      ++degree[std::size_t(j)];
      edges.emplace_back(i, j);
    }
  return Nerve::from_edges(index_count, edges);
}

Cochain random_cochain(const Nerve& nerve, int sigma, std::uint64_t seed, bool integer, int length) {
  if (length < 1) throw DomainError("block length must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ints(-9, 9);
  std::uniform_real_distribution<double> reals(-1.0, 1.0), expo(0.0, 1.0);
  // one coefficient space for every simplex
  std::vector<double> exponents;
  double a = 0.0;
  for (int k = 0; k < length; ++k) {
    exponents.push_back(a);
    a += expo(rng);
  }
  Cochain c(sigma);
  for (const auto& alpha : nerve.simplices(sigma)) {
    CoefficientBlock b;
    b.exponents = exponents;
    for (int k = 0; k < length; ++k) b.values.push_back(integer ? double(ints(rng)) : reals(rng));
    c.set(alpha, b);
  }
  return c;
}

std::pair<WeightSystem, WeightSystem> random_dominated_weights(const Nerve& nerve, int sigma,
                                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  WeightSystem C(1.0), D(1.0);
  for (const auto& alpha : nerve.simplices(sigma)) C.set(alpha, u(rng));
  for (const auto& beta : nerve.simplices(sigma + 1)) {
    double m = 1.0;
    for (std::size_t j = 0; j < beta.size(); ++j) {
      MultiIndex face = beta;
      face.erase(face.begin() + std::ptrdiff_t(j));
      m = std::min(m, C.at(face));
    }
    D.set(beta, m * u(rng));
  }
  return {C, D};
}

}  // namespace deskcech::cochain
