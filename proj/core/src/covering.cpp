#include "deskcech/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

#include "deskcech/errors.hpp"

namespace deskcech::covering {

namespace {

bool is_power_of_two_ratio(double big, double small) {
  if (small <= 0.0 || big < small) return false;
  int e = 0;
  double m = std::frexp(big / small, &e);
  return m == 0.5;
}

// Calls fn on per_axis^N cell centres then on the 2^N corners, reusing one buffer.
template <class Fn>
void for_each_probe(const Point& lower, double side, int per_axis, Fn&& fn) {
  const std::size_t n = lower.size();
  std::vector<int> idx(n, 0);
  Point x(n);
  const double h = side / per_axis;
  while (true) {
    for (std::size_t j = 0; j < n; ++j) x[j] = lower[j] + (idx[j] + 0.5) * h;
    fn(PointView(x));
    std::size_t j = 0;
    while (j < n && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == n) break;
  }
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    for (std::size_t j = 0; j < n; ++j) x[j] = lower[j] + ((mask >> j) & 1u ? side : 0.0);
    fn(PointView(x));
  }
}

struct KeyHash {
  std::size_t operator()(const std::vector<long>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (long v : k) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Uniform hash grid keyed by the cell of each cube's lower corner.
class CubeHash {
 public:
  explicit CubeHash(const std::vector<Cube>& cubes) : cubes_(cubes) {
    for (const auto& c : cubes) cell_ = std::max(cell_, c.side);
    if (cell_ <= 0.0) cell_ = 1.0;
    for (std::size_t i = 0; i < cubes.size(); ++i) map_[key(cubes[i].lower)].push_back(int(i));
  }

  std::vector<long> key(PointView x) const {
    std::vector<long> k(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) k[j] = long(std::floor(x[j] / cell_));
    return k;
  }

  // Indices whose lower corner cell lies within `reach` cells of x's cell.
  template <class Fn>
  void visit_near(PointView x, int reach, Fn&& fn) const {
    auto base = key(x);
    const std::size_t n = base.size();
    std::vector<int> off(n, -reach);
    auto k = base;
    while (true) {
      for (std::size_t j = 0; j < n; ++j) k[j] = base[j] + off[j];
      auto it = map_.find(k);
      if (it != map_.end())
        for (int i : it->second) fn(i);
      std::size_t j = 0;
      while (j < n && ++off[j] > reach) off[j++] = -reach;
      if (j == n) break;
    }
  }

 private:
  const std::vector<Cube>& cubes_;
  double cell_ = 0.0;
  std::unordered_map<std::vector<long>, std::vector<int>, KeyHash> map_;
};

Cube grown(const Cube& base, double factor) {
  Cube k;
  k.side = base.side * factor;
  k.lower.resize(base.dim());
  for (std::size_t j = 0; j < base.dim(); ++j)
    k.lower[j] = base.lower[j] - 0.5 * (k.side - base.side);
  return k;
}

double probe_min(const Field& phi, const Cube& c, int per_axis) {
  double m = std::numeric_limits<double>::infinity();
  for_each_probe(c.lower, c.side, per_axis, [&](PointView x) { m = std::min(m, phi(x)); });
  return m;
}

// Infima of phi over the shells l <= |x|_inf <= l+1, l = 0..L-1, from a lattice pass.
std::vector<double> shell_infima(const Field& phi, int N, int L, int per_unit) {
  std::vector<double> inf(std::size_t(L), std::numeric_limits<double>::infinity());
  const long per_axis = 2L * L * per_unit + 1;
  const double h = 1.0 / per_unit;
  std::vector<long> idx(std::size_t(N), 0);
  Point x(static_cast<std::size_t>(N));
  while (true) {
    double rho = 0.0;
    for (int j = 0; j < N; ++j) {
      x[j] = -L + idx[j] * h;
      rho = std::max(rho, std::abs(x[j]));
    }
    const double v = phi(PointView(x));
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "phi is not positive at probe point (";
      for (int j = 0; j < N; ++j) os << (j ? ", " : "") << x[j];
      os << ")";
      throw DomainError(os.str());
    }
    int l = std::min(int(std::floor(rho)), L - 1);
    inf[std::size_t(l)] = std::min(inf[std::size_t(l)], v);
    if (rho == std::floor(rho) && l >= 1 && double(l) == rho) inf[std::size_t(l - 1)] = std::min(inf[std::size_t(l - 1)], v);
    int j = 0;
    while (j < N && ++idx[std::size_t(j)] == per_axis) idx[std::size_t(j++)] = 0;
    if (j == N) break;
  }
  return inf;
}

struct BuildAttempt {
  CubeCover cover;
  bool ok = false;
};

BuildAttempt try_build(const Field& phi, int N, double radius, const CoverOptions& opt,
                       const std::vector<double>& raw_inf, double safety) {
  BuildAttempt out;
  const int L = int(raw_inf.size());
  std::vector<double> scaled(raw_inf);
  for (auto& v : scaled) v *= safety;
  CubeCover cover;
  cover.dimension = N;
  cover.steps = step_sequence_from_infima(scaled, double(L));
  (void)radius;

  // Shells of lattice cubes: pitch s, t_k = m s, cubes with some index at -m or m-1.
  const auto& t = cover.steps.t;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double s = t[k] - t[k - 1];
    const long m = std::lround(t[k] / s);
    std::vector<long> c(std::size_t(N), -m);
    while (true) {
      bool outer = false;
      for (long v : c) outer = outer || v == -m || v == m - 1;
      if (outer) {
        Cube q;
        q.side = s;
        q.lower.resize(std::size_t(N));
        for (int j = 0; j < N; ++j) q.lower[std::size_t(j)] = double(c[std::size_t(j)]) * s;
        cover.base_cubes.push_back(std::move(q));
      }
      int j = 0;
      while (j < N && ++c[std::size_t(j)] == m) c[std::size_t(j++)] = -m;
      if (j == N) break;
    }
  }

  cover.base_neighbors = intersecting_pairs(cover.base_cubes, true);

  const std::size_t n = cover.base_cubes.size();
  std::vector<double> excess(n, opt.growth);
  cover.cubes.resize(n);
  auto enlarge = [&](std::size_t i) -> bool {
    const Cube& b = cover.base_cubes[i];
    for (int it = 0; it < 60; ++it) {
      Cube k = grown(b, 1.0 + excess[i]);
      if (k.side > b.side && probe_min(phi, k, opt.probes_per_axis) > k.side * (1.0 + opt.margin)) {
        cover.cubes[i] = std::move(k);
        return true;
      }
      excess[i] *= 0.5;
    }
    return false;
  };
  for (std::size_t i = 0; i < n; ++i)
    if (!enlarge(i)) return out;

  // Enlarged cubes may only meet when their base cubes touch; shrink offenders.
  for (int round = 0; round < 60; ++round) {
    auto nb = intersecting_pairs(cover.cubes, false);
    std::vector<char> bad(n, 0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& bn = cover.base_neighbors[i];
      for (int j : nb[i]) {
        if (!std::binary_search(bn.begin(), bn.end(), j)) {
          bad[i] = bad[std::size_t(j)] = 1;
          any = true;
        }
      }
    }
    if (!any) {
      cover.neighbors = std::move(nb);
      out.cover = std::move(cover);
      out.ok = true;
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!bad[i]) continue;
      excess[i] *= 0.5;
      cover.cubes[i] = grown(cover.base_cubes[i], 1.0 + excess[i]);
    }
  }
  return out;
}

}  // namespace

double StepSequence::value_at(double x) const {
  if (t.size() < 2) return 0.0;
  auto it = std::upper_bound(t.begin(), t.end(), x);
  std::size_t k = std::size_t(it - t.begin());
  if (k == 0) k = 1;
  if (k >= t.size()) k = t.size() - 1;
  return t[k] - t[k - 1];
}

StepSequence step_sequence_from_infima(const std::vector<double>& interval_inf,
                                       double range_limit) {
  if (!(range_limit > 0.0)) throw DomainError("range_limit must be positive");
  const int L = int(std::ceil(range_limit));
  if (int(interval_inf.size()) < L) throw DomainError("need one infimum per unit interval");
  std::vector<double> a(std::size_t(L) + 1);
  double run = 1.0;
  for (int l = 0; l <= L; ++l) {
    // the last interval's infimum also stands in for a_L
    double v = interval_inf[std::size_t(std::min(l, L - 1))];
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "non-positive infimum " << v << " on [" << l << ", " << l + 1 << "]";
      throw DomainError(os.str());
    }
    run = std::min(run, v);
    a[std::size_t(l)] = run;
  }

  StepSequence seq;
  int n0 = 1;
  while (std::ldexp(1.0, -n0) >= a[0]) ++n0;
  seq.n0 = n0;
  double s = std::ldexp(1.0, -n0);
  seq.t = {0.0, s};
  while (seq.t.back() < double(L)) {
    const double cur = seq.t.back();
    const int l = int(std::floor(cur));
    if (s >= a[std::size_t(l) + 1]) s *= 0.5;
    seq.t.push_back(cur + s);
  }
  return seq;
}

Field random_lipschitz_field(int N, std::uint64_t seed, double floor) {
  if (N < 1) throw DomainError("dimension must be positive");
  if (!(floor > 0.0)) throw DomainError("floor must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0), normal_ish(-1.0, 1.0);
  struct Ridge {
    double amp, phase;
    std::vector<double> w;
  };
  std::vector<Ridge> ridges(4);
  for (auto& r : ridges) {
    r.amp = 0.5 * unit(rng);
    r.phase = 6.283185307179586 * unit(rng);
    r.w.resize(std::size_t(N));
    double len = 0.0;
    for (auto& x : r.w) {
      x = normal_ish(rng);
      len += x * x;
    }
    len = std::sqrt(len);
    const double target = unit(rng);  // |w| <= 1
    for (auto& x : r.w) x *= len > 0.0 ? target / len : 0.0;
  }
  return [ridges, floor, N](PointView x) {
    double v = floor;
    for (const auto& r : ridges) {
      double t = r.phase;
      for (int j = 0; j < N; ++j) t += r.w[std::size_t(j)] * x[std::size_t(j)];
      v += r.amp * 0.5 * (1.0 + std::sin(t));
    }
    return v;
  };
}

StepSequence build_step_sequence(const Profile& profile, double range_limit,
                                 const StepOptions& options) {
  if (!(range_limit > 0.0)) throw DomainError("range_limit must be positive");
  const int L = int(std::ceil(range_limit));
  const int m = std::max(2, options.samples_per_unit);
  std::vector<double> inf(std::size_t(L), std::numeric_limits<double>::infinity());
  for (int l = 0; l < L; ++l) {
    for (int i = 0; i <= m; ++i) {
      double x = l + double(i) / m;
      double v = profile(x);
      if (!(v > 0.0)) {
        std::ostringstream os;
        os << "profile is not positive at x = " << x;
        throw DomainError(os.str());
      }
      inf[std::size_t(l)] = std::min(inf[std::size_t(l)], v * options.safety);
    }
  }
  return step_sequence_from_infima(inf, range_limit);
}

std::string step_sequence_violation(const StepSequence& seq, double range_limit) {
  const auto& t = seq.t;
  std::ostringstream os;
  if (t.size() < 2 || t[0] != 0.0) return "sequence must start at 0 with at least one step";
  if (t[1] != std::ldexp(1.0, -seq.n0)) return "first step is not 2^-n0";
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double s = t[k] - t[k - 1];
    if (!(s > 0.0)) {
      os << "non-increasing at k=" << k;
      return os.str();
    }
    if (k + 1 < t.size()) {
      const double r = (t[k + 1] - t[k]) / s;
      if (r != 1.0 && r != 0.5) {
        os << "step ratio " << r << " at k=" << k;
        return os.str();
      }
    }
    if (std::fmod(t[k], s) != 0.0) {
      os << "t[" << k << "] is not a multiple of its step";
      return os.str();
    }
    if (!is_power_of_two_ratio(t[1], s)) {
      os << "step at k=" << k << " is not a dyadic fraction of the first step";
      return os.str();
    }
  }
  for (int l = 1; double(l) <= range_limit; ++l) {
    if (!std::binary_search(t.begin(), t.end(), double(l))) {
      os << "integer " << l << " is missing";
      return os.str();
    }
  }
  if (t.back() < range_limit) return "sequence stops before range_limit";
  return {};
}

Point Cube::center() const {
  Point c(lower);
  for (auto& v : c) v += 0.5 * side;
  return c;
}

bool Cube::contains_open(PointView x) const {
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!(x[j] > lower[j] && x[j] < lower[j] + side)) return false;
  return true;
}

bool closed_intersect(const Cube& a, const Cube& b) {
  for (std::size_t j = 0; j < a.dim(); ++j)
    if (a.lower[j] > b.upper(j) || b.lower[j] > a.upper(j)) return false;
  return true;
}

bool open_intersect(const Cube& a, const Cube& b) {
  for (std::size_t j = 0; j < a.dim(); ++j)
    if (a.lower[j] >= b.upper(j) || b.lower[j] >= a.upper(j)) return false;
  return true;
}

std::vector<Point> probe_grid(const Cube& c, int per_axis) {
  std::vector<Point> pts;
  for_each_probe(c.lower, c.side, per_axis,
                 [&](PointView x) { pts.emplace_back(x.begin(), x.end()); });
  return pts;
}

std::size_t CubeCover::max_overlap() const {
  std::size_t m = 0;
  for (const auto& nb : neighbors) m = std::max(m, nb.size());
  return m;
}

std::int64_t CubeCover::overlap_bound(int N) {
  std::int64_t a = 1, b = 1;
  for (int i = 0; i < N; ++i) {
    a *= 4;
    b *= 2;
  }
  return a - b;
}

std::vector<std::vector<int>> intersecting_pairs(const std::vector<Cube>& cubes, bool closed) {
  std::vector<std::vector<int>> nb(cubes.size());
  CubeHash hash(cubes);
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    hash.visit_near(cubes[i].lower, 1, [&](int j) {
      if (std::size_t(j) == i) return;
      bool hit = closed ? closed_intersect(cubes[i], cubes[std::size_t(j)])
                        : open_intersect(cubes[i], cubes[std::size_t(j)]);
      if (hit) nb[i].push_back(j);
    });
    std::sort(nb[i].begin(), nb[i].end());
  }
  return nb;
}

CubeCover build_cube_cover(const Field& phi, int N, double region_radius,
                           const CoverOptions& options) {
  if (N < 1) throw DomainError("dimension must be at least 1");
  if (!(region_radius > 0.0)) throw DomainError("region radius must be positive");
  const int L = int(std::ceil(region_radius));
  int per_unit = options.shell_samples_per_unit;
  if (per_unit <= 0) per_unit = N <= 2 ? 16 : 8;
  const auto raw = shell_infima(phi, N, L, per_unit);
  double safety = options.safety;
  for (int attempt = 0; attempt <= options.max_rebuilds; ++attempt) {
    auto res = try_build(phi, N, region_radius, options, raw, safety);
    if (res.ok) return std::move(res.cover);
    safety *= 0.5;
  }
  throw NumericalError("cube cover construction did not reach probe-certified dominance");
}

CoverReport verify_cover(const CubeCover& cover, const Field& phi, double region_radius,
                         int probes_per_axis, int random_probes, std::uint64_t seed) {
  CoverReport r;
  const std::size_t n = cover.size();
  const int N = cover.dimension;
  r.cube_count = n;
  r.overlap_bound = CubeCover::overlap_bound(N);

  auto nb = intersecting_pairs(cover.cubes, false);
  for (const auto& v : nb) r.max_overlap = std::max(r.max_overlap, v.size());
  r.overlap_ok = std::int64_t(r.max_overlap) <= r.overlap_bound;

  r.side_ratio_ok = true;
  r.enlargement_ok = n == cover.base_cubes.size();
  auto base_nb = intersecting_pairs(cover.base_cubes, true);
  for (std::size_t i = 0; i < n && r.enlargement_ok; ++i) {
    const Cube& b = cover.base_cubes[i];
    const Cube& k = cover.cubes[i];
    if (!(k.side > b.side)) r.enlargement_ok = false;
    for (int j = 0; j < N; ++j)
      if (!(k.lower[std::size_t(j)] < b.lower[std::size_t(j)] && b.upper(std::size_t(j)) < k.upper(std::size_t(j))))
        r.enlargement_ok = false;
    for (int j : nb[i]) {
      if (!std::binary_search(base_nb[i].begin(), base_nb[i].end(), j)) r.enlargement_ok = false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : nb[i]) {
      const double q = cover.base_cubes[i].side / cover.base_cubes[std::size_t(j)].side;
      if (q != 1.0 && q != 2.0 && q != 0.5) r.side_ratio_ok = false;
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  r.worst_dominance_margin = std::numeric_limits<double>::infinity();
  Point x(static_cast<std::size_t>(N));
  for (std::size_t i = 0; i < n; ++i) {
    const Cube& k = cover.cubes[i];
    auto check = [&](PointView p) {
      const double m = phi(p) - k.side;
      r.worst_dominance_margin = std::min(r.worst_dominance_margin, m);
      if (!(m > 0.0)) ++r.dominance_violations;
    };
    for_each_probe(k.lower, k.side, probes_per_axis, check);
    for (int q = 0; q < random_probes; ++q) {
      for (int j = 0; j < N; ++j) x[std::size_t(j)] = k.lower[std::size_t(j)] + k.side * unit(rng);
      check(x);
    }
  }
  r.dominance_ok = r.dominance_violations == 0;

  // Coverage: box corners, centre and random points must sit in some open cube.
  CubeHash hash(cover.cubes);
  auto covered = [&](PointView p) {
    bool hit = false;
    hash.visit_near(p, 2, [&](int j) {
      if (!hit && cover.cubes[std::size_t(j)].contains_open(p)) hit = true;
    });
    return hit;
  };
  r.covers_region = true;
  for (std::size_t mask = 0; mask < (std::size_t{1} << N) && r.covers_region; ++mask) {
    for (int j = 0; j < N; ++j) x[std::size_t(j)] = (mask >> j) & 1u ? region_radius : -region_radius;
    r.covers_region = covered(x);
  }
  std::uniform_real_distribution<double> box(-region_radius, region_radius);
  for (int q = 0; q < 4096 && r.covers_region; ++q) {
    for (int j = 0; j < N; ++j) x[std::size_t(j)] = box(rng);
    r.covers_region = covered(x);
  }
  return r;
}

bool Box::contains(PointView x) const {
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (x[j] < lower[j] || x[j] > upper[j]) return false;
  return true;
}

bool Box::strictly_inside(const Box& outer) const {
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!(outer.lower[j] < lower[j] && upper[j] < outer.upper[j])) return false;
  return true;
}

Box Box::scaled_about_center(double factor) const {
  Box b{lower, upper};
  for (std::size_t j = 0; j < lower.size(); ++j) {
    const double c = 0.5 * (lower[j] + upper[j]);
    const double h = 0.5 * (upper[j] - lower[j]) * factor;
    b.lower[j] = c - h;
    b.upper[j] = c + h;
  }
  return b;
}

std::vector<double> ModulusFunction::sample(int per_axis) const {
  const std::size_t N = region.dim();
  std::vector<double> out;
  std::vector<int> idx(N, 0);
  Point x(N);
  while (true) {
    for (std::size_t j = 0; j < N; ++j) {
      const double u = per_axis > 1 ? double(idx[j]) / (per_axis - 1) : 0.5;
      x[j] = region.lower[j] + u * (region.upper[j] - region.lower[j]);
    }
    out.push_back(eval(x));
    std::size_t j = N;
    while (j > 0 && ++idx[j - 1] == per_axis) idx[--j] = 0;
    if (j == 0) break;
  }
  return out;
}

ModulusFunction glue_decreasing_profile(const std::vector<Box>& exhaustion,
                                        const std::vector<double>& deltas) {
  if (exhaustion.empty()) throw DomainError("exhaustion must have at least one box");
  if (exhaustion.size() != deltas.size()) throw DomainError("one delta per exhaustion box");
  const std::size_t N = exhaustion.front().dim();
  for (const auto& b : exhaustion) {
    if (b.dim() != N || b.upper.size() != N) throw DomainError("box dimensions disagree");
    for (std::size_t j = 0; j < N; ++j)
      if (!(b.lower[j] < b.upper[j])) throw DomainError("degenerate box in exhaustion");
  }
  for (std::size_t n = 1; n < exhaustion.size(); ++n)
    if (!exhaustion[n - 1].strictly_inside(exhaustion[n]))
      throw DomainError("exhaustion boxes are not strictly nested");
  for (std::size_t n = 0; n < deltas.size(); ++n) {
    if (!(deltas[n] > 0.0)) throw DomainError("deltas must be positive");
    if (n > 0 && deltas[n] > deltas[n - 1]) throw DomainError("deltas must be nonincreasing");
  }

  // inner[n] is where the n-th tent equals 1; the innermost uses a half-size copy of K_1.
  std::vector<Box> inner(exhaustion.size());
  inner[0] = exhaustion[0].scaled_about_center(0.5);
  for (std::size_t n = 1; n < exhaustion.size(); ++n) inner[n] = exhaustion[n - 1];

  auto boxes = exhaustion;
  auto d = deltas;
  ModulusFunction f;
  f.region = exhaustion.back();
  f.eval = [boxes, inner, d](PointView x) {
    double v = d.back();
    for (std::size_t n = 0; n < boxes.size(); ++n) {
      double tent = 1.0;
      for (std::size_t j = 0; j < x.size() && tent > 0.0; ++j) {
        const double a = inner[n].lower[j], b = inner[n].upper[j];
        const double A = boxes[n].lower[j], B = boxes[n].upper[j];
        double u;
        if (x[j] >= a && x[j] <= b) u = 1.0;
        else if (x[j] < a) u = x[j] <= A ? 0.0 : (x[j] - A) / (a - A);
        else u = x[j] >= B ? 0.0 : (B - x[j]) / (B - b);
        tent = std::min(tent, u);
      }
      v = std::max(v, d[n] * tent);
    }
    return v;
  };
  return f;
}

namespace {

// Lattice of spacing cell/g over box; min/max of log psi per cell, cells of side `cell`;
// passes when every 2^N block of adjacent cells oscillates by less than log_gamma.
bool windows_pass(const Field& psi, const Box& box, double cell, int g, double log_gamma) {
  const std::size_t N = box.dim();
  std::vector<long> cells(N), pts(N);
  long total_cells = 1;
  for (std::size_t j = 0; j < N; ++j) {
    const double w = box.upper[j] - box.lower[j];
    cells[j] = std::max(1L, long(std::ceil(w / cell - 1e-12)));
    pts[j] = cells[j] * g + 1;
    total_cells *= cells[j];
  }
  std::vector<double> lo(std::size_t(total_cells), std::numeric_limits<double>::infinity());
  std::vector<double> hi(std::size_t(total_cells), -std::numeric_limits<double>::infinity());
  auto cell_index = [&](const std::vector<long>& c) {
    long id = 0;
    for (std::size_t j = 0; j < N; ++j) id = id * cells[j] + c[j];
    return std::size_t(id);
  };
  const double h = cell / g;
  std::vector<long> idx(N, 0), c(N);
  Point x(N);
  while (true) {
    for (std::size_t j = 0; j < N; ++j) x[j] = std::min(box.lower[j] + idx[j] * h, box.upper[j]);
    const double v = psi(PointView(x));
    if (!(v > 0.0)) throw DomainError("psi must be strictly positive on the exhaustion");
    const double lv = std::log(v);
    // a lattice point on a cell boundary belongs to every adjacent cell
    std::vector<std::pair<long, long>> range(N);
    for (std::size_t j = 0; j < N; ++j) {
      long q = idx[j] / g;
      long lo_c = (idx[j] % g == 0 && q > 0) ? q - 1 : q;
      long hi_c = std::min(q, cells[j] - 1);
      lo_c = std::min(lo_c, cells[j] - 1);
      range[j] = {lo_c, hi_c};
    }
    for (std::size_t j = 0; j < N; ++j) c[j] = range[j].first;
    while (true) {
      auto id = cell_index(c);
      lo[id] = std::min(lo[id], lv);
      hi[id] = std::max(hi[id], lv);
      std::size_t j = 0;
      while (j < N && ++c[j] > range[j].second) {
        c[j] = range[j].first;
        ++j;
      }
      if (j == N) break;
    }
    std::size_t j = 0;
    while (j < N && ++idx[j] == pts[j]) idx[j++] = 0;
    if (j == N) break;
  }
  // windows: cell c together with c + e for e in {0,1}^N (clipped)
  std::fill(c.begin(), c.end(), 0);
  std::vector<long> e(N);
  while (true) {
    double wlo = std::numeric_limits<double>::infinity();
    double whi = -wlo;
    for (std::size_t mask = 0; mask < (std::size_t{1} << N); ++mask) {
      bool inside = true;
      for (std::size_t j = 0; j < N; ++j) {
        e[j] = c[j] + long((mask >> j) & 1u);
        if (e[j] >= cells[j]) inside = false;
      }
      if (!inside) continue;
      auto id = cell_index(e);
      wlo = std::min(wlo, lo[id]);
      whi = std::max(whi, hi[id]);
    }
    if (!(whi - wlo < log_gamma)) return false;
    std::size_t j = 0;
    while (j < N && ++c[j] == cells[j]) c[j++] = 0;
    if (j == N) break;
  }
  return true;
}

}  // namespace

std::vector<double> oscillation_radii(const Field& psi, double gamma,
                                      const std::vector<Box>& exhaustion,
                                      const OscillationOptions& options) {
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
  if (exhaustion.empty()) throw DomainError("exhaustion must have at least one box");
  const double lg = std::log(gamma);
  std::vector<double> radii;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& box : exhaustion) {
    double cell = options.r_start;
    int halvings = 0;
    while (!windows_pass(psi, box, cell, std::max(1, options.grid_per_radius), lg)) {
      cell *= 0.5;
      if (++halvings > options.max_halvings)
        throw NumericalError("oscillation radius search did not terminate");
    }
    // pairs within `cell` share a window; one more halving as sampling margin
    const double r = std::min(prev, 0.5 * cell);
    radii.push_back(r);
    prev = r;
  }
  return radii;
}

ModulusFunction oscillation_radius(const Field& psi, double gamma,
                                   const std::vector<Box>& exhaustion,
                                   const OscillationOptions& options) {
  return glue_decreasing_profile(exhaustion, oscillation_radii(psi, gamma, exhaustion, options));
}

CubeCover oscillation_controlled_cover(const Field& psi, double gamma,
                                       const std::vector<Box>& exhaustion,
                                       double region_radius,
                                       const CoverOptions& cover_options,
                                       const OscillationOptions& options) {
  if (exhaustion.empty()) throw DomainError("exhaustion must have at least one box");
  const std::size_t N = exhaustion.back().dim();
  const double reach = std::ceil(region_radius) + 1.0;
  for (std::size_t j = 0; j < N; ++j)
    if (exhaustion.back().lower[j] > -reach || exhaustion.back().upper[j] < reach)
      throw DomainError("outermost exhaustion box must contain the cover's reach");
  auto xi = oscillation_radius(psi, gamma, exhaustion, options);
  const double scale = 1.0 / std::sqrt(2.0 * double(N));
  Field phi = [xi, scale](PointView x) { return xi(x) * scale; };
  return build_cube_cover(phi, int(N), region_radius, cover_options);
}

double max_probe_ratio(const Field& psi, const CubeCover& cover, int probes_per_axis) {
  double worst = 1.0;
  for (const auto& k : cover.cubes) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for_each_probe(k.lower, k.side, probes_per_axis, [&](PointView x) {
      const double v = psi(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    });
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, hi / lo);
  }
  return worst;
}

}  // namespace deskcech::covering
