#include "deskcech/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "deskcech/errors.hpp"

namespace deskcech::growth {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
}  // namespace

std::vector<double> GrowthProfile::xs() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (m[i]) out.push_back(r[i]);
  return out;
}

std::vector<double> GrowthProfile::ys() const {
  std::vector<double> out;
  for (const auto& v : m)
    if (v) out.push_back(*v);
  return out;
}

GrowthProfile GrowthProfile::from_values(std::vector<double> r, const std::vector<double>& values) {
  if (r.size() != values.size()) throw DomainError("profile grid and values differ in length");
  GrowthProfile f;
  f.r = std::move(r);
  for (double v : values) f.m.emplace_back(v);
  return f;
}

SampledVariety SampledVariety::from_chart(std::string name, int dimension,
                                          const std::function<CPoint(std::complex<double>)>& chart,
                                          std::vector<std::complex<double>> params) {
  SampledVariety V;
  V.name = std::move(name);
  V.dimension = dimension;
  V.params = std::move(params);
  V.points.reserve(V.params.size());
  V.norms.reserve(V.params.size());
  for (auto t : V.params) {
    CPoint p = chart(t);
    if (int(p.size()) != dimension) throw DomainError("chart returned a point of the wrong dimension");
    double s = 0.0;
    for (auto c : p) s += std::norm(c);
    V.norms.push_back(std::sqrt(s));
    V.points.push_back(std::move(p));
  }
  return V;
}

std::vector<std::string> SampledVariety::builtin_names() {
  return {"identity", "line", "parabola", "cubic", "expgraph"};
}

SampledVariety SampledVariety::builtin(const std::string& name, double log_rho_max, int radial,
                                       int angular) {
  auto grid = log_polar_grid(-4.0, log_rho_max, radial, angular);
  using C = std::complex<double>;
  if (name == "identity") return from_chart(name, 1, [](C t) { return CPoint{t}; }, grid);
  if (name == "line") return from_chart(name, 2, [](C t) { return CPoint{t, C(0.0)}; }, grid);
  if (name == "parabola") return from_chart(name, 2, [](C t) { return CPoint{t, t * t}; }, grid);
  if (name == "cubic") return from_chart(name, 2, [](C t) { return CPoint{t, t * t * t}; }, grid);
  if (name == "expgraph") return from_chart(name, 2, [](C t) { return CPoint{t, std::exp(t)}; }, grid);
  throw DomainError("unknown variety '" + name + "'");
}

std::vector<std::complex<double>> log_polar_grid(double log_rho_min, double log_rho_max, int radial,
                                                 int angular) {
  if (radial < 1 || angular < 1 || !(log_rho_max > log_rho_min))
    throw DomainError("bad log-polar grid");
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<std::complex<double>> out{0.0};
  for (int i = 0; i <= radial; ++i) {
    const double u = log_rho_min + (log_rho_max - log_rho_min) * i / radial;
    const double rho = std::exp(u);
    for (int j = 0; j < angular; ++j) out.push_back(std::polar(rho, two_pi * j / angular));
  }
  return out;
}

GrowthProfile growth_profile(const CField& phi, const SampledVariety& V,
                             const std::vector<double>& r_grid) {
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    if (!(r_grid[i] > r_grid[i - 1])) throw DomainError("r grid must be increasing");
  std::vector<std::size_t> order(V.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return V.norms[a] < V.norms[b]; });
  GrowthProfile f;
  f.r = r_grid;
  double best = -kInf;
  std::size_t p = 0;
  for (double r : r_grid) {
    const double R = std::exp(r) * (1.0 + 1e-12);
    for (; p < order.size() && V.norms[order[p]] <= R; ++p) {
      const double v = phi(V.points[order[p]]);
      if (v > best) best = v;
    }
    if (std::isfinite(best)) f.m.emplace_back(best);
    else f.m.emplace_back(std::nullopt);
    const double reach = p > 0 ? V.norms[order[p - 1]] : 0.0;
    f.shortfall.push_back(reach > 0.0 ? std::max(0.0, r - std::log(reach)) : kInf);
  }
  return f;
}

double sampling_tolerance(const GrowthProfile& f, double window) {
  if (f.shortfall.size() != f.r.size()) return 0.0;
  double tol = 0.0;
  for (std::size_t i = 0; i < f.r.size(); ++i) {
    if (!f.m[i] || !std::isfinite(f.shortfall[i])) continue;
    // secant slope across a window starting at the shortfall point
    double slope = 0.0;
    const double left = f.r[i] - f.shortfall[i];
    for (std::size_t j = i + 1; j < f.r.size(); ++j) {
      if (!f.m[j]) continue;
      slope = std::max(slope, (*f.m[j] - *f.m[i]) / (f.r[j] - left));
      if (f.r[j] - f.r[i] >= window) break;
    }
    tol = std::max(tol, slope * f.shortfall[i]);
  }
  return tol;
}

double ConvexMinorant::operator()(double t) const {
  if (x.empty()) throw DomainError("empty minorant");
  if (t <= x.front()) return h.front();
  if (t >= x.back()) return h.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t j = std::size_t(it - x.begin());
  const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
  return h[j - 1] + w * (h[j] - h[j - 1]);
}

GrowthProfile ConvexMinorant::as_profile(const std::vector<double>& r) const {
  GrowthProfile f;
  f.r = r;
  for (double t : r) f.m.emplace_back((*this)(t));
  return f;
}

ConvexMinorant convex_minorant(const GrowthProfile& f) {
  const auto xs = f.xs();
  const auto ys = f.ys();
  if (xs.size() < 2) throw DomainError("convex minorant needs at least two samples");
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2) {
      const auto a = hull[hull.size() - 2], b = hull.back();
      const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  ConvexMinorant h;
  for (auto i : hull) {
    h.x.push_back(xs[i]);
    h.h.push_back(ys[i]);
  }
  return h;
}

std::optional<double> interpolate(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double t) {
  if (xs.empty()) return std::nullopt;
  const double slack = 1e-12 * (1.0 + std::abs(xs.back()));
  if (t > xs.back() + slack || t < xs.front() - slack) return std::nullopt;
  if (t >= xs.back()) return ys.back();
  if (t <= xs.front()) return ys.front();
  const auto it = std::upper_bound(xs.begin(), xs.end(), t);
  const std::size_t j = std::size_t(it - xs.begin());
  const double w = (t - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + w * (ys[j] - ys[j - 1]);
}

WeakConvexityResult weak_convexity_check(const GrowthProfile& f, double a, double b,
                                         const WeakConvexityOptions& opt) {
  if (a < 1.0 || b < 0.0) throw DomainError("need a >= 1 and b >= 0");
  const auto xs = f.xs();
  const auto ys = f.ys();
  const std::size_t n = xs.size();
  // endpoints: the samples plus every in-range pullback (x_k - b)/a, whose lift
  // lands exactly on a sample
  struct Node {
    double r;
    std::optional<double> lifted;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({xs[i], interpolate(xs, ys, a * xs[i] + b)});
  for (std::size_t k = 0; k < n; ++k) {
    const double r = (xs[k] - b) / a;
    if (r < xs.front() || r > xs.back()) continue;
    const auto hit = std::lower_bound(xs.begin(), xs.end(), r);
    if (hit != xs.end() && std::abs(*hit - r) <= 1e-12 * (1.0 + std::abs(r))) continue;
    nodes.push_back({r, ys[k]});
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& p, const Node& q) { return p.r < q.r; });
  std::size_t top = nodes.size();
  if (opt.r_limit)
    top = std::size_t(std::upper_bound(nodes.begin(), nodes.end(), *opt.r_limit + 1e-12,
                                       [](double v, const Node& q) { return v < q.r; }) -
                      nodes.begin());

  WeakConvexityResult res;
  res.worst_margin = kInf;
  auto record = [&](double margin, double lam, double r1, double r2) {
    ++res.checked;
    if (margin < res.worst_margin) {
      res.worst_margin = margin;
      res.lambda = lam;
      res.r1 = r1;
      res.r2 = r2;
    }
  };
  for (std::size_t i = 0; i < top; ++i) {
    const double r1 = nodes[i].r;
    // first sample strictly right of r1
    const auto m0 = std::size_t(std::upper_bound(xs.begin(), xs.end(), r1 + 1e-12) - xs.begin());
    for (std::size_t j = i + 1; j < top; ++j) {
      const double r2 = nodes[j].r;
      std::size_t m1 = m0;
      while (m1 < n && xs[m1] < r2 - 1e-12) ++m1;
      const std::size_t inner = (m1 - m0) + opt.lambdas.size();
      if (inner == 0) continue;
      if (!nodes[i].lifted || !nodes[j].lifted) {
        res.excluded += inner;
        continue;
      }
      const double f1 = *nodes[i].lifted, f2 = *nodes[j].lifted;
      for (std::size_t m = m0; m < m1; ++m) {
        const double lam = (r2 - xs[m]) / (r2 - r1);
        record(lam * f1 + (1.0 - lam) * f2 - ys[m], lam, r1, r2);
      }
      for (double lam : opt.lambdas) {
        const auto left = interpolate(xs, ys, lam * r1 + (1.0 - lam) * r2);
        record(lam * f1 + (1.0 - lam) * f2 - *left, lam, r1, r2);
      }
    }
  }
  if (res.checked == 0) res.worst_margin = 0.0;
  res.pass = res.worst_margin >= -opt.tolerance;
  return res;
}

EquivalenceResult minorant_equivalence_check(const GrowthProfile& f, double a, double b,
                                             double tolerance, const WeakConvexityOptions& opt) {
  EquivalenceResult out;
  out.h = convex_minorant(f);
  const auto xs = f.xs();
  const auto ys = f.ys();
  const double edge = xs.back() + 1e-12 * (1.0 + std::abs(xs.back()));

  double worst = -kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = a * xs[i] + b;
    if (y > edge) continue;
    worst = std::max(worst, ys[i] - out.h(y));
  }
  out.premise2_worst = std::isfinite(worst) ? worst : 0.0;
  out.premise2 = out.premise2_worst <= tolerance;
  WeakConvexityOptions o = opt;
  o.tolerance = tolerance;
  const auto weak = weak_convexity_check(f, a, b, o);
  out.direction2 = out.premise2 && weak.pass;

  out.premise1 = weak.pass;
  out.direction1_worst = -kInf;
  const auto& hx = out.h.x;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = a * xs[i] + b;
    if (y > edge) continue;
    // bracketing breakpoints of the envelope; the argument needs x1 >= a x_0 + b
    auto it = std::upper_bound(hx.begin(), hx.end(), y);
    const double x1 = it == hx.begin() ? hx.front() : *(it - 1);
    if (x1 < a * xs.front() + b - 1e-12) continue;
    ++out.interior;
    out.direction1_worst = std::max(out.direction1_worst, ys[i] - out.h(y));
  }
  if (out.interior == 0) out.direction1_worst = 0.0;
  out.direction1 = out.premise1 && out.direction1_worst <= tolerance;
  return out;
}

ProbeResult lk_family_probe(const std::vector<GrowthProfile>& profiles, const ProbeOptions& opt) {
  if (opt.a_values.empty() || !(opt.b_step > 0.0)) throw DomainError("empty (a, b) search grid");
  ProbeResult res;
  double r_first = kInf, r_last = -kInf;
  for (const auto& f : profiles) {
    const auto xs = f.xs();
    if (xs.size() < 3) throw DomainError("profile has fewer than three samples");
    r_first = std::min(r_first, xs.front());
    r_last = std::max(r_last, xs.back());
  }
  const double a_max = *std::max_element(opt.a_values.begin(), opt.a_values.end());
  res.r_limit = (r_last - opt.b_max) / a_max;
  if (!(res.r_limit > r_first)) throw DomainError("search budget leaves no triples on the r grid");
  WeakConvexityOptions wopt;
  wopt.tolerance = opt.tolerance;
  wopt.r_limit = res.r_limit;
  auto a_sorted = opt.a_values;
  std::sort(a_sorted.begin(), a_sorted.end());
  const int b_steps = int(std::floor(opt.b_max / opt.b_step + 1e-9));
  bool all = true;
  for (const auto& f : profiles) {
    ProbeEntry e;
    e.tolerance = opt.tolerance + (opt.sampling_aware ? sampling_tolerance(f) : 0.0);
    wopt.tolerance = e.tolerance;
    for (double a : a_sorted) {
      for (int s = 0; s <= b_steps && !e.ab; ++s) {
        const double b = s * opt.b_step;
        if (weak_convexity_check(f, a, b, wopt).pass) e.ab = std::make_pair(a, b);
      }
      if (e.ab) break;
    }
    if (!e.ab) all = false;
    else if (!res.family || *e.ab > *res.family) res.family = e.ab;
    res.members.push_back(e);
  }
  if (!all) res.family.reset();
  return res;
}

ProbeResult lk_family_probe(const std::vector<CField>& family, const SampledVariety& V,
                            const std::vector<double>& r_grid, const ProbeOptions& opt) {
  std::vector<GrowthProfile> profiles;
  for (const auto& phi : family) profiles.push_back(growth_profile(phi, V, r_grid));
  return lk_family_probe(profiles, opt);
}

CField exp_tail_field(int k) {
  if (k < 1) throw DomainError("k must be positive");
  return [k](std::span<const std::complex<double>> p) {
    if (p.size() != 2) throw DomainError("expected a point of C^2");
    const std::complex<double> z = p[0], w = p[1];
    const double az = std::abs(z);
    // e^z - P(z): error ~ eps (|e^z| + sum_{j<k} |z|^j/j!)
    std::complex<double> partial = 0.0, term = 1.0;
    double partial_abs = 0.0, t_abs = 1.0;
    for (int j = 0; j < k; ++j) {
      partial += term;
      partial_abs += t_abs;
      term *= z / double(j + 1);
      t_abs *= az / double(j + 1);
    }
    const std::complex<double> ez = std::exp(z);
    std::complex<double> tail = ez - partial;
    const double err_a = kEps * (std::abs(ez) + partial_abs);
    // Direct series from j = k: error ~ eps sum_{j>=k} |z|^j/j!
    if (az < 600.0) {
      std::complex<double> s = 0.0;
      double s_abs = 0.0;
      std::complex<double> t = term;
      double ta = t_abs;
      for (int j = k; j < k + 2000; ++j) {
        s += t;
        s_abs += ta;
        t *= z / double(j + 1);
        ta *= az / double(j + 1);
        if (j > az && ta < 1e-18 * s_abs) break;
      }
      if (kEps * s_abs < err_a) tail = s;
    }
    const double v = std::abs((w - ez) + tail);
    return std::log(v) / k;
  };
}

namespace {

double log_abs_poly(const std::vector<std::complex<double>>& c, std::complex<double> z) {
  std::complex<double> v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
  return std::log(std::abs(v));
}

}  // namespace

std::vector<double> hadamard_profile(const std::vector<std::complex<double>>& coeffs,
                                     const std::vector<double>& r_grid, int samples) {
  if (coeffs.empty()) throw DomainError("empty polynomial");
  if (samples < 8) throw DomainError("too few circle samples");
  const double two_pi = 2.0 * std::acos(-1.0);
  const double step = two_pi / samples;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<double> out;
  std::vector<double> g(std::size_t(samples), 0.0);
  for (double r : r_grid) {
    const double rho = std::exp(r);
    auto at = [&](double th) { return log_abs_poly(coeffs, std::polar(rho, th)); };
    for (int i = 0; i < samples; ++i) g[std::size_t(i)] = at(step * i);
    const double top = *std::max_element(g.begin(), g.end());
    double best = top;
    for (int i = 0; i < samples; ++i) {
      const double gi = g[std::size_t(i)];
      const double gl = g[std::size_t((i + samples - 1) % samples)];
      const double gr = g[std::size_t((i + 1) % samples)];
      if (gi < gl || gi < gr || gi < top - 0.05) continue;
      double lo = step * (i - 1), hi = step * (i + 1);
      double c = hi - golden * (hi - lo), d = lo + golden * (hi - lo);
      double fc = at(c), fd = at(d);
      while (hi - lo > 1e-12) {
        if (fc > fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - golden * (hi - lo);
          fc = at(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + golden * (hi - lo);
          fd = at(d);
        }
      }
      best = std::max({best, fc, fd});
    }
    out.push_back(best);
  }
  return out;
}

double min_second_difference(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("length mismatch");
  double m = kInf;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double s1 = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    const double s2 = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m = std::min(m, (s2 - s1) * (x[i + 1] - x[i - 1]) / 2.0);
  }
  return x.size() < 3 ? 0.0 : m;
}

std::string profile_csv(const GrowthProfile& f) {
  std::ostringstream os;
  os.precision(17);
  os << "r,m\n";
  for (std::size_t i = 0; i < f.r.size(); ++i) {
    os << f.r[i] << ",";
    if (f.m[i]) os << *f.m[i];
    os << "\n";
  }
  return os.str();
}

std::string minorant_csv(const ConvexMinorant& h) {
  std::ostringstream os;
  os.precision(17);
  os << "x,h\n";
  for (std::size_t i = 0; i < h.x.size(); ++i) os << h.x[i] << "," << h.h[i] << "\n";
  return os.str();
}

}  // namespace deskcech::growth
