#include "deskcech/dbar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fftw3.h>

#include "deskcech/errors.hpp"

namespace deskcech::dbar {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Quintic smoothstep clamped to [0, 1].
double smooth(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double smooth_slope(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

int fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

template <class F>
void for_window(const Window& w, F&& f) {
  for (int j = w.j0; j < w.j0 + w.ny; ++j)
    for (int i = w.i0; i < w.i0 + w.nx; ++i) f(i, j);
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw NumericalError("fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

void transform(fftw_complex* buf, int ny, int nx, int sign) {
  // ESTIMATE keeps plans, and therefore output bits, reproducible.
  fftw_plan plan = fftw_plan_dft_2d(ny, nx, buf, buf, sign, FFTW_ESTIMATE);
  if (!plan) throw NumericalError("fftw plan failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

}  // namespace

Window Window::intersect(const Window& o) const {
  const int a0 = std::max(i0, o.i0), a1 = std::min(i0 + nx, o.i0 + o.nx);
  const int b0 = std::max(j0, o.j0), b1 = std::min(j0 + ny, o.j0 + o.ny);
  if (a1 <= a0 || b1 <= b0) return {a0, b0, 0, 0};
  return {a0, b0, a1 - a0, b1 - b0};
}

Window window_of(const Lattice& lat, const Rect& r) {
  const int ia = int(std::ceil((r.x0 - lat.x0) / lat.h - 1e-9));
  const int ib = int(std::floor((r.x1 - lat.x0) / lat.h + 1e-9));
  const int ja = int(std::ceil((r.y0 - lat.y0) / lat.h - 1e-9));
  const int jb = int(std::floor((r.y1 - lat.y0) / lat.h + 1e-9));
  return {ia, ja, std::max(0, ib - ia + 1), std::max(0, jb - ja + 1)};
}

GridFunction::GridFunction(const Lattice& lat, const Window& w, Complex fill)
    : lattice(lat), window(w), values(w.size(), fill) {}

GridFunction GridFunction::sample(const Lattice& lat, const Window& w,
                                  const std::function<Complex(Complex)>& f) {
  GridFunction u(lat, w);
  for_window(w, [&](int i, int j) { u.at(i, j) = f(lat.point(i, j)); });
  return u;
}

GridFunction GridFunction::restricted(const Window& w) const {
  GridFunction u(lattice, w);
  const Window both = window.intersect(w);
  for_window(both, [&](int i, int j) { u.at(i, j) = at(i, j); });
  return u;
}

double GridFunction::sup() const {
  double m = 0.0;
  for (auto v : values) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::sup_on(const Window& w) const {
  double m = 0.0;
  for_window(window.intersect(w), [&](int i, int j) { m = std::max(m, std::abs(at(i, j))); });
  return m;
}

GridFunction dbar(const GridFunction& u) {
  const Window& w = u.window;
  if (w.nx < 2 || w.ny < 2) throw DomainError("dbar needs at least 2 x 2 samples");
  const double h = u.lattice.h;
  GridFunction out(u.lattice, w);
  const int ia = w.i0, ib = w.i0 + w.nx - 1, ja = w.j0, jb = w.j0 + w.ny - 1;
  for_window(w, [&](int i, int j) {
    Complex dx, dy;
    if (i == ia) dx = (u.at(i + 1, j) - u.at(i, j)) / h;
    else if (i == ib) dx = (u.at(i, j) - u.at(i - 1, j)) / h;
    else dx = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * h);
    if (j == ja) dy = (u.at(i, j + 1) - u.at(i, j)) / h;
    else if (j == jb) dy = (u.at(i, j) - u.at(i, j - 1)) / h;
    else dy = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * h);
    out.at(i, j) = 0.5 * (dx + Complex(0.0, 1.0) * dy);
  });
  return out;
}

GridFunction cauchy_solve(const GridFunction& f, const Window& target, int min_margin,
                          bool cell_correction) {
  const Window need = target.expanded(min_margin);
  if (f.window.intersect(need) != need)
    throw DomainError("source grid must extend " + std::to_string(min_margin) +
                      " cells past the target");
  const Window& s = f.window;
  const double h = f.lattice.h;
  const int px = fft_size(2 * s.nx - 1), py = fft_size(2 * s.ny - 1);
  const std::size_t total = std::size_t(px) * std::size_t(py);

  FftwBuffer src(total), ker(total);
  std::fill_n(&src.data[0][0], 2 * total, 0.0);
  std::fill_n(&ker.data[0][0], 2 * total, 0.0);
  for_window(s, [&](int i, int j) {
    const std::size_t k = std::size_t(j - s.j0) * std::size_t(px) + std::size_t(i - s.i0);
    const Complex v = f.at(i, j);
    src.data[k][0] = v.real();
    src.data[k][1] = v.imag();
  });
  // k(d) = h / (pi (di + i dj)), zero at the origin
  for (int b = 0; b < py; ++b) {
    const int dj = b < s.ny ? b : b - py;
    if (dj <= -s.ny) continue;
    for (int a = 0; a < px; ++a) {
      const int di = a < s.nx ? a : a - px;
      if (di <= -s.nx || (di == 0 && dj == 0)) continue;
      const Complex v = h / (kPi * Complex(double(di), double(dj)));
      const std::size_t k = std::size_t(b) * std::size_t(px) + std::size_t(a);
      ker.data[k][0] = v.real();
      ker.data[k][1] = v.imag();
    }
  }
  transform(src.data, py, px, FFTW_FORWARD);
  transform(ker.data, py, px, FFTW_FORWARD);
  for (std::size_t k = 0; k < total; ++k) {
    const Complex a(src.data[k][0], src.data[k][1]), b(ker.data[k][0], ker.data[k][1]);
    const Complex c = a * b;
    src.data[k][0] = c.real();
    src.data[k][1] = c.imag();
  }
  transform(src.data, py, px, FFTW_BACKWARD);
  const double scale = 1.0 / double(total);
  GridFunction u(f.lattice, target);
  for_window(target, [&](int i, int j) {
    const std::size_t k = std::size_t(j - s.j0) * std::size_t(px) + std::size_t(i - s.i0);
    u.at(i, j) = Complex(src.data[k][0], src.data[k][1]) * scale;
  });
  if (cell_correction) {
    // first-order part of the singular cell: integral of (df) xi / xi is h^2 df
    for_window(target, [&](int i, int j) {
      const Complex fx = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
      const Complex fy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
      const Complex dz = 0.5 * (fx - Complex(0.0, 1.0) * fy);
      u.at(i, j) -= h * h / kPi * dz;
    });
  }
  return u;
}

PlaneCover PlaneCover::make(const Rect& domain, double h, std::vector<Rect> patches) {
  if (!(h > 0.0)) throw DomainError("grid step must be positive");
  if (!(domain.x1 > domain.x0 && domain.y1 > domain.y0)) throw DomainError("empty domain");
  PlaneCover c;
  c.lattice = {domain.x0, domain.y0, h};
  c.domain = domain;
  c.domain_window = window_of(c.lattice, domain);
  c.patches = std::move(patches);
  for (const auto& p : c.patches) {
    const Window w = window_of(c.lattice, p).intersect(c.domain_window);
    if (w.nx < 2 || w.ny < 2) throw DomainError("patch holds fewer than 2 x 2 lattice points");
    c.windows.push_back(w);
  }
  return c;
}

PartitionOfUnity::Check PartitionOfUnity::check() const {
  Check out;
  const Window& dom = cover.domain_window;
  GridFunction sum(cover.lattice, dom), grad(cover.lattice, dom);
  for (std::size_t i = 0; i < chi.size(); ++i) {
    const auto& c = chi[i];
    const auto& W = refinement[i];
    for_window(c.window, [&](int a, int b) {
      const double v = c.at(a, b).real();
      sum.at(a, b) += v;
      grad.at(a, b) += std::abs(dbar_chi[i].at(a, b));
      out.range_error = std::max({out.range_error, -v, v - 1.0, std::abs(c.at(a, b).imag())});
      if (!W.contains(cover.lattice.point(a, b), 1e-12 * cover.lattice.h))
        out.support_error = std::max(out.support_error, std::abs(v));
    });
  }
  for_window(dom, [&](int a, int b) {
    out.sum_error = std::max(out.sum_error, std::abs(sum.at(a, b) - 1.0));
    const double g = grad.at(a, b).real();
    out.weight_excess = std::max(out.weight_excess, g * g * std::exp(-phi.at(a, b).real()) - 1.0);
  });
  return out;
}

PartitionOfUnity build_pou(const PlaneCover& cover, const std::vector<Rect>& refinement,
                           double ramp) {
  if (refinement.size() != cover.size()) throw DomainError("one refinement set per patch required");
  if (!(ramp > 0.0)) throw DomainError("ramp must be positive");
  const Lattice& lat = cover.lattice;
  const Rect& D = cover.domain;
  const double h = lat.h, tiny = 1e-12 * (1.0 + h);

  struct Taper {
    double lo, hi;
    bool cut_lo, cut_hi;
    double operator()(double t, double ramp) const {
      double v = 1.0;
      if (cut_lo) v *= smooth((t - lo) / ramp);
      else if (t < lo - 1e-12) v = 0.0;
      if (cut_hi) v *= smooth((hi - t) / ramp);
      else if (t > hi + 1e-12) v = 0.0;
      return v;
    }
    double slope(double t, double ramp) const {
      if ((!cut_lo && t < lo - 1e-12) || (!cut_hi && t > hi + 1e-12)) return 0.0;
      const double a = cut_lo ? smooth((t - lo) / ramp) : 1.0;
      const double b = cut_hi ? smooth((hi - t) / ramp) : 1.0;
      const double da = cut_lo ? smooth_slope((t - lo) / ramp) / ramp : 0.0;
      const double db = cut_hi ? -smooth_slope((hi - t) / ramp) / ramp : 0.0;
      return da * b + a * db;
    }
  };
  std::vector<Taper> tx, ty;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const Rect& U = cover.patches[i];
    const Rect& W = refinement[i];
    // an edge touching the domain boundary stays untapered; others sit
    // more than one cell inside U so the centred dbar stays in U as well
    auto edge = [&](double w, double u, double d, bool lower) {
      const bool boundary = lower ? w <= d + tiny : w >= d - tiny;
      if (boundary) {
        if (lower ? u > d + tiny : u < d - tiny)
          throw DomainError("W_" + std::to_string(i) + " reaches the boundary outside U");
        return false;
      }
      const bool inside = lower ? w > u + h : w < u - h;
      if (!inside) throw DomainError("W_" + std::to_string(i) + " is not interior to U");
      return true;
    };
    Taper x{W.x0, W.x1, edge(W.x0, U.x0, D.x0, true), edge(W.x1, U.x1, D.x1, false)};
    Taper y{W.y0, W.y1, edge(W.y0, U.y0, D.y0, true), edge(W.y1, U.y1, D.y1, false)};
    for (const Taper* t : {&x, &y}) {
      const double width = t->hi - t->lo;
      const int cuts = int(t->cut_lo) + int(t->cut_hi);
      if (cuts > 0 && ramp * cuts > width + tiny) throw DomainError("ramp too wide for W_" + std::to_string(i));
    }
    tx.push_back(x);
    ty.push_back(y);
  }

  PartitionOfUnity pou;
  pou.cover = cover;
  pou.refinement = refinement;
  std::vector<GridFunction> slopes;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    GridFunction raw(lat, cover.windows[i]), d(lat, cover.windows[i]);
    for_window(raw.window, [&](int a, int b) {
      const Complex z = lat.point(a, b);
      const double x = tx[i](z.real(), ramp), y = ty[i](z.imag(), ramp);
      raw.at(a, b) = x * y;
      d.at(a, b) = 0.5 * Complex(tx[i].slope(z.real(), ramp) * y, x * ty[i].slope(z.imag(), ramp));
    });
    pou.chi.push_back(std::move(raw));
    slopes.push_back(std::move(d));
  }
  GridFunction total(lat, cover.domain_window), dtotal(lat, cover.domain_window);
  for (std::size_t i = 0; i < cover.size(); ++i)
    for_window(pou.chi[i].window, [&](int a, int b) {
      total.at(a, b) += pou.chi[i].at(a, b);
      dtotal.at(a, b) += slopes[i].at(a, b);
    });
  for_window(cover.domain_window, [&](int a, int b) {
    if (!(total.at(a, b).real() > 0.0)) {
      const Complex z = lat.point(a, b);
      throw DomainError("refinement leaves (" + std::to_string(z.real()) + ", " +
                        std::to_string(z.imag()) + ") uncovered");
    }
  });
  // quotient rule for the exact dbar of raw / total
  for (std::size_t i = 0; i < cover.size(); ++i) {
    auto& c = pou.chi[i];
    auto& d = slopes[i];
    for_window(c.window, [&](int a, int b) {
      const double S = total.at(a, b).real();
      d.at(a, b) = (d.at(a, b) * S - c.at(a, b) * dtotal.at(a, b)) / (S * S);
      c.at(a, b) /= S;
    });
  }
  pou.dbar_chi_exact = std::move(slopes);

  GridFunction grad(lat, cover.domain_window);
  for (const auto& c : pou.chi) {
    pou.dbar_chi.push_back(dbar(c));
    const auto& d = pou.dbar_chi.back();
    for_window(d.window, [&](int a, int b) { grad.at(a, b) += std::abs(d.at(a, b)); });
  }
  pou.phi = GridFunction(lat, cover.domain_window);
  for_window(cover.domain_window, [&](int a, int b) {
    const double g = grad.at(a, b).real();
    pou.phi.at(a, b) = g > 1.0 ? 2.0 * std::log(g) : 0.0;
  });
  return pou;
}

Complex Cocycle1::get(int i, int j, int gi, int gj) const {
  if (i == j) return 0.0;
  const auto it = values.find({std::min(i, j), std::max(i, j)});
  if (it == values.end()) throw DomainError("no overlap between patches");
  const Complex v = it->second.at(gi, gj);
  return i < j ? v : -v;
}

bool Cocycle1::has(int i, int j) const {
  return i == j || values.count({std::min(i, j), std::max(i, j)}) > 0;
}

double Cocycle1::sup() const {
  double m = 0.0;
  for (const auto& [k, v] : values) m = std::max(m, v.sup());
  return m;
}

double Cocycle1::cocycle_residual() const {
  double worst = 0.0;
  const int n = int(cover.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!has(i, j)) continue;
      for (int k = j + 1; k < n; ++k) {
        if (!has(i, k) || !has(j, k)) continue;
        const Window w = cover.windows[std::size_t(i)]
                             .intersect(cover.windows[std::size_t(j)])
                             .intersect(cover.windows[std::size_t(k)]);
        for_window(w, [&](int a, int b) {
          worst = std::max(worst, std::abs(get(i, j, a, b) + get(j, k, a, b) + get(k, i, a, b)));
        });
      }
    }
  return worst;
}

Cocycle1 Cocycle1::scaled(Complex s) const {
  Cocycle1 out = *this;
  for (auto& [k, v] : out.values)
    for (auto& x : v.values) x *= s;
  return out;
}

Cocycle1 Cocycle1::plus(const Cocycle1& o) const {
  if (!(cover == o.cover)) throw DomainError("mismatched covers");
  Cocycle1 out = *this;
  for (auto& [k, v] : out.values) {
    const auto it = o.values.find(k);
    if (it == o.values.end()) continue;
    for (std::size_t t = 0; t < v.values.size(); ++t) v.values[t] += it->second.values[t];
  }
  for (const auto& [k, v] : o.values)
    if (!out.values.count(k)) out.values.emplace(k, v);
  return out;
}

Cocycle1 Cocycle1::coboundary(const PlaneCover& cover, const std::function<Complex(int, Complex)>& h) {
  Cocycle1 c;
  c.cover = cover;
  const int n = int(cover.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Window w = cover.overlap(std::size_t(i), std::size_t(j));
      if (w.empty()) continue;
      c.values.emplace(std::make_pair(i, j),
                       GridFunction::sample(cover.lattice, w, [&](Complex z) { return h(j, z) - h(i, z); }));
    }
  return c;
}

double CousinSolution::max_dbar_residual() const {
  double m = 0.0;
  for (double v : dbar_residual) m = std::max(m, v);
  return m;
}

CousinSolution cousin_solve(const Cocycle1& c, const PartitionOfUnity& pou, const CousinOptions& opt) {
  if (!(c.cover == pou.cover)) throw DomainError("cocycle and partition of unity use different covers");
  const PlaneCover& cover = c.cover;
  const int n = int(cover.size());
  const double scale = 1.0 + c.sup();
  const double res = c.cocycle_residual();
  if (res > opt.cocycle_tol * scale)
    throw PreconditionError("cocycle condition fails: residual " + std::to_string(res));

  CousinSolution out;
  std::vector<GridFunction> fpatch;
  for (int i = 0; i < n; ++i) {
    const Window& wi = cover.windows[std::size_t(i)];
    GridFunction b(cover.lattice, wi), f(cover.lattice, wi);
    for (int j = 0; j < n; ++j) {
      if (j == i || !c.has(i, j)) continue;
      const auto& chi = pou.chi[std::size_t(j)];
      const auto& dchi = opt.exact_taper_slopes ? pou.dbar_chi_exact[std::size_t(j)]
                                                : pou.dbar_chi[std::size_t(j)];
      for_window(wi.intersect(cover.windows[std::size_t(j)]), [&](int a, int bb) {
        const Complex cji = c.get(j, i, a, bb);
        b.at(a, bb) += chi.at(a, bb) * cji;
        f.at(a, bb) += dchi.at(a, bb) * cji;
      });
    }
    out.b.push_back(std::move(b));
    fpatch.push_back(std::move(f));
  }

  const Window& dom = cover.domain_window;
  const Window padded = dom.expanded(opt.margin_cells);
  out.f = GridFunction(cover.lattice, padded);
  std::vector<char> seen(dom.size(), 0);
  for (int i = 0; i < n; ++i) {
    const auto& fi = fpatch[std::size_t(i)];
    for_window(fi.window, [&](int a, int b) {
      const std::size_t k = std::size_t(b - dom.j0) * std::size_t(dom.nx) + std::size_t(a - dom.i0);
      if (!seen[k]) {
        seen[k] = 1;
        out.f.at(a, b) = fi.at(a, b);
      } else {
        out.patch_disagreement = std::max(out.patch_disagreement, std::abs(fi.at(a, b) - out.f.at(a, b)));
      }
    });
  }

  out.g = cauchy_solve(out.f, dom, opt.margin_cells, opt.cell_correction);
  out.anchor = opt.anchor.value_or(std::make_pair(dom.i0 + dom.nx / 2, dom.j0 + dom.ny / 2));
  if (!dom.contains(out.anchor.first, out.anchor.second)) throw DomainError("anchor outside the domain");
  const Complex g0 = out.g.at(out.anchor.first, out.anchor.second);
  for (auto& v : out.g.values) v -= g0;

  for (int i = 0; i < n; ++i) {
    GridFunction cp = out.b[std::size_t(i)];
    for_window(cp.window, [&](int a, int b) { cp.at(a, b) -= out.g.at(a, b); });
    out.dbar_residual.push_back(dbar(cp).sup());
    out.cprime.push_back(std::move(cp));
  }
  for (const auto& [key, cij] : c.values) {
    const auto& ci = out.cprime[std::size_t(key.first)];
    const auto& cj = out.cprime[std::size_t(key.second)];
    for_window(cij.window, [&](int a, int b) {
      out.cocycle_residual =
          std::max(out.cocycle_residual, std::abs((cj.at(a, b) - ci.at(a, b)) - cij.at(a, b)));
    });
  }
  return out;
}

Complex Pole::principal_part(Complex z) const {
  const Complex w = 1.0 / (z - center);
  Complex p = w, s = 0.0;
  for (auto a : coefficients) {
    s += a * p;
    p *= w;
  }
  return s;
}

Complex MittagLefflerProblem::local_part(int patch, Complex z) const {
  const int k = pole_of_patch[std::size_t(patch)];
  if (k < 0) return 0.0;
  const Pole& p = poles[std::size_t(k)];
  if (std::abs(z - p.center) < options.exclusion_cells * options.h) return 0.0;
  return p.principal_part(z);
}

Complex MittagLefflerProblem::oracle(Complex z) const {
  Complex s = 0.0;
  for (const auto& p : poles) s += p.principal_part(z);
  return s;
}

double MittagLefflerProblem::pole_distance(Complex z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : poles) d = std::min(d, std::abs(z - p.center));
  return d;
}

MittagLefflerProblem mittag_leffler_problem(std::vector<Pole> poles, const MittagLefflerOptions& o) {
  if (poles.empty()) throw DomainError("no poles");
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (std::abs(poles[k].center.imag()) > 1e-12) throw DomainError("poles must lie on the real axis");
    if (k > 0 && poles[k].center.real() - poles[k - 1].center.real() < 1.0)
      throw DomainError("poles must be increasing and at least 1 apart");
  }
  if (!(o.half_width < 1.0 && o.half_width > 0.5)) throw DomainError("half_width must lie in (0.5, 1)");
  if (!(o.band > 0.0 && o.band < o.half_height && o.half_height < o.height))
    throw DomainError("need 0 < band < half_height < height");
  if (!(o.cap_gap > 0.0 && o.cap_gap + o.inset + o.ramp < o.end_margin))
    throw DomainError("end caps do not fit");

  MittagLefflerProblem P;
  P.poles = std::move(poles);
  P.options = o;
  const double first = P.poles.front().center.real(), last = P.poles.back().center.real();
  const Rect D{first - o.end_margin, last + o.end_margin, -o.height, o.height};
  std::vector<Rect> U;
  auto add = [&](Rect r, int pole) {
    U.push_back(r);
    P.pole_of_patch.push_back(pole);
  };
  for (std::size_t k = 0; k < P.poles.size(); ++k) {
    const double x = P.poles[k].center.real();
    add({x - o.half_width, x + o.half_width, -o.half_height, o.half_height}, int(k));
    if (k + 1 < P.poles.size()) {
      const double nx = P.poles[k + 1].center.real();
      // fill wide gaps on the axis with a pole-free patch
      if ((x + o.half_width - o.inset) - (nx - o.half_width + o.inset) < 0.1)
        add({x + 0.25, nx - 0.25, -o.half_height, o.half_height}, -1);
    }
  }
  add({D.x0, D.x1, o.band, D.y1}, -1);
  add({D.x0, D.x1, D.y0, -o.band}, -1);
  add({D.x0, first - o.cap_gap, D.y0, D.y1}, -1);
  add({last + o.cap_gap, D.x1, D.y0, D.y1}, -1);

  P.cover = PlaneCover::make(D, o.h, U);
  const double tiny = 1e-12;
  for (const auto& r : U) {
    P.refinement.push_back({r.x0 <= D.x0 + tiny ? r.x0 : r.x0 + o.inset,
                            r.x1 >= D.x1 - tiny ? r.x1 : r.x1 - o.inset,
                            r.y0 <= D.y0 + tiny ? r.y0 : r.y0 + o.inset,
                            r.y1 >= D.y1 - tiny ? r.y1 : r.y1 - o.inset});
  }
  P.pou = build_pou(P.cover, P.refinement, o.ramp);
  P.cocycle = Cocycle1::coboundary(P.cover, [&](int i, Complex z) { return P.local_part(i, z); });
  return P;
}

MittagLefflerComparison compare_with_oracle(const MittagLefflerProblem& p, const CousinSolution& s,
                                            const Rect& region, int count, double min_distance,
                                            unsigned long long seed) {
  const PlaneCover& cover = p.cover;
  const Window w = window_of(cover.lattice, region).intersect(cover.domain_window);
  if (w.empty()) throw DomainError("comparison region holds no lattice points");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> di(w.i0, w.i0 + w.nx - 1), dj(w.j0, w.j0 + w.ny - 1);
  MittagLefflerComparison out;
  for (int tries = 0; int(out.points.size()) < count; ++tries) {
    if (tries > 1000 * count) throw DomainError("too few lattice points away from the poles");
    const int i = di(rng), j = dj(rng);
    if (p.pole_distance(cover.lattice.point(i, j)) >= min_distance) out.points.emplace_back(i, j);
  }
  auto reconstruct = [&](int i, int j) {
    for (std::size_t k = 0; k < cover.size(); ++k)
      if (cover.windows[k].contains(i, j))
        return p.local_part(int(k), cover.lattice.point(i, j)) - s.cprime[k].at(i, j);
    throw DomainError("point outside every patch");
  };
  out.match_point = out.points.front();
  const Complex z0 = cover.lattice.point(out.match_point.first, out.match_point.second);
  const Complex shift = p.oracle(z0) - reconstruct(out.match_point.first, out.match_point.second);
  for (auto [i, j] : out.points) {
    const Complex z = cover.lattice.point(i, j);
    const Complex exact = p.oracle(z);
    const Complex value = reconstruct(i, j) + shift;
    out.reconstructed.push_back(value);
    out.exact.push_back(exact);
    const double err = std::abs(value - exact);
    out.max_abs_error = std::max(out.max_abs_error, err);
    out.max_relative_error = std::max(out.max_relative_error, err / std::max(std::abs(exact), 1.0));
  }
  return out;
}

WeightedReport weighted_solution_report(const Cocycle1& c, const std::vector<GridFunction>& cprime,
                                        const std::function<double(Complex)>& phi, double gamma,
                                        const std::vector<Rect>& compacts,
                                        const std::function<double(Complex)>& loss) {
  const PlaneCover& cover = c.cover;
  if (cprime.size() != cover.size() || compacts.size() != cover.size())
    throw DomainError("one solution and one compact per patch required");
  const Lattice& lat = cover.lattice;
  WeightedReport r;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const Window k = window_of(lat, compacts[i]).intersect(cover.windows[i]);
    double wmax = 0.0, umax = 0.0;
    for_window(k, [&](int a, int b) {
      const Complex z = lat.point(a, b);
      const double l = loss ? loss(z) : 0.0;
      wmax = std::max(wmax, std::exp(-gamma * phi(z) - l));
      umax = std::max(umax, std::abs(cprime[i].at(a, b)));
    });
    r.lhs += wmax * umax;
  }
  for (const auto& [key, cij] : c.values) {
    double wmax = 0.0;
    for_window(cij.window, [&](int a, int b) { wmax = std::max(wmax, std::exp(-phi(lat.point(a, b)))); });
    r.rhs += wmax * cij.sup();
  }
  if (r.rhs > 0.0) r.constant = r.lhs / r.rhs;
  else r.constant = r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

}  // namespace deskcech::dbar
