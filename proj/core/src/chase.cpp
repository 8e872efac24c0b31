#include "deskcech/chase.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace deskcech::chase {

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

std::string square(int n, int k) {
  std::ostringstream os;
  os << "(" << n << ", " << k << ")";
  return os.str();
}

// |T| for the l1 norm weighted by w: max_j sum_i w_i |T_ij| / w_j.
double weighted_l1_operator_norm(const Matrix& T, const Vector& w) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < T.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < T.rows(); ++i) s += w(i) * std::abs(T(i, j));
    best = std::max(best, s / w(j));
  }
  return best;
}

int terms_for(double theta) {
  if (theta == 0.0) return 1;
  // smallest n with theta^n < 1e-14
  int n = int(std::ceil(std::log(1e-14) / std::log(theta)));
  while (std::pow(theta, n) >= 1e-14) ++n;
  return std::max(n, 1);
}

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ();
}

}  // namespace

Matrix GradedDiagram::row_map(int n, int k) const {
  if (k < 0) return Matrix::Zero(0, dim(n, 0));
  return P[std::size_t(n)][std::size_t(k)];
}

Matrix GradedDiagram::column_map(int n, int k) const {
  if (n < 0) return Matrix::Zero(0, dim(0, k));
  return d[std::size_t(n)][std::size_t(k)];
}

GradedDiagram GradedDiagram::zeros(const std::vector<std::vector<int>>& dims) {
  GradedDiagram g;
  g.dims = dims;
  const int R = g.rows(), K = g.cols();
  g.P.assign(std::size_t(R), {});
  g.d.assign(std::size_t(std::max(R - 1, 0)), {});
  for (int n = 0; n < R; ++n)
    for (int k = 0; k + 1 < K; ++k)
      g.P[std::size_t(n)].push_back(Matrix::Zero(g.dim(n, k), g.dim(n, k + 1)));
  for (int n = 0; n + 1 < R; ++n)
    for (int k = 0; k < K; ++k)
      g.d[std::size_t(n)].push_back(Matrix::Zero(g.dim(n, k), g.dim(n + 1, k)));
  return g;
}

ChainComplex standard_exact_complex(const std::vector<int>& ranks, int extra_kernel) {
  ChainComplex c;
  const std::size_t R = ranks.size() + 1;
  c.dims.resize(R);
  // A_n = U_{n-1} (+) U_n, with U_{-1} = 0 and the last U replaced by extra_kernel
  for (std::size_t n = 0; n < R; ++n) {
    const int prev = n == 0 ? 0 : ranks[n - 1];
    const int own = n + 1 < R ? ranks[n] : extra_kernel;
    c.dims[n] = prev + own;
  }
  for (std::size_t n = 0; n + 1 < R; ++n) {
    Matrix m = Matrix::Zero(c.dims[n], c.dims[n + 1]);
    const int prev = n == 0 ? 0 : ranks[n - 1];
    // (u, v) in U_n (+) U_{n+1}  |->  (0, u) in U_{n-1} (+) U_n
    for (int i = 0; i < ranks[n]; ++i) m(prev + i, i) = 1.0;
    c.maps.push_back(m);
  }
  return c;
}

GradedDiagram tensor_diagram(const ChainComplex& column, const ChainComplex& row) {
  std::vector<std::vector<int>> dims(column.dims.size(), std::vector<int>(row.dims.size()));
  for (std::size_t n = 0; n < column.dims.size(); ++n)
    for (std::size_t k = 0; k < row.dims.size(); ++k) dims[n][k] = column.dims[n] * row.dims[k];
  GradedDiagram g = GradedDiagram::zeros(dims);
  for (std::size_t n = 0; n < column.dims.size(); ++n)
    for (std::size_t k = 0; k + 1 < row.dims.size(); ++k)
      g.P[n][k] = kron(Matrix::Identity(column.dims[n], column.dims[n]), row.maps[k]);
  for (std::size_t n = 0; n + 1 < column.dims.size(); ++n)
    for (std::size_t k = 0; k < row.dims.size(); ++k)
      g.d[n][k] = kron(column.maps[n], Matrix::Identity(row.dims[k], row.dims[k]));
  return g;
}

GradedDiagram direct_sum(const GradedDiagram& a, const GradedDiagram& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("diagram shapes differ");
  auto dims = a.dims;
  for (int n = 0; n < a.rows(); ++n)
    for (int k = 0; k < a.cols(); ++k) dims[std::size_t(n)][std::size_t(k)] += b.dim(n, k);
  GradedDiagram g = GradedDiagram::zeros(dims);
  for (std::size_t n = 0; n < g.P.size(); ++n)
    for (std::size_t k = 0; k < g.P[n].size(); ++k) g.P[n][k] = block_diag(a.P[n][k], b.P[n][k]);
  for (std::size_t n = 0; n < g.d.size(); ++n)
    for (std::size_t k = 0; k < g.d[n].size(); ++k) g.d[n][k] = block_diag(a.d[n][k], b.d[n][k]);
  g.overlap_bound = a.overlap_bound ? a.overlap_bound : b.overlap_bound;
  return g;
}

GradedDiagram change_basis(const GradedDiagram& g, const std::vector<std::vector<Matrix>>& G) {
  GradedDiagram out = g;
  std::vector<std::vector<Matrix>> inv(G.size());
  for (std::size_t n = 0; n < G.size(); ++n)
    for (const auto& m : G[n]) inv[n].push_back(m.size() == 0 ? m : Matrix(m.inverse()));
  for (std::size_t n = 0; n < g.P.size(); ++n)
    for (std::size_t k = 0; k < g.P[n].size(); ++k) out.P[n][k] = G[n][k] * g.P[n][k] * inv[n][k + 1];
  for (std::size_t n = 0; n < g.d.size(); ++n)
    for (std::size_t k = 0; k < g.d[n].size(); ++k) out.d[n][k] = G[n][k] * g.d[n][k] * inv[n + 1][k];
  return out;
}

int numerical_rank(const Matrix& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s(0));
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

Matrix kernel_basis(const Matrix& m, double tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const int r = numerical_rank(m, tol);
  return svd.matrixV().rightCols(n - r);
}

Vector min_norm_solve(const Matrix& m, const Vector& b, double tol) {
  if (m.cols() == 0) return Vector(0);
  if (m.rows() == 0) return Vector::Zero(m.cols());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(tol);
  cod.compute(m);
  return cod.solve(b);
}

ValidationReport validate(const GradedDiagram& g, double tol) {
  ValidationReport r;
  r.commutes = r.rows_exact = r.columns_exact = r.first_column_complex = true;
  const int R = g.rows(), K = g.cols();
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    if (r.detail.empty()) r.detail = why;
  };
  for (int n = 0; n + 1 < R; ++n)
    for (int k = 0; k + 1 < K; ++k) {
      const double c = max_abs(g.P[std::size_t(n)][std::size_t(k)] * g.d[std::size_t(n)][std::size_t(k) + 1] -
                               g.d[std::size_t(n)][std::size_t(k)] * g.P[std::size_t(n) + 1][std::size_t(k)]);
      r.max_commutator = std::max(r.max_commutator, c);
      if (c > 1e-12 * std::max(1.0, max_abs(g.P[std::size_t(n)][std::size_t(k)])))
        fail(r.commutes, "square " + square(n, k) + " does not commute");
    }
  // exact at F(n,k): image of the incoming map equals the kernel of the outgoing one
  auto exact_at = [&](const Matrix& out, const Matrix& in, int dim) {
    if (max_abs(out * in) > tol * std::max(1.0, max_abs(out) * max_abs(in))) return false;
    return numerical_rank(in, tol) == dim - numerical_rank(out, tol);
  };
  for (int n = 0; n < R; ++n)
    for (int k = 0; k + 1 < K; ++k)
      if (!exact_at(g.row_map(n, k - 1), g.P[std::size_t(n)][std::size_t(k)], g.dim(n, k)))
        fail(r.rows_exact, "row " + std::to_string(n) + " is not exact at column " + std::to_string(k));
  for (int k = 1; k < K; ++k)
    for (int n = 0; n + 1 < R; ++n)
      if (!exact_at(g.column_map(n - 1, k), g.d[std::size_t(n)][std::size_t(k)], g.dim(n, k)))
        fail(r.columns_exact, "column " + std::to_string(k) + " is not exact at row " + std::to_string(n));
  for (int n = 0; n + 2 < R; ++n) {
    if (K == 0) break;
    if (max_abs(g.d[std::size_t(n)][0] * g.d[std::size_t(n) + 1][0]) > tol)
      fail(r.first_column_complex, "first column is not a complex at row " + std::to_string(n));
  }
  return r;
}

namespace {

Vector chase_rec(const GradedDiagram& g, int n, int k, const Vector& x, const ChaseOptions& opt,
                 std::vector<ChaseStep>& steps) {
  if (k + 1 >= g.cols() || n + 1 >= g.rows())
    throw DomainError("diagram too small to chase from " + square(n, k));
  ChaseStep st;
  st.row = n;
  st.col = k;
  const Matrix& P = g.P[std::size_t(n)][std::size_t(k)];
  const double xs = 1.0 + x.norm();

  // lift along the row
  st.y1 = min_norm_solve(P, x, opt.tol);
  if ((P * st.y1 - x).norm() > 1e-9 * xs)
    throw NumericalError("row lift failed at square " + square(n, k) + ": row not exact");

  // push up and correct by the induction hypothesis
  if (n == 0) {
    st.y2 = Vector(0);
    st.y3 = Vector::Zero(g.dim(n, k + 1));
  } else {
    st.y2 = g.d[std::size_t(n) - 1][std::size_t(k) + 1] * st.y1;
    std::vector<ChaseStep> inner;
    st.y3 = chase_rec(g, n - 1, k + 1, st.y2, opt, inner);
    steps.insert(steps.end(), inner.begin(), inner.end());
  }
  st.y4 = st.y1 - st.y3;

  // descend the exact column
  const Matrix& D = g.d[std::size_t(n)][std::size_t(k) + 1];
  st.y5 = min_norm_solve(D, st.y4, opt.tol);
  const Vector gap = st.y4 - D * st.y5;
  if (gap.norm() > 1e-9 * (1.0 + st.y4.norm()))
    throw ObstructionError("column " + std::to_string(k + 1) + " is not exact at row " +
                               std::to_string(n) + ": descent has no solution",
                           n, k + 1, gap);

  // push forward along the row below
  st.y = g.P[std::size_t(n) + 1][std::size_t(k)] * st.y5;
  Vector y = st.y;
  steps.insert(steps.begin(), st);
  return y;
}

}  // namespace

ChaseReport chase_solve(const GradedDiagram& g, int n, int k, const Vector& x,
                        const ChaseOptions& opt) {
  if (n < 0 || k < 0 || n >= g.rows() || k >= g.cols()) throw DomainError("square out of range");
  if (x.size() != g.dim(n, k)) throw DomainError("x has the wrong dimension for " + square(n, k));
  const double xs = x.norm();
  const double cond_d = (g.column_map(n - 1, k) * x).norm();
  const double cond_p = (g.row_map(n, k - 1) * x).norm();
  if (cond_d > 1e-10 * std::max(1.0, xs) || cond_p > 1e-10 * std::max(1.0, xs))
    throw PreconditionError("x violates the kernel conditions at " + square(n, k));

  ChaseReport rep;
  if (xs == 0.0) {
    if (n + 1 >= g.rows()) throw DomainError("no row below " + square(n, k));
    rep.y = Vector::Zero(g.dim(n + 1, k));
    return rep;
  }
  rep.y = chase_rec(g, n, k, x, opt, rep.steps);
  rep.residual_d = (g.d[std::size_t(n)][std::size_t(k)] * rep.y - x).norm();
  rep.residual_p = (g.row_map(n + 1, k - 1) * rep.y).norm();
  rep.amplification = rep.y.norm() / xs;
  // step amplification: output over the input each level received
  for (std::size_t s = 0; s < rep.steps.size(); ++s) {
    const auto& st = rep.steps[s];
    const double in = s == 0 ? xs : rep.steps[s - 1].y2.norm();
    rep.step_amplification.push_back(in > 0.0 ? st.y.norm() / in : 0.0);
  }
  const double bound = 1e-9 * (1.0 + xs);
  if (rep.residual_d > bound || rep.residual_p > bound)
    throw NumericalError("chase residual above tolerance at " + square(n, k));
  return rep;
}

ColumnCertificate first_column_exactness(const GradedDiagram& g, const ChaseOptions& opt) {
  ColumnCertificate cert;
  const int R = g.rows(), K = g.cols();
  if (K == 0) return cert;
  for (int n = 0; n + 1 < R; ++n) {
    ColumnCertificate::Row row;
    row.row = n;
    if (g.overlap_bound) row.nominal_grade_loss = 2 * n;
    const Matrix basis = kernel_basis(g.column_map(n - 1, 0), opt.tol);
    row.kernel_dim = int(basis.cols());
    row.reachable = n + 1 <= K - 1;
    if (basis.cols() == 0) {
      cert.rows.push_back(row);
      continue;
    }
    if (!row.reachable) {
      // too few columns to chase; solve the first column directly instead
      const Matrix& D = g.d[std::size_t(n)][0];
      for (Eigen::Index b = 0; b < basis.cols(); ++b) {
        const Vector x = basis.col(b);
        const Vector y = min_norm_solve(D, x, opt.tol);
        const Vector gap = x - D * y;
        if (gap.norm() > 1e-9 * (1.0 + x.norm())) {
          if (!cert.obstructed) {
            cert.obstructed = true;
            cert.obstruction_row = n;
            cert.obstruction_col = 0;
            cert.obstruction = gap;
          }
          break;
        }
        row.basis.push_back(x);
        row.preimages.push_back(y);
        row.max_amplification = std::max(row.max_amplification, y.norm() / x.norm());
        ++cert.solved;
      }
      cert.max_amplification = std::max(cert.max_amplification, row.max_amplification);
      cert.rows.push_back(row);
      continue;
    }
    for (Eigen::Index b = 0; b < basis.cols(); ++b) {
      const Vector x = basis.col(b);
      try {
        auto rep = chase_solve(g, n, 0, x, opt);
        row.basis.push_back(x);
        row.preimages.push_back(rep.y);
        row.max_amplification = std::max(row.max_amplification, rep.amplification);
        ++cert.solved;
      } catch (const ObstructionError& e) {
        if (!cert.obstructed) {
          cert.obstructed = true;
          cert.obstruction_row = e.row;
          cert.obstruction_col = e.col;
          cert.obstruction = e.obstruction;
        }
        break;
      }
    }
    cert.max_amplification = std::max(cert.max_amplification, row.max_amplification);
    cert.rows.push_back(row);
  }
  return cert;
}

GradedDiagram random_exact_diagram(std::uint64_t seed, const RandomDiagramOptions& opt) {
  if (opt.rows < 1 || opt.cols < 1) throw DomainError("diagram needs at least one row and column");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<std::vector<int>> zero_dims(std::size_t(opt.rows), std::vector<int>(std::size_t(opt.cols), 0));
  GradedDiagram g = GradedDiagram::zeros(zero_dims);
  for (int s = 0; s < opt.summands; ++s) {
    std::vector<int> ar(std::size_t(opt.rows - 1)), br(std::size_t(opt.cols - 1));
    for (auto& r : ar) r = bit(rng);
    for (auto& r : br) r = bit(rng);
    auto A = standard_exact_complex(ar, bit(rng));
    auto B = standard_exact_complex(br, bit(rng));
    g = direct_sum(g, tensor_diagram(A, B));
  }
  if (opt.broken_row >= 0 && opt.broken_row + 1 < opt.rows && opt.cols >= 2) {
    // one dimension with no preimage in row broken_row, in columns 0 and 1
    ChainComplex A;
    A.dims.assign(std::size_t(opt.rows), 0);
    A.dims[std::size_t(opt.broken_row)] = 1;
    for (int n = 0; n + 1 < opt.rows; ++n) A.maps.push_back(Matrix::Zero(A.dims[std::size_t(n)], A.dims[std::size_t(n) + 1]));
    ChainComplex B;
    B.dims.assign(std::size_t(opt.cols), 0);
    B.dims[0] = B.dims[1] = 1;
    for (int k = 0; k + 1 < opt.cols; ++k) B.maps.push_back(Matrix::Zero(B.dims[std::size_t(k)], B.dims[std::size_t(k) + 1]));
    B.maps[0](0, 0) = 1.0;
    g = direct_sum(g, tensor_diagram(A, B));
  }
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  std::vector<std::vector<Matrix>> G(std::size_t(opt.rows));
  for (int n = 0; n < opt.rows; ++n)
    for (int k = 0; k < opt.cols; ++k) {
      const int m = g.dim(n, k);
      Matrix q = m > 0 ? random_orthogonal(rng, m) : Matrix(0, 0);
      for (int j = 0; j < m; ++j) q.col(j) *= scale(rng);
      G[std::size_t(n)].push_back(q);
    }
  return change_basis(g, G);
}

Vector random_admissible(const GradedDiagram& g, int n, int k, std::uint64_t seed) {
  const Matrix a = g.column_map(n - 1, k);
  const Matrix b = g.row_map(n, k - 1);
  Matrix stacked(a.rows() + b.rows(), g.dim(n, k));
  stacked << a, b;
  const Matrix basis = kernel_basis(stacked);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Vector c(basis.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = z(rng);
  if (basis.cols() == 0) return Vector::Zero(g.dim(n, k));
  return basis * c;
}

double GradedOperator::contraction(int p) const {
  const Matrix T = Matrix::Identity(A.rows(), A.cols()) - A;
  return weighted_l1_operator_norm(T, weights.at(std::size_t(p)));
}

double GradedOperator::norm(const Vector& v, int p) const {
  return weights.at(std::size_t(p)).cwiseProduct(v.cwiseAbs()).sum();
}

std::vector<Vector> GradedOperator::block_weights(const std::vector<int>& cuts,
                                                  const std::vector<double>& levels, int grades) {
  if (cuts.size() < 2 || levels.size() + 1 != cuts.size())
    throw DomainError("one level per block is required");
  std::vector<Vector> w;
  const int size = cuts.back();
  for (int p = 0; p < grades; ++p) {
    Vector v(size);
    for (std::size_t b = 0; b + 1 < cuts.size(); ++b)
      for (int i = cuts[b]; i < cuts[b + 1]; ++i) v(i) = std::exp(double(p) * levels[b]);
    w.push_back(v);
  }
  return w;
}

NeumannResult neumann_inverse(const GradedOperator& op, const Vector& v, int p) {
  if (op.A.rows() != op.A.cols() || op.A.rows() != v.size())
    throw DomainError("operator and vector sizes disagree");
  if (p < 0 || std::size_t(p) >= op.weights.size()) throw DomainError("grade out of range");
  if ((op.weights[std::size_t(p)].array() <= 0.0).any()) throw DomainError("weights must be positive");
  NeumannResult r;
  r.theta = op.contraction(p);
  if (!(r.theta < 1.0)) throw PreconditionError("I - A does not contract in this grade");
  r.terms = terms_for(r.theta);
  const Matrix T = Matrix::Identity(op.A.rows(), op.A.cols()) - op.A;
  Vector term = v;
  r.u = v;
  for (int k = 1; k <= r.terms; ++k) {
    term = T * term;
    r.u += term;
  }
  const double vn = op.norm(v, p);
  r.ratio = vn > 0.0 ? op.norm(r.u, p) / vn : 0.0;
  r.residual = op.norm(op.A * r.u - v, p);
  return r;
}

bool BlockPattern::allowed(int i, int j) const {
  auto it = std::upper_bound(cuts.begin(), cuts.end(), j);
  if (it == cuts.end()) return false;
  return i < *it;
}

bool BlockPattern::respects(const Matrix& m, double tol) const {
  return max_off_pattern(m) <= tol;
}

double BlockPattern::max_off_pattern(const Matrix& m) const {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!allowed(int(i), int(j))) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

BlockInverseResult block_inverse(const Matrix& A, const BlockPattern& pattern,
                                 const std::vector<Vector>& weights) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw DomainError("matrix must be square");
  const auto& c = pattern.cuts;
  if (c.size() < 2 || c.front() != 0 || c.back() != n) throw DomainError("cut points must run from 0 to the size");
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] <= c[i - 1]) throw DomainError("cut points must increase strictly");
  if (!pattern.respects(A)) throw PreconditionError("matrix has entries outside the block pattern");

  BlockInverseResult r;
  const Matrix T = Matrix::Identity(n, n) - A;
  r.theta = 0.0;
  if (weights.empty()) {
    r.theta = weighted_l1_operator_norm(T, Vector::Ones(n));
  } else {
    for (const auto& w : weights) r.theta = std::max(r.theta, weighted_l1_operator_norm(T, w));
  }
  if (!(r.theta < 1.0)) throw PreconditionError("I - A does not contract");
  r.terms = terms_for(r.theta);
  // Horner: B <- I + T B gives sum_{k<=terms} T^k
  Matrix B = Matrix::Identity(n, n);
  for (int k = 0; k < r.terms; ++k) B = Matrix::Identity(n, n) + T * B;
  r.inverse = B;
  r.identity_residual = max_abs(B * A - Matrix::Identity(n, n));
  r.off_pattern = pattern.max_off_pattern(B);
  return r;
}

double weighted_l1_norm(const Matrix& T, const Vector& w) { return weighted_l1_operator_norm(T, w); }

GradedOperator random_graded_operator(std::uint64_t seed, int size, int grades, double theta) {
  if (size < 1 || grades < 1 || !(theta >= 0.0 && theta < 1.0)) throw DomainError("bad operator request");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), lv(0.0, 1.0);
  std::vector<int> cuts{0};
  while (cuts.back() < size) {
    const int step = 1 + int(rng() % std::uint64_t(std::max(1, size / 2)));
    cuts.push_back(std::min(size, cuts.back() + step));
  }
  std::vector<double> levels;
  double level = 0.0;
  for (std::size_t b = 0; b + 1 < cuts.size(); ++b) {
    level += lv(rng);
    levels.push_back(level);
  }
  GradedOperator op;
  op.weights = GradedOperator::block_weights(cuts, levels, grades);
  Matrix T(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) T(i, j) = u(rng);
  double worst = 0.0;
  for (const auto& w : op.weights) worst = std::max(worst, weighted_l1_operator_norm(T, w));
  if (worst > 0.0) T *= theta / worst;
  op.A = Matrix::Identity(size, size) - T;
  return op;
}

Matrix random_block_operator(std::uint64_t seed, const BlockPattern& pattern, double theta) {
  const auto& c = pattern.cuts;
  if (c.size() < 2 || c.front() != 0) throw DomainError("cut points must start at 0");
  if (!(theta >= 0.0 && theta < 1.0)) throw DomainError("theta must lie in [0, 1)");
  const int n = c.back();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix T = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (pattern.allowed(i, j)) T(i, j) = u(rng);
  const double norm = weighted_l1_operator_norm(T, Vector::Ones(n));
  if (norm > 0.0) T *= theta / norm;
  return Matrix::Identity(n, n) - T;
}

}  // namespace deskcech::chase
