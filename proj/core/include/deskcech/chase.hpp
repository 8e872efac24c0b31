#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deskcech/errors.hpp"

namespace deskcech::chase {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Finite commutative grid. Rows n = 0..R-1 (the zero row sits above row 0),
// columns k = 0..K-1 with column 0 the one to be solved.
//   P[n][k] : F(n, k+1) -> F(n, k)     for k < K-1
//   d[n][k] : F(n+1, k) -> F(n, k)     for n < R-1
struct GradedDiagram {
  std::vector<std::vector<int>> dims;
  std::vector<std::vector<Matrix>> P;
  std::vector<std::vector<Matrix>> d;
  // Optional bookkeeping: overlap bound M of an underlying nerve; row n then
  // stands for cochain degree M+1-n.
  std::optional<int> overlap_bound;

  int rows() const { return int(dims.size()); }
  int cols() const { return dims.empty() ? 0 : int(dims[0].size()); }
  int dim(int n, int k) const { return dims[std::size_t(n)][std::size_t(k)]; }

  // Zero maps where the grid ends.
  Matrix row_map(int n, int k) const;     // P[n][k], or 0 : F(n,0) -> 0 when k == -1
  Matrix column_map(int n, int k) const;  // d[n][k], or 0 : F(0,k) -> 0 when n == -1

  static GradedDiagram zeros(const std::vector<std::vector<int>>& dims);
};

// A single chain complex A_0 <- A_1 <- ... ; maps[n] : A_{n+1} -> A_n.
struct ChainComplex {
  std::vector<int> dims;
  std::vector<Matrix> maps;
};

// Exact complex with the given ranks r_n = rank(maps[n]); the last space gets
// `extra_kernel` additional dimensions outside the image requirement.
ChainComplex standard_exact_complex(const std::vector<int>& ranks, int extra_kernel = 0);

// F(n,k) = A_n (x) B_k with d = alpha (x) I and P = I (x) beta.
GradedDiagram tensor_diagram(const ChainComplex& column, const ChainComplex& row);
GradedDiagram direct_sum(const GradedDiagram& a, const GradedDiagram& b);
// Replaces each F(n,k) basis by G(n,k) (invertible); maps are conjugated.
GradedDiagram change_basis(const GradedDiagram& g, const std::vector<std::vector<Matrix>>& G);

struct ValidationReport {
  bool commutes = false;
  bool rows_exact = false;
  bool columns_exact = false;  // columns k >= 1
  bool first_column_complex = false;
  double max_commutator = 0.0;
  std::string detail;  // first failure, if any
  bool ok() const { return commutes && rows_exact && columns_exact && first_column_complex; }
};

ValidationReport validate(const GradedDiagram& g, double tol = 1e-10);

int numerical_rank(const Matrix& m, double tol = 1e-10);
Matrix kernel_basis(const Matrix& m, double tol = 1e-10);
// Minimum-norm least-squares solution of m y = b.
Vector min_norm_solve(const Matrix& m, const Vector& b, double tol = 1e-10);

struct ChaseStep {
  int row = 0;
  int col = 0;
  Vector y1, y2, y3, y4, y5, y;
};

struct ChaseReport {
  Vector y;
  double residual_d = 0.0;  // |d y - x|
  double residual_p = 0.0;  // |P y|
  double amplification = 0.0;  // |y| / |x|
  std::vector<double> step_amplification;  // |y| / |x| per recursion level, outermost first
  std::vector<ChaseStep> steps;            // outermost first
};

// Raised when the column descent has no solution; carries the obstruction.
class ObstructionError : public NumericalError {
 public:
  ObstructionError(const std::string& what, int row, int col, Vector obstruction)
      : NumericalError(what), row(row), col(col), obstruction(std::move(obstruction)) {}
  int row, col;
  Vector obstruction;  // component of the target outside the image
};

struct ChaseOptions {
  double tol = 1e-10;
};

// x in F(n,k) with d[n-1][k] x = 0 and P[n][k-1] x = 0; returns y in F(n+1,k)
// with d[n][k] y = x and P[n+1][k-1] y = 0.
ChaseReport chase_solve(const GradedDiagram& g, int n, int k, const Vector& x,
                        const ChaseOptions& opt = {});

struct ColumnCertificate {
  struct Row {
    int row = 0;
    int kernel_dim = 0;
    bool reachable = true;  // enough columns to run the induction; else solved directly
    double max_amplification = 0.0;
    std::vector<Vector> basis;
    std::vector<Vector> preimages;
    std::optional<int> nominal_grade_loss;  // 2(M+1-sigma), reported only
  };
  std::vector<Row> rows;
  double max_amplification = 0.0;
  std::size_t solved = 0;
  bool obstructed = false;
  int obstruction_row = -1;
  int obstruction_col = -1;
  Vector obstruction;
};

ColumnCertificate first_column_exactness(const GradedDiagram& g, const ChaseOptions& opt = {});

struct RandomDiagramOptions {
  int rows = 4;
  int cols = 4;
  int summands = 2;       // tensor products of small exact complexes
  int broken_row = -1;    // >= 0 adds a summand that breaks column 1 at this row
};

// Exact rows and exact columns k >= 1 by construction, in a random basis.
GradedDiagram random_exact_diagram(std::uint64_t seed, const RandomDiagramOptions& opt = {});

// Random x in F(n,k) meeting both kernel conditions of chase_solve.
Vector random_admissible(const GradedDiagram& g, int n, int k, std::uint64_t seed);

// Weighted l1 norms |v|_p = sum_i w_p[i] |v_i| on a graded space.
struct GradedOperator {
  Matrix A;
  std::vector<Vector> weights;  // one positive weight vector per grade

  // Exact induced norm of I - A for grade p.
  double contraction(int p) const;
  double norm(const Vector& v, int p) const;
  // Grades from block cut points: weight exp(p * level_b) on block b.
  static std::vector<Vector> block_weights(const std::vector<int>& cuts,
                                           const std::vector<double>& levels, int grades);
};

struct NeumannResult {
  Vector u;
  int terms = 0;
  double theta = 0.0;
  double ratio = 0.0;      // |u|_p / |v|_p
  double residual = 0.0;   // |A u - v|_p
};

NeumannResult neumann_inverse(const GradedOperator& A, const Vector& v, int p);

struct BlockPattern {
  std::vector<int> cuts;  // 0 = n_0 < n_1 < ... < n_last = size
  bool allowed(int i, int j) const;
  bool respects(const Matrix& m, double tol = 0.0) const;
  double max_off_pattern(const Matrix& m) const;
};

struct BlockInverseResult {
  Matrix inverse;
  int terms = 0;
  double theta = 0.0;
  double identity_residual = 0.0;  // max |A^{-1} A - I|
  double off_pattern = 0.0;
};

// Contraction is measured in the induced l1 norm unless weights are supplied.
BlockInverseResult block_inverse(const Matrix& A, const BlockPattern& pattern,
                                 const std::vector<Vector>& weights = {});

// Random A = I - T with weights e^{p level_b} on random blocks, T scaled so the
// largest contraction over grades equals theta.
GradedOperator random_graded_operator(std::uint64_t seed, int size, int grades, double theta);

// Random A = I - T respecting the pattern with induced l1 contraction theta.
Matrix random_block_operator(std::uint64_t seed, const BlockPattern& pattern, double theta);

// Induced norm of T in sum_i w_i |v_i|: max_j sum_i w_i |T_ij| / w_j.
double weighted_l1_norm(const Matrix& T, const Vector& w);

}  // namespace deskcech::chase
