#include <cmath>
#include <fstream>
#include <random>

#include "common.hpp"
#include "deskcech/chase.hpp"

namespace deskcech::cli {

namespace {

using namespace deskcech::chase;

json matrix_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(std::size_t(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from(const json& j, const std::string& where, int rows, int cols) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw InputError("field '" + where + "': expected {rows, cols, data}");
  const int r = j["rows"].get<int>(), c = j["cols"].get<int>();
  if (r != rows || c != cols)
    throw InputError("field '" + where + "': shape " + std::to_string(r) + "x" + std::to_string(c) +
                     ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  const auto data = j["data"].get<std::vector<double>>();
  if (data.size() != std::size_t(r) * std::size_t(c))
    throw InputError("field '" + where + "': data length does not match the shape");
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) m(i, k) = data[std::size_t(i) * std::size_t(c) + std::size_t(k)];
  return m;
}

json diagram_json(const GradedDiagram& g) {
  json doc;
  doc["dims"] = g.dims;
  json P = json::array(), d = json::array();
  for (const auto& row : g.P) {
    json a = json::array();
    for (const auto& m : row) a.push_back(matrix_json(m));
    P.push_back(a);
  }
  for (const auto& row : g.d) {
    json a = json::array();
    for (const auto& m : row) a.push_back(matrix_json(m));
    d.push_back(a);
  }
  doc["P"] = P;
  doc["d"] = d;
  if (g.overlap_bound) doc["overlap_bound"] = *g.overlap_bound;
  return doc;
}

GradedDiagram diagram_from(const json& doc) {
  try {
    GradedDiagram g;
    g.dims = doc.at("dims").get<std::vector<std::vector<int>>>();
    const int R = g.rows();
    const int K = g.cols();
    if (R < 1 || K < 1) throw InputError("field 'dims': empty grid");
    for (int n = 0; n < R; ++n) {
      if (int(g.dims[std::size_t(n)].size()) != K) throw InputError("field 'dims': ragged rows");
      for (int v : g.dims[std::size_t(n)])
        if (v < 0) throw InputError("field 'dims': negative dimension");
    }
    const auto& P = doc.at("P");
    const auto& d = doc.at("d");
    if (int(P.size()) != R) throw InputError("field 'P': expected " + std::to_string(R) + " rows");
    if (int(d.size()) != R - 1) throw InputError("field 'd': expected " + std::to_string(R - 1) + " rows");
    g.P.resize(std::size_t(R));
    for (int n = 0; n < R; ++n) {
      if (int(P[std::size_t(n)].size()) != K - 1)
        throw InputError("field 'P[" + std::to_string(n) + "]': expected " + std::to_string(K - 1) + " maps");
      for (int k = 0; k + 1 < K; ++k)
        g.P[std::size_t(n)].push_back(matrix_from(P[std::size_t(n)][std::size_t(k)],
                                                  "P[" + std::to_string(n) + "][" + std::to_string(k) + "]",
                                                  g.dim(n, k), g.dim(n, k + 1)));
    }
    g.d.resize(std::size_t(R - 1));
    for (int n = 0; n + 1 < R; ++n) {
      if (int(d[std::size_t(n)].size()) != K)
        throw InputError("field 'd[" + std::to_string(n) + "]': expected " + std::to_string(K) + " maps");
      for (int k = 0; k < K; ++k)
        g.d[std::size_t(n)].push_back(matrix_from(d[std::size_t(n)][std::size_t(k)],
                                                  "d[" + std::to_string(n) + "][" + std::to_string(k) + "]",
                                                  g.dim(n, k), g.dim(n + 1, k)));
    }
    if (doc.contains("overlap_bound")) g.overlap_bound = doc["overlap_bound"].get<int>();
    return g;
  } catch (const json::exception& e) {
    throw InputError(std::string("diagram: ") + e.what());
  }
}

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

class ChaseCommand : public Command {
 public:
  std::string name() const override { return "chase"; }
  std::string help() const override { return "diagram chase certificate, Neumann inverse and block inverse trials"; }

  void setup(Params& p, std::string& mode) override {
    mode = "certify";
    p.mode(mode, {"certify", "neumann", "block"});
    p.add("diagram", diagram_, "diagram JSON (random exact diagram when empty)");
    p.add("rows", rows_, "random diagram rows");
    p.add("cols", cols_, "random diagram columns");
    p.add("summands", summands_, "random diagram summands");
    p.add("broken-row", broken_row_, "break column 1 at this row (-1: exact)");
    p.add("target", target_, "vector x to solve for (with --row, --col)");
    p.add("row", row_, "row n of the target");
    p.add("col", col_, "column k of the target");
    p.add("trials", trials_, "random operators (neumann, block)");
    p.add("size", size_, "operator size (neumann)");
    p.add("grades", grades_, "grades (neumann)");
    p.add("theta", theta_, "largest contraction drawn");
    p.add("cuts", cuts_, "block cut points (block)");
  }

  void execute(Run& r) override {
    if (r.mode == "neumann") return neumann(r);
    if (r.mode == "block") return block(r);
    certify(r);
  }

 private:
  void certify(Run& r) {
    GradedDiagram g;
    if (!diagram_.empty()) {
      std::ifstream f(diagram_);
      if (!f) throw InputError("cannot open diagram file '" + diagram_ + "'");
      json doc;
      try {
        doc = json::parse(f);
      } catch (const json::parse_error& e) {
        throw InputError("diagram file '" + diagram_ + "' is not valid JSON: " + e.what());
      }
      g = diagram_from(doc);
      r.meta["diagram"] = diagram_;
    } else {
      RandomDiagramOptions opt;
      opt.rows = rows_;
      opt.cols = cols_;
      opt.summands = summands_;
      opt.broken_row = broken_row_;
      g = random_exact_diagram(r.seed, opt);
      r.meta["diagram"] = "random";
      r.meta["rows"] = rows_;
      r.meta["cols"] = cols_;
      r.meta["broken_row"] = broken_row_;
      r.write_json("diagram.json", diagram_json(g));
    }

    const auto v = validate(g, 1e-10);
    r.check("chase.commutes", v.commutes, "max commutator " + num(v.max_commutator));
    r.check("chase.rows_exact", v.rows_exact, v.rows_exact ? "" : v.detail);
    r.check("chase.first_column_complex", v.first_column_complex, "");
    r.check("chase.columns_exact", v.columns_exact, v.columns_exact ? "" : v.detail);

    json body;
    body["validation"] = {{"commutes", v.commutes},
                          {"rows_exact", v.rows_exact},
                          {"columns_exact", v.columns_exact},
                          {"first_column_complex", v.first_column_complex},
                          {"max_commutator", v.max_commutator},
                          {"detail", v.detail}};

    if (!target_.empty()) {
      if (row_ < 0 || row_ >= g.rows() || col_ < 0 || col_ >= g.cols())
        throw InputError("field 'row'/'col': outside the diagram");
      if (int(target_.size()) != g.dim(row_, col_))
        throw InputError("field 'target': expected " + std::to_string(g.dim(row_, col_)) + " entries");
      const Vector x = Eigen::Map<const Vector>(target_.data(), Eigen::Index(target_.size()));
      const auto rep = chase_solve(g, row_, col_, x);
      const double bound = 1e-9 * (1.0 + x.norm());
      r.check("chase.solve", rep.residual_d <= bound && rep.residual_p <= bound,
              "residuals " + num(rep.residual_d) + ", " + num(rep.residual_p) + ", amplification " +
                  num(rep.amplification));
      body["solve"] = {{"row", row_},
                       {"col", col_},
                       {"y", to_std(rep.y)},
                       {"residual_d", rep.residual_d},
                       {"residual_p", rep.residual_p},
                       {"amplification", rep.amplification},
                       {"step_amplification", rep.step_amplification}};
    }

    const auto cert = first_column_exactness(g);
    if (cert.obstructed)
      r.check("chase.certificate", false,
              "obstruction at row " + std::to_string(cert.obstruction_row) + ", column " +
                  std::to_string(cert.obstruction_col) + ", |v| = " + num(cert.obstruction.norm()));
    else
      r.check("chase.certificate", std::isfinite(cert.max_amplification),
              std::to_string(cert.solved) + " basis vectors, max amplification " + num(cert.max_amplification));

    json rows = json::array();
    for (const auto& row : cert.rows) {
      json pre = json::array();
      for (const auto& y : row.preimages) pre.push_back(to_std(y));
      json e = {{"row", row.row},
                {"kernel_dim", row.kernel_dim},
                {"reachable", row.reachable},
                {"max_amplification", row.max_amplification},
                {"preimages", pre}};
      if (row.nominal_grade_loss) e["nominal_grade_loss"] = *row.nominal_grade_loss;
      rows.push_back(e);
    }
    body["certificate"] = {{"solved", cert.solved},
                           {"max_amplification", cert.max_amplification},
                           {"obstructed", cert.obstructed},
                           {"rows", rows}};
    if (cert.obstructed)
      body["certificate"]["obstruction"] = {{"row", cert.obstruction_row},
                                            {"col", cert.obstruction_col},
                                            {"vector", to_std(cert.obstruction)}};
    r.write_json("certificate.json", body);
  }

  void neumann(Run& r) {
    if (trials_ < 1 || size_ < 1 || grades_ < 1) throw InputError("field 'trials'/'size'/'grades': must be positive");
    if (!(theta_ > 0.0 && theta_ < 1.0)) throw InputError("field 'theta': must lie in (0, 1)");
    r.meta["trials"] = trials_;
    r.meta["size"] = size_;
    r.meta["grades"] = grades_;
    r.meta["theta"] = theta_;
    bool ratio_ok = true, residual_ok = true, direct_ok = true;
    double worst_slack = -1.0, worst_residual = 0.0, worst_direct = 0.0;
    int max_terms = 0;
    for (int t = 0; t < trials_; ++t) {
      const auto s = trial_seed(r.seed, std::uint64_t(t));
      std::mt19937_64 rng(s);
      std::uniform_real_distribution<double> th(0.01, theta_), u(-1.0, 1.0);
      const auto op = random_graded_operator(s, size_, grades_, th(rng));
      Vector v(size_);
      for (int i = 0; i < size_; ++i) v(i) = u(rng);
      const Vector direct = op.A.partialPivLu().solve(v);
      for (int p = 0; p < grades_; ++p) {
        const auto res = neumann_inverse(op, v, p);
        const double bound = 1.0 / (1.0 - res.theta);
        const double vp = op.norm(v, p);
        ratio_ok = ratio_ok && res.ratio <= bound * (1.0 + 1e-9);
        worst_slack = std::max(worst_slack, res.ratio / bound);
        residual_ok = residual_ok && res.residual <= 1e-10 * vp;
        worst_residual = std::max(worst_residual, res.residual / vp);
        const double diff = op.norm(res.u - direct, p) / op.norm(direct, p);
        direct_ok = direct_ok && diff <= 1e-9;
        worst_direct = std::max(worst_direct, diff);
        max_terms = std::max(max_terms, res.terms);
      }
    }
    r.check("neumann.ratio_bound", ratio_ok, "max ratio / bound " + num(worst_slack));
    r.check("neumann.residual", residual_ok, "max relative residual " + num(worst_residual));
    r.check("neumann.direct_solve", direct_ok, "max relative difference " + num(worst_direct));
    r.write_json("neumann.json", {{"ratio_ok", ratio_ok},
                                  {"max_ratio_over_bound", worst_slack},
                                  {"residual_ok", residual_ok},
                                  {"max_relative_residual", worst_residual},
                                  {"direct_ok", direct_ok},
                                  {"max_direct_difference", worst_direct},
                                  {"max_terms", max_terms}});
  }

  void block(Run& r) {
    if (trials_ < 1) throw InputError("field 'trials': must be positive");
    if (!(theta_ > 0.0 && theta_ < 1.0)) throw InputError("field 'theta': must lie in (0, 1)");
    BlockPattern pattern{cuts_};
    r.meta["trials"] = trials_;
    r.meta["cuts"] = cuts_;
    r.meta["theta"] = theta_;
    bool pattern_ok = true, identity_ok = true, dense_ok = true;
    double worst_off = 0.0, worst_identity = 0.0, worst_dense = 0.0;
    for (int t = 0; t < trials_; ++t) {
      const auto s = trial_seed(r.seed, std::uint64_t(t));
      std::mt19937_64 rng(s);
      std::uniform_real_distribution<double> th(0.01, theta_);
      const Matrix A = random_block_operator(s, pattern, th(rng));
      const auto res = block_inverse(A, pattern);
      pattern_ok = pattern_ok && res.off_pattern <= 1e-12;
      identity_ok = identity_ok && res.identity_residual <= 1e-10;
      const double diff = (res.inverse - A.inverse()).cwiseAbs().maxCoeff();
      dense_ok = dense_ok && diff <= 1e-9;
      worst_off = std::max(worst_off, res.off_pattern);
      worst_identity = std::max(worst_identity, res.identity_residual);
      worst_dense = std::max(worst_dense, diff);
    }
    r.check("block.pattern", pattern_ok, "max off-pattern " + num(worst_off));
    r.check("block.identity", identity_ok, "max |B A - I| " + num(worst_identity));
    r.check("block.dense_inverse", dense_ok, "max difference " + num(worst_dense));
    r.write_json("block.json", {{"pattern_ok", pattern_ok},
                                {"max_off_pattern", worst_off},
                                {"identity_ok", identity_ok},
                                {"max_identity_residual", worst_identity},
                                {"dense_ok", dense_ok},
                                {"max_dense_difference", worst_dense}});
  }

  std::string diagram_;
  int rows_ = 4;
  int cols_ = 4;
  int summands_ = 2;
  int broken_row_ = -1;
  std::vector<double> target_;
  int row_ = 1;
  int col_ = 0;
  int trials_ = 1000;
  int size_ = 16;
  int grades_ = 3;
  double theta_ = 0.9;
  std::vector<int> cuts_{0, 8, 20, 48};
};

}  // namespace

std::unique_ptr<Command> make_chase() { return std::make_unique<ChaseCommand>(); }

}  // namespace deskcech::cli
