#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qinst/json_io.hpp"
#include "qinst/sdp.hpp"

namespace qinst::sdp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr double kCoeffHermTol = 1e-12;

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "numerical_failure";
}

LinearExpr& LinearExpr::add_block(int block, const Matrix& coeff) {
  block_terms.emplace_back(block, coeff);
  return *this;
}

LinearExpr& LinearExpr::add_scalar(int scalar, double coeff) {
  scalar_terms.emplace_back(scalar, coeff);
  return *this;
}

int SdpProblem::add_block(const std::string& id, int dim, BlockField field) {
  require(dim >= 1, "add_block: dimension must be positive");
  require(!id.empty(), "add_block: id must be non-empty");
  blocks_.push_back(BlockInfo{id, dim, field});
  return static_cast<int>(blocks_.size()) - 1;
}

int SdpProblem::add_free_scalar(const std::string& id) {
  require(!id.empty(), "add_free_scalar: id must be non-empty");
  scalar_ids_.push_back(id);
  return static_cast<int>(scalar_ids_.size()) - 1;
}

void SdpProblem::check_expr(const LinearExpr& expr) const {
  for (const auto& [b, coeff] : expr.block_terms) {
    require(b >= 0 && b < num_blocks(), "expression references unknown block");
    const BlockInfo& info = blocks_[b];
    require(coeff.rows() == info.dim && coeff.cols() == info.dim,
            "coefficient dimension mismatch on block '" + info.id + "'");
    const double herm_res = (coeff - coeff.adjoint()).cwiseAbs().maxCoeff();
    require(herm_res <= kCoeffHermTol,
            "coefficient on block '" + info.id + "' is not Hermitian");
    if (info.field == BlockField::RealSymmetric)
      require(coeff.imag().cwiseAbs().maxCoeff() <= kCoeffHermTol,
              "real block '" + info.id + "' needs a real coefficient");
  }
  for (const auto& [k, c] : expr.scalar_terms) {
    require(k >= 0 && k < num_free_scalars(), "expression references unknown scalar");
    require(std::isfinite(c), "scalar coefficient must be finite");
  }
}

void SdpProblem::set_objective(Sense sense, LinearExpr expr) {
  check_expr(expr);
  sense_ = sense;
  objective_ = std::move(expr);
}

void SdpProblem::add_constraint(LinearExpr expr, double rhs) {
  check_expr(expr);
  require(std::isfinite(rhs), "constraint rhs must be finite");
  constraints_.push_back(Constraint{std::move(expr), rhs});
}

void SdpProblem::add_matrix_equality(
    const std::vector<std::pair<int, double>>& block_coeffs,
    const std::vector<std::pair<int, Matrix>>& scalar_coeffs, const Matrix& rhs) {
  require(rhs.rows() == rhs.cols(), "add_matrix_equality: rhs must be square");
  const int d = static_cast<int>(rhs.rows());
  require((rhs - rhs.adjoint()).cwiseAbs().maxCoeff() <= 1e-9,
          "add_matrix_equality: rhs must be Hermitian");
  bool complex_content = rhs.imag().cwiseAbs().maxCoeff() > kCoeffHermTol;
  for (const auto& [b, c] : block_coeffs) {
    require(b >= 0 && b < num_blocks(), "add_matrix_equality: unknown block");
    require(blocks_[b].dim == d, "add_matrix_equality: block dimension mismatch");
    require(std::isfinite(c), "add_matrix_equality: coefficient must be finite");
    if (blocks_[b].field == BlockField::ComplexHermitian) complex_content = true;
  }
  for (const auto& [k, m] : scalar_coeffs) {
    require(k >= 0 && k < num_free_scalars(), "add_matrix_equality: unknown scalar");
    require(m.rows() == d && m.cols() == d,
            "add_matrix_equality: scalar coefficient dimension mismatch");
    require((m - m.adjoint()).cwiseAbs().maxCoeff() <= kCoeffHermTol,
            "add_matrix_equality: scalar coefficient must be Hermitian");
    if (m.imag().cwiseAbs().maxCoeff() > kCoeffHermTol) complex_content = true;
  }

  // Entry functionals E with Tr[E X] = Re X_ij (i <= j) or Im X_ij (i < j).
  std::vector<Matrix> functionals;
  std::vector<double> rhs_vals;
  for (int i = 0; i < d; ++i) {
    Matrix e = Matrix::Zero(d, d);
    e(i, i) = 1.0;
    functionals.push_back(e);
    rhs_vals.push_back(rhs(i, i).real());
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = 0.5;
      e(j, i) = 0.5;
      functionals.push_back(e);
      rhs_vals.push_back(rhs(i, j).real());
    }
  if (complex_content) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        Matrix e = Matrix::Zero(d, d);
        e(i, j) = Complex(0, 0.5);
        e(j, i) = Complex(0, -0.5);
        functionals.push_back(e);
        rhs_vals.push_back(rhs(i, j).imag());
      }
  }

  for (std::size_t r = 0; r < functionals.size(); ++r) {
    const Matrix& e = functionals[r];
    LinearExpr row;
    for (const auto& [b, c] : block_coeffs) row.add_block(b, Matrix(c * e));
    for (const auto& [k, m] : scalar_coeffs)
      row.add_scalar(k, (e.adjoint() * m).trace().real());
    add_constraint(std::move(row), rhs_vals[r]);
  }
}

namespace {

nlohmann::json expr_to_json(const LinearExpr& e) {
  std::map<int, Matrix> merged;
  for (const auto& [b, coeff] : e.block_terms) {
    auto it = merged.find(b);
    if (it == merged.end())
      merged.emplace(b, coeff);
    else
      it->second += coeff;
  }
  std::map<int, double> merged_scalars;
  for (const auto& [k, c] : e.scalar_terms) merged_scalars[k] += c;
  nlohmann::json block_terms = nlohmann::json::array();
  for (const auto& [b, coeff] : merged)
    for (Eigen::Index i = 0; i < coeff.rows(); ++i)
      for (Eigen::Index j = i; j < coeff.cols(); ++j) {
        const Complex v = coeff(i, j);
        if (v == Complex(0, 0)) continue;
        block_terms.push_back({b, i, j, v.real(), v.imag()});
      }
  nlohmann::json scalar_terms = nlohmann::json::array();
  for (const auto& [k, c] : merged_scalars) scalar_terms.push_back({k, c});
  return {{"block_terms", block_terms}, {"scalar_terms", scalar_terms}};
}

LinearExpr expr_from_json(const nlohmann::json& j, const std::vector<BlockInfo>& blocks) {
  LinearExpr e;
  std::vector<Matrix> coeffs(blocks.size());
  std::vector<bool> used(blocks.size(), false);
  for (const auto& t : j.at("block_terms")) {
    const int b = t.at(0).get<int>();
    if (b < 0 || b >= static_cast<int>(blocks.size()))
      throw std::invalid_argument("problem JSON: block index out of range");
    if (!used[b]) {
      coeffs[b] = Matrix::Zero(blocks[b].dim, blocks[b].dim);
      used[b] = true;
    }
    const int row = t.at(1).get<int>();
    const int col = t.at(2).get<int>();
    const Complex v(t.at(3).get<double>(), t.at(4).get<double>());
    if (row < 0 || col < 0 || row >= blocks[b].dim || col >= blocks[b].dim)
      throw std::invalid_argument("problem JSON: entry index out of range");
    coeffs[b](row, col) = v;
    if (row != col) coeffs[b](col, row) = std::conj(v);
  }
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (used[b]) e.add_block(static_cast<int>(b), coeffs[b]);
  for (const auto& t : j.at("scalar_terms"))
    e.add_scalar(t.at(0).get<int>(), t.at(1).get<double>());
  return e;
}

}  // namespace

nlohmann::json SdpProblem::to_json() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : blocks_)
    blocks.push_back({{"id", b.id},
                      {"dim", b.dim},
                      {"field", b.field == BlockField::ComplexHermitian ? "complex" : "real"}});
  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& c : constraints_) {
    nlohmann::json jc = expr_to_json(c.lhs);
    jc["rhs"] = c.rhs;
    constraints.push_back(jc);
  }
  nlohmann::json obj = expr_to_json(objective_);
  obj["sense"] = sense_ == Sense::Minimize ? "min" : "max";
  return {{"blocks", blocks},
          {"free_scalars", scalar_ids_},
          {"objective", obj},
          {"constraints", constraints}};
}

SdpProblem SdpProblem::from_json(const nlohmann::json& j) {
  SdpProblem p;
  for (const auto& b : j.at("blocks"))
    p.add_block(b.at("id").get<std::string>(), b.at("dim").get<int>(),
                b.at("field").get<std::string>() == "real" ? BlockField::RealSymmetric
                                                           : BlockField::ComplexHermitian);
  for (const auto& s : j.at("free_scalars")) p.add_free_scalar(s.get<std::string>());
  const auto& obj = j.at("objective");
  p.set_objective(obj.at("sense").get<std::string>() == "max" ? Sense::Maximize : Sense::Minimize,
                  expr_from_json(obj, p.blocks_));
  for (const auto& c : j.at("constraints"))
    p.add_constraint(expr_from_json(c, p.blocks_), c.at("rhs").get<double>());
  return p;
}

nlohmann::json SdpSolution::to_json() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& m : primal_blocks) blocks.push_back(matrix_to_json(m));
  return {{"status", to_string(status)},
          {"inconsistent_rows", inconsistent_rows},
          {"primal_blocks", blocks},
          {"free_scalars", free_scalar_values},
          {"dual_multipliers", dual_multipliers},
          {"primal_objective", primal_objective},
          {"dual_objective", dual_objective},
          {"gap", gap},
          {"max_constraint_residual", max_constraint_residual},
          {"min_block_eigenvalue", min_block_eigenvalue},
          {"iterations", iterations},
          {"warnings", warnings}};
}

SdpSolution SdpSolution::from_json(const nlohmann::json& j) {
  SdpSolution s;
  const std::string st = j.at("status").get<std::string>();
  if (st == "optimal")
    s.status = SolveStatus::Optimal;
  else if (st == "max_iterations")
    s.status = SolveStatus::MaxIterations;
  else
    s.status = SolveStatus::NumericalFailure;
  s.inconsistent_rows = j.value("inconsistent_rows", false);
  for (const auto& m : j.at("primal_blocks")) s.primal_blocks.push_back(matrix_from_json(m));
  s.free_scalar_values = j.at("free_scalars").get<std::vector<double>>();
  s.dual_multipliers = j.at("dual_multipliers").get<std::vector<double>>();
  s.primal_objective = j.at("primal_objective").get<double>();
  s.dual_objective = j.at("dual_objective").get<double>();
  s.gap = j.at("gap").get<double>();
  s.max_constraint_residual = j.at("max_constraint_residual").get<double>();
  s.min_block_eigenvalue = j.at("min_block_eigenvalue").get<double>();
  s.iterations = j.at("iterations").get<int>();
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

RealMatrix ComplexEmbedding::embed(const Matrix& herm) const {
  if (herm.rows() != complex_dim || herm.cols() != complex_dim)
    throw std::invalid_argument("embed: dimension mismatch");
  RealMatrix out(real_dim, real_dim);
  out.topLeftCorner(complex_dim, complex_dim) = herm.real();
  out.topRightCorner(complex_dim, complex_dim) = -herm.imag();
  out.bottomLeftCorner(complex_dim, complex_dim) = herm.imag();
  out.bottomRightCorner(complex_dim, complex_dim) = herm.real();
  return out;
}

Matrix ComplexEmbedding::extract(const RealMatrix& y) const {
  if (y.rows() != real_dim || y.cols() != real_dim)
    throw std::invalid_argument("extract: dimension mismatch");
  const auto p = 0.5 * (y.topLeftCorner(complex_dim, complex_dim) +
                        y.bottomRightCorner(complex_dim, complex_dim));
  const auto q = 0.5 * (y.bottomLeftCorner(complex_dim, complex_dim) -
                        y.topRightCorner(complex_dim, complex_dim));
  Matrix out(complex_dim, complex_dim);
  out.real() = p;
  out.imag() = q;
  return out;
}

ComplexEmbedding embed_complex(int dim) {
  if (dim < 1) throw std::invalid_argument("embed_complex: dimension must be positive");
  return ComplexEmbedding{dim, 2 * dim};
}

}  // namespace qinst::sdp
