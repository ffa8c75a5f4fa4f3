#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qinst/matrix.hpp"

namespace qinst::sdp {

enum class BlockField { RealSymmetric, ComplexHermitian };
enum class Sense { Minimize, Maximize };
enum class SolveStatus { Optimal, MaxIterations, NumericalFailure };

std::string to_string(SolveStatus s);

// Real linear functional of the matrix blocks and free scalars:
//   sum_j Tr[coeff_j X_{block_j}] + sum_k coeff_k u_{scalar_k}.
// Matrix coefficients must be Hermitian (real symmetric for real blocks).
struct LinearExpr {
  std::vector<std::pair<int, Matrix>> block_terms;
  std::vector<std::pair<int, double>> scalar_terms;

  LinearExpr& add_block(int block, const Matrix& coeff);
  LinearExpr& add_scalar(int scalar, double coeff);
};

struct BlockInfo {
  std::string id;
  int dim = 0;
  BlockField field = BlockField::ComplexHermitian;
};

struct Constraint {
  LinearExpr lhs;
  double rhs = 0.0;
};

// Conic program over PSD matrix blocks plus free scalar variables:
//   optimize  <C, X> + c.u   subject to  <A_i, X> + a_i.u = b_i,  X >= 0.
class SdpProblem {
 public:
  int add_block(const std::string& id, int dim, BlockField field);
  int add_free_scalar(const std::string& id);

  void set_objective(Sense sense, LinearExpr expr);
  void add_constraint(LinearExpr expr, double rhs);

  // Expands the Hermitian matrix identity
  //   sum_j coeff_j X_{block_j} + sum_k u_{scalar_k} M_k = rhs
  // into scalar constraints on the real and imaginary entry functionals.
  void add_matrix_equality(const std::vector<std::pair<int, double>>& block_coeffs,
                           const std::vector<std::pair<int, Matrix>>& scalar_coeffs,
                           const Matrix& rhs);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_free_scalars() const { return static_cast<int>(scalar_ids_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }

  const BlockInfo& block(int b) const { return blocks_.at(b); }
  const std::string& scalar_id(int k) const { return scalar_ids_.at(k); }
  const Constraint& constraint(int i) const { return constraints_.at(i); }
  Sense sense() const { return sense_; }
  const LinearExpr& objective() const { return objective_; }

  nlohmann::json to_json() const;
  static SdpProblem from_json(const nlohmann::json& j);

 private:
  void check_expr(const LinearExpr& expr) const;

  std::vector<BlockInfo> blocks_;
  std::vector<std::string> scalar_ids_;
  Sense sense_ = Sense::Minimize;
  LinearExpr objective_;
  std::vector<Constraint> constraints_;
};

struct SolverConfig {
  double gap_tol = 1e-8;
  double feas_tol = 1e-9;
  int max_iterations = 200;
  double initial_scaling = 1.0;
};

nlohmann::json config_to_json(const SolverConfig& c);
SolverConfig config_from_json(const nlohmann::json& j);

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  // Preprocessing found equality rows that are linear combinations of the
  // others but carry a conflicting right-hand side: no feasible point exists
  // and no iterations were run.
  bool inconsistent_rows = false;
  std::vector<Matrix> primal_blocks;
  std::vector<double> free_scalar_values;
  // One multiplier per original constraint; rows dropped as linearly
  // dependent carry zero.
  std::vector<double> dual_multipliers;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  // Relative gap |p - d| / (1 + |p| + |d|).
  double gap = 0.0;
  double max_constraint_residual = 0.0;
  double min_block_eigenvalue = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static SdpSolution from_json(const nlohmann::json& j);
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual SdpSolution solve(const SdpProblem& problem, const SolverConfig& config) = 0;
};

// Primal-dual path-following interior point method with Mehrotra
// predictor-corrector steps, run on a real symmetric lowering of the problem.
class InteriorPointSolver : public SolverBackend {
 public:
  SdpSolution solve(const SdpProblem& problem, const SolverConfig& config) override;
};

// Delegates to `command <request.json> <response.json>` where the request
// holds {"problem": ..., "config": ...} and the response is an SdpSolution.
class ExternalProcessSolver : public SolverBackend {
 public:
  explicit ExternalProcessSolver(std::string command) : command_(std::move(command)) {}
  SdpSolution solve(const SdpProblem& problem, const SolverConfig& config) override;

 private:
  std::string command_;
};

SdpSolution solve(const SdpProblem& problem, const SolverConfig& config = {});

// Real encoding of a d-dimensional Hermitian space as 2d x 2d symmetric
// matrices [[Re, -Im], [Im, Re]].
struct ComplexEmbedding {
  int complex_dim = 0;
  int real_dim = 0;
  RealMatrix embed(const Matrix& herm) const;
  Matrix extract(const RealMatrix& y) const;
};

ComplexEmbedding embed_complex(int dim);

}  // namespace qinst::sdp
