#include <cmath>

#include "doctest.h"
#include "qinst/matrix.hpp"
#include "qinst/random.hpp"
#include "qinst/sdp.hpp"

using namespace qinst;
using namespace qinst::sdp;

namespace {

// min t such that t*I - target >= 0, i.e. the largest eigenvalue of target.
SdpProblem spectral_bound_problem(const Matrix& target) {
  const int d = static_cast<int>(target.rows());
  SdpProblem p;
  const int slack = p.add_block("slack", d, BlockField::ComplexHermitian);
  const int t = p.add_free_scalar("t");
  LinearExpr obj;
  obj.add_scalar(t, 1.0);
  p.set_objective(Sense::Minimize, obj);
  p.add_matrix_equality({{slack, -1.0}}, {{t, Matrix::Identity(d, d)}}, target);
  return p;
}

// max Tr[c X] with Tr[X] = 1, X >= 0, i.e. the largest eigenvalue of c.
SdpProblem eigmax_problem(const Matrix& c, BlockField field) {
  const int d = static_cast<int>(c.rows());
  SdpProblem p;
  const int x = p.add_block("x", d, field);
  LinearExpr obj;
  obj.add_block(x, c);
  p.set_objective(Sense::Maximize, obj);
  LinearExpr tr;
  tr.add_block(x, Matrix::Identity(d, d));
  p.add_constraint(tr, 1.0);
  return p;
}

}  // namespace

TEST_CASE("complex embedding round trips and doubles eigenvalues") {
  RandomEngine eng(21);
  ComplexEmbedding emb = embed_complex(3);
  HermitianMatrix h = random_hermitian(3, eng);
  RealMatrix y = emb.embed(h.matrix());
  CHECK((y - y.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((emb.extract(y) - h.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(y, Eigen::EigenvaluesOnly);
  EigResult ec = eig_hermitian(h);
  for (int i = 0; i < 3; ++i) {
    CHECK(es.eigenvalues()(2 * i) == doctest::Approx(ec.eigenvalues(2 - i)).epsilon(1e-10));
    CHECK(es.eigenvalues()(2 * i + 1) == doctest::Approx(ec.eigenvalues(2 - i)).epsilon(1e-10));
  }
  // Pairing against an embedded matrix doubles the inner product.
  HermitianMatrix g = random_hermitian(3, eng);
  const double direct = hs_inner(h, g);
  const double embedded = (emb.embed(h.matrix()).array() * emb.embed(g.matrix()).array()).sum();
  CHECK(embedded == doctest::Approx(2.0 * direct).epsilon(1e-12));
}

TEST_CASE("spectral bound program with a free scalar reaches the top eigenvalue") {
  SdpSolution sol = solve(spectral_bound_problem(pauli_x()));
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.free_scalar_values.size() == 1);
  CHECK(sol.free_scalar_values[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.max_constraint_residual <= 1e-7);
  CHECK(sol.min_block_eigenvalue >= -1e-8);
}

TEST_CASE("pure feasibility problem converges with a tiny gap") {
  SdpProblem p;
  const int x = p.add_block("x", 3, BlockField::ComplexHermitian);
  LinearExpr tr;
  tr.add_block(x, Matrix::Identity(3, 3));
  p.add_constraint(tr, 1.0);
  SdpSolution sol = solve(p);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(std::abs(sol.primal_objective) <= 1e-8);
  CHECK(std::abs(sol.primal_blocks[0].trace().real() - 1.0) <= 1e-8);
}

TEST_CASE("eigenvalue maximization matches the eigensolver oracle") {
  RandomEngine eng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    HermitianMatrix c = random_hermitian(d, eng);
    const double oracle = eig_hermitian(c).eigenvalues(0);
    SdpSolution sol = solve(eigmax_problem(c.matrix(), BlockField::ComplexHermitian));
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.primal_objective == doctest::Approx(oracle).epsilon(1e-7));
    // Strong duality at the reported solution.
    CHECK(std::abs(sol.primal_objective - sol.dual_objective) <=
          1e-7 * (1 + std::abs(sol.primal_objective)));
  }
}

TEST_CASE("real symmetric blocks take the real code path") {
  RandomEngine eng(23);
  Matrix g = ginibre(3, 3, eng).real().cast<Complex>();
  Matrix c = 0.5 * (g + g.adjoint().eval());
  const double oracle = eig_hermitian(HermitianMatrix(c)).eigenvalues(0);
  SdpSolution sol = solve(eigmax_problem(c, BlockField::RealSymmetric));
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal_objective == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("returned dual multipliers are dual feasible") {
  RandomEngine eng(24);
  HermitianMatrix c = random_hermitian(3, eng);
  SdpSolution sol = solve(eigmax_problem(c.matrix(), BlockField::ComplexHermitian));
  REQUIRE(sol.status == SolveStatus::Optimal);
  REQUIRE(sol.dual_multipliers.size() == 1);
  // For max Tr[cX] with Tr X = 1 the dual demands y*I - c >= 0 where y is
  // the multiplier of the trace row.
  Matrix acc = Matrix::Zero(3, 3);
  acc += sol.dual_multipliers[0] * Matrix::Identity(3, 3);
  HermitianMatrix dual_slack(Matrix(acc - c.matrix()));
  CHECK(dual_slack.min_eigenvalue() >= -1e-7);
}

TEST_CASE("solver output is deterministic") {
  RandomEngine eng(25);
  HermitianMatrix c = random_hermitian(4, eng);
  SdpSolution a = solve(eigmax_problem(c.matrix(), BlockField::ComplexHermitian));
  SdpSolution b = solve(eigmax_problem(c.matrix(), BlockField::ComplexHermitian));
  CHECK(a.primal_objective == b.primal_objective);
  CHECK(a.dual_objective == b.dual_objective);
  CHECK(a.iterations == b.iterations);
  CHECK((a.primal_blocks[0] - b.primal_blocks[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("objective scaling scales the optimum") {
  RandomEngine eng(26);
  for (int trial = 0; trial < 10; ++trial) {
    HermitianMatrix c = random_hermitian(3, eng);
    std::uniform_real_distribution<double> unif(0.1, 10.0);
    const double s = unif(eng);
    SdpSolution base = solve(eigmax_problem(c.matrix(), BlockField::ComplexHermitian));
    SdpSolution scaled = solve(eigmax_problem(Matrix(s * c.matrix()), BlockField::ComplexHermitian));
    REQUIRE(base.status == SolveStatus::Optimal);
    REQUIRE(scaled.status == SolveStatus::Optimal);
    CHECK(scaled.primal_objective ==
          doctest::Approx(s * base.primal_objective).epsilon(1e-6));
  }
}

TEST_CASE("linearly dependent rows are dropped with a warning") {
  RandomEngine eng(27);
  HermitianMatrix c = random_hermitian(3, eng);
  SdpProblem p = eigmax_problem(c.matrix(), BlockField::ComplexHermitian);
  LinearExpr tr2;
  tr2.add_block(0, Matrix(2.0 * Matrix::Identity(3, 3)));
  p.add_constraint(tr2, 2.0);
  SdpSolution sol = solve(p);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal_objective == doctest::Approx(eig_hermitian(c).eigenvalues(0)).epsilon(1e-7));
  bool warned = false;
  for (const auto& w : sol.warnings) warned = warned || w.find("dependent") != std::string::npos;
  CHECK(warned);
  CHECK(sol.dual_multipliers.size() == 2);
  CHECK(sol.max_constraint_residual <= 1e-7);
}

TEST_CASE("iteration cap reports an honest unconverged status") {
  RandomEngine eng(28);
  HermitianMatrix c = random_hermitian(4, eng);
  SolverConfig cfg;
  cfg.max_iterations = 3;
  SdpSolution sol = solve(eigmax_problem(c.matrix(), BlockField::ComplexHermitian), cfg);
  CHECK(sol.status == SolveStatus::MaxIterations);
  CHECK(sol.iterations == 3);
  const double relgap = std::abs(sol.primal_objective - sol.dual_objective) /
                        (1 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
  CHECK(relgap == doctest::Approx(sol.gap).epsilon(1e-12));
  CHECK(sol.gap > 1e-8);
}

TEST_CASE("problem json round trips through serialization") {
  SdpProblem p = spectral_bound_problem(pauli_y());
  nlohmann::json j = p.to_json();
  SdpProblem q = SdpProblem::from_json(j);
  CHECK(q.num_blocks() == p.num_blocks());
  CHECK(q.num_constraints() == p.num_constraints());
  SdpSolution a = solve(p);
  SdpSolution b = solve(q);
  CHECK(a.primal_objective == b.primal_objective);
  CHECK(b.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("matrix equalities validate dimensions and hermiticity") {
  SdpProblem p;
  p.add_block("x", 2, BlockField::ComplexHermitian);
  Matrix bad(2, 2);
  bad << 1, 2, 3, 4;
  CHECK_THROWS_AS(p.add_matrix_equality({{0, 1.0}}, {}, bad), std::invalid_argument);
  CHECK_THROWS_AS(p.add_matrix_equality({{0, 1.0}}, {}, Matrix::Identity(3, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(p.add_matrix_equality({{1, 1.0}}, {}, Matrix::Identity(2, 2)),
                  std::invalid_argument);
  LinearExpr e;
  e.add_block(0, pauli_x() * Complex(0, 1));
  CHECK_THROWS_AS(p.add_constraint(e, 0.0), std::invalid_argument);
}

TEST_CASE("external process backend reproduces the in-house result") {
#ifdef QINST_SOLVE_SDP_PATH
  RandomEngine eng(29);
  HermitianMatrix c = random_hermitian(3, eng);
  SdpProblem p = eigmax_problem(c.matrix(), BlockField::ComplexHermitian);
  ExternalProcessSolver ext(QINST_SOLVE_SDP_PATH);
  SdpSolution via_process = ext.solve(p, SolverConfig{});
  SdpSolution direct = solve(p);
  CHECK(via_process.status == SolveStatus::Optimal);
  CHECK(via_process.primal_objective ==
        doctest::Approx(direct.primal_objective).epsilon(1e-12));
  CHECK(via_process.iterations == direct.iterations);
#endif
}
