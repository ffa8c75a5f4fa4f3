#include <cmath>

#include "doctest.h"
#include "qinst/matrix.hpp"
#include "qinst/random.hpp"

using namespace qinst;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("kron maps basis products to basis products") {
  Vector e0(2), e1(2);
  e0 << 1, 0;
  e1 << 0, 1;
  Vector v00 = Vector::Zero(4);
  v00(0) = 1;
  Vector v11 = Vector::Zero(4);
  v11(3) = 1;
  Vector out = kron(pauli_x(), pauli_x()) * v00;
  CHECK(max_abs(out - v11) <= 1e-15);
}

TEST_CASE("kron respects the mixed product rule") {
  RandomEngine eng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = ginibre(2, 3, eng), b = ginibre(3, 2, eng);
    Matrix c = ginibre(3, 2, eng), d = ginibre(2, 3, eng);
    Matrix lhs = kron(a, c) * kron(b, d);
    Matrix rhs = kron(Matrix(a * b), Matrix(c * d));
    CHECK(max_abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("partial trace of a product state returns the kept factor") {
  RandomEngine eng(12);
  for (int trial = 0; trial < 20; ++trial) {
    QuantumState rho_a = random_mixed_state(2, eng);
    QuantumState rho_b = random_mixed_state(3, eng);
    Matrix joint = kron(rho_a.matrix(), rho_b.matrix());
    CHECK(max_abs(partial_trace(joint, 2, 3, Subsystem::A) - rho_a.matrix()) <= 1e-12);
    CHECK(max_abs(partial_trace(joint, 2, 3, Subsystem::B) - rho_b.matrix()) <= 1e-12);
  }
}

TEST_CASE("partial trace preserves trace and is linear") {
  RandomEngine eng(13);
  Matrix m1 = ginibre(6, 6, eng), m2 = ginibre(6, 6, eng);
  Matrix sum = 2.0 * m1 + 3.0 * m2;
  CHECK(std::abs((partial_trace(m1, 2, 3, Subsystem::B).trace() - m1.trace())) <= 1e-12);
  Matrix lin = partial_trace(sum, 2, 3, Subsystem::A) -
               2.0 * partial_trace(m1, 2, 3, Subsystem::A) -
               3.0 * partial_trace(m2, 2, 3, Subsystem::A);
  CHECK(max_abs(lin) <= 1e-12);
}

TEST_CASE("partial trace of the maximally entangled state is maximally mixed") {
  Vector phi = Vector::Zero(4);
  phi(0) = 1.0 / std::sqrt(2.0);
  phi(3) = 1.0 / std::sqrt(2.0);
  Matrix proj = phi * phi.adjoint();
  Matrix reduced = partial_trace(proj, 2, 2, Subsystem::B);
  CHECK(max_abs(reduced - 0.5 * Matrix::Identity(2, 2)) <= 1e-15);
}

TEST_CASE("partial trace rejects mismatched dimensions") {
  Matrix m = Matrix::Zero(5, 5);
  CHECK_THROWS_AS(partial_trace(m, 2, 3, Subsystem::A), std::invalid_argument);
}

TEST_CASE("hermitian construction symmetrizes and records the residual") {
  Matrix m(2, 2);
  m << Complex(1, 0), Complex(2, 1), Complex(0, 0), Complex(3, 0);
  HermitianMatrix h(m);
  CHECK(max_abs(h.matrix() - h.matrix().adjoint()) <= 1e-16);
  CHECK(h.symmetrization_residual() > 0.5);
  HermitianMatrix clean(pauli_y());
  CHECK(clean.symmetrization_residual() <= 1e-16);
}

TEST_CASE("eig_hermitian sorts descending and reconstructs the input") {
  RandomEngine eng(14);
  for (int trial = 0; trial < 10; ++trial) {
    HermitianMatrix h = random_hermitian(6, eng);
    EigResult eig = eig_hermitian(h);
    for (int i = 0; i + 1 < 6; ++i) CHECK(eig.eigenvalues(i) >= eig.eigenvalues(i + 1));
    Matrix recon = eig.eigenvectors * eig.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                   eig.eigenvectors.adjoint();
    CHECK(max_abs(recon - h.matrix()) <= 1e-10 * 6);
    Matrix gram = eig.eigenvectors.adjoint() * eig.eigenvectors;
    CHECK(max_abs(gram - Matrix::Identity(6, 6)) <= 1e-12);
  }
}

TEST_CASE("bloch decomposition round trips and matches hand expansion") {
  RandomEngine eng(15);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    double c0 = unif(eng);
    Eigen::Vector3d r(unif(eng), unif(eng), unif(eng));
    BlochDecomposition back = bloch_decompose(bloch_compose(c0, r));
    CHECK(back.c0 == doctest::Approx(c0).epsilon(1e-12));
    CHECK((back.r - r).cwiseAbs().maxCoeff() <= 1e-12);
  }
  HermitianMatrix diag((pauli_x() + pauli_z()) * (-1.0 / std::sqrt(2.0)));
  BlochDecomposition b = bloch_decompose(diag);
  CHECK(b.c0 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.r(0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(b.r(1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.r(2) == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("quantum state validation rejects bad density operators") {
  HermitianMatrix wrong_trace(Matrix(2.0 * Matrix::Identity(2, 2)));
  HermitianMatrix not_psd(pauli_z());
  CHECK_THROWS_AS(QuantumState{wrong_trace}, std::invalid_argument);
  CHECK_THROWS_AS(QuantumState{not_psd}, std::invalid_argument);
  QuantumState ok(HermitianMatrix(Matrix(0.5 * Matrix::Identity(2, 2))));
  CHECK(ok.dim() == 2);
}

TEST_CASE("povm validation accepts projective measurements and rejects scaled ones") {
  RandomEngine eng(16);
  Povm p = random_projective_povm(3, eng);
  CHECK(p.num_outcomes() == 3);
  std::vector<HermitianMatrix> scaled{HermitianMatrix::identity(2) * 0.5,
                                      HermitianMatrix::identity(2) * 0.4};
  CHECK_THROWS_AS(Povm{scaled}, std::invalid_argument);
}

TEST_CASE("depolarizing channel matches its closed form") {
  RandomEngine eng(17);
  for (double p : {0.0, 0.3, 1.0}) {
    Channel ch = Channel::depolarizing(p);
    QuantumState rho = random_mixed_state(2, eng);
    Matrix expected = (1.0 - p) * rho.matrix() + p * 0.5 * Matrix::Identity(2, 2);
    CHECK(max_abs(ch.apply(rho.matrix()) - expected) <= 1e-12);
  }
}

TEST_CASE("channel construction rejects non trace preserving kraus sets") {
  std::vector<Matrix> bad{0.5 * Matrix::Identity(2, 2)};
  CHECK_THROWS_AS(Channel{bad}, std::invalid_argument);
}

TEST_CASE("random channels are trace preserving with unital adjoints") {
  RandomEngine eng(18);
  for (int trial = 0; trial < 10; ++trial) {
    Channel ch = random_channel(2, 3, eng);
    CHECK(ch.is_trace_preserving());
    CHECK(adjoint_channel(ch).is_unital());
    QuantumState rho = random_mixed_state(2, eng);
    CHECK(std::abs(ch.apply(rho.matrix()).trace().real() - 1.0) <= 1e-12);
  }
}

TEST_CASE("adjoint pairing identity holds on random triples") {
  RandomEngine eng(19);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = (trial % 2 == 0) ? 2 : 3;
    const int nk = 1 + static_cast<int>(trial % 3);
    Channel ch = random_channel(d, nk, eng);
    QuantumState rho = random_mixed_state(d, eng);
    HermitianMatrix w = random_hermitian(d, eng);
    const double lhs = (adjoint_channel(ch).apply(w).matrix() * rho.matrix()).trace().real();
    const double rhs = (w.matrix() * ch.apply(rho.matrix())).trace().real();
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("kraus map applies to operators of matching dimension only") {
  Channel ch = Channel::identity_channel(2);
  CHECK_THROWS_AS(ch.apply(Matrix(Matrix::Zero(3, 3))), std::invalid_argument);
}
