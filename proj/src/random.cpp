#include "qinst/random.hpp"

#include <cmath>

namespace qinst {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 applied to the pair
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix ginibre(int rows, int cols, RandomEngine& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = gauss(eng);
      const double im = gauss(eng);
      g(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  return g;
}

Matrix haar_random_unitary(int dim, RandomEngine& eng) {
  Matrix g = ginibre(dim, dim, eng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    double mag = std::abs(d);
    q.col(j) *= (mag > 0) ? d / mag : Complex(1, 0);
  }
  return q;
}

QuantumState random_pure_state(int dim, RandomEngine& eng) {
  Vector v = ginibre(dim, 1, eng).col(0);
  v.normalize();
  return QuantumState(HermitianMatrix(v * v.adjoint()));
}

QuantumState random_mixed_state(int dim, RandomEngine& eng) {
  Matrix g = ginibre(dim, dim, eng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return QuantumState(HermitianMatrix(rho));
}

HermitianMatrix random_hermitian(int dim, RandomEngine& eng) {
  return HermitianMatrix(ginibre(dim, dim, eng));
}

Povm random_projective_povm(int dim, RandomEngine& eng) {
  Matrix u = haar_random_unitary(dim, eng);
  std::vector<HermitianMatrix> elements;
  elements.reserve(dim);
  for (int a = 0; a < dim; ++a) {
    Vector col = u.col(a);
    elements.emplace_back(Matrix(col * col.adjoint()));
  }
  return Povm(std::move(elements));
}

Channel random_channel(int dim, int num_kraus, RandomEngine& eng) {
  if (num_kraus < 1) throw std::invalid_argument("random_channel: num_kraus must be positive");
  const int big = num_kraus * dim;
  Matrix u = haar_random_unitary(big, eng);
  std::vector<Matrix> kraus;
  kraus.reserve(num_kraus);
  for (int k = 0; k < num_kraus; ++k)
    kraus.push_back(u.block(k * dim, 0, dim, dim));
  return Channel(std::move(kraus));
}

}  // namespace qinst
