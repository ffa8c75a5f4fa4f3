#include "qinst/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace qinst {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Matrix identity(int dim) {
  require(dim >= 1, "identity: dimension must be positive");
  return Matrix::Identity(dim, dim);
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, Subsystem keep) {
  require(dim_a >= 1 && dim_b >= 1, "partial_trace: dimensions must be positive");
  require(m.rows() == m.cols(), "partial_trace: matrix must be square");
  require(m.rows() == static_cast<Eigen::Index>(dim_a) * dim_b,
          "partial_trace: matrix size does not match dim_a*dim_b");
  if (keep == Subsystem::A) {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k)
          out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return out;
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k)
        out(i, j) += m(k * dim_b + i, k * dim_b + j);
  return out;
}

HermitianMatrix::HermitianMatrix(const Matrix& m) {
  require(m.rows() == m.cols(), "HermitianMatrix: matrix must be square");
  require(m.rows() >= 1, "HermitianMatrix: dimension must be positive");
  Matrix sym = 0.5 * (m + m.adjoint());
  residual_ = (m - sym).cwiseAbs().maxCoeff();
  m_ = std::move(sym);
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(Matrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(Matrix::Identity(dim, dim));
}

double HermitianMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  require(dim() == other.dim(), "HermitianMatrix: dimension mismatch in +");
  return HermitianMatrix(m_ + other.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  require(dim() == other.dim(), "HermitianMatrix: dimension mismatch in -");
  return HermitianMatrix(m_ - other.m_);
}

HermitianMatrix HermitianMatrix::operator*(double factor) const {
  return HermitianMatrix(factor * m_);
}

double hs_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  require(a.dim() == b.dim(), "hs_inner: dimension mismatch");
  return (a.matrix() * b.matrix()).trace().real();
}

EigResult eig_hermitian(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  require(es.info() == Eigen::Success, "eig_hermitian: eigensolver failed");
  const int n = h.dim();
  EigResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

BlochDecomposition bloch_decompose(const HermitianMatrix& h) {
  require(h.dim() == 2, "bloch_decompose: requires a 2x2 matrix");
  const Matrix& m = h.matrix();
  BlochDecomposition out;
  out.c0 = 0.5 * m.trace().real();
  out.r(0) = 0.5 * (m * pauli_x()).trace().real();
  out.r(1) = 0.5 * (m * pauli_y()).trace().real();
  out.r(2) = 0.5 * (m * pauli_z()).trace().real();
  return out;
}

HermitianMatrix bloch_compose(double c0, const Eigen::Vector3d& r) {
  Matrix m = c0 * Matrix::Identity(2, 2) + r(0) * pauli_x() +
             r(1) * pauli_y() + r(2) * pauli_z();
  return HermitianMatrix(m);
}

QuantumState::QuantumState(const HermitianMatrix& rho) : rho_(rho) {
  require(std::abs(rho_.trace() - 1.0) <= kTraceTol,
          "QuantumState: trace must equal 1");
  require(rho_.is_psd(), "QuantumState: matrix must be positive semidefinite");
}

Povm::Povm(std::vector<HermitianMatrix> elements) : elements_(std::move(elements)) {
  require(!elements_.empty(), "Povm: at least one element required");
  const int d = elements_.front().dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& e : elements_) {
    require(e.dim() == d, "Povm: all elements must share a dimension");
    require(e.is_psd(), "Povm: elements must be positive semidefinite");
    sum += e.matrix();
  }
  require((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= kTraceTol,
          "Povm: elements must sum to the identity");
}

KrausMap::KrausMap(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  require(!kraus_.empty(), "KrausMap: at least one Kraus operator required");
  const auto rows = kraus_.front().rows();
  const auto cols = kraus_.front().cols();
  require(rows >= 1 && cols >= 1, "KrausMap: operators must be non-empty");
  for (const auto& k : kraus_)
    require(k.rows() == rows && k.cols() == cols,
            "KrausMap: all Kraus operators must share a shape");
}

Matrix KrausMap::apply(const Matrix& m) const {
  require(m.rows() == input_dim() && m.cols() == input_dim(),
          "KrausMap: input dimension mismatch");
  Matrix out = Matrix::Zero(output_dim(), output_dim());
  for (const auto& k : kraus_) out += k * m * k.adjoint();
  return out;
}

HermitianMatrix KrausMap::apply(const HermitianMatrix& m) const {
  return HermitianMatrix(apply(m.matrix()));
}

KrausMap KrausMap::adjoint() const {
  std::vector<Matrix> adj;
  adj.reserve(kraus_.size());
  for (const auto& k : kraus_) adj.push_back(k.adjoint());
  return KrausMap(std::move(adj));
}

bool KrausMap::is_trace_preserving(double tol) const {
  Matrix sum = Matrix::Zero(input_dim(), input_dim());
  for (const auto& k : kraus_) sum += k.adjoint() * k;
  return (sum - Matrix::Identity(input_dim(), input_dim())).cwiseAbs().maxCoeff() <= tol;
}

bool KrausMap::is_unital(double tol) const {
  Matrix sum = Matrix::Zero(output_dim(), output_dim());
  for (const auto& k : kraus_) sum += k * k.adjoint();
  return (sum - Matrix::Identity(output_dim(), output_dim())).cwiseAbs().maxCoeff() <= tol;
}

Channel::Channel(std::vector<Matrix> kraus) : KrausMap(std::move(kraus)) {
  require(is_trace_preserving(),
          "Channel: Kraus operators must satisfy sum_k K^dag K = I");
}

Channel Channel::identity_channel(int dim) {
  return Channel({Matrix::Identity(dim, dim)});
}

Channel Channel::depolarizing(double strength) {
  require(strength >= 0.0 && strength <= 4.0 / 3.0,
          "depolarizing: strength out of range");
  const double p = strength;
  std::vector<Matrix> kraus;
  kraus.push_back(std::sqrt(1.0 - 0.75 * p) * Matrix::Identity(2, 2));
  kraus.push_back(std::sqrt(0.25 * p) * pauli_x());
  kraus.push_back(std::sqrt(0.25 * p) * pauli_y());
  kraus.push_back(std::sqrt(0.25 * p) * pauli_z());
  return Channel(std::move(kraus));
}

KrausMap adjoint_channel(const Channel& ch) { return ch.adjoint(); }

}  // namespace qinst
