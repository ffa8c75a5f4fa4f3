#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qinst {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kChannelTol = 1e-10;

Matrix identity(int dim);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

Matrix kron(const Matrix& a, const Matrix& b);

enum class Subsystem { A, B };

// Partial trace of an operator on C^{dim_a} (x) C^{dim_b}; `keep` names the
// subsystem that survives.
Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, Subsystem keep);

// Hermitian matrix with enforced symmetry. Construction replaces the input by
// (m + m^dag)/2 and records how far the input was from Hermitian.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& m);
  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double symmetrization_residual() const { return residual_; }

  double trace() const { return m_.trace().real(); }
  double min_eigenvalue() const;
  bool is_psd(double tol = kPsdTol) const { return min_eigenvalue() >= -tol; }

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator*(double factor) const;

 private:
  Matrix m_;
  double residual_ = 0.0;
};

// Real Frobenius pairing Tr[a b] of two Hermitian matrices.
double hs_inner(const HermitianMatrix& a, const HermitianMatrix& b);

struct EigResult {
  RealVector eigenvalues;  // descending
  Matrix eigenvectors;     // columns match eigenvalue order
};

// Spectral decomposition of a Hermitian matrix with eigenvalues sorted in
// descending order.
EigResult eig_hermitian(const HermitianMatrix& h);

struct BlochDecomposition {
  double c0 = 0.0;
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
};

// Writes a 2x2 Hermitian matrix as c0*I + r_x*X + r_y*Y + r_z*Z.
BlochDecomposition bloch_decompose(const HermitianMatrix& h);
HermitianMatrix bloch_compose(double c0, const Eigen::Vector3d& r);

// Density operator: Hermitian, positive semidefinite, unit trace.
class QuantumState {
 public:
  explicit QuantumState(const HermitianMatrix& rho);
  explicit QuantumState(const Matrix& rho) : QuantumState(HermitianMatrix(rho)) {}

  const HermitianMatrix& rho() const { return rho_; }
  const Matrix& matrix() const { return rho_.matrix(); }
  int dim() const { return rho_.dim(); }

 private:
  HermitianMatrix rho_;
};

// Finite-outcome POVM: PSD elements that sum to the identity.
class Povm {
 public:
  explicit Povm(std::vector<HermitianMatrix> elements);

  int num_outcomes() const { return static_cast<int>(elements_.size()); }
  int dim() const { return elements_.front().dim(); }
  const HermitianMatrix& element(int a) const { return elements_.at(a); }

 private:
  std::vector<HermitianMatrix> elements_;
};

// Completely positive map in Kraus form; not necessarily trace preserving.
class KrausMap {
 public:
  explicit KrausMap(std::vector<Matrix> kraus);

  int input_dim() const { return static_cast<int>(kraus_.front().cols()); }
  int output_dim() const { return static_cast<int>(kraus_.front().rows()); }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  Matrix apply(const Matrix& m) const;
  HermitianMatrix apply(const HermitianMatrix& m) const;

  // The adjoint map with Kraus operators K^dag; unital when this map is
  // trace preserving.
  KrausMap adjoint() const;

  bool is_trace_preserving(double tol = kChannelTol) const;
  bool is_unital(double tol = kChannelTol) const;

 private:
  std::vector<Matrix> kraus_;
};

// Quantum channel: CP trace-preserving map. Construction validates the Kraus
// closure sum_k K^dag K = I.
class Channel : public KrausMap {
 public:
  explicit Channel(std::vector<Matrix> kraus);

  static Channel identity_channel(int dim);
  static Channel depolarizing(double strength);
};

KrausMap adjoint_channel(const Channel& ch);

}  // namespace qinst
