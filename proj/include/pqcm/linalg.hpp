#pragma once

// Dense complex linear algebra for small qubit registers (dimension <= 32).
//
// Subsystem ordering: in every tensor product the left operand is the most
// significant subsystem. For the three-qubit cloner register this means the
// basis index is 4*S + 2*A + B.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pqcm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Absolute tolerance used for every exactness check on matrix entries.
inline constexpr double kExactTol = 1e-12;
/// Floor for eigenvalues when checking positive semidefiniteness.
inline constexpr double kPsdFloor = -1e-10;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ket on a finite-dimensional Hilbert space.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(CVector amplitudes);
  StateVector(std::initializer_list<Complex> amplitudes);

  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  double norm_squared() const { return amps_.squaredNorm(); }
  /// Throws std::domain_error for the zero vector.
  StateVector normalized() const;

  /// <this|other>
  Complex inner(const StateVector& other) const;

 private:
  CVector amps_;
};

/// Matrix acting between Hilbert spaces: unitaries, Paulis, projectors.
class LinearMap {
 public:
  LinearMap() = default;
  explicit LinearMap(CMatrix m) : m_(std::move(m)) {}

  static LinearMap identity(std::size_t dim);
  /// |a><a| summed over the given kets.
  static LinearMap projector_onto(std::span<const StateVector> kets);

  std::size_t dim_out() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t dim_in() const { return static_cast<std::size_t>(m_.cols()); }
  const CMatrix& matrix() const { return m_; }

  StateVector apply(const StateVector& v) const;
  LinearMap adjoint() const { return LinearMap(m_.adjoint()); }
  LinearMap operator*(const LinearMap& rhs) const;

  bool is_projector(double tol = kExactTol) const;
  bool is_unitary(double tol = kExactTol) const;

 private:
  CMatrix m_;
};

/// Hermitian, PSD, trace-one operator. The constructor validates.
class DensityOperator {
 public:
  explicit DensityOperator(CMatrix m);
  static DensityOperator pure(const StateVector& v);
  static DensityOperator maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex trace() const { return m_.trace(); }

 private:
  CMatrix m_;
};

StateVector tensor(const StateVector& a, const StateVector& b);
LinearMap tensor(const LinearMap& a, const LinearMap& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Reduced state on the subsystems listed in `keep` (any order; the output
/// keeps the original relative ordering). `dims` gives each subsystem size.
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep,
                              std::span<const std::size_t> dims);

/// <phi|rho|phi>, clamped to [0, 1].
double fidelity(const StateVector& phi, const DensityOperator& rho);

/// |<a|b>| for unit vectors; 1 means equal up to global phase.
double overlap_magnitude(const StateVector& a, const StateVector& b);

/// Largest absolute entrywise difference.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

namespace pauli {
LinearMap I();
LinearMap X();
LinearMap Y();
LinearMap Z();
}  // namespace pauli

}  // namespace pqcm
