#include "pqcm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pqcm {

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw DimensionError("StateVector: empty amplitude list");
}

StateVector::StateVector(std::initializer_list<Complex> amplitudes)
    : amps_(static_cast<Eigen::Index>(amplitudes.size())) {
  if (amplitudes.size() == 0) throw DimensionError("StateVector: empty amplitude list");
  Eigen::Index i = 0;
  for (const auto& a : amplitudes) amps_(i++) = a;
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("StateVector::basis: index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::normalized() const {
  const double n = amps_.norm();
  if (n == 0.0) throw std::domain_error("StateVector::normalized: zero vector");
  return StateVector(amps_ / n);
}

Complex StateVector::inner(const StateVector& other) const {
  if (dim() != other.dim()) {
    throw DimensionError("inner product: dimensions " + std::to_string(dim()) + " and " +
                         std::to_string(other.dim()));
  }
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the left operand
}

LinearMap LinearMap::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return LinearMap(CMatrix::Identity(n, n));
}

LinearMap LinearMap::projector_onto(std::span<const StateVector> kets) {
  if (kets.empty()) throw DimensionError("projector_onto: no kets");
  const auto n = static_cast<Eigen::Index>(kets.front().dim());
  CMatrix p = CMatrix::Zero(n, n);
  for (const auto& k : kets) {
    if (static_cast<Eigen::Index>(k.dim()) != n) throw DimensionError("projector_onto: mixed dims");
    p += k.amplitudes() * k.amplitudes().adjoint();
  }
  return LinearMap(std::move(p));
}

StateVector LinearMap::apply(const StateVector& v) const {
  if (dim_in() != v.dim()) {
    throw DimensionError("LinearMap::apply: map expects dim " + std::to_string(dim_in()) +
                         ", got " + std::to_string(v.dim()));
  }
  return StateVector(CVector(m_ * v.amplitudes()));
}

LinearMap LinearMap::operator*(const LinearMap& rhs) const {
  if (dim_in() != rhs.dim_out()) throw DimensionError("LinearMap product: inner dims differ");
  return LinearMap(m_ * rhs.m_);
}

bool LinearMap::is_projector(double tol) const {
  if (m_.rows() != m_.cols()) return false;
  return max_abs_diff(m_ * m_, m_) < tol && max_abs_diff(m_.adjoint(), m_) < tol;
}

bool LinearMap::is_unitary(double tol) const {
  if (m_.rows() != m_.cols()) return false;
  return max_abs_diff(m_.adjoint() * m_, CMatrix::Identity(m_.rows(), m_.cols())) < tol;
}

DensityOperator::DensityOperator(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw DimensionError("DensityOperator: matrix must be square and nonempty");
  }
  if (max_abs_diff(m_, m_.adjoint()) > kExactTol) {
    throw std::domain_error("DensityOperator: matrix is not Hermitian");
  }
  if (std::abs(m_.trace() - Complex(1.0)) > kExactTol) {
    throw std::domain_error("DensityOperator: trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kPsdFloor) {
    throw std::domain_error("DensityOperator: negative eigenvalue");
  }
}

DensityOperator DensityOperator::pure(const StateVector& v) {
  const CVector u = v.normalized().amplitudes();
  return DensityOperator(u * u.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityOperator(CMatrix::Identity(n, n) / static_cast<double>(dim));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  return StateVector(CVector(kron(a.amplitudes(), b.amplitudes())));
}

LinearMap tensor(const LinearMap& a, const LinearMap& b) {
  return LinearMap(kron(a.matrix(), b.matrix()));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep,
                              std::span<const std::size_t> dims) {
  if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (dims.empty() || total != rho.dim()) {
    throw DimensionError("partial_trace: subsystem dims multiply to " + std::to_string(total) +
                         " but operator has dim " + std::to_string(rho.dim()));
  }
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw DimensionError("partial_trace: subsystem index out of range");
    if (kept[k]) throw DimensionError("partial_trace: duplicate subsystem index");
    kept[k] = true;
  }

  // Row-major strides: subsystem 0 is most significant.
  std::vector<std::size_t> stride(dims.size());
  std::size_t s = 1;
  for (std::size_t q = dims.size(); q-- > 0;) {
    stride[q] = s;
    s *= dims[q];
  }
  std::size_t keepDim = 1;
  for (std::size_t q = 0; q < dims.size(); ++q)
    if (kept[q]) keepDim *= dims[q];

  // Map each full index to (kept index, traced index).
  std::vector<std::size_t> keptIdx(total), tracedIdx(total);
  for (std::size_t full = 0; full < total; ++full) {
    std::size_t ki = 0, ti = 0;
    for (std::size_t q = 0; q < dims.size(); ++q) {
      const std::size_t digit = (full / stride[q]) % dims[q];
      if (kept[q]) {
        ki = ki * dims[q] + digit;
      } else {
        ti = ti * dims[q] + digit;
      }
    }
    keptIdx[full] = ki;
    tracedIdx[full] = ti;
  }

  const auto n = static_cast<Eigen::Index>(keepDim);
  CMatrix out = CMatrix::Zero(n, n);
  const CMatrix& m = rho.matrix();
  for (std::size_t r = 0; r < total; ++r) {
    for (std::size_t c = 0; c < total; ++c) {
      if (tracedIdx[r] != tracedIdx[c]) continue;
      out(static_cast<Eigen::Index>(keptIdx[r]), static_cast<Eigen::Index>(keptIdx[c])) +=
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  // Remove round-off asymmetry before the validating constructor sees it.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(std::move(out));
}

double fidelity(const StateVector& phi, const DensityOperator& rho) {
  if (phi.dim() != rho.dim()) {
    throw DimensionError("fidelity: state dim " + std::to_string(phi.dim()) +
                         " vs operator dim " + std::to_string(rho.dim()));
  }
  const CVector& v = phi.amplitudes();
  const Complex f = v.dot(rho.matrix() * v);
  if (std::abs(f.imag()) > kExactTol) {
    throw std::domain_error("fidelity: non-negligible imaginary part");
  }
  return std::clamp(f.real(), 0.0, 1.0);
}

double overlap_magnitude(const StateVector& a, const StateVector& b) {
  return std::abs(a.inner(b));
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

namespace pauli {

LinearMap I() { return LinearMap::identity(2); }

LinearMap X() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return LinearMap(m);
}

LinearMap Y() {
  const Complex i{0.0, 1.0};
  CMatrix m(2, 2);
  m << 0, -i, i, 0;
  return LinearMap(m);
}

LinearMap Z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return LinearMap(m);
}

}  // namespace pauli

}  // namespace pqcm
