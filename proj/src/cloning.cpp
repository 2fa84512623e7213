#include "pqcm/cloning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace pqcm {

namespace {

constexpr double kNormTol = 1e-12;

const std::size_t kQubitDims[3] = {2, 2, 2};

StateVector ket3(const StateVector& a, const StateVector& b, const StateVector& c) {
  return tensor(tensor(a, b), c);
}

void require_qubit(const StateVector& q, const char* where) {
  if (q.dim() != 2) throw DimensionError(std::string(where) + ": expected a single qubit");
  if (std::abs(q.norm_squared() - 1.0) > kNormTol) {
    throw std::domain_error(std::string(where) + ": input qubit is not normalized");
  }
}

std::array<double, 3> clone_fidelities(const DensityOperator& rho, const StateVector& phi) {
  const auto marginals = single_qubit_marginals(rho);
  return {fidelity(phi, marginals[0]), fidelity(phi, marginals[1]), fidelity(phi, marginals[2])};
}

}  // namespace

RealQubit::RealQubit(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (std::abs(alpha * alpha + beta * beta - 1.0) > kNormTol) {
    throw std::domain_error("RealQubit: alpha^2 + beta^2 must equal 1");
  }
}

StateVector EquatorialQubit::ket() const {
  const double r = std::numbers::sqrt2 / 2;
  return StateVector{Complex(r), r * std::polar(1.0, phase)};
}

std::array<double, 3> EquatorialQubit::bloch() const {
  return {std::cos(phase), std::sin(phase), 0.0};
}

StateVector bloch_ket(double theta, double phi) {
  return StateVector{Complex(std::cos(theta / 2)), std::polar(std::sin(theta / 2), phi)};
}

StateVector orthogonal(const StateVector& qubit) {
  if (qubit.dim() != 2) throw DimensionError("orthogonal: expected a single qubit");
  return StateVector{-std::conj(qubit[1]), std::conj(qubit[0])};
}

LinearMap flip_matrix(FlipUnitary u) {
  switch (u) {
    case FlipUnitary::X: return pauli::X();
    case FlipUnitary::Y: return pauli::Y();
    case FlipUnitary::Z: return pauli::Z();
  }
  throw std::invalid_argument("flip_matrix: unknown unitary");
}

StateVector uqcm_1to2(const StateVector& qubit) {
  require_qubit(qubit, "uqcm_1to2");
  const StateVector& p = qubit;
  const StateVector q = orthogonal(qubit);
  const CVector out = std::sqrt(2.0 / 3.0) * ket3(p, p, q).amplitudes() -
                      (1.0 / std::sqrt(6.0)) *
                          (ket3(p, q, p).amplitudes() + ket3(q, p, p).amplitudes());
  return StateVector(out);
}

StateVector uqcm_1to2(const RealQubit& input) { return uqcm_1to2(input.ket()); }

StateVector flip_b(const StateVector& state, FlipUnitary u) {
  if (state.dim() != 8) throw DimensionError("flip_b: expected a three-qubit state");
  const LinearMap op = tensor(tensor(pauli::I(), pauli::I()), flip_matrix(u));
  return op.apply(state);
}

LinearMap symmetric_projector(int nQubits) {
  if (nQubits < 1 || nQubits > 5) {
    throw std::invalid_argument("symmetric_projector: supports 1 to 5 qubits");
  }
  const std::size_t dim = std::size_t{1} << nQubits;
  // One normalized Dicke state per Hamming weight.
  std::vector<StateVector> dicke;
  for (int w = 0; w <= nQubits; ++w) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t idx = 0; idx < dim; ++idx) {
      if (std::popcount(idx) == w) v(static_cast<Eigen::Index>(idx)) = 1.0;
    }
    dicke.emplace_back(CVector(v.normalized()));
  }
  return LinearMap::projector_onto(dicke);
}

LinearMap symmetric_projector_from_basis(const StateVector& phi) {
  require_qubit(phi, "symmetric_projector_from_basis");
  const StateVector& p = phi;
  const StateVector q = orthogonal(phi);
  const double third = 1.0 / std::sqrt(3.0);
  const StateVector pi1 = ket3(p, p, p);
  const StateVector pi2 = ket3(q, q, q);
  const StateVector pi3(CVector(
      third * (ket3(p, q, q).amplitudes() + ket3(q, p, q).amplitudes() + ket3(q, q, p).amplitudes())));
  const StateVector pi4(CVector(
      third * (ket3(p, p, q).amplitudes() + ket3(q, p, p).amplitudes() + ket3(p, q, p).amplitudes())));
  const StateVector kets[] = {pi1, pi2, pi3, pi4};
  return LinearMap::projector_onto(kets);
}

std::array<DensityOperator, 3> single_qubit_marginals(const DensityOperator& rho) {
  if (rho.dim() != 8) throw DimensionError("single_qubit_marginals: expected three qubits");
  const std::size_t s[] = {0}, a[] = {1}, b[] = {2};
  return {partial_trace(rho, s, kQubitDims), partial_trace(rho, a, kQubitDims),
          partial_trace(rho, b, kQubitDims)};
}

CloneTriple pqcm_1to3(const StateVector& qubit, FlipUnitary u) {
  require_qubit(qubit, "pqcm_1to3");
  const StateVector flipped = flip_b(uqcm_1to2(qubit), u);
  const StateVector projected = symmetric_projector().apply(flipped);
  const double p = projected.norm_squared();
  const StateVector out = projected.normalized();
  return CloneTriple{out, p, clone_fidelities(DensityOperator::pure(out), qubit)};
}

CloneTriple pqcm_1to3(const RealQubit& input, FlipUnitary u) {
  return pqcm_1to3(input.ket(), u);
}

DensityOperator depolarize(const DensityOperator& rho) {
  if (rho.dim() != 2) throw DimensionError("depolarize: expected a single-qubit operator");
  const CMatrix& r = rho.matrix();
  CMatrix out = r;
  for (const auto& p : {pauli::X(), pauli::Y(), pauli::Z()}) {
    out += p.matrix() * r * p.matrix().adjoint();
  }
  return DensityOperator(CMatrix(out / 4.0));
}

CMatrix depolarize_b(const CMatrix& rhoSab) {
  if (rhoSab.rows() != 8 || rhoSab.cols() != 8) {
    throw DimensionError("depolarize_b: expected an 8x8 operator");
  }
  const CMatrix id4 = CMatrix::Identity(4, 4);
  CMatrix out = rhoSab;
  for (const auto& p : {pauli::X(), pauli::Y(), pauli::Z()}) {
    const CMatrix k = kron(id4, p.matrix());
    out += k * rhoSab * k.adjoint();
  }
  return out / 4.0;
}

MixedCloneTriple universal_1to3(const StateVector& qubit) {
  require_qubit(qubit, "universal_1to3");
  const CVector flipped = flip_b(uqcm_1to2(qubit)).amplitudes();
  const CMatrix depolarized = depolarize_b(flipped * flipped.adjoint());
  const CMatrix proj = symmetric_projector().matrix();
  CMatrix projected = proj * depolarized * proj;
  const double p = projected.trace().real();
  if (p <= 0.0) throw std::domain_error("universal_1to3: projection has zero probability");
  projected /= p;
  projected = 0.5 * (projected + projected.adjoint()).eval();
  DensityOperator rho(std::move(projected));
  auto f = clone_fidelities(rho, qubit);
  return MixedCloneTriple{std::move(rho), p, f};
}

FidelityBound bound(BoundKind kind, int N, int M) {
  if (N < 1) throw std::invalid_argument("bound: N must be at least 1");
  const bool cloningKind = kind == BoundKind::Universal || kind == BoundKind::PhaseCovariant;
  if (cloningKind && M < N) throw std::invalid_argument("bound: M must be at least N");

  FidelityBound b{N, M, kind, 0.0};
  const double n = N, m = M;
  switch (kind) {
    case BoundKind::Universal:
      b.value = (n + 1.0 + n / m) / (n + 2.0);
      break;
    case BoundKind::PhaseCovariant:
      if (N != 1) throw UnsupportedBound("bound: phase-covariant fidelity only for N = 1");
      b.value = (M % 2 == 1) ? 0.25 * (3.0 + 1.0 / m)
                             : 0.5 * (1.0 + 0.5 * std::sqrt(1.0 + 2.0 / m));
      break;
    case BoundKind::Estimation:
      b.value = (n + 1.0) / (n + 2.0);
      break;
    case BoundKind::PhaseEstimation:
      if (N != 1) throw UnsupportedBound("bound: phase-estimation fidelity only for N = 1");
      b.value = 0.75;
      break;
  }
  return b;
}

std::vector<std::vector<double>> bloch_fidelity_map(std::span<const double> thetaGrid,
                                                    std::span<const double> phiGrid,
                                                    FlipUnitary u) {
  if (thetaGrid.empty() || phiGrid.empty()) {
    throw std::invalid_argument("bloch_fidelity_map: empty grid");
  }
  std::vector<std::vector<double>> out(thetaGrid.size(), std::vector<double>(phiGrid.size()));
  for (std::size_t i = 0; i < thetaGrid.size(); ++i) {
    for (std::size_t j = 0; j < phiGrid.size(); ++j) {
      const auto t = pqcm_1to3(bloch_ket(thetaGrid[i], phiGrid[j]), u);
      out[i][j] = t.perQubitFidelity[0];
    }
  }
  return out;
}

}  // namespace pqcm
