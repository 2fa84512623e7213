#pragma once

// Qubit-level 1->3 phase-covariant cloner.
//
// The register is S (most significant), A, B. The 1->2 universal cloner
// leaves S and A as the clones and B as the anti-clone; flipping B with a
// fixed unitary and projecting SAB onto the symmetric subspace gives three
// symmetric clones that are optimal for the plane left invariant by the flip.

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "pqcm/linalg.hpp"

namespace pqcm {

/// Pure qubit with real amplitudes alpha|0> + beta|1> (the x-z plane).
class RealQubit {
 public:
  RealQubit(double alpha, double beta);
  static RealQubit from_angle(double theta) { return {std::cos(theta / 2), std::sin(theta / 2)}; }
  static RealQubit H() { return {1.0, 0.0}; }
  static RealQubit V() { return {0.0, 1.0}; }
  static RealQubit plus() { return {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  StateVector ket() const { return StateVector{alpha_, beta_}; }

 private:
  double alpha_;
  double beta_;
};

/// 2^{-1/2}(|0> + e^{i phase}|1>).
struct EquatorialQubit {
  double phase = 0.0;

  StateVector ket() const;
  std::array<double, 3> bloch() const;
};

/// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
StateVector bloch_ket(double theta, double phi);

/// Orthogonal complement (-conj(beta), conj(alpha)) of a normalized qubit.
StateVector orthogonal(const StateVector& qubit);

enum class FlipUnitary { X, Y, Z };

LinearMap flip_matrix(FlipUnitary u);

struct CloneTriple {
  StateVector state;  // normalized 8-dim SAB state
  double successProbability = 0.0;
  std::array<double, 3> perQubitFidelity{};
};

/// Output of the mixed-state pipeline (depolarized anti-clone).
struct MixedCloneTriple {
  DensityOperator rho;
  double successProbability = 0.0;
  std::array<double, 3> perQubitFidelity{};
};

/// sqrt(2/3)|phi phi phi_perp> - (1/sqrt6)(|phi phi_perp> + |phi_perp phi>)|phi>.
StateVector uqcm_1to2(const StateVector& qubit);
StateVector uqcm_1to2(const RealQubit& input);

/// Applies I (x) I (x) U on qubit B. Default U is sigma_Y.
StateVector flip_b(const StateVector& state, FlipUnitary u = FlipUnitary::Y);

/// Rank-4 projector onto the permutation-symmetric subspace of three qubits,
/// built from the computational-basis Dicke states.
LinearMap symmetric_projector(int nQubits = 3);

/// Same projector assembled from |Pi_1>..|Pi_4> in the {phi, phi_perp} basis.
LinearMap symmetric_projector_from_basis(const StateVector& phi);

/// Reduced single-qubit states of a three-qubit register, in S, A, B order.
std::array<DensityOperator, 3> single_qubit_marginals(const DensityOperator& rho);

/// Full uqcm -> flip -> symmetrize pipeline on any pure input.
CloneTriple pqcm_1to3(const StateVector& qubit, FlipUnitary u = FlipUnitary::Y);
CloneTriple pqcm_1to3(const RealQubit& input, FlipUnitary u = FlipUnitary::Y);

/// (rho + X rho X + Y rho Y + Z rho Z) / 4 on a single qubit.
DensityOperator depolarize(const DensityOperator& rho);

/// Depolarizing channel on qubit B of a three-qubit (possibly unnormalized)
/// operator, applied in operator-sum form.
CMatrix depolarize_b(const CMatrix& rhoSab);

/// uqcm -> flip -> depolarize B -> symmetrize -> renormalize.
MixedCloneTriple universal_1to3(const StateVector& qubit);

enum class BoundKind { Universal, PhaseCovariant, Estimation, PhaseEstimation };

struct FidelityBound {
  int N = 1;
  int M = 1;
  BoundKind kind = BoundKind::Universal;
  double value = 0.0;
};

class UnsupportedBound : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed-form optimal fidelities. M is ignored for the estimation kinds.
FidelityBound bound(BoundKind kind, int N, int M);

/// Per-clone fidelity of pqcm_1to3 over a (theta, phi) grid; result[i][j]
/// corresponds to thetaGrid[i], phiGrid[j].
std::vector<std::vector<double>> bloch_fidelity_map(std::span<const double> thetaGrid,
                                                    std::span<const double> phiGrid,
                                                    FlipUnitary u = FlipUnitary::Y);

}  // namespace pqcm
