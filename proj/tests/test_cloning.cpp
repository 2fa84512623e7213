#include "pqcm/cloning.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace pqcm;

namespace {

constexpr double kPi = std::numbers::pi;

// |a b c> in the {phi, phi_perp} basis, built independently of the library.
StateVector ket3(const StateVector& phi, const StateVector& perp, int a, int b, int c) {
  const StateVector* q[2] = {&phi, &perp};
  return tensor(tensor(*q[a], *q[b]), *q[c]);
}

CVector combo(std::initializer_list<std::pair<double, StateVector>> terms) {
  CVector v = CVector::Zero(8);
  for (const auto& [c, s] : terms) v += c * s.amplitudes();
  return v;
}

DensityOperator marginal(const StateVector& s, std::size_t k) {
  const std::size_t keep[] = {k};
  const std::size_t dims[] = {2, 2, 2};
  return partial_trace(DensityOperator::pure(s), keep, dims);
}

}  // namespace

TEST(cloning, uqcm_amplitudes_for_zero) {
  const StateVector s = uqcm_1to2(RealQubit::H());
  EXPECT_NEAR(s[1].real(), std::sqrt(2.0 / 3.0), 1e-15);  // |001>
  EXPECT_NEAR(s[2].real(), -1.0 / std::sqrt(6.0), 1e-15);  // |010>
  EXPECT_NEAR(s[4].real(), -1.0 / std::sqrt(6.0), 1e-15);  // |100>
  for (std::size_t i : {0u, 3u, 5u, 6u, 7u}) EXPECT_EQ(std::abs(s[i]), 0.0);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-14);
}

TEST(cloning, uqcm_clone_and_anticlone_fidelities) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const RealQubit q = test::random_real_qubit(rng);
    const StateVector s = uqcm_1to2(q);
    EXPECT_NEAR(fidelity(q.ket(), marginal(s, 0)), 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(fidelity(q.ket(), marginal(s, 1)), 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(fidelity(orthogonal(q.ket()), marginal(s, 2)), 2.0 / 3.0, 1e-12);
  }
}

TEST(cloning, flip_b_pauli_action) {
  const StateVector out = flip_b(StateVector::basis(8, 0));
  EXPECT_NEAR(std::abs(out[1] - Complex(0, 1)), 0.0, 1e-15);
  EXPECT_THROW(flip_b(StateVector::basis(4, 0)), DimensionError);
}

TEST(cloning, flip_b_twice_restores_magnitudes) {
  std::mt19937_64 rng(2);
  const StateVector s = test::random_ket(8, rng);
  const StateVector twice = flip_b(flip_b(s));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(twice[i]), std::abs(s[i]), 1e-15);
}

TEST(cloning, flipped_uqcm_matches_upsilon_magnitudes) {
  // The literal sigma_Y gives a relative plus sign between the two groups
  // for the phi_perp part; the magnitudes match the quoted state.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const RealQubit q = test::random_real_qubit(rng);
    const StateVector phi = q.ket();
    const StateVector perp = orthogonal(phi);
    const StateVector flipped = flip_b(uqcm_1to2(q));
    const double a = std::sqrt(2.0 / 3.0), b = 1.0 / std::sqrt(6.0);
    const StateVector derived(combo({{a, ket3(phi, perp, 0, 0, 0)},
                                     {b, ket3(phi, perp, 0, 1, 1)},
                                     {b, ket3(phi, perp, 1, 0, 1)}}));
    EXPECT_NEAR(overlap_magnitude(flipped, derived), 1.0, 1e-12);
    // Group magnitudes: |<phi phi phi|.>|^2 = 2/3, rest 1/6 each.
    EXPECT_NEAR(std::norm(ket3(phi, perp, 0, 0, 0).inner(flipped)), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(std::norm(ket3(phi, perp, 0, 1, 1).inner(flipped)), 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(std::norm(ket3(phi, perp, 1, 0, 1).inner(flipped)), 1.0 / 6.0, 1e-12);
  }
}

TEST(cloning, symmetric_projector_properties) {
  const LinearMap p = symmetric_projector();
  EXPECT_NEAR(p.matrix().trace().real(), 4.0, 1e-12);
  EXPECT_TRUE(p.is_projector());
  const StateVector zero = StateVector::basis(8, 0);
  EXPECT_LT((p.apply(zero).amplitudes() - zero.amplitudes()).norm(), 1e-15);

  // Singlet on SA times anything on B: annihilated.
  const double r = std::sqrt(0.5);
  const StateVector singlet{0.0, r, -r, 0.0};
  std::mt19937_64 rng(4);
  const StateVector psi = test::random_ket(2, rng);
  EXPECT_LT(p.apply(tensor(singlet, psi)).amplitudes().norm(), 1e-15);
}

TEST(cloning, symmetric_projector_commutes_with_swaps) {
  const LinearMap p = symmetric_projector();
  // Oracle: explicit permutation matrices for (S A) and (A B).
  auto perm = [](int i, int j) {
    CMatrix m = CMatrix::Zero(8, 8);
    for (int x = 0; x < 8; ++x) {
      int bits[3] = {(x >> 2) & 1, (x >> 1) & 1, x & 1};
      std::swap(bits[i], bits[j]);
      m(bits[0] * 4 + bits[1] * 2 + bits[2], x) = 1.0;
    }
    return m;
  };
  for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
    const CMatrix s = perm(i, j);
    EXPECT_LT(max_abs_diff(s * p.matrix(), p.matrix()), 1e-12);
  }
  // (I + sum of swaps + two 3-cycles) / 6
  const CMatrix c1 = perm(0, 1) * perm(1, 2);
  const CMatrix c2 = perm(1, 2) * perm(0, 1);
  const CMatrix oracle = (CMatrix::Identity(8, 8) + perm(0, 1) + perm(1, 2) + perm(0, 2) + c1 + c2) / 6.0;
  EXPECT_LT(max_abs_diff(p.matrix(), oracle), 1e-12);
}

TEST(cloning, symmetric_projector_is_basis_independent) {
  const CMatrix fromComputational = symmetric_projector().matrix();
  EXPECT_LT(max_abs_diff(symmetric_projector_from_basis(StateVector{1.0, 0.0}).matrix(), fromComputational), 1e-12);
  EXPECT_LT(max_abs_diff(symmetric_projector_from_basis(RealQubit::plus().ket()).matrix(), fromComputational),
            1e-12);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix m = symmetric_projector_from_basis(test::random_ket(2, rng)).matrix();
    EXPECT_LT(max_abs_diff(m, fromComputational), 1e-12);
  }
}

TEST(cloning, symmetric_projector_other_sizes) {
  // Dimension of the symmetric subspace of n qubits is n + 1.
  for (int n = 1; n <= 5; ++n) {
    const LinearMap p = symmetric_projector(n);
    EXPECT_NEAR(p.matrix().trace().real(), n + 1.0, 1e-12);
    EXPECT_TRUE(p.is_projector());
  }
}

TEST(cloning, pqcm_examples) {
  for (const RealQubit& q : {RealQubit::H(), RealQubit::plus(), RealQubit::V()}) {
    const CloneTriple t = pqcm_1to3(q);
    EXPECT_NEAR(t.successProbability, 8.0 / 9.0, 1e-12);
    for (double f : t.perQubitFidelity) EXPECT_NEAR(f, 5.0 / 6.0, 1e-12);
  }
}

TEST(cloning, pqcm_output_state) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const RealQubit q = test::random_real_qubit(rng);
    const StateVector phi = q.ket();
    const StateVector perp = orthogonal(phi);
    const CloneTriple t = pqcm_1to3(q);
    const double a = std::sqrt(3.0) / 2, b = 1.0 / (2 * std::sqrt(3.0));
    // Derived sign: + between the two groups (see the flip test above).
    const StateVector derived(combo({{a, ket3(phi, perp, 0, 0, 0)},
                                     {b, ket3(phi, perp, 0, 1, 1)},
                                     {b, ket3(phi, perp, 1, 0, 1)},
                                     {b, ket3(phi, perp, 1, 1, 0)}}));
    EXPECT_NEAR(overlap_magnitude(t.state, derived), 1.0, 1e-12);
    EXPECT_NEAR(std::norm(ket3(phi, perp, 0, 0, 0).inner(t.state)), 3.0 / 4.0, 1e-12);
    for (auto [x, y, z] : {std::array{0, 1, 1}, std::array{1, 0, 1}, std::array{1, 1, 0}})
      EXPECT_NEAR(std::norm(ket3(phi, perp, x, y, z).inner(t.state)), 1.0 / 12.0, 1e-12);
  }
}

TEST(cloning, pqcm_reduced_states) {
  const RealQubit q = RealQubit::from_angle(0.7);
  const StateVector phi = q.ket();
  const StateVector perp = orthogonal(phi);
  const CMatrix expected = (5.0 / 6.0) * DensityOperator::pure(phi).matrix() +
                           (1.0 / 6.0) * DensityOperator::pure(perp).matrix();
  const auto marg = single_qubit_marginals(DensityOperator::pure(pqcm_1to3(q).state));
  for (const auto& m : marg) EXPECT_LT(max_abs_diff(m.matrix(), expected), 1e-12);
}

TEST(cloning, pqcm_is_phase_covariant_over_real_inputs) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const CloneTriple t = pqcm_1to3(test::random_real_qubit(rng));
    EXPECT_NEAR(t.successProbability, 8.0 / 9.0, 1e-12);
    for (double f : t.perQubitFidelity) EXPECT_NEAR(f, 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(t.perQubitFidelity[0], t.perQubitFidelity[1], 1e-12);
    EXPECT_NEAR(t.perQubitFidelity[1], t.perQubitFidelity[2], 1e-12);
  }
}

TEST(cloning, projection_norm_bookkeeping) {
  std::mt19937_64 rng(9);
  const LinearMap p = symmetric_projector();
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector upsilon = flip_b(uqcm_1to2(test::random_real_qubit(rng)));
    EXPECT_NEAR(p.apply(upsilon).norm_squared(), 8.0 / 9.0, 1e-12);
  }
}

TEST(cloning, depolarize_single_qubit) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = test::random_density(2, rng);
    EXPECT_LT(max_abs_diff(depolarize(rho).matrix(), CMatrix::Identity(2, 2) / 2.0), 1e-12);
  }
}

TEST(cloning, depolarize_b_traces_out_b) {
  // Oracle: Tr_B(rho) (x) I/2.
  std::mt19937_64 rng(12);
  const auto rho = test::random_density(8, rng);
  const std::size_t keep[] = {0, 1};
  const std::size_t dims[] = {2, 2, 2};
  const CMatrix oracle = kron(partial_trace(rho, keep, dims).matrix(), CMatrix::Identity(2, 2) / 2.0);
  EXPECT_LT(max_abs_diff(depolarize_b(rho.matrix()), oracle), 1e-12);
}

TEST(cloning, universal_fidelity_for_zero) {
  const auto t = universal_1to3(StateVector{1.0, 0.0});
  for (double f : t.perQubitFidelity) EXPECT_NEAR(f, 7.0 / 9.0, 1e-12);
  EXPECT_NEAR(t.perQubitFidelity[0], bound(BoundKind::Universal, 1, 3).value, 1e-12);
}

TEST(cloning, universal_is_input_independent) {
  std::mt19937_64 rng(13);
  double lo = 1.0, hi = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = universal_1to3(test::random_ket(2, rng));
    for (double f : t.perQubitFidelity) {
      EXPECT_NEAR(f, 7.0 / 9.0, 1e-12);
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  EXPECT_LT(hi - lo, 1e-10);
}

TEST(cloning, bound_examples) {
  EXPECT_NEAR(bound(BoundKind::Universal, 1, 2).value, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(bound(BoundKind::Universal, 1, 3).value, 7.0 / 9.0, 1e-15);
  EXPECT_NEAR(bound(BoundKind::PhaseCovariant, 1, 2).value, 0.5 + std::sqrt(2.0) / 4, 1e-15);
  EXPECT_NEAR(bound(BoundKind::PhaseCovariant, 1, 2).value, 0.854, 5e-4);
  EXPECT_NEAR(bound(BoundKind::PhaseCovariant, 1, 3).value, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(bound(BoundKind::Estimation, 1, 1).value, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(bound(BoundKind::PhaseEstimation, 1, 1).value, 0.75, 1e-15);
  EXPECT_NEAR(bound(BoundKind::Universal, 2, 3).value, (3.0 + 2.0 / 3.0) / 4.0, 1e-15);
}

TEST(cloning, bound_errors) {
  EXPECT_THROW(bound(BoundKind::PhaseCovariant, 2, 3), UnsupportedBound);
  EXPECT_THROW(bound(BoundKind::PhaseEstimation, 2, 2), UnsupportedBound);
  EXPECT_THROW(bound(BoundKind::Universal, 3, 2), std::invalid_argument);
  EXPECT_THROW(bound(BoundKind::Universal, 0, 2), std::invalid_argument);
}

TEST(cloning, phase_covariant_odd_identity) {
  for (int m = 1; m <= 99; m += 2) {
    EXPECT_NEAR(bound(BoundKind::PhaseCovariant, 1, m).value - 1.0 / (4.0 * m), 0.75, 1e-15) << m;
  }
  // Not an identity for even M.
  EXPECT_GT(std::abs(bound(BoundKind::PhaseCovariant, 1, 2).value - 0.875), 0.02);
}

TEST(cloning, bounds_are_monotone_and_in_range) {
  for (auto kind : {BoundKind::Universal, BoundKind::PhaseCovariant}) {
    double prev = 2.0;
    for (int m = 1; m <= 200; ++m) {
      const double v = bound(kind, 1, m).value;
      EXPECT_GT(v, 0.5);
      EXPECT_LE(v, 1.0);
      EXPECT_LE(v, prev + 1e-15) << m;
      prev = v;
    }
  }
  for (int n = 1; n <= 5; ++n) {
    double prev = 2.0;
    for (int m = n; m <= n + 50; ++m) {
      const double v = bound(BoundKind::Universal, n, m).value;
      EXPECT_LE(v, prev + 1e-15);
      prev = v;
    }
  }
}

TEST(cloning, bounds_approach_estimation_limits) {
  EXPECT_NEAR(bound(BoundKind::PhaseCovariant, 1, 1000000).value, bound(BoundKind::PhaseEstimation, 1, 1).value,
              1e-5);
  EXPECT_NEAR(bound(BoundKind::PhaseCovariant, 1, 1000001).value, 0.75, 1e-5);
  EXPECT_NEAR(bound(BoundKind::Universal, 1, 1000000).value, bound(BoundKind::Estimation, 1, 1).value, 1e-5);
}

TEST(cloning, equatorial_qubit_is_on_equator) {
  for (int k = 0; k < 16; ++k) {
    const EquatorialQubit q{2 * kPi * k / 16};
    EXPECT_NEAR(q.bloch()[2], 0.0, 1e-12);
    EXPECT_NEAR(q.ket().norm_squared(), 1.0, 1e-12);
  }
}

TEST(cloning, real_qubit_validates) {
  EXPECT_THROW(RealQubit(1.0, 1.0), std::domain_error);
  EXPECT_NO_THROW(RealQubit(0.6, 0.8));
}

TEST(cloning, bloch_map_xz_plane_is_optimal) {
  std::vector<double> thetas;
  for (int k = 0; k <= 12; ++k) thetas.push_back(kPi * k / 12);
  const double phis[] = {0.0, kPi};
  const auto map = bloch_fidelity_map(thetas, phis);
  for (const auto& row : map)
    for (double f : row) EXPECT_NEAR(f, 5.0 / 6.0, 1e-12);
}

TEST(cloning, bloch_map_theta_reflection_symmetry) {
  std::vector<double> thetas;
  for (int k = 0; k <= 20; ++k) thetas.push_back(kPi * k / 20);
  const double phis[] = {0.0, 0.4, 1.1};
  const auto map = bloch_fidelity_map(thetas, phis);
  for (std::size_t i = 0; i < thetas.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(map[i][j], map[thetas.size() - 1 - i][j], 1e-12);
}

TEST(cloning, bloch_map_minimum_on_y_axis) {
  std::vector<double> thetas, phis;
  for (int k = 0; k <= 16; ++k) thetas.push_back(kPi * k / 16);
  for (int k = -16; k < 16; ++k) phis.push_back(kPi * k / 16);
  const auto map = bloch_fidelity_map(thetas, phis);
  double best = 2.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < thetas.size(); ++i)
    for (std::size_t j = 0; j < phis.size(); ++j)
      if (map[i][j] < best - 1e-12) {
        best = map[i][j];
        bi = i;
        bj = j;
      }
  EXPECT_NEAR(thetas[bi], kPi / 2, 1e-12);
  EXPECT_NEAR(std::abs(phis[bj]), kPi / 2, 1e-12);
  // Independent oracle: run the pipeline directly on |+i>.
  const auto direct = pqcm_1to3(bloch_ket(kPi / 2, kPi / 2));
  EXPECT_NEAR(best, direct.perQubitFidelity[0], 1e-12);
  EXPECT_NEAR(best, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(direct.successProbability, 8.0 / 9.0, 1e-12);
}

TEST(cloning, other_flip_unitaries_select_other_planes) {
  // sigma_Z sends phi_perp to phi for every equatorial qubit.
  for (int k = 0; k < 12; ++k) {
    const EquatorialQubit q{2 * kPi * k / 12};
    const auto t = pqcm_1to3(q.ket(), FlipUnitary::Z);
    for (double f : t.perQubitFidelity) EXPECT_NEAR(f, 5.0 / 6.0, 1e-12);
  }
}
