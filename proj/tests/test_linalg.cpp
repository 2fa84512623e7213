#include "pqcm/linalg.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace pqcm;

TEST(linalg, tensor_of_basis_kets) {
  const StateVector zero{1.0, 0.0};
  const StateVector v = tensor(zero, zero);
  ASSERT_EQ(v.dim(), 4u);
  EXPECT_EQ(v[0], Complex(1.0));
  EXPECT_EQ(v[1], Complex(0.0));
  EXPECT_EQ(v[2], Complex(0.0));
  EXPECT_EQ(v[3], Complex(0.0));
}

TEST(linalg, tensor_left_operand_is_most_significant) {
  const StateVector v = tensor(StateVector{0.0, 1.0}, StateVector{1.0, 0.0});
  EXPECT_EQ(v[2], Complex(1.0));  // |10>
}

TEST(linalg, tensor_of_identities) {
  const LinearMap i4 = tensor(pauli::I(), pauli::I());
  EXPECT_EQ(max_abs_diff(i4.matrix(), CMatrix::Identity(4, 4)), 0.0);
}

TEST(linalg, tensor_of_plus_states_is_uniform) {
  const double r = std::sqrt(0.5);
  const StateVector plus{r, r};
  const StateVector v = tensor(tensor(plus, plus), plus);
  ASSERT_EQ(v.dim(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(v[i] - Complex(std::pow(2.0, -1.5))), 0.0, 1e-15);
}

TEST(linalg, tensor_is_associative) {
  // Small integer entries make every product exactly representable, so the
  // two associations must agree bit for bit.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(-9, 9);
  auto integer_map = [&](int n) {
    CMatrix m(n, n);
    for (auto& x : m.reshaped()) x = Complex(d(rng), d(rng));
    return LinearMap(m);
  };
  for (int trial = 0; trial < 20; ++trial) {
    const LinearMap a = integer_map(2), b = integer_map(3), c = integer_map(2);
    EXPECT_EQ(max_abs_diff(tensor(tensor(a, b), c).matrix(), tensor(a, tensor(b, c)).matrix()), 0.0);
  }
  // Generic entries agree up to round-off.
  for (int trial = 0; trial < 20; ++trial) {
    const LinearMap a(test::random_matrix(2, rng));
    const LinearMap b(test::random_matrix(3, rng));
    const LinearMap c(test::random_matrix(2, rng));
    EXPECT_LT(max_abs_diff(tensor(tensor(a, b), c).matrix(), tensor(a, tensor(b, c)).matrix()), 1e-12);
  }
}

TEST(linalg, normalize_gives_unit_norm) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const StateVector v(CVector(CVector::Random(8) * 5.0));
    EXPECT_NEAR(v.normalized().norm_squared(), 1.0, 1e-12);
  }
  EXPECT_THROW(StateVector(CVector(CVector::Zero(2))).normalized(), std::domain_error);
}

TEST(linalg, partial_trace_of_product_state) {
  const auto rho = DensityOperator::pure(StateVector::basis(4, 0));
  const std::size_t keep[] = {0};
  const std::size_t dims[] = {2, 2};
  const auto r = partial_trace(rho, keep, dims);
  CMatrix expected = CMatrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  EXPECT_LT(max_abs_diff(r.matrix(), expected), 1e-15);
}

TEST(linalg, partial_trace_of_bell_state_is_maximally_mixed) {
  const double r = std::sqrt(0.5);
  const auto rho = DensityOperator::pure(StateVector{r, 0.0, 0.0, r});
  const std::size_t dims[] = {2, 2};
  for (std::size_t k : {0u, 1u}) {
    const std::size_t keep[] = {k};
    EXPECT_LT(max_abs_diff(partial_trace(rho, keep, dims).matrix(), CMatrix::Identity(2, 2) / 2.0),
              1e-15);
  }
}

TEST(linalg, partial_trace_keeps_relative_order) {
  // |0>_0 |1>_1 |0>_2: keeping {2, 0} must give |00><00| in original order.
  const auto rho = DensityOperator::pure(StateVector::basis(8, 2));
  const std::size_t keep[] = {2, 0};
  const std::size_t dims[] = {2, 2, 2};
  const auto r = partial_trace(rho, keep, dims);
  EXPECT_NEAR(r.matrix()(0, 0).real(), 1.0, 1e-15);
}

TEST(linalg, partial_trace_dimension_mismatch) {
  const auto rho = DensityOperator::maximally_mixed(4);
  const std::size_t keep[] = {0};
  const std::size_t dims[] = {2, 3};
  EXPECT_THROW(partial_trace(rho, keep, dims), DimensionError);
  const std::size_t dims2[] = {2, 2};
  EXPECT_THROW(partial_trace(rho, std::span<const std::size_t>{}, dims2), DimensionError);
  const std::size_t bad[] = {5};
  EXPECT_THROW(partial_trace(rho, bad, dims2), DimensionError);
}

TEST(linalg, partial_trace_preserves_trace_for_random_states) {
  std::mt19937_64 rng(11);
  const std::size_t dims[] = {2, 2, 2};
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = test::random_density(8, rng);
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t keep[] = {k};
      const auto r = partial_trace(rho, keep, dims);
      EXPECT_NEAR(r.trace().real(), 1.0, 1e-12);
      EXPECT_LT(max_abs_diff(r.matrix(), r.matrix().adjoint()), 1e-12);
    }
  }
}

TEST(linalg, fidelity_basics) {
  const StateVector zero{1.0, 0.0};
  EXPECT_DOUBLE_EQ(fidelity(zero, DensityOperator::pure(zero)), 1.0);
  EXPECT_DOUBLE_EQ(fidelity(zero, DensityOperator::maximally_mixed(2)), 0.5);
  EXPECT_THROW(fidelity(zero, DensityOperator::maximally_mixed(4)), DimensionError);
}

TEST(linalg, fidelity_of_pure_state_with_itself_is_one) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const StateVector phi = test::random_ket(2 + trial % 7, rng);
    EXPECT_NEAR(fidelity(phi, DensityOperator::pure(phi)), 1.0, 1e-12);
  }
}

TEST(linalg, density_operator_validation) {
  CMatrix notHermitian(2, 2);
  notHermitian << 0.5, 0.1, 0.0, 0.5;
  EXPECT_THROW(DensityOperator{notHermitian}, std::domain_error);
  EXPECT_THROW(DensityOperator{CMatrix(CMatrix::Identity(2, 2))}, std::domain_error);
  CMatrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  EXPECT_THROW(DensityOperator{negative}, std::domain_error);
}

TEST(linalg, projectors_built_from_kets_are_idempotent) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    // Orthonormal set from a QR decomposition.
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(test::random_matrix(8, rng)).householderQ();
    std::vector<StateVector> kets;
    for (int k = 0; k <= trial % 5; ++k) kets.emplace_back(CVector(q.col(k)));
    const LinearMap p = LinearMap::projector_onto(kets);
    EXPECT_LT(max_abs_diff(p.matrix() * p.matrix(), p.matrix()), 1e-12);
    EXPECT_TRUE(p.is_projector());
  }
}

TEST(linalg, pauli_matrices) {
  EXPECT_TRUE(pauli::X().is_unitary());
  EXPECT_TRUE(pauli::Y().is_unitary());
  EXPECT_TRUE(pauli::Z().is_unitary());
  // XY = iZ
  const CMatrix xy = pauli::X().matrix() * pauli::Y().matrix();
  EXPECT_LT(max_abs_diff(xy, Complex(0, 1) * pauli::Z().matrix()), 1e-15);
}
