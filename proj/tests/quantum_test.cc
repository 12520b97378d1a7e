// Copyright 2026 The qkdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qkdlab/quantum.h"

#include <cmath>

#include "gtest/gtest.h"

using namespace qkdlab;

namespace {

DensityMatrix ket0() {
    return DensityMatrix(ComplexMatrix::from_rows({{1, 0}, {0, 0}}));
}
DensityMatrix ket1() {
    return DensityMatrix(ComplexMatrix::from_rows({{0, 0}, {0, 1}}));
}
DensityMatrix plus() {
    return DensityMatrix(ComplexMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}));
}

}  // namespace

TEST(quantum, tensor_product_identity) {
    EXPECT_EQ(tensor_product(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
}

TEST(quantum, tensor_product_basis_projectors) {
    ComplexMatrix got = tensor_product(ket0().matrix(), ket1().matrix());
    double diag[] = {0, 1, 0, 0};
    EXPECT_EQ(got, ComplexMatrix::diagonal(diag));
}

TEST(quantum, tensor_product_rejects_oversized) {
    EXPECT_THROW(tensor_product(ComplexMatrix::identity(256), ComplexMatrix::identity(256), 1024),
                 std::length_error);
}

TEST(quantum, eigen_diagonal_sorted) {
    double diag[] = {3, 1, 2};
    auto e = hermitian_eigen(ComplexMatrix::diagonal(diag));
    ASSERT_EQ(e.values.size(), 3u);
    EXPECT_NEAR(e.values[0], 1, 1e-12);
    EXPECT_NEAR(e.values[1], 2, 1e-12);
    EXPECT_NEAR(e.values[2], 3, 1e-12);
}

TEST(quantum, eigen_two_by_two_closed_form) {
    // Characteristic polynomial x^2 - 1/2 = 0.
    auto e = hermitian_eigen(ComplexMatrix::from_rows({{0.5, -0.5}, {-0.5, -0.5}}));
    EXPECT_NEAR(e.values[0], -1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(e.values[1], 1 / std::sqrt(2.0), 1e-12);
}

TEST(quantum, eigen_reconstructs_random_hermitian) {
    Rng rng(11);
    for (size_t dim : {2, 3, 5, 8}) {
        ComplexMatrix m = random_hermitian(dim, rng);
        auto e = hermitian_eigen(m);
        ComplexMatrix back(dim);
        for (size_t k = 0; k < dim; k++) {
            for (size_t i = 0; i < dim; i++) {
                for (size_t j = 0; j < dim; j++) {
                    back(i, j) += e.values[k] * e.vectors(i, k) * std::conj(e.vectors(j, k));
                }
            }
        }
        EXPECT_LT((back - m).max_abs(), 1e-10) << "dim " << dim;
    }
}

TEST(quantum, eigen_rejects_non_hermitian) {
    EXPECT_THROW(hermitian_eigen(ComplexMatrix::from_rows({{0, 1}, {0, 0}})), std::invalid_argument);
}

TEST(quantum, abs_eigenvalue_sum_examples) {
    EXPECT_NEAR(abs_eigenvalue_sum(plus(), plus()), 0, 1e-12);
    EXPECT_NEAR(abs_eigenvalue_sum(ket0(), plus()), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(abs_eigenvalue_sum(ket0(), ket1()), 2, 1e-12);
}

TEST(quantum, density_matrix_validation) {
    EXPECT_THROW(DensityMatrix(ComplexMatrix::from_rows({{1, 0}, {0, 1}})), std::invalid_argument);
    EXPECT_THROW(DensityMatrix(ComplexMatrix::from_rows({{1.5, 0}, {0, -0.5}})), std::invalid_argument);
    EXPECT_THROW(DensityMatrix(ComplexMatrix::from_rows({{0.5, 0.5}, {0, 0.5}})), std::invalid_argument);
}

TEST(quantum, povm_validation) {
    EXPECT_NO_THROW(Povm({MeasurementOperator(ket0().matrix()), MeasurementOperator(ket1().matrix())}));
    EXPECT_THROW(Povm({MeasurementOperator(ket0().matrix()), MeasurementOperator(ket0().matrix())}),
                 std::invalid_argument);
}

TEST(quantum, partial_trace_separable) {
    Rng rng(3);
    ComplexMatrix a = random_density_matrix(2, rng).matrix();
    ComplexMatrix b = random_density_matrix(3, rng).matrix();
    DensityMatrix rho_b = random_density_matrix(3, rng);
    ComplexMatrix got = partial_trace_reduce(tensor_product(a, b), rho_b.matrix());
    ComplexMatrix want = a;
    want *= trace_product(b, rho_b.matrix());
    EXPECT_LT((got - want).max_abs(), 1e-12);
}

TEST(quantum, partial_trace_identity) {
    Rng rng(4);
    DensityMatrix rho_b = random_density_matrix(2, rng);
    MeasurementOperator f(ComplexMatrix::identity(4));
    EXPECT_LT((partial_trace_reduce(f, rho_b).matrix() - ComplexMatrix::identity(2)).max_abs(), 1e-12);
}

TEST(quantum, partial_trace_matches_joint_expectation) {
    // Tr[F (rho_A x rho_B)] = Tr[F' rho_A] for a random entangling operator.
    Rng rng(5);
    for (int trial = 0; trial < 10; trial++) {
        ComplexMatrix f = random_density_matrix(4, rng).matrix();
        DensityMatrix rho_a = random_density_matrix(2, rng);
        DensityMatrix rho_b = random_density_matrix(2, rng);
        Complex joint = trace_product(f, tensor_product(rho_a.matrix(), rho_b.matrix()));
        Complex reduced = trace_product(partial_trace_reduce(f, rho_b.matrix()), rho_a.matrix());
        EXPECT_NEAR(std::abs(joint - reduced), 0, 1e-12);
    }
}

TEST(quantum, sample_povm_deterministic_outcome) {
    Povm z({MeasurementOperator(ket0().matrix()), MeasurementOperator(ket1().matrix())});
    Rng rng(1);
    for (int i = 0; i < 1000; i++) {
        EXPECT_EQ(sample_povm(z, ket0(), rng), 0u);
    }
}

TEST(quantum, sample_povm_plus_in_computational_basis) {
    Povm z({MeasurementOperator(ket0().matrix()), MeasurementOperator(ket1().matrix())});
    Rng rng(2);
    const size_t trials = 100000;
    size_t zeros = 0;
    for (size_t i = 0; i < trials; i++) {
        zeros += sample_povm(z, plus(), rng) == 0;
    }
    double sigma = std::sqrt(0.25 / trials);
    EXPECT_NEAR(static_cast<double>(zeros) / trials, 0.5, 3 * sigma);
}
