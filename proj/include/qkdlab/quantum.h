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

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qkdlab/rng.h"

namespace qkdlab {

using Complex = std::complex<double>;

namespace tol {
inline constexpr double kHermitian = 1e-9;
inline constexpr double kTrace = 1e-9;
inline constexpr double kPovm = 1e-9;
inline constexpr double kPsd = 1e-10;
inline constexpr double kEigen = 1e-9;
}  // namespace tol

/// Largest dimension any operator may have. Tensor products that would
/// exceed it are rejected before allocating.
inline constexpr size_t kDefaultDimensionCap = size_t{1} << 14;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
   public:
    /// 1x1 zero matrix.
    ComplexMatrix();
    /// dim x dim zero matrix.
    explicit ComplexMatrix(size_t dim);
    /// Takes row-major entries; rejects non-square sizes and NaN/Inf.
    ComplexMatrix(size_t dim, std::vector<Complex> entries);

    static ComplexMatrix identity(size_t dim);
    static ComplexMatrix diagonal(std::span<const double> values);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
    /// |psi><psi| (not normalized).
    static ComplexMatrix outer(std::span<const Complex> psi);

    size_t dim() const {
        return dim_;
    }
    Complex operator()(size_t row, size_t col) const {
        return data_[row * dim_ + col];
    }
    Complex &operator()(size_t row, size_t col) {
        return data_[row * dim_ + col];
    }
    std::span<const Complex> entries() const {
        return data_;
    }

    ComplexMatrix adjoint() const;
    Complex trace() const;
    /// max_ij |m_ij|.
    double max_abs() const;
    /// max_ij |m_ij - conj(m_ji)|.
    double hermitian_residual() const;
    bool is_finite() const;

    ComplexMatrix &operator+=(const ComplexMatrix &other);
    ComplexMatrix &operator-=(const ComplexMatrix &other);
    ComplexMatrix &operator*=(Complex scale);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) {
        return a += b;
    }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) {
        return a -= b;
    }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) {
        return a *= s;
    }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) {
        return a *= s;
    }
    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);
    friend bool operator==(const ComplexMatrix &a, const ComplexMatrix &b) = default;

    std::string str() const;

   private:
    size_t dim_;
    std::vector<Complex> data_;
};

/// Tr(a * b) without forming the product.
Complex trace_product(const ComplexMatrix &a, const ComplexMatrix &b);

/// True iff m + tol * 1 admits a Cholesky factorization, i.e. every
/// eigenvalue of the Hermitian matrix m is above -tol.
bool is_positive_semidefinite(const ComplexMatrix &m, double tol = tol::kPsd);

/// Hermitian, positive semidefinite, unit trace.
class DensityMatrix {
   public:
    DensityMatrix() : DensityMatrix(ComplexMatrix::identity(1)) {
    }
    explicit DensityMatrix(ComplexMatrix m);

    /// |psi><psi| for a normalized vector.
    static DensityMatrix pure(std::span<const Complex> psi);
    static DensityMatrix maximally_mixed(size_t dim);

    const ComplexMatrix &matrix() const {
        return m_;
    }
    size_t dim() const {
        return m_.dim();
    }

   private:
    ComplexMatrix m_;
};

/// Hermitian, positive semidefinite.
class MeasurementOperator {
   public:
    MeasurementOperator() : MeasurementOperator(ComplexMatrix::identity(1)) {
    }
    explicit MeasurementOperator(ComplexMatrix m);

    const ComplexMatrix &matrix() const {
        return m_;
    }
    size_t dim() const {
        return m_.dim();
    }

   private:
    ComplexMatrix m_;
};

/// Positive-operator valued measure. Operators sum to the identity.
class Povm {
   public:
    Povm(std::vector<std::string> labels, std::vector<MeasurementOperator> operators);
    /// Outcomes labelled "0", "1", ...
    explicit Povm(std::vector<MeasurementOperator> operators);

    size_t size() const {
        return ops_.size();
    }
    size_t dim() const {
        return ops_.front().dim();
    }
    const std::string &label(size_t i) const {
        return labels_[i];
    }
    const MeasurementOperator &op(size_t i) const {
        return ops_[i];
    }
    const std::vector<MeasurementOperator> &operators() const {
        return ops_;
    }

   private:
    std::vector<std::string> labels_;
    std::vector<MeasurementOperator> ops_;
};

ComplexMatrix tensor_product(const ComplexMatrix &a, const ComplexMatrix &b,
                             size_t dimension_cap = kDefaultDimensionCap);
DensityMatrix tensor_product(const DensityMatrix &a, const DensityMatrix &b,
                             size_t dimension_cap = kDefaultDimensionCap);

struct EigenDecomposition {
    /// Ascending.
    std::vector<double> values;
    /// Column i is the eigenvector for values[i].
    ComplexMatrix vectors;
};

/// Eigendecomposition of a Hermitian matrix: closed form for dim 2, cyclic
/// Jacobi rotations above. Throws std::invalid_argument (with the residual
/// norm ||M - M^dagger||) when the input is not Hermitian within tolerance.
EigenDecomposition hermitian_eigen(const ComplexMatrix &m);

/// Sum of |eigenvalue| of a Hermitian matrix (its trace norm).
double trace_norm(const ComplexMatrix &hermitian);

/// Sum of |eigenvalue| of a - b.
double abs_eigenvalue_sum(const DensityMatrix &a, const DensityMatrix &b);

/// Reduces a measurement operator on H_A (x) H_B against a fixed state on
/// H_B: Tr[F (rho_A (x) rho_B)] = Tr[F' rho_A] for every rho_A.
MeasurementOperator partial_trace_reduce(const MeasurementOperator &f, const DensityMatrix &rho_b);
/// Same reduction without the measurement-operator validation; linear in f.
ComplexMatrix partial_trace_reduce(const ComplexMatrix &f, const ComplexMatrix &rho_b);
Povm partial_trace_reduce(const Povm &povm, const DensityMatrix &rho_b);

/// Tr(F_q rho) for every outcome, clamped into [0, 1] and renormalized.
/// Throws std::runtime_error if the raw vector is off the simplex by
/// tol::kPovm or more.
std::vector<double> outcome_probabilities(const Povm &povm, const DensityMatrix &rho);

/// Samples an outcome index with probability Tr(F_q rho).
size_t sample_povm(const Povm &povm, const DensityMatrix &rho, Rng &rng);

/// Haar-ish random pure state and random mixed states, for tests and
/// randomized experiments.
DensityMatrix random_density_matrix(size_t dim, Rng &rng, size_t rank = 0);
ComplexMatrix random_hermitian(size_t dim, Rng &rng);

}  // namespace qkdlab
