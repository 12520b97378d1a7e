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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qkdlab {

ComplexMatrix::ComplexMatrix() : ComplexMatrix(1) {
}

ComplexMatrix::ComplexMatrix(size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0) {
        throw std::invalid_argument("ComplexMatrix dimension must be at least 1");
    }
}

ComplexMatrix::ComplexMatrix(size_t dim, std::vector<Complex> entries) : dim_(dim), data_(std::move(entries)) {
    if (dim == 0) {
        throw std::invalid_argument("ComplexMatrix dimension must be at least 1");
    }
    if (data_.size() != dim * dim) {
        throw std::invalid_argument(
            "ComplexMatrix expects " + std::to_string(dim * dim) + " entries but got " +
            std::to_string(data_.size()));
    }
    if (!is_finite()) {
        throw std::invalid_argument("ComplexMatrix entries must be finite");
    }
}

ComplexMatrix ComplexMatrix::identity(size_t dim) {
    ComplexMatrix m(dim);
    for (size_t i = 0; i < dim; i++) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (size_t i = 0; i < values.size(); i++) {
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    size_t dim = rows.size();
    std::vector<Complex> entries;
    entries.reserve(dim * dim);
    for (const auto &row : rows) {
        if (row.size() != dim) {
            throw std::invalid_argument("ComplexMatrix::from_rows needs a square array");
        }
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return ComplexMatrix(dim, std::move(entries));
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> psi) {
    ComplexMatrix m(psi.size());
    for (size_t i = 0; i < psi.size(); i++) {
        for (size_t j = 0; j < psi.size(); j++) {
            m(i, j) = psi[i] * std::conj(psi[j]);
        }
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (size_t i = 0; i < dim_; i++) {
        for (size_t j = 0; j < dim_; j++) {
            out(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0;
    for (size_t i = 0; i < dim_; i++) {
        t += (*this)(i, i);
    }
    return t;
}

double ComplexMatrix::max_abs() const {
    double best = 0;
    for (const auto &z : data_) {
        best = std::max(best, std::abs(z));
    }
    return best;
}

double ComplexMatrix::hermitian_residual() const {
    double best = 0;
    for (size_t i = 0; i < dim_; i++) {
        for (size_t j = i; j < dim_; j++) {
            best = std::max(best, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        }
    }
    return best;
}

bool ComplexMatrix::is_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex &z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &other) {
    if (other.dim_ != dim_) {
        throw std::invalid_argument("dimension mismatch in matrix addition");
    }
    for (size_t k = 0; k < data_.size(); k++) {
        data_[k] += other.data_[k];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &other) {
    if (other.dim_ != dim_) {
        throw std::invalid_argument("dimension mismatch in matrix subtraction");
    }
    for (size_t k = 0; k < data_.size(); k++) {
        data_[k] -= other.data_[k];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator*=(Complex scale) {
    for (auto &z : data_) {
        z *= scale;
    }
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.dim_ != b.dim_) {
        throw std::invalid_argument("dimension mismatch in matrix product");
    }
    size_t n = a.dim_;
    ComplexMatrix out(n);
    for (size_t i = 0; i < n; i++) {
        for (size_t k = 0; k < n; k++) {
            Complex aik = a(i, k);
            if (aik == Complex(0)) {
                continue;
            }
            const Complex *brow = &b.data_[k * n];
            Complex *orow = &out.data_[i * n];
            for (size_t j = 0; j < n; j++) {
                orow[j] += aik * brow[j];
            }
        }
    }
    return out;
}

std::string ComplexMatrix::str() const {
    std::ostringstream out;
    out << "[";
    for (size_t i = 0; i < dim_; i++) {
        out << (i ? ", [" : "[");
        for (size_t j = 0; j < dim_; j++) {
            auto z = (*this)(i, j);
            out << (j ? ", " : "") << z.real();
            if (z.imag() != 0) {
                out << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
            }
        }
        out << "]";
    }
    out << "]";
    return out.str();
}

Complex trace_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("dimension mismatch in trace_product");
    }
    size_t n = a.dim();
    Complex t = 0;
    for (size_t i = 0; i < n; i++) {
        for (size_t k = 0; k < n; k++) {
            t += a(i, k) * b(k, i);
        }
    }
    return t;
}

bool is_positive_semidefinite(const ComplexMatrix &m, double tol) {
    size_t n = m.dim();
    // Cholesky on the Hermitian part of m + tol * 1.
    std::vector<Complex> l(n * n);
    for (size_t j = 0; j < n; j++) {
        double d = m(j, j).real() + tol;
        for (size_t k = 0; k < j; k++) {
            d -= std::norm(l[j * n + k]);
        }
        if (!(d > 0)) {
            return false;
        }
        double ljj = std::sqrt(d);
        l[j * n + j] = ljj;
        for (size_t i = j + 1; i < n; i++) {
            Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
            for (size_t k = 0; k < j; k++) {
                v -= l[i * n + k] * std::conj(l[j * n + k]);
            }
            l[i * n + j] = v / ljj;
        }
    }
    return true;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    double herm = m_.hermitian_residual();
    if (herm > tol::kHermitian) {
        throw std::invalid_argument("density matrix is not Hermitian (residual " + std::to_string(herm) + ")");
    }
    Complex tr = m_.trace();
    if (std::abs(tr - Complex(1)) > tol::kTrace) {
        std::ostringstream msg;
        msg << "density matrix trace is " << tr.real() << "+" << tr.imag() << "i, expected 1";
        throw std::invalid_argument(msg.str());
    }
    if (!is_positive_semidefinite(m_, tol::kPsd)) {
        throw std::invalid_argument("density matrix has an eigenvalue below -" + std::to_string(tol::kPsd));
    }
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
    return DensityMatrix(ComplexMatrix::outer(psi));
}

DensityMatrix DensityMatrix::maximally_mixed(size_t dim) {
    return DensityMatrix(ComplexMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim)));
}

MeasurementOperator::MeasurementOperator(ComplexMatrix m) : m_(std::move(m)) {
    double herm = m_.hermitian_residual();
    if (herm > tol::kHermitian) {
        throw std::invalid_argument(
            "measurement operator is not Hermitian (residual " + std::to_string(herm) + ")");
    }
    if (!is_positive_semidefinite(m_, tol::kPsd)) {
        throw std::invalid_argument("measurement operator is not positive semidefinite");
    }
}

static std::vector<std::string> default_labels(size_t count) {
    std::vector<std::string> labels;
    for (size_t i = 0; i < count; i++) {
        labels.push_back(std::to_string(i));
    }
    return labels;
}

Povm::Povm(std::vector<MeasurementOperator> operators) : Povm(default_labels(operators.size()), operators) {
}

Povm::Povm(std::vector<std::string> labels, std::vector<MeasurementOperator> operators)
    : labels_(std::move(labels)), ops_(std::move(operators)) {
    if (ops_.empty()) {
        throw std::invalid_argument("POVM needs at least one outcome");
    }
    if (labels_.size() != ops_.size()) {
        throw std::invalid_argument("POVM label count does not match operator count");
    }
    size_t dim = ops_.front().dim();
    ComplexMatrix total(dim);
    for (const auto &op : ops_) {
        if (op.dim() != dim) {
            throw std::invalid_argument("POVM operators have different dimensions");
        }
        total += op.matrix();
    }
    double residual = (total - ComplexMatrix::identity(dim)).max_abs();
    if (residual > tol::kPovm) {
        throw std::invalid_argument("POVM operators do not sum to identity (residual " + std::to_string(residual) + ")");
    }
}

ComplexMatrix tensor_product(const ComplexMatrix &a, const ComplexMatrix &b, size_t dimension_cap) {
    size_t da = a.dim();
    size_t db = b.dim();
    if (da > dimension_cap / db) {
        throw std::length_error(
            "tensor product dimension " + std::to_string(da) + "x" + std::to_string(db) + " exceeds cap " +
            std::to_string(dimension_cap));
    }
    size_t d = da * db;
    ComplexMatrix out(d);
    for (size_t ia = 0; ia < da; ia++) {
        for (size_t ja = 0; ja < da; ja++) {
            Complex x = a(ia, ja);
            if (x == Complex(0)) {
                continue;
            }
            for (size_t ib = 0; ib < db; ib++) {
                for (size_t jb = 0; jb < db; jb++) {
                    out(ia * db + ib, ja * db + jb) = x * b(ib, jb);
                }
            }
        }
    }
    return out;
}

DensityMatrix tensor_product(const DensityMatrix &a, const DensityMatrix &b, size_t dimension_cap) {
    return DensityMatrix(tensor_product(a.matrix(), b.matrix(), dimension_cap));
}

namespace {

EigenDecomposition eigen_2x2(const ComplexMatrix &m) {
    double a = m(0, 0).real();
    double d = m(1, 1).real();
    Complex b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    EigenDecomposition out{{}, ComplexMatrix(2)};
    if (std::abs(b) == 0) {
        bool swap = d < a;
        out.values = swap ? std::vector<double>{d, a} : std::vector<double>{a, d};
        out.vectors(swap ? 1 : 0, 0) = 1;
        out.vectors(swap ? 0 : 1, 1) = 1;
        return out;
    }
    double mean = 0.5 * (a + d);
    double radius = std::hypot(0.5 * (a - d), std::abs(b));
    out.values = {mean - radius, mean + radius};
    for (size_t k = 0; k < 2; k++) {
        double lambda = out.values[k];
        // Two null vectors of (M - lambda); keep the better conditioned one.
        Complex u0 = b, u1 = lambda - a;
        Complex w0 = lambda - d, w1 = std::conj(b);
        double nu = std::sqrt(std::norm(u0) + std::norm(u1));
        double nw = std::sqrt(std::norm(w0) + std::norm(w1));
        if (nu >= nw) {
            out.vectors(0, k) = u0 / nu;
            out.vectors(1, k) = u1 / nu;
        } else {
            out.vectors(0, k) = w0 / nw;
            out.vectors(1, k) = w1 / nw;
        }
    }
    return out;
}

EigenDecomposition eigen_jacobi(const ComplexMatrix &m) {
    size_t n = m.dim();
    ComplexMatrix a(n);
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);
    double scale = 0;
    for (auto z : a.entries()) {
        scale += std::norm(z);
    }
    for (int sweep = 0; sweep < 100; sweep++) {
        double off = 0;
        for (size_t p = 0; p < n; p++) {
            for (size_t q = p + 1; q < n; q++) {
                off += std::norm(a(p, q));
            }
        }
        if (off <= 1e-32 * scale || off == 0) {
            break;
        }
        for (size_t p = 0; p < n; p++) {
            for (size_t q = p + 1; q < n; q++) {
                Complex apq = a(p, q);
                double mag = std::abs(apq);
                if (mag < 1e-300) {
                    continue;
                }
                // Phase out apq, then a real symmetric rotation.
                Complex phase_conj = std::conj(apq / mag);
                double theta = (a(q, q).real() - a(p, p).real()) / (2 * mag);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1);
                double s = t * c;
                Complex jpp = c, jpq = s, jqp = -s * phase_conj, jqq = c * phase_conj;
                for (size_t k = 0; k < n; k++) {
                    Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (size_t k = 0; k < n; k++) {
                    Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0;
                a(q, p) = 0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (size_t k = 0; k < n; k++) {
                    Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        return a(x, x).real() < a(y, y).real();
    });
    EigenDecomposition out{{}, ComplexMatrix(n)};
    for (size_t k = 0; k < n; k++) {
        out.values.push_back(a(order[k], order[k]).real());
        for (size_t i = 0; i < n; i++) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

}  // namespace

EigenDecomposition hermitian_eigen(const ComplexMatrix &m) {
    double residual = m.hermitian_residual();
    if (residual > tol::kHermitian) {
        throw std::invalid_argument(
            "hermitian_eigen: matrix is not Hermitian, ||M - M^dagger||_max = " + std::to_string(residual));
    }
    if (m.dim() == 1) {
        return EigenDecomposition{{m(0, 0).real()}, ComplexMatrix::identity(1)};
    }
    if (m.dim() == 2) {
        return eigen_2x2(m);
    }
    return eigen_jacobi(m);
}

double trace_norm(const ComplexMatrix &hermitian) {
    double total = 0;
    for (double x : hermitian_eigen(hermitian).values) {
        total += std::abs(x);
    }
    return total;
}

double abs_eigenvalue_sum(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("abs_eigenvalue_sum: dimension mismatch");
    }
    return trace_norm(a.matrix() - b.matrix());
}

ComplexMatrix partial_trace_reduce(const ComplexMatrix &f, const ComplexMatrix &rho_b) {
    size_t db = rho_b.dim();
    if (f.dim() % db != 0) {
        throw std::invalid_argument(
            "partial_trace_reduce: operator dimension " + std::to_string(f.dim()) + " is not a multiple of " +
            std::to_string(db));
    }
    size_t da = f.dim() / db;
    ComplexMatrix out(da);
    for (size_t ia = 0; ia < da; ia++) {
        for (size_t ja = 0; ja < da; ja++) {
            Complex total = 0;
            for (size_t ib = 0; ib < db; ib++) {
                for (size_t jb = 0; jb < db; jb++) {
                    total += f(ia * db + ib, ja * db + jb) * rho_b(jb, ib);
                }
            }
            out(ia, ja) = total;
        }
    }
    return out;
}

MeasurementOperator partial_trace_reduce(const MeasurementOperator &f, const DensityMatrix &rho_b) {
    return MeasurementOperator(partial_trace_reduce(f.matrix(), rho_b.matrix()));
}

Povm partial_trace_reduce(const Povm &povm, const DensityMatrix &rho_b) {
    std::vector<std::string> labels;
    std::vector<MeasurementOperator> ops;
    for (size_t q = 0; q < povm.size(); q++) {
        labels.push_back(povm.label(q));
        ops.push_back(partial_trace_reduce(povm.op(q), rho_b));
    }
    return Povm(std::move(labels), std::move(ops));
}

std::vector<double> outcome_probabilities(const Povm &povm, const DensityMatrix &rho) {
    if (povm.dim() != rho.dim()) {
        throw std::invalid_argument("outcome_probabilities: POVM and state dimensions differ");
    }
    std::vector<double> probs(povm.size());
    double total = 0;
    for (size_t q = 0; q < povm.size(); q++) {
        double p = trace_product(povm.op(q).matrix(), rho.matrix()).real();
        if (p < -tol::kPovm || p > 1 + tol::kPovm) {
            throw std::runtime_error("outcome probability " + std::to_string(p) + " outside [0, 1]");
        }
        probs[q] = p;
        total += p;
    }
    if (std::abs(total - 1) >= tol::kPovm) {
        throw std::runtime_error("outcome probabilities sum to " + std::to_string(total));
    }
    total = 0;
    for (auto &p : probs) {
        p = std::clamp(p, 0.0, 1.0);
        total += p;
    }
    for (auto &p : probs) {
        p /= total;
    }
    return probs;
}

size_t sample_povm(const Povm &povm, const DensityMatrix &rho, Rng &rng) {
    auto probs = outcome_probabilities(povm, rho);
    double u = rng.uniform();
    double acc = 0;
    for (size_t q = 0; q < probs.size(); q++) {
        acc += probs[q];
        if (u < acc) {
            return q;
        }
    }
    // u landed in the rounding gap above the last cumulative sum.
    for (size_t q = probs.size(); q-- > 0;) {
        if (probs[q] > 0) {
            return q;
        }
    }
    return probs.size() - 1;
}

DensityMatrix random_density_matrix(size_t dim, Rng &rng, size_t rank) {
    if (rank == 0 || rank > dim) {
        rank = dim;
    }
    ComplexMatrix m(dim);
    std::vector<Complex> g(dim * rank);
    for (auto &z : g) {
        z = Complex(rng.normal(), rng.normal());
    }
    double tr = 0;
    for (size_t i = 0; i < dim; i++) {
        for (size_t j = 0; j < dim; j++) {
            Complex total = 0;
            for (size_t k = 0; k < rank; k++) {
                total += g[i * rank + k] * std::conj(g[j * rank + k]);
            }
            m(i, j) = total;
        }
        tr += m(i, i).real();
    }
    m *= Complex(1.0 / tr);
    for (size_t i = 0; i < dim; i++) {
        m(i, i) = m(i, i).real();
        for (size_t j = i + 1; j < dim; j++) {
            m(j, i) = std::conj(m(i, j));
        }
    }
    return DensityMatrix(std::move(m));
}

ComplexMatrix random_hermitian(size_t dim, Rng &rng) {
    ComplexMatrix m(dim);
    for (size_t i = 0; i < dim; i++) {
        m(i, i) = rng.normal();
        for (size_t j = i + 1; j < dim; j++) {
            Complex z(rng.normal(), rng.normal());
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

}  // namespace qkdlab
