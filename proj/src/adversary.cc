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

#include "qkdlab/adversary.h"

#include <cmath>
#include <stdexcept>

namespace qkdlab {

namespace {

bool is_probability(double p) {
    return p >= 0 && p <= 1;
}

}  // namespace

void ChannelModel::validate() const {
    if (!is_probability(loss_probability) || !is_probability(flip_probability) ||
        !is_probability(invert_probability)) {
        throw std::invalid_argument("channel probabilities must lie in [0, 1]");
    }
    if (flip_probability + invert_probability > 1 + 1e-12) {
        throw std::invalid_argument("flip_probability + invert_probability must not exceed 1");
    }
}

ChannelEvent sample_channel_event(const ChannelModel &ch, Rng &rng) {
    if (ch.loss_probability > 0 && rng.uniform() < ch.loss_probability) {
        return ChannelEvent::kLost;
    }
    if (ch.flip_probability == 0 && ch.invert_probability == 0) {
        return ChannelEvent::kIntact;
    }
    double u = rng.uniform();
    if (u < ch.flip_probability) {
        return ChannelEvent::kDepolarized;
    }
    if (u < ch.flip_probability + ch.invert_probability) {
        return ChannelEvent::kInverted;
    }
    return ChannelEvent::kIntact;
}

std::optional<DensityMatrix> apply_channel(const ChannelModel &ch, const DensityMatrix &state, Rng &rng) {
    ch.validate();
    size_t d = state.dim();
    switch (sample_channel_event(ch, rng)) {
        case ChannelEvent::kLost:
            return std::nullopt;
        case ChannelEvent::kIntact:
            return state;
        case ChannelEvent::kDepolarized:
            return DensityMatrix::maximally_mixed(d);
        case ChannelEvent::kInverted: {
            if (d == 1) {
                return state;
            }
            ComplexMatrix m = ComplexMatrix::identity(d) - state.matrix();
            m *= Complex(1.0 / static_cast<double>(d - 1));
            return DensityMatrix(std::move(m));
        }
    }
    return state;
}

AttackStrategy AttackStrategy::none() {
    return AttackStrategy{};
}

AttackStrategy AttackStrategy::intercept_resend(std::optional<int> fixed_basis) {
    AttackStrategy s;
    s.kind = Kind::kInterceptResend;
    s.fixed_basis = fixed_basis;
    s.validate();
    return s;
}

AttackStrategy AttackStrategy::distinguish(const DensityMatrix &rho0, const DensityMatrix &rho1) {
    AttackStrategy s;
    s.kind = Kind::kDistinguish;
    s.povm = optimal_binary_measurement(rho0, rho1);
    s.resend = {rho0, rho1};
    s.guesses = {0, 1};
    s.validate();
    return s;
}

AttackStrategy AttackStrategy::custom(Povm povm, std::vector<DensityMatrix> resend, std::vector<int> guesses) {
    AttackStrategy s;
    s.kind = Kind::kCustomPovm;
    s.povm = std::move(povm);
    s.resend = std::move(resend);
    s.guesses = std::move(guesses);
    s.validate();
    return s;
}

std::string AttackStrategy::kind_name() const {
    switch (kind) {
        case Kind::kNone:
            return "none";
        case Kind::kInterceptResend:
            return "intercept-resend";
        case Kind::kDistinguish:
            return "distinguish";
        case Kind::kCustomPovm:
            return "custom";
    }
    return "unknown";
}

void AttackStrategy::validate() const {
    if (kind == Kind::kInterceptResend && fixed_basis && *fixed_basis != 0 && *fixed_basis != 1) {
        throw std::invalid_argument("intercept-resend basis must be 0 or 1");
    }
    if (kind == Kind::kDistinguish || kind == Kind::kCustomPovm) {
        if (!povm) {
            throw std::invalid_argument("attack requires a POVM");
        }
        if (resend.size() != povm->size() || guesses.size() != povm->size()) {
            throw std::invalid_argument("attack needs one resent state and one guess per POVM outcome");
        }
        for (const auto &r : resend) {
            if (r.dim() != povm->dim()) {
                throw std::invalid_argument("resent state dimension differs from the POVM's");
            }
        }
        for (int g : guesses) {
            if (g < -1 || g > 1) {
                throw std::invalid_argument("guesses must be -1, 0 or 1");
            }
        }
    }
}

BitString EveRecord::guess_bits() const {
    BitString out(notes.size());
    for (size_t i = 0; i < notes.size(); i++) {
        out.set(i, notes[i].guess == 1);
    }
    return out;
}

DensityMatrix ideal_state(int basis, int bit) {
    return DensityMatrix(basis == 0 ? basis_projector(bit) : rotated_projector(kPi / 4, bit));
}

AttackResult apply_attack(const AttackStrategy &strategy, const DensityMatrix &state, size_t, Rng &rng) {
    switch (strategy.kind) {
        case AttackStrategy::Kind::kNone:
            return {state, EveNote{}};
        case AttackStrategy::Kind::kInterceptResend: {
            if (state.dim() != 2) {
                throw std::invalid_argument("intercept-resend acts on qubits");
            }
            int basis = strategy.fixed_basis ? *strategy.fixed_basis : static_cast<int>(rng.bit());
            Povm measurement({MeasurementOperator(ideal_state(basis, 0).matrix()),
                              MeasurementOperator(ideal_state(basis, 1).matrix())});
            int outcome = static_cast<int>(sample_povm(measurement, state, rng));
            return {ideal_state(basis, outcome), EveNote{basis, outcome, outcome, 2 * basis + outcome}};
        }
        case AttackStrategy::Kind::kDistinguish:
        case AttackStrategy::Kind::kCustomPovm: {
            if (state.dim() != strategy.povm->dim()) {
                throw std::invalid_argument("attack POVM dimension differs from the state's");
            }
            int outcome = static_cast<int>(sample_povm(*strategy.povm, state, rng));
            return {strategy.resend[outcome], EveNote{-1, outcome, strategy.guesses[outcome], outcome}};
        }
    }
    throw std::logic_error("unknown attack kind");
}

double helstrom_bound(const DensityMatrix &rho0, const DensityMatrix &rho1, size_t m) {
    double delta = abs_eigenvalue_sum(rho0, rho1);
    return std::pow(0.5 + 0.25 * delta, static_cast<double>(m));
}

Povm optimal_binary_measurement(const ComplexMatrix &difference) {
    EigenDecomposition eig = hermitian_eigen(difference);
    size_t d = difference.dim();
    ComplexMatrix f0(d);
    for (size_t k = 0; k < d; k++) {
        if (eig.values[k] < -tol::kEigen) {
            continue;
        }
        for (size_t i = 0; i < d; i++) {
            for (size_t j = 0; j < d; j++) {
                f0(i, j) += eig.vectors(i, k) * std::conj(eig.vectors(j, k));
            }
        }
    }
    ComplexMatrix f1 = ComplexMatrix::identity(d) - f0;
    return Povm({"0", "1"}, {MeasurementOperator(std::move(f0)), MeasurementOperator(std::move(f1))});
}

Povm optimal_binary_measurement(const DensityMatrix &rho0, const DensityMatrix &rho1) {
    if (rho0.dim() != rho1.dim()) {
        throw std::invalid_argument("states have different dimensions");
    }
    return optimal_binary_measurement(rho0.matrix() - rho1.matrix());
}

double binary_success_probability(const Povm &povm, const DensityMatrix &rho0, const DensityMatrix &rho1) {
    return 0.5 * (trace_product(povm.op(0).matrix(), rho0.matrix()).real() +
                  trace_product(povm.op(1).matrix(), rho1.matrix()).real());
}

GuessRates r_guess_success_rate(const QuasiPerfectCertificate &cert) {
    GuessRates out;
    out.bound = 0.5 + 0.25 * cert.gamma_qp;
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            ComplexMatrix x = cert.p[a][g].matrix() * cert.h;
            ComplexMatrix y = cert.p_tilde[a][g].matrix() * cert.h;
            double tx = x.trace().real();
            double ty = y.trace().real();
            if (std::abs(tx) < 1e-12 || std::abs(ty) < 1e-12) {
                throw std::invalid_argument("Tr P H vanishes; the certificate violates S3");
            }
            // Hermitian parts; P H is Hermitian whenever P and H commute.
            x = 0.5 * (x + x.adjoint());
            x *= Complex(1 / tx);
            y = 0.5 * (y + y.adjoint());
            y *= Complex(1 / ty);
            Povm f = optimal_binary_measurement(x - y);
            out.achievable[a][g] = 0.5 * (trace_product(f.op(0).matrix(), x).real() +
                                          trace_product(f.op(1).matrix(), y).real());
        }
    }
    return out;
}

}  // namespace qkdlab
