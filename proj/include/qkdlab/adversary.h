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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qkdlab/bits.h"
#include "qkdlab/quantum.h"
#include "qkdlab/rng.h"
#include "qkdlab/source.h"

namespace qkdlab {

/// Basis-independent loss and noise. There is deliberately no basis input
/// anywhere in this interface.
struct ChannelModel {
    /// Probability the photon never reaches the detector.
    double loss_probability = 0;
    /// Probability the state is replaced by the maximally mixed state.
    double flip_probability = 0;
    /// Probability the state is replaced by (I - rho) / (d - 1). On a qubit
    /// this maps every basis state to its orthogonal partner.
    double invert_probability = 0;

    /// Throws std::invalid_argument when a probability is outside [0, 1] or
    /// flip + invert exceeds 1.
    void validate() const;
};

/// Which branch of the channel a photon took.
enum class ChannelEvent { kLost, kIntact, kDepolarized, kInverted };

/// Draws the branch: one uniform for loss (when loss_probability > 0), then
/// one for the noise branch (when either noise probability is positive).
ChannelEvent sample_channel_event(const ChannelModel &ch, Rng &rng);

/// Returns nullopt when the photon is lost.
std::optional<DensityMatrix> apply_channel(const ChannelModel &ch, const DensityMatrix &state, Rng &rng);

/// Per-position product strategy.
struct AttackStrategy {
    enum class Kind { kNone, kInterceptResend, kDistinguish, kCustomPovm };

    Kind kind = Kind::kNone;
    /// Intercept-resend: measured basis, or random per position when unset.
    std::optional<int> fixed_basis;
    /// Distinguish and custom: the measurement.
    std::optional<Povm> povm;
    /// Distinguish and custom: state resent for each outcome.
    std::vector<DensityMatrix> resend;
    /// Distinguish and custom: key bit guessed for each outcome (-1 for none).
    std::vector<int> guesses;

    static AttackStrategy none();
    static AttackStrategy intercept_resend(std::optional<int> fixed_basis = std::nullopt);
    /// Optimal binary measurement between rho0 and rho1; outcome o guesses
    /// key bit o and resends rho_o.
    static AttackStrategy distinguish(const DensityMatrix &rho0, const DensityMatrix &rho1);
    /// Arbitrary POVM with one resent state and one guess per outcome.
    static AttackStrategy custom(Povm povm, std::vector<DensityMatrix> resend, std::vector<int> guesses);

    std::string kind_name() const;
    /// Throws std::invalid_argument on inconsistent fields.
    void validate() const;
};

/// What Eve learned at one position.
struct EveNote {
    /// Measured basis for intercept-resend, otherwise -1.
    int basis = -1;
    /// POVM outcome, -1 when no measurement was made.
    int outcome = -1;
    /// Guessed key bit, -1 when none.
    int guess = -1;
    /// Index of the resent state in the strategy's resend table, or of the
    /// ideal state 2 * basis + outcome for intercept-resend; -1 if untouched.
    int resent = -1;
};

/// Eve's notes, one per exchanged signal.
struct EveRecord {
    std::vector<EveNote> notes;

    /// Guess bits (0 where no guess was made).
    BitString guess_bits() const;
};

struct AttackResult {
    DensityMatrix resent;
    EveNote note;
};

/// Ideal BB84 state for (basis, bit): I^g for basis 0, rotated by pi/4 for basis 1.
DensityMatrix ideal_state(int basis, int bit);

/// Applies one position's attack. `position` is available to strategies
/// but unused by the built-in ones.
AttackResult apply_attack(const AttackStrategy &strategy, const DensityMatrix &state, size_t position, Rng &rng);

/// (1/2 + Delta / 4)^m with Delta = abs_eigenvalue_sum(rho0, rho1).
double helstrom_bound(const DensityMatrix &rho0, const DensityMatrix &rho1, size_t m);

/// {F0, F1} with F0 the projector onto the nonnegative eigenspace of
/// rho0 - rho1 (zero eigenvalues go to F0).
Povm optimal_binary_measurement(const DensityMatrix &rho0, const DensityMatrix &rho1);
/// Same construction for any Hermitian difference.
Povm optimal_binary_measurement(const ComplexMatrix &difference);

/// (1/2)(Tr F0 rho0 + Tr F1 rho1).
double binary_success_probability(const Povm &povm, const DensityMatrix &rho0, const DensityMatrix &rho1);

struct GuessRates {
    /// 1/2 + gamma_qp / 4.
    double bound;
    /// Helstrom success distinguishing P_a^g H from P~_a^g H, normalized.
    std::array<std::array<double, 2>, 2> achievable;
};

/// Throws std::invalid_argument when Tr P_a^g H vanishes.
GuessRates r_guess_success_rate(const QuasiPerfectCertificate &cert);

}  // namespace qkdlab
