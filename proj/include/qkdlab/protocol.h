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

#include <cstdint>
#include <string>
#include <vector>

#include "qkdlab/adversary.h"
#include "qkdlab/bits.h"
#include "qkdlab/codes.h"
#include "qkdlab/source.h"

namespace qkdlab {

enum class ProtocolMode { kBB84, kBB84M, kBB84MM };

std::string mode_name(ProtocolMode mode);
/// Accepts "bb84", "bb84m", "bb84mm" (case-insensitive).
ProtocolMode parse_mode(const std::string &text);

struct ProtocolParams {
    /// Key length.
    size_t m = 0;
    /// Verification threshold.
    double delta_p = 0;
    /// Test and key block size.
    size_t n = 0;
    /// Oversampling constant.
    double eps_n = 0.5;
    /// Security parameter.
    double eps = 0;
    double lambda = 0;
    /// Parity check F (r x n) and its decoder.
    LinearCode code;
    /// Privacy amplification K (m x n).
    PrivacyAmplifier amplifier;
    ProtocolMode mode = ProtocolMode::kBB84;
    uint64_t seed = 0;

    /// ceil((4 + eps_n) n), rounded up to even.
    size_t n_total() const;
};

/// One inequality of the pre-agreement, with both sides.
struct ParamCondition {
    std::string name;
    double lhs;
    std::string relation;
    double rhs;
    bool holds;
};

struct ParamReport {
    std::vector<ParamCondition> conditions;
    bool passed = false;

    /// "name: lhs rel rhs" for every failed condition, joined by "; ".
    std::string failures() const;
};

/// floor(delta_p n) with a guard against roundoff just below an integer.
size_t verification_threshold(double delta_p, size_t n);
/// ceil((delta_p + eps) n), guarded the same way.
size_t correction_requirement(double delta_p, double eps, size_t n);

ParamReport validate_params(const ProtocolParams &p, const QuasiPerfectCertificate &cert);

/// A public message, labelled by protocol step.
struct Announcement {
    std::string step;
    std::string item;
    std::string value;
};

struct Transcript {
    /// Alice's bases and key bits, the box's bases, Bob's measurement bases
    /// and Bob's outcomes, one entry per exchanged photon.
    BitString a, b, b_tilde, g, h;
    /// Sorted positions of the test set R.
    std::vector<size_t> r;
    /// Membership mask of R.
    BitString in_r;
    /// Sorted positions where a = b.
    std::vector<size_t> omega;
    /// pi[k] is the k-th position in the announced ordering.
    std::vector<size_t> pi;
    /// Test and key positions in pi order. Empty when C5 failed.
    std::vector<size_t> s_p, s_k;
    BitString syndrome;
    std::vector<Announcement> log;
    EveRecord eve;
    /// Basis bits requested from the box.
    size_t basis_bits_drawn = 0;
};

enum class SessionStatus { kCompleted, kAborted };

struct SessionOutcome {
    SessionStatus status = SessionStatus::kAborted;
    /// "agreement-check" (C5) or "verification" (C7) when aborted.
    std::string abort_reason;
    BitString kappa;
    /// Bob's key; empty when aborted.
    BitString kappa_b;
    /// Differences on S_P and S_K; -1 when the sets were not formed.
    long d_sp = -1;
    long d_sk = -1;
    size_t exchanged_count = 0;
    size_t lost_count = 0;
    Transcript transcript;

    bool completed() const {
        return status == SessionStatus::kCompleted;
    }
    bool keys_equal() const {
        return completed() && kappa == kappa_b;
    }
};

struct SessionOptions {
    /// Refuse to run when validate_params fails.
    bool enforce_assumptions = true;
};

/// Runs QT1-QT5 until n_total photons are exchanged, then C1-C9. Halts at
/// the first failed check. All randomness derives from p.seed.
SessionOutcome run_session(const ProtocolParams &p, const CertifiedSource &src, const ChannelModel &ch,
                           const AttackStrategy &attack, const SessionOptions &options = {});

/// |Omega n R| >= n and |Omega n R-bar| >= n.
bool agreement_check(const Transcript &t, const ProtocolParams &p);

struct VerificationResult {
    bool passed;
    size_t d_sp;
};

/// d(g, h) on S_P against floor(delta_p n). Throws std::logic_error when
/// S_P was never formed.
VerificationResult verification_test(const Transcript &t, const ProtocolParams &p);

/// Transcript and outcome as JSON. Bit strings are hex-packed.
std::string session_to_json(const SessionOutcome &outcome, uint64_t seed);

/// "seed,status,d_sp,d_sk,key_equal".
std::string session_csv_header();
std::string session_csv_row(uint64_t seed, const SessionOutcome &outcome);

}  // namespace qkdlab
