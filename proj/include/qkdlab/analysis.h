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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkdlab/adversary.h"
#include "qkdlab/bits.h"
#include "qkdlab/protocol.h"
#include "qkdlab/quantum.h"
#include "qkdlab/source.h"

namespace qkdlab {

/// Largest block length for brute-force state enumeration.
inline constexpr size_t kIndependenceMaxN = 8;
/// Largest number of positions for small_sphere_projector.
inline constexpr size_t kSmallSphereMaxPositions = 10;
/// Largest n_r + n_p for exact tail sums.
inline constexpr size_t kTailMaxN = 40;

/// P(kappa, v) as table[kappa][v].
class JointDistribution {
   public:
    /// Throws std::invalid_argument on negative entries, ragged rows or a
    /// total off 1 by more than 1e-9.
    explicit JointDistribution(std::vector<std::vector<double>> table);

    size_t keys() const {
        return table_.size();
    }
    size_t views() const {
        return table_.empty() ? 0 : table_[0].size();
    }
    double operator()(size_t kappa, size_t v) const {
        return table_[kappa][v];
    }

   private:
    std::vector<std::vector<double>> table_;
};

/// H(kappa | v) in bits, with 0 log 0 = 0.
double conditional_entropy(const JointDistribution &j);

enum class TailSide { kUpper, kLower };

struct TailResult {
    double exact;
    double bound;
    bool holds;
};

/// Two-binomial tail. Upper: sum over i_r + i_p >= (p + t) n with
/// 0 < r <= p < p + t < 1. Lower: i_r + i_p <= (r - t) n with
/// 0 < r - t <= r <= p < 1. Here n = n_r + n_p, i_r ~ Bin(n_r, r) and
/// i_p ~ Bin(n_p, p). Bound e^(-2 t^2 n). Throws std::invalid_argument when
/// the ordering is violated or n exceeds kTailMaxN.
TailResult binomial_tail_bound(double p, double r, double t, size_t n_r, size_t n_p,
                               TailSide side = TailSide::kUpper);

/// max(exp(-(eps^2/4)(delta_p + eps/2) n), exp(-(1/4)(delta_p + 3 eps/2)^2 / (delta_p + eps/2) n)).
double reliability_bound(size_t n, double eps, double delta_p);

struct PrivacyTerms {
    double g;
    double h;
    double eps1;
    double p_bad;
    /// sqrt(m / (2 (m + 1/ln 2) h)); the proof needs q >= 1.
    double q;
};

/// g = e^(-eps^2 n) + e^(-eps^2 n / 2), h = 2 g^(1/4) + g^(1/2),
/// eps1 = 2(m + 1/ln2) h + 2 sqrt(2 (m + 1/ln2) m h) + m p_bad with
/// p_bad = sqrt(g) unless given.
PrivacyTerms privacy_bookkeeping(size_t n, size_t m, double eps, std::optional<double> p_bad = std::nullopt);

struct SlopeFit {
    /// Least-squares slope of ln eps1 against n.
    double slope;
    double intercept;
    std::vector<size_t> n;
    std::vector<double> eps1;
};

/// Fits ln eps1(n, floor(lambda n), eps) on `points` evenly spaced n in
/// [n_lo, n_hi].
SlopeFit eps1_slope(double lambda, double eps, size_t n_lo, size_t n_hi, size_t points = 19);

/// Smallest n (searching up to n_max) with q(n, floor(lambda n), eps) >= 1,
/// or nullopt.
std::optional<size_t> q_threshold_n(double lambda, double eps, size_t n_max = 10000000);

/// Empirical value against an analytic bound. passed iff
/// empirical <= bound + 3 sigma.
struct BoundReport {
    std::string name;
    double empirical = 0;
    double bound = 0;
    double sigma = 0;
    size_t n = 0;
    size_t trials = 0;
    bool passed = false;

    std::string to_json() const;
};

/// Binomial standard error sqrt(p (1 - p) / trials).
double binomial_sigma(double p, size_t trials);

/// Tr(Y (F_0 x F_1 x ... x F_(k-1))) without forming the product. Each
/// factor is 2 x 2 and Y is 2^k x 2^k; factor 0 is the most significant.
Complex tensor_expectation(const ComplexMatrix &y, const std::vector<const ComplexMatrix *> &factors);

/// P~^j_b = tensor over i of P~_(b[i])^(j[i]).
ComplexMatrix product_projector(const QuasiPerfectCertificate &cert, const BitString &b, const BitString &j);

struct IndependenceReport {
    /// False when X violates the support hypothesis or d'' is too large.
    bool hypothesis_ok = false;
    double hypothesis_residual = 0;
    size_t d_w = 0;
    /// max over s of the spread of Tr X rho_(kappa,s,b-bar) across kappa.
    double max_spread = 0;
    bool passed = false;
    std::string note;
};

/// Brute-force check that Tr X rho_(kappa,s,b-bar) does not depend on
/// kappa. rho_(kappa,s,b-bar) averages tensor_i rho^(g[i])_(1-b[i]) over
/// C_(kappa,s) = {g : F g = s, K g = kappa}. Requires n <= kIndependenceMaxN,
/// d'' <= joint_min_weight(f, k) / 2, and ||X P~^j_b||_F < hypothesis_tol
/// for every j with d(h, j) >= d''. The norm is the square root of a trace,
/// so its roundoff floor is near 1e-8 and hypothesis_tol sits above that.
IndependenceReport key_independence_check(const Gf2Matrix &f, const Gf2Matrix &k, const CertifiedSource &src,
                                          const BitString &b, const BitString &h, size_t d_pp,
                                          const ComplexMatrix &x, double tol = 1e-9,
                                          double hypothesis_tol = 1e-6);

/// Pi M Pi with Pi the sum of P~^j_b over d(h, j) < d'' and M a random PSD
/// matrix, so the support hypothesis holds by construction.
ComplexMatrix random_supported_operator(const QuasiPerfectCertificate &cert, const BitString &b,
                                        const BitString &h, size_t d_pp, Rng &rng);

/// Sum of P~^w_(b~) over all w with d(w, h) >= threshold on the listed
/// positions. Positions off the list are unconstrained. At most
/// kSmallSphereMaxPositions positions in total.
MeasurementOperator small_sphere_projector(const QuasiPerfectCertificate &cert, const BitString &b_tilde,
                                           const BitString &h, const std::vector<size_t> &s_k_positions,
                                           size_t threshold_count);

struct EntropyReport {
    /// Miller-Madow corrected estimate of H(kappa | coarse view).
    double empirical = 0;
    double plug_in = 0;
    double sigma = 0;
    double bias = 0;
    /// 3 sigma + |bias|, widened when cells are thin.
    double band = 0;
    double eps1 = 0;
    /// m - eps1.
    double floor = 0;
    size_t m = 0;
    size_t sessions = 0;
    size_t cells = 0;
    size_t completed = 0;
    bool passed = false;

    std::string to_json() const;
};

/// Estimates H(kappa | status, d_sp, K eve_guess[S_K]) over seeded sessions
/// and compares with m - eps1(n, m, eps). m <= 8.
EntropyReport entropy_vs_bound_experiment(const ProtocolParams &p, const CertifiedSource &src,
                                          const ChannelModel &ch, const AttackStrategy &attack, size_t sessions,
                                          uint64_t seed, const SessionOptions &options = {}, size_t threads = 0);

struct ReliabilityReport {
    BoundReport bound;
    size_t completed = 0;
    size_t mismatched = 0;
    /// Completed sessions with d_sk <= t_max.
    size_t decodable = 0;
    /// Of those, sessions whose keys differ. Must be 0.
    size_t decoder_failures = 0;
};

/// P(kappa != kappa_B and the verification test passes) over seeded
/// sessions, against reliability_bound.
ReliabilityReport reliability_experiment(const ProtocolParams &p, const CertifiedSource &src,
                                         const ChannelModel &ch, size_t sessions, uint64_t seed,
                                         const SessionOptions &options = {}, size_t threads = 0);

/// Guesses m independent equiprobable bits, each hidden in rho0 or rho1,
/// with the optimal binary measurement. Reports the all-correct frequency
/// against helstrom_bound(rho0, rho1, m).
BoundReport product_guess_experiment(const DensityMatrix &rho0, const DensityMatrix &rho1, size_t m,
                                     size_t trials, uint64_t seed);

/// Seed of session `index` under a master seed.
uint64_t session_seed(uint64_t master, size_t index);

// Randomized instances shared by the CLI and the test suites.

struct TailTuple {
    double p, r, t;
    size_t n_r, n_p;
    TailSide side;
};

/// A valid parameter tuple with n_r + n_p <= max_n, either side.
TailTuple random_tail_tuple(Rng &rng, size_t max_n = kTailMaxN);

/// Distributions around 0 and pi/4 drawn from the uniform and truncated
/// cosine families, with half widths in (0, max_spread] and centers
/// offset by at most max_offset.
std::array<AngularDistribution, 2> random_angular_pair(Rng &rng, double max_spread = 0.2, double max_offset = 0.1);

struct IndependenceTrial {
    size_t n = 0;
    size_t r = 0;
    size_t m = 0;
    size_t d_pp = 0;
    bool quasiperfect = false;
    IndependenceReport report;
};

/// One randomized key-independence instance: n in [3, 8], random F and K
/// with independent rows and joint minimum weight >= 2, d'' = d_w / 2, and
/// X = Pi M Pi. Uses a random angular-distribution source when `quasiperfect`.
IndependenceTrial random_independence_trial(uint64_t seed, bool quasiperfect);

}  // namespace qkdlab
