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
#include <memory>
#include <string>
#include <vector>

#include "qkdlab/bch.h"
#include "qkdlab/bits.h"

namespace qkdlab {

/// Largest r + m for which joint_min_weight enumerates every combination.
inline constexpr size_t kJointWeightCap = 24;
/// Largest n for which minimum distances are checked exhaustively.
inline constexpr size_t kMinDistanceCap = 24;
/// Coset leader tables are built when r <= this and n <= 64.
inline constexpr size_t kCosetTableMaxRedundancy = 20;

/// Binary linear code given by its parity check matrix, with a syndrome
/// decoder that corrects up to t_max errors.
class LinearCode {
   public:
    enum class Construction { kExplicit, kGilbertVarshamov, kBch };

    /// Empty code of length 0.
    LinearCode() = default;

    /// Wraps an explicit parity check matrix. Rows must be independent.
    /// When `verify_distance` is set and n <= kMinDistanceCap, t_max is
    /// checked against the exhaustive minimum distance.
    LinearCode(Gf2Matrix parity_check, size_t t_max, bool verify_distance = true);
    /// Shortened binary BCH code with Berlekamp-Massey decoding.
    static LinearCode bch(size_t n, size_t t);

    const Gf2Matrix &parity_check() const {
        return parity_check_;
    }
    size_t n() const {
        return parity_check_.cols();
    }
    size_t r() const {
        return parity_check_.rows();
    }
    size_t dimension() const {
        return n() - r();
    }
    size_t t_max() const {
        return t_max_;
    }
    Construction construction() const {
        return construction_;
    }
    std::string construction_name() const;
    /// Present for BCH codes.
    const BchCode *bch_code() const {
        return bch_.get();
    }

    /// Basis of the code (the kernel of the parity check matrix).
    std::vector<BitString> generator_basis() const {
        return parity_check_.kernel_basis();
    }
    /// Exact minimum distance by enumerating all codewords. n <= kMinDistanceCap.
    size_t min_distance_exhaustive() const;

    /// Minimal-distance decoding; see syndrome_decode.
    BitString decode(const BitString &y, const BitString &s) const;

   private:
    friend LinearCode gilbert_varshamov_construct(size_t n, size_t t, uint64_t seed);
    friend BitString syndrome_decode(const BitString &y, const BitString &s, const LinearCode &code);
    void build_decoder();

    Gf2Matrix parity_check_;
    size_t t_max_ = 0;
    Construction construction_ = Construction::kExplicit;
    std::shared_ptr<const BchCode> bch_;
    // Syndrome (as integer) -> minimum weight coset leader (as integer).
    std::shared_ptr<const std::vector<uint64_t>> leaders_;
    // Column syndromes, for the bounded-weight search decoder.
    std::vector<BitString> columns_;
};

/// Code of length n correcting t errors with minimal r such that
/// 2^(r+1) > sum_{i <= 2t} C(n, i), built greedily from seeded random
/// candidates. Throws std::invalid_argument if that r is not below n.
LinearCode gilbert_varshamov_construct(size_t n, size_t t, uint64_t seed);

/// Smallest r with 2^(r+1) > sum_{i <= 2t} C(n, i).
size_t gilbert_varshamov_redundancy(size_t n, size_t t);

/// Returns x with H x = s minimizing d(y, x). Exact for every y within
/// t_max of a word with syndrome s. Coset leader ties are broken towards
/// the lexicographically smallest set of flipped positions. When no
/// correctable pattern exists (beyond t_max, table-free decoders only), y
/// is returned unchanged.
BitString syndrome_decode(const BitString &y, const BitString &s, const LinearCode &code);

/// Privacy amplification matrix K with a lower bound on the joint minimum
/// weight relative to its companion parity check matrix.
struct PrivacyAmplifier {
    Gf2Matrix k_matrix;
    size_t d_w = 0;
    /// True when d_w was computed by exhaustive enumeration.
    bool d_w_exact = false;
    std::string construction;

    size_t m() const {
        return k_matrix.rows();
    }
};

/// Minimum weight over all combinations of rows of F and K using at least
/// one K row. Requires f.rows() + k.rows() <= kJointWeightCap and
/// independent stacked rows.
size_t joint_min_weight(const Gf2Matrix &f, const Gf2Matrix &k);

/// Coset-search construction of an m-row K such that every combination with
/// at least one K row has weight >= d_min. Feasible when
/// 2^(n-r-m+1) > sum_{i < d_min} C(n, i). n <= 64.
PrivacyAmplifier build_privacy_matrix(const Gf2Matrix &f, size_t d_min, size_t m, uint64_t seed);

/// Extends a BCH code's parity check with m rows taken from the bit-planes
/// of the next `extra` odd exponents. d_w is the Carlitz-Uchiyama bound,
/// certified for all combinations.
PrivacyAmplifier bch_privacy_extension(const LinearCode &code, size_t m, size_t extra = 1);

/// H_2(x) = -(x log2 x + (1 - x) log2(1 - x)), H_2(0) = H_2(1) = 0.
double binary_entropy(double x);

struct RateTerms {
    double rate;
    double correction_term;
    double privacy_term;
};

/// 1 - H_2(2(delta_p + eps)) - H_2(2(delta_p + beta + gamma/2 + 3 eps/2)).
RateTerms asymptotic_rate_terms(double delta_p, double eps, double beta_qp, double gamma_qp);
double asymptotic_rate(double delta_p, double eps, double beta_qp, double gamma_qp);

struct BinomialSumCheck {
    /// sum_{k <= floor(mu n)} C(n, k), exact.
    std::string exact_decimal;
    double exact;
    /// 2^(n H_2(mu)).
    double bound;
    bool holds;
};

/// Exact binomial sum against the entropy bound. 0 < mu < 1/2, 1 <= n <= 64.
BinomialSumCheck binomial_sum_bound_check(double mu, size_t n);

/// C(n, k) as a double, exact for small arguments.
double binomial_coefficient(size_t n, size_t k);

}  // namespace qkdlab
