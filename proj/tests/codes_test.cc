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

#include "qkdlab/codes.h"

#include <cmath>

#include "gtest/gtest.h"
#include "qkdlab/bch.h"
#include "qkdlab/bits.h"

using namespace qkdlab;

namespace {

/// All codewords by enumerating combinations of the generator basis.
std::vector<BitString> codewords(const LinearCode &code) {
    auto basis = code.generator_basis();
    std::vector<BitString> out;
    for (uint64_t mask = 0; mask < (uint64_t{1} << basis.size()); mask++) {
        BitString c(code.n());
        for (size_t i = 0; i < basis.size(); i++) {
            if ((mask >> i) & 1) {
                c ^= basis[i];
            }
        }
        out.push_back(c);
    }
    return out;
}

/// Brute-force minimum weight over all K-involving combinations.
size_t brute_joint_weight(const Gf2Matrix &f, const Gf2Matrix &k) {
    size_t n = k.cols();
    size_t best = n + 1;
    for (uint64_t km = 1; km < (uint64_t{1} << k.rows()); km++) {
        for (uint64_t fm = 0; fm < (uint64_t{1} << f.rows()); fm++) {
            BitString v(n);
            for (size_t i = 0; i < k.rows(); i++) {
                if ((km >> i) & 1) {
                    v ^= k.row(i);
                }
            }
            for (size_t i = 0; i < f.rows(); i++) {
                if ((fm >> i) & 1) {
                    v ^= f.row(i);
                }
            }
            best = std::min(best, v.weight());
        }
    }
    return best;
}

/// Calls f on every weight-w pattern of length n.
template <typename F>
void for_each_pattern(size_t n, size_t w, F &&f) {
    std::vector<size_t> idx(w);
    std::function<void(size_t, size_t)> rec = [&](size_t start, size_t depth) {
        if (depth == w) {
            BitString e(n);
            for (size_t i : idx) {
                e.set(i, true);
            }
            f(e);
            return;
        }
        for (size_t i = start; i < n; i++) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

}  // namespace

TEST(bits, string_round_trip_and_weight) {
    BitString b = BitString::from_string("0110100");
    EXPECT_EQ(b.str(), "0110100");
    EXPECT_EQ(b.weight(), 3u);
    EXPECT_EQ(b.distance(BitString::from_string("0110001")), 2u);
    EXPECT_EQ(BitString::from_hex(b.to_hex()), b);
    EXPECT_THROW(BitString::from_string("01x"), std::invalid_argument);
}

TEST(bits, matvec_parity) {
    Gf2Matrix m = Gf2Matrix::from_strings({"110"});
    EXPECT_EQ(gf2_matvec(m, BitString::from_string("110")).str(), "0");
    EXPECT_EQ(gf2_matvec(m, BitString::from_string("100")).str(), "1");
}

TEST(bits, kernel_is_annihilated) {
    Rng rng(9);
    Gf2Matrix m = Gf2Matrix::random(5, 12, rng);
    auto basis = m.kernel_basis();
    EXPECT_EQ(basis.size(), 12 - m.rank());
    for (const auto &v : basis) {
        EXPECT_TRUE(gf2_matvec(m, v).is_zero());
    }
}

TEST(codes, joint_min_weight_examples) {
    EXPECT_EQ(joint_min_weight(Gf2Matrix::from_strings({"110"}), Gf2Matrix::from_strings({"111"})), 1u);
    EXPECT_EQ(joint_min_weight(Gf2Matrix::from_strings({}, 3), Gf2Matrix::from_strings({"111"})), 3u);
    EXPECT_EQ(joint_min_weight(Gf2Matrix::from_strings({"1000", "0100"}), Gf2Matrix::from_strings({"0011"})), 2u);
}

TEST(codes, gv_seven_three) {
    EXPECT_EQ(gilbert_varshamov_redundancy(7, 1), 4u);
    for (uint64_t seed = 0; seed < 10; seed++) {
        LinearCode code = gilbert_varshamov_construct(7, 1, seed);
        EXPECT_EQ(code.r(), 4u);
        EXPECT_EQ(code.dimension(), 3u);
        size_t d = 7;
        for (const auto &c : codewords(code)) {
            if (!c.is_zero()) {
                d = std::min(d, c.weight());
            }
        }
        EXPECT_GE(d, 3u);
        EXPECT_EQ(code.min_distance_exhaustive(), d);
    }
}

TEST(codes, gv_length_three_is_repetition) {
    // sum_{i <= 2} C(3, i) = 7 < 2^3, so r = 2 and the result is the
    // (3, 1) repetition code.
    EXPECT_EQ(gilbert_varshamov_redundancy(3, 1), 2u);
    LinearCode code = gilbert_varshamov_construct(3, 1, 0);
    EXPECT_EQ(code.dimension(), 1u);
    EXPECT_EQ(code.min_distance_exhaustive(), 3u);
}

TEST(codes, gv_infeasible) {
    // sum_{i <= 4} C(4, i) = 16 forces r = 4 = n.
    EXPECT_THROW(gilbert_varshamov_construct(4, 2, 0), std::invalid_argument);
}

TEST(codes, gv_rate_bound_all_small_codes) {
    for (size_t n = 4; n <= 24; n++) {
        for (size_t t = 1; 4 * t < n; t++) {
            LinearCode code;
            try {
                code = gilbert_varshamov_construct(n, t, n * 31 + t);
            } catch (const std::invalid_argument &) {
                continue;
            }
            double ratio = static_cast<double>(code.r()) / static_cast<double>(n);
            double cap = binary_entropy(2.0 * static_cast<double>(t) / static_cast<double>(n)) + 2.0 / n;
            EXPECT_LE(ratio, cap) << "n " << n << " t " << t;
            EXPECT_GE(code.min_distance_exhaustive(), 2 * t + 1) << "n " << n << " t " << t;
        }
    }
}

TEST(codes, syndrome_decode_zero_error) {
    LinearCode code = gilbert_varshamov_construct(7, 1, 5);
    for (const auto &c : codewords(code)) {
        EXPECT_EQ(syndrome_decode(c, gf2_matvec(code.parity_check(), c), code), c);
    }
}

TEST(codes, syndrome_decode_corrects_up_to_t_exhaustively) {
    for (size_t n : {7, 10, 12, 15}) {
        for (size_t t : {1, 2}) {
            LinearCode code;
            try {
                code = gilbert_varshamov_construct(n, t, 100 + n);
            } catch (const std::invalid_argument &) {
                continue;
            }
            const Gf2Matrix &h = code.parity_check();
            size_t checked = 0;
            for (const auto &x : codewords(code)) {
                // Syndromes of arbitrary cosets: shift by a fixed word.
                BitString shifted = x;
                shifted.flip(0);
                for (const auto &base : {x, shifted}) {
                    BitString s = gf2_matvec(h, base);
                    for (size_t w = 0; w <= code.t_max(); w++) {
                        for_each_pattern(n, w, [&](const BitString &e) {
                            BitString y = base;
                            y ^= e;
                            ASSERT_EQ(syndrome_decode(y, s, code), base) << "n " << n << " t " << t;
                            checked++;
                        });
                    }
                }
            }
            EXPECT_GT(checked, 0u);
        }
    }
}

TEST(codes, syndrome_decode_returns_minimal_distance_word) {
    // Beyond t_max the result need not be the sent word, but it must satisfy
    // the syndrome and be at minimum distance.
    LinearCode code = gilbert_varshamov_construct(7, 1, 3);
    auto words = codewords(code);
    BitString y = BitString::from_string("1100000");
    BitString s(code.r());
    BitString x = syndrome_decode(y, s, code);
    EXPECT_TRUE(gf2_matvec(code.parity_check(), x).is_zero());
    size_t best = 8;
    for (const auto &c : words) {
        best = std::min(best, c.distance(y));
    }
    EXPECT_EQ(x.distance(y), best);
}

TEST(codes, bch_corrects_random_errors) {
    LinearCode code = LinearCode::bch(200, 2);
    Rng rng(21);
    auto basis = code.generator_basis();
    for (int trial = 0; trial < 200; trial++) {
        BitString x(200);
        for (const auto &b : basis) {
            if (rng.bit()) {
                x ^= b;
            }
        }
        BitString y = x;
        size_t errors = rng.below(code.t_max() + 1);
        for (size_t i = 0; i < errors; i++) {
            y.flip(rng.below(200));
        }
        EXPECT_EQ(syndrome_decode(y, BitString(code.r()), code), x);
    }
}

TEST(codes, privacy_matrix_infeasible) {
    LinearCode code = gilbert_varshamov_construct(7, 1, 0);
    EXPECT_THROW(build_privacy_matrix(code.parity_check(), 2, 1, 0), std::invalid_argument);
}

TEST(codes, privacy_matrix_feasible_verified_by_enumeration) {
    Gf2Matrix f = Gf2Matrix::from_strings({}, 10);
    PrivacyAmplifier pa = build_privacy_matrix(f, 2, 5, 7);
    EXPECT_EQ(pa.m(), 5u);
    EXPECT_GE(brute_joint_weight(f, pa.k_matrix), 2u);
    EXPECT_EQ(brute_joint_weight(f, pa.k_matrix), joint_min_weight(f, pa.k_matrix));
}

TEST(codes, privacy_matrix_with_companion_code) {
    for (uint64_t seed = 0; seed < 5; seed++) {
        LinearCode code = gilbert_varshamov_construct(16, 1, seed);
        PrivacyAmplifier pa = build_privacy_matrix(code.parity_check(), 3, 2, seed);
        EXPECT_GE(brute_joint_weight(code.parity_check(), pa.k_matrix), 3u);
    }
}

TEST(codes, privacy_matrix_empty) {
    PrivacyAmplifier pa = build_privacy_matrix(Gf2Matrix::from_strings({"1100"}), 2, 0, 1);
    EXPECT_EQ(pa.m(), 0u);
}

TEST(codes, bch_extension_weight_certificate) {
    LinearCode code = LinearCode::bch(200, 2);
    PrivacyAmplifier pa = bch_privacy_extension(code, 3, 2);
    EXPECT_EQ(pa.m(), 3u);
    EXPECT_GE(joint_min_weight(code.parity_check(), pa.k_matrix), pa.d_w);
}

TEST(codes, binary_entropy_values) {
    EXPECT_EQ(binary_entropy(0), 0);
    EXPECT_EQ(binary_entropy(1), 0);
    EXPECT_NEAR(binary_entropy(0.5), 1, 1e-15);
    EXPECT_NEAR(binary_entropy(0.1), 0.468996, 1e-6);
    EXPECT_NEAR(binary_entropy(0.4), 0.970951, 1e-6);
}

TEST(codes, asymptotic_rate_examples) {
    EXPECT_NEAR(asymptotic_rate(0.05, 0, 0, 0), 1 - 2 * binary_entropy(0.1), 1e-15);
    EXPECT_NEAR(asymptotic_rate(0.05, 0, 0, 0), 0.062008, 1e-6);
    EXPECT_EQ(asymptotic_rate(0, 0, 0, 0), 1);
    EXPECT_NEAR(asymptotic_rate(0.05, 0, 0.01, 0.02), -0.053235, 1e-6);
    EXPECT_LT(asymptotic_rate(0.2, 0, 0, 0), 0);
    EXPECT_THROW(asymptotic_rate(0.6, 0, 0, 0), std::domain_error);
}

TEST(codes, binomial_sum_examples) {
    auto a = binomial_sum_bound_check(0.25, 8);
    EXPECT_EQ(a.exact_decimal, "37");
    EXPECT_NEAR(a.bound, std::pow(2.0, 8 * binary_entropy(0.25)), 1e-9);
    EXPECT_NEAR(a.bound, 89.90, 0.01);
    auto b = binomial_sum_bound_check(0.1, 20);
    EXPECT_EQ(b.exact_decimal, "211");
    EXPECT_NEAR(b.bound, std::pow(2.0, 20 * binary_entropy(0.1)), 1e-9);
    EXPECT_NEAR(b.bound, 666.2, 0.1);
    for (size_t n = 1; n <= 30; n++) {
        for (double mu : {0.05, 0.13, 0.25, 0.37, 0.49}) {
            EXPECT_TRUE(binomial_sum_bound_check(mu, n).holds);
        }
    }
    EXPECT_THROW(binomial_sum_bound_check(0.5, 8), std::domain_error);
}
