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

#include "qkdlab/analysis.h"

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "qkdlab/config.h"

using namespace qkdlab;

namespace {

double log_binom_pmf(size_t n, size_t k, double p) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
           (n - k) * std::log1p(-p);
}

/// P(i_r + i_p >= threshold) by direct double summation.
double upper_tail_oracle(double p, double r, size_t n_r, size_t n_p, double threshold) {
    double total = 0;
    for (size_t i = 0; i <= n_r; i++) {
        for (size_t j = 0; j <= n_p; j++) {
            if (static_cast<double>(i + j) >= threshold - 1e-12) {
                total += std::exp(log_binom_pmf(n_r, i, r) + log_binom_pmf(n_p, j, p));
            }
        }
    }
    return total;
}

/// m = 3 key with a GV n = 16 code; the parameter checks are off.
ProtocolParams entropy_params() {
    Json j = {{"n", 16}, {"m", 3},         {"delta_p", 0.25},
              {"eps", 0.05}, {"lambda", 0.3}, {"eps_n", 2.0},
              {"code", {{"kind", "gv"}, {"t", 1}}}, {"amplifier", {{"kind", "coset"}, {"d_min", 2}}}};
    return protocol_from_json(j, ideal_bb84_source().certificate, 1);
}

}  // namespace

TEST(analysis, conditional_entropy_examples) {
    EXPECT_NEAR(conditional_entropy(JointDistribution({{0.25, 0.25}, {0.25, 0.25}})), 1, 1e-15);
    // Uniform 3-bit key independent of a skewed view.
    std::vector<std::vector<double>> table(8, {0.1 / 8, 0.9 / 8});
    EXPECT_NEAR(conditional_entropy(JointDistribution(table)), 3, 1e-12);
    // Key determined by the view.
    EXPECT_NEAR(conditional_entropy(JointDistribution({{0.3, 0}, {0, 0.7}})), 0, 1e-15);
    EXPECT_THROW(JointDistribution({{0.5, 0.6}}), std::invalid_argument);
}

TEST(analysis, tail_worked_example) {
    TailResult r = binomial_tail_bound(0.5, 0.5, 0.1, 10, 10);
    EXPECT_NEAR(r.bound, std::exp(-0.4), 1e-15);
    EXPECT_NEAR(r.bound, 0.67032, 1e-5);
    EXPECT_NEAR(r.exact, upper_tail_oracle(0.5, 0.5, 10, 10, 0.6 * 20), 1e-12);
    EXPECT_TRUE(r.holds);
}

TEST(analysis, tail_random_tuples_against_oracle) {
    Rng rng(17);
    for (int i = 0; i < 200; i++) {
        TailTuple t = random_tail_tuple(rng);
        TailResult r = binomial_tail_bound(t.p, t.r, t.t, t.n_r, t.n_p, t.side);
        EXPECT_TRUE(r.holds);
        double n = static_cast<double>(t.n_r + t.n_p);
        if (t.side == TailSide::kUpper) {
            EXPECT_NEAR(r.exact, upper_tail_oracle(t.p, t.r, t.n_r, t.n_p, (t.p + t.t) * n), 1e-12);
        } else {
            // Lower tail of successes is the upper tail of failures.
            EXPECT_NEAR(r.exact, upper_tail_oracle(1 - t.r, 1 - t.p, t.n_p, t.n_r, (1 - t.r + t.t) * n), 1e-12);
        }
        EXPECT_NEAR(r.bound, std::exp(-2 * t.t * t.t * n), 1e-15);
    }
}

TEST(analysis, tail_rejects_bad_ordering) {
    EXPECT_THROW(binomial_tail_bound(0.3, 0.5, 0.1, 5, 5), std::invalid_argument);
    EXPECT_THROW(binomial_tail_bound(0.5, 0.5, 0.6, 5, 5), std::invalid_argument);
    EXPECT_THROW(binomial_tail_bound(0.5, 0.5, 0.1, 30, 30), std::invalid_argument);
}

TEST(analysis, reliability_bound_values) {
    EXPECT_NEAR(reliability_bound(1000, 0.05, 0.05), std::exp(-0.046875), 1e-12);
    EXPECT_NEAR(reliability_bound(1000, 0.05, 0.05), 0.9542, 1e-4);
    double prev = 1;
    for (size_t n = 100; n <= 10000; n += 100) {
        double b = reliability_bound(n, 0.05, 0.05);
        EXPECT_LT(b, prev);
        prev = b;
    }
}

TEST(analysis, privacy_terms_formulae) {
    PrivacyTerms t = privacy_bookkeeping(100, 5, 0.3);
    double g = std::exp(-9.0) + std::exp(-4.5);
    EXPECT_NEAR(t.g, g, 1e-15);
    EXPECT_NEAR(t.g, 1.1232e-2, 1e-6);
    double h = 2 * std::pow(g, 0.25) + std::sqrt(g);
    EXPECT_NEAR(t.h, h, 1e-15);
    EXPECT_NEAR(t.p_bad, std::sqrt(g), 1e-15);
    double c = 5 + 1 / std::log(2.0);
    EXPECT_NEAR(t.eps1, 2 * c * h + 2 * std::sqrt(2 * c * 5 * h) + 5 * std::sqrt(g), 1e-12);
    EXPECT_NEAR(privacy_bookkeeping(100, 5, 0.3, 0.0).eps1, 2 * c * h + 2 * std::sqrt(2 * c * 5 * h), 1e-12);
}

TEST(analysis, eps1_halves_beyond_threshold) {
    auto eps1 = [](size_t n) { return privacy_bookkeeping(n, n / 20, 0.1).eps1; };
    for (size_t n = 2000; n <= 20000; n += 1000) {
        EXPECT_LT(eps1(2 * n), eps1(n)) << "n " << n;
    }
    auto threshold = q_threshold_n(0.05, 0.1);
    ASSERT_TRUE(threshold.has_value());
    EXPECT_GE(privacy_bookkeeping(*threshold, *threshold / 20, 0.1).q, 1);
    EXPECT_LT(privacy_bookkeeping(*threshold - 1, (*threshold - 1) / 20, 0.1).q, 1);
}

TEST(analysis, tensor_expectation_matches_explicit_product) {
    Rng rng(3);
    for (size_t k : {1, 2, 3, 4}) {
        std::vector<ComplexMatrix> f;
        for (size_t i = 0; i < k; i++) {
            f.push_back(random_density_matrix(2, rng).matrix());
        }
        ComplexMatrix full = f[0];
        for (size_t i = 1; i < k; i++) {
            full = tensor_product(full, f[i]);
        }
        ComplexMatrix y = random_hermitian(size_t{1} << k, rng);
        std::vector<const ComplexMatrix *> ptrs;
        for (const auto &m : f) {
            ptrs.push_back(&m);
        }
        EXPECT_NEAR(std::abs(tensor_expectation(y, ptrs) - trace_product(y, full)), 0, 1e-12);
    }
}

TEST(analysis, independence_worked_example) {
    CertifiedSource src = ideal_bb84_source();
    Gf2Matrix f = Gf2Matrix::from_strings({}, 3);
    Gf2Matrix k = Gf2Matrix::from_strings({"111"});
    BitString b = BitString::from_string("010");
    BitString h = BitString::from_string("110");
    Rng rng(5);
    ComplexMatrix x = random_supported_operator(src.certificate, b, h, 1, rng);
    IndependenceReport r = key_independence_check(f, k, src, b, h, 1, x);
    EXPECT_TRUE(r.hypothesis_ok);
    EXPECT_EQ(r.d_w, 3u);
    EXPECT_LT(r.max_spread, 1e-10);
    EXPECT_TRUE(r.passed);
}

TEST(analysis, independence_zero_operator) {
    CertifiedSource src = ideal_bb84_source();
    IndependenceReport r =
        key_independence_check(Gf2Matrix::from_strings({}, 3), Gf2Matrix::from_strings({"111"}), src,
                               BitString::from_string("000"), BitString::from_string("000"), 1, ComplexMatrix(8));
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.max_spread, 0);
}

TEST(analysis, independence_quasiperfect_source) {
    CertifiedSource src = build_from_distributions(AngularDistribution::uniform(0.02, 0.1),
                                                   AngularDistribution::truncated_cosine(0.8, 0.15));
    BitString b = BitString::from_string("101");
    BitString h = BitString::from_string("011");
    Rng rng(6);
    ComplexMatrix x = random_supported_operator(src.certificate, b, h, 1, rng);
    IndependenceReport r = key_independence_check(Gf2Matrix::from_strings({}, 3), Gf2Matrix::from_strings({"111"}),
                                                  src, b, h, 1, x);
    EXPECT_TRUE(r.hypothesis_ok) << r.note;
    EXPECT_LT(r.max_spread, 1e-9);
}

TEST(analysis, independence_flags_wide_support) {
    // The identity touches every P~^j, so the hypothesis fails and the
    // report says so instead of claiming independence fails.
    CertifiedSource src = ideal_bb84_source();
    IndependenceReport r = key_independence_check(
        Gf2Matrix::from_strings({}, 3), Gf2Matrix::from_strings({"111"}), src, BitString::from_string("000"),
        BitString::from_string("000"), 1, ComplexMatrix::identity(8));
    EXPECT_FALSE(r.hypothesis_ok);
    EXPECT_FALSE(r.passed);
}

TEST(analysis, small_sphere_extremes) {
    CertifiedSource src = ideal_bb84_source();
    BitString b = BitString::from_string("0110");
    BitString h = BitString::from_string("1010");
    std::vector<size_t> sk = {0, 2, 3};
    MeasurementOperator all = small_sphere_projector(src.certificate, b, h, sk, 0);
    EXPECT_LT((all.matrix() - ComplexMatrix::identity(16)).max_abs(), 1e-12);
    MeasurementOperator none = small_sphere_projector(src.certificate, b, h, sk, 4);
    EXPECT_LT(none.matrix().max_abs(), 1e-12);
}

TEST(analysis, small_sphere_matches_direct_sum) {
    CertifiedSource src = ideal_bb84_source();
    BitString b = BitString::from_string("011");
    BitString h = BitString::from_string("110");
    std::vector<size_t> sk = {0, 1, 2};
    ComplexMatrix direct(8);
    for (uint64_t w = 0; w < 8; w++) {
        BitString word = BitString::from_uint(w, 3);
        if (word.distance(h) >= 2) {
            direct += product_projector(src.certificate, b, word);
        }
    }
    EXPECT_LT((small_sphere_projector(src.certificate, b, h, sk, 2).matrix() - direct).max_abs(), 1e-12);
}

TEST(analysis, entropy_no_attack_is_full) {
    ProtocolParams p = entropy_params();
    SessionOptions relaxed{false};
    EntropyReport r =
        entropy_vs_bound_experiment(p, ideal_bb84_source(), {}, AttackStrategy::none(), 4000, 3, relaxed);
    EXPECT_NEAR(r.empirical, 3, r.band);
    EXPECT_TRUE(r.passed);
}

TEST(analysis, entropy_all_aborted_is_uniform) {
    // An always-inverting channel aborts every session with a random key.
    ProtocolParams p = entropy_params();
    SessionOptions relaxed{false};
    EntropyReport r = entropy_vs_bound_experiment(p, ideal_bb84_source(), ChannelModel{0, 0, 1},
                                                  AttackStrategy::none(), 4000, 4, relaxed);
    EXPECT_EQ(r.completed, 0u);
    EXPECT_NEAR(r.empirical, 3, r.band);
}

TEST(analysis, product_guess_single_position) {
    BoundReport r = product_guess_experiment(ideal_state(0, 0), ideal_state(1, 0), 1, 100000, 8);
    EXPECT_NEAR(r.empirical, 0.853553, 0.005);
    EXPECT_TRUE(r.passed);
}

TEST(analysis, session_seeds_distinct) {
    std::set<uint64_t> seen;
    for (size_t i = 0; i < 1000; i++) {
        seen.insert(session_seed(42, i));
    }
    EXPECT_EQ(seen.size(), 1000u);
}
