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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace qkdlab {

namespace {

using u128 = unsigned __int128;

std::string u128_to_string(u128 x) {
    if (x == 0) {
        return "0";
    }
    std::string out;
    while (x > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
        x /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

// sum_{i <= k} C(n, i) as long double (exact integers for n <= 126).
long double binomial_prefix_sum(size_t n, size_t k) {
    k = std::min(k, n);
    if (n <= 126) {
        u128 total = 0;
        u128 term = 1;
        for (size_t i = 0; i <= k; i++) {
            total += term;
            term = term * (n - i) / (i + 1);
        }
        return static_cast<long double>(total);
    }
    long double total = 0;
    for (size_t i = 0; i <= k; i++) {
        total += std::exp(std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(i) + 1) -
                          std::lgamma(static_cast<long double>(n - i) + 1));
    }
    return total;
}

// Calls f(pattern) for every n-bit pattern of weight <= w, n <= 64.
template <typename F>
void for_each_low_weight(size_t n, size_t w, F &&f) {
    std::vector<size_t> pos;
    auto rec = [&](auto &&self, size_t start, uint64_t pattern) -> void {
        f(pattern);
        if (pos.size() == w) {
            return;
        }
        for (size_t p = start; p < n; p++) {
            pos.push_back(p);
            self(self, p + 1, pattern | (uint64_t{1} << p));
            pos.pop_back();
        }
    };
    rec(rec, 0, 0);
}

}  // namespace

double binomial_coefficient(size_t n, size_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    double c = 1;
    for (size_t i = 0; i < k; i++) {
        c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return std::round(c);
}

LinearCode::LinearCode(Gf2Matrix parity_check, size_t t_max, bool verify_distance)
    : parity_check_(std::move(parity_check)), t_max_(t_max) {
    if (!parity_check_.has_independent_rows()) {
        throw std::invalid_argument("parity check matrix rows are not linearly independent");
    }
    if (verify_distance && n() <= kMinDistanceCap) {
        size_t d = min_distance_exhaustive();
        if (d < 2 * t_max_ + 1) {
            throw std::invalid_argument(
                "code has minimum distance " + std::to_string(d) + ", cannot correct " + std::to_string(t_max_) +
                " errors");
        }
    }
    build_decoder();
}

LinearCode LinearCode::bch(size_t n, size_t t) {
    LinearCode code;
    code.bch_ = std::make_shared<const BchCode>(n, t);
    code.parity_check_ = code.bch_->parity_check();
    code.t_max_ = t;
    code.construction_ = Construction::kBch;
    return code;
}

std::string LinearCode::construction_name() const {
    switch (construction_) {
        case Construction::kGilbertVarshamov:
            return "gv";
        case Construction::kBch:
            return "bch";
        default:
            return "explicit";
    }
}

void LinearCode::build_decoder() {
    size_t rr = r();
    if (rr <= kCosetTableMaxRedundancy && n() <= 64) {
        std::vector<uint64_t> cols(n(), 0);
        for (size_t i = 0; i < rr; i++) {
            for (size_t c = 0; c < n(); c++) {
                if (parity_check_.get(i, c)) {
                    cols[c] |= uint64_t{1} << i;
                }
            }
        }
        size_t total = size_t{1} << rr;
        std::vector<uint64_t> leaders(total, 0);
        std::vector<char> seen(total, 0);
        size_t filled = 0;
        // Increasing weight; within a weight, position sets in lexicographic order.
        auto rec = [&](auto &&self, size_t start, size_t remaining, uint64_t syn, uint64_t pattern) -> void {
            if (filled == total) {
                return;
            }
            if (remaining == 0) {
                if (!seen[syn]) {
                    seen[syn] = 1;
                    leaders[syn] = pattern;
                    filled++;
                }
                return;
            }
            for (size_t p = start; p + remaining <= n(); p++) {
                self(self, p + 1, remaining - 1, syn ^ cols[p], pattern | (uint64_t{1} << p));
                if (filled == total) {
                    return;
                }
            }
        };
        for (size_t w = 0; w <= n() && filled < total; w++) {
            rec(rec, 0, w, 0, 0);
        }
        leaders_ = std::make_shared<const std::vector<uint64_t>>(std::move(leaders));
        return;
    }
    columns_.assign(n(), BitString(rr));
    for (size_t i = 0; i < rr; i++) {
        for (size_t c = 0; c < n(); c++) {
            if (parity_check_.get(i, c)) {
                columns_[c].set(i, true);
            }
        }
    }
}

size_t LinearCode::min_distance_exhaustive() const {
    if (n() > kMinDistanceCap) {
        throw std::length_error(
            "exhaustive minimum distance is limited to n <= " + std::to_string(kMinDistanceCap));
    }
    auto basis = generator_basis();
    if (basis.empty()) {
        return n() + 1;
    }
    uint64_t word = 0;
    std::vector<uint64_t> rows;
    for (const auto &b : basis) {
        rows.push_back(b.to_uint());
    }
    size_t best = n() + 1;
    uint64_t count = uint64_t{1} << rows.size();
    for (uint64_t i = 1; i < count; i++) {
        word ^= rows[std::countr_zero(i)];
        best = std::min<size_t>(best, std::popcount(word));
    }
    return best;
}

BitString LinearCode::decode(const BitString &y, const BitString &s) const {
    return syndrome_decode(y, s, *this);
}

BitString syndrome_decode(const BitString &y, const BitString &s, const LinearCode &code) {
    if (y.size() != code.n()) {
        throw std::invalid_argument("syndrome_decode: received word has the wrong length");
    }
    if (s.size() != code.r()) {
        throw std::invalid_argument("syndrome_decode: syndrome has the wrong length");
    }
    BitString target = gf2_matvec(code.parity_check(), y) ^ s;
    if (target.is_zero()) {
        return y;
    }
    if (code.bch_) {
        auto e = code.bch_->locate_errors(target);
        return e ? y ^ *e : y;
    }
    if (code.leaders_) {
        return y ^ BitString::from_uint((*code.leaders_)[target.to_uint()], code.n());
    }
    // Bounded-weight search, lexicographic within each weight.
    size_t n = code.n();
    std::vector<size_t> chosen;
    BitString acc(code.r());
    auto rec = [&](auto &&self, size_t start, size_t remaining) -> bool {
        if (remaining == 0) {
            return acc == target;
        }
        for (size_t p = start; p + remaining <= n; p++) {
            acc ^= code.columns_[p];
            chosen.push_back(p);
            if (self(self, p + 1, remaining - 1)) {
                return true;
            }
            chosen.pop_back();
            acc ^= code.columns_[p];
        }
        return false;
    };
    for (size_t w = 1; w <= code.t_max(); w++) {
        chosen.clear();
        acc = BitString(code.r());
        if (rec(rec, 0, w)) {
            BitString x = y;
            for (auto p : chosen) {
                x.flip(p);
            }
            return x;
        }
    }
    return y;
}

size_t gilbert_varshamov_redundancy(size_t n, size_t t) {
    long double sphere = binomial_prefix_sum(n, 2 * t);
    size_t r = 0;
    while (std::ldexp(1.0L, static_cast<int>(r + 1)) <= sphere) {
        r++;
    }
    return r;
}

LinearCode gilbert_varshamov_construct(size_t n, size_t t, uint64_t seed) {
    if (n == 0 || t == 0) {
        throw std::invalid_argument("gilbert_varshamov_construct needs positive n and t");
    }
    size_t r = gilbert_varshamov_redundancy(n, t);
    if (r >= n) {
        throw std::invalid_argument(
            "Gilbert-Varshamov condition needs r = " + std::to_string(r) + " >= n = " + std::to_string(n) +
            "; no code of positive dimension corrects " + std::to_string(t) + " errors");
    }
    if (n > 64) {
        throw std::invalid_argument("gilbert_varshamov_construct supports n <= 64; use a BCH code above that");
    }
    size_t k = n - r;
    size_t reach = 2 * t;
    Rng rng(seed);
    std::vector<uint64_t> generators;
    if (n <= kMinDistanceCap) {
        // Mark every word within distance 2t of the current code; the next
        // generator is any unmarked word.
        std::vector<uint64_t> sphere;
        for_each_low_weight(n, reach, [&](uint64_t e) { sphere.push_back(e); });
        uint64_t space = uint64_t{1} << n;
        std::vector<uint64_t> marked((space + 63) / 64, 0);
        auto mark = [&](uint64_t c) {
            for (auto e : sphere) {
                uint64_t x = c ^ e;
                marked[x >> 6] |= uint64_t{1} << (x & 63);
            }
        };
        std::vector<uint64_t> code{0};
        mark(0);
        for (size_t i = 0; i < k; i++) {
            uint64_t start = rng.below(space);
            uint64_t pick = space;
            for (uint64_t step = 0; step < space; step++) {
                uint64_t x = (start + step) & (space - 1);
                if (!((marked[x >> 6] >> (x & 63)) & 1)) {
                    pick = x;
                    break;
                }
            }
            if (pick == space) {
                throw std::logic_error("Gilbert-Varshamov greedy step found no admissible vector");
            }
            generators.push_back(pick);
            size_t old = code.size();
            for (size_t c = 0; c < old; c++) {
                code.push_back(code[c] ^ pick);
                mark(code.back());
            }
        }
    } else {
        if (k > 20) {
            throw std::invalid_argument("gilbert_varshamov_construct above n = 24 needs n - r <= 20");
        }
        uint64_t mask = n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
        std::vector<uint64_t> code{0};
        for (size_t i = 0; i < k; i++) {
            bool found = false;
            for (int attempt = 0; attempt < (1 << 22) && !found; attempt++) {
                uint64_t x = rng.next() & mask;
                found = std::all_of(code.begin(), code.end(), [&](uint64_t c) {
                    return static_cast<size_t>(std::popcount(c ^ x)) > reach;
                });
                if (found) {
                    generators.push_back(x);
                    size_t old = code.size();
                    for (size_t c = 0; c < old; c++) {
                        code.push_back(code[c] ^ x);
                    }
                }
            }
            if (!found) {
                throw std::runtime_error("Gilbert-Varshamov random search exhausted its attempt budget");
            }
        }
    }
    Gf2Matrix g(n);
    for (auto v : generators) {
        g.add_row(BitString::from_uint(v, n));
    }
    Gf2Matrix h(n);
    for (auto &v : g.kernel_basis()) {
        h.add_row(std::move(v));
    }
    LinearCode code(std::move(h), t, true);
    code.construction_ = LinearCode::Construction::kGilbertVarshamov;
    return code;
}

size_t joint_min_weight(const Gf2Matrix &f, const Gf2Matrix &k) {
    if (f.cols() != k.cols()) {
        throw std::invalid_argument("joint_min_weight: F and K have different column counts");
    }
    size_t r = f.rows();
    size_t m = k.rows();
    if (m == 0) {
        throw std::invalid_argument("joint_min_weight: K has no rows");
    }
    if (r + m > kJointWeightCap) {
        throw std::length_error(
            "joint_min_weight: r + m = " + std::to_string(r + m) + " exceeds the enumeration cap of " +
            std::to_string(kJointWeightCap) + "; use the certified d_w from the PrivacyAmplifier construction");
    }
    Gf2Matrix stacked = Gf2Matrix::stack(f, k);
    if (!stacked.has_independent_rows()) {
        throw std::invalid_argument("joint_min_weight: rows of F and K are not linearly independent");
    }
    size_t n = f.cols();
    BitString word(n);
    size_t best = n + 1;
    size_t k_active = 0;
    std::vector<char> active(r + m, 0);
    uint64_t count = uint64_t{1} << (r + m);
    for (uint64_t i = 1; i < count; i++) {
        size_t bit = std::countr_zero(i);
        word ^= stacked.row(bit);
        active[bit] ^= 1;
        if (bit >= r) {
            k_active += active[bit] ? 1 : size_t(-1);
        }
        if (k_active > 0) {
            best = std::min(best, word.weight());
        }
    }
    return best;
}

PrivacyAmplifier build_privacy_matrix(const Gf2Matrix &f, size_t d_min, size_t m, uint64_t seed) {
    size_t n = f.cols();
    size_t r = f.rows();
    if (!f.has_independent_rows()) {
        throw std::invalid_argument("build_privacy_matrix: rows of F are not linearly independent");
    }
    PrivacyAmplifier out{Gf2Matrix(n), d_min, false, "coset-search"};
    if (m == 0) {
        return out;
    }
    if (d_min == 0) {
        throw std::invalid_argument("build_privacy_matrix: d_min must be positive");
    }
    long double rhs = binomial_prefix_sum(n, d_min - 1);
    long long exponent = static_cast<long long>(n) - static_cast<long long>(r) - static_cast<long long>(m) + 1;
    long double lhs = std::ldexp(1.0L, static_cast<int>(exponent));
    if (!(lhs > rhs)) {
        throw std::invalid_argument(
            "infeasible privacy amplification parameters: 2^(n-r-m+1) = " +
            std::to_string(static_cast<double>(lhs)) + " is not greater than sum_{i<d_min} C(n,i) = " +
            std::to_string(static_cast<double>(rhs)));
    }
    if (n > 64) {
        throw std::invalid_argument("build_privacy_matrix supports n <= 64; use bch_privacy_extension above that");
    }
    if (rhs > static_cast<long double>(1 << 22)) {
        throw std::length_error("build_privacy_matrix: low-weight set too large to enumerate");
    }
    std::vector<uint64_t> low;
    for_each_low_weight(n, d_min - 1, [&](uint64_t x) { low.push_back(x); });

    Rng rng(seed);
    Gf2Eliminator elim(n);
    for (size_t i = 0; i < r; i++) {
        elim.add(f.row(i));
    }
    for (size_t i = 0; i < m; i++) {
        std::unordered_set<uint64_t> hit;
        for (auto x : low) {
            hit.insert(elim.reduce(BitString::from_uint(x, n)).to_uint());
        }
        BitString chosen;
        for (int attempt = 0; attempt < 64 && chosen.empty(); attempt++) {
            BitString w = BitString::random(n, rng);
            BitString rep = elim.reduce(w);
            if (!rep.is_zero() && !hit.count(rep.to_uint())) {
                chosen = w;
            }
        }
        if (chosen.empty()) {
            // Coset representatives supported on the free coordinates.
            std::vector<char> is_pivot(n, 0);
            for (auto p : elim.pivots()) {
                is_pivot[p] = 1;
            }
            std::vector<size_t> free;
            for (size_t c = 0; c < n; c++) {
                if (!is_pivot[c]) {
                    free.push_back(c);
                }
            }
            for (uint64_t idx = 1; chosen.empty(); idx++) {
                BitString rep(n);
                for (size_t b = 0; b < free.size() && b < 64; b++) {
                    if ((idx >> b) & 1) {
                        rep.set(free[b], true);
                    }
                }
                if (!hit.count(rep.to_uint())) {
                    chosen = rep;
                }
            }
        }
        elim.add(chosen);
        out.k_matrix.add_row(std::move(chosen));
    }
    if (r + m <= kJointWeightCap) {
        out.d_w = joint_min_weight(f, out.k_matrix);
        out.d_w_exact = true;
        if (out.d_w < d_min) {
            throw std::logic_error("build_privacy_matrix produced a combination below d_min");
        }
    }
    return out;
}

PrivacyAmplifier bch_privacy_extension(const LinearCode &code, size_t m, size_t extra) {
    const BchCode *bch = code.bch_code();
    if (!bch) {
        throw std::invalid_argument("bch_privacy_extension needs a BCH code");
    }
    if (extra == 0) {
        throw std::invalid_argument("bch_privacy_extension needs at least one extra exponent");
    }
    size_t n = code.n();
    size_t t_total = bch->t() + extra;
    Gf2Eliminator elim(n);
    for (size_t i = 0; i < code.r(); i++) {
        elim.add(code.parity_check().row(i));
    }
    PrivacyAmplifier out{Gf2Matrix(n), 0, false, "bch-extension"};
    for (uint64_t j = 2 * bch->t() + 1; j < 2 * t_total && out.m() < m; j += 2) {
        for (auto &row : BchCode::exponent_rows(bch->field(), j, n)) {
            if (out.m() < m && elim.add(row)) {
                out.k_matrix.add_row(std::move(row));
            }
        }
    }
    if (out.m() < m) {
        throw std::invalid_argument(
            "bch_privacy_extension: only " + std::to_string(out.m()) + " independent rows available for m = " +
            std::to_string(m) + "; increase extra");
    }
    out.d_w = carlitz_uchiyama_bound(bch->field().m(), t_total, n);
    if (out.d_w == 0) {
        throw std::invalid_argument("bch_privacy_extension: Carlitz-Uchiyama bound is not applicable");
    }
    if (m > 0 && code.r() + m <= kJointWeightCap) {
        out.d_w = joint_min_weight(code.parity_check(), out.k_matrix);
        out.d_w_exact = true;
    }
    return out;
}

double binary_entropy(double x) {
    if (!(x >= 0 && x <= 1)) {
        throw std::domain_error("binary_entropy argument " + std::to_string(x) + " is outside [0, 1]");
    }
    if (x == 0 || x == 1) {
        return 0;
    }
    return -(x * std::log2(x) + (1 - x) * std::log2(1 - x));
}

RateTerms asymptotic_rate_terms(double delta_p, double eps, double beta_qp, double gamma_qp) {
    double a = 2 * (delta_p + eps);
    double b = 2 * (delta_p + beta_qp + 0.5 * gamma_qp + 1.5 * eps);
    if (!(a >= 0 && a <= 1 && b >= 0 && b <= 1)) {
        throw std::domain_error("parameters outside asymptotic regime");
    }
    RateTerms terms{0, binary_entropy(a), binary_entropy(b)};
    terms.rate = 1 - terms.correction_term - terms.privacy_term;
    return terms;
}

double asymptotic_rate(double delta_p, double eps, double beta_qp, double gamma_qp) {
    return asymptotic_rate_terms(delta_p, eps, beta_qp, gamma_qp).rate;
}

BinomialSumCheck binomial_sum_bound_check(double mu, size_t n) {
    if (!(mu > 0 && mu < 0.5)) {
        throw std::domain_error("binomial_sum_bound_check needs 0 < mu < 1/2");
    }
    if (n < 1 || n > 64) {
        throw std::domain_error("binomial_sum_bound_check needs 1 <= n <= 64");
    }
    size_t k_max = static_cast<size_t>(std::floor(mu * static_cast<double>(n) + 1e-9));
    u128 total = 0;
    u128 term = 1;
    for (size_t k = 0; k <= k_max; k++) {
        total += term;
        term = term * (n - k) / (k + 1);
    }
    BinomialSumCheck out;
    out.exact_decimal = u128_to_string(total);
    out.exact = static_cast<double>(total);
    out.bound = std::exp2(static_cast<double>(n) * binary_entropy(mu));
    out.holds = static_cast<long double>(total) <= static_cast<long double>(out.bound) * (1 + 1e-12L);
    return out;
}

}  // namespace qkdlab
