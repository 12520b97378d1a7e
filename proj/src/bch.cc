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

#include "qkdlab/bch.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdlab {

namespace {

constexpr uint32_t kPrimitivePolynomials[] = {
    0,      0,      0,      0xB,    0x13,   0x25,   0x43,   0x89,   0x11D,
    0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
};

}  // namespace

GaloisField::GaloisField(unsigned m) : m_(m) {
    if (m < 3 || m > 16) {
        throw std::invalid_argument("GaloisField degree must be in [3, 16], got " + std::to_string(m));
    }
    poly_ = kPrimitivePolynomials[m];
    order_ = (uint32_t{1} << m) - 1;
    exp_.assign(2 * order_, 0);
    log_.assign(order_ + 1, 0);
    uint32_t x = 1;
    for (uint32_t k = 0; k < order_; k++) {
        if (k > 0 && x == 1) {
            throw std::logic_error("polynomial for GF(2^" + std::to_string(m) + ") is not primitive");
        }
        exp_[k] = x;
        log_[x] = k;
        x <<= 1;
        if (x >> m) {
            x ^= poly_;
        }
    }
    if (x != 1) {
        throw std::logic_error("polynomial for GF(2^" + std::to_string(m) + ") is not primitive");
    }
    for (uint32_t k = order_; k < 2 * order_; k++) {
        exp_[k] = exp_[k - order_];
    }
}

uint32_t GaloisField::div(uint32_t a, uint32_t b) const {
    if (b == 0) {
        throw std::domain_error("division by zero in GF(2^m)");
    }
    if (a == 0) {
        return 0;
    }
    return exp_[log_[a] + order_ - log_[b]];
}

unsigned bch_field_degree(size_t n) {
    unsigned m = 3;
    while (((size_t{1} << m) - 1) < n) {
        m++;
    }
    return m;
}

std::vector<BitString> BchCode::exponent_rows(const GaloisField &field, uint64_t j, size_t n) {
    std::vector<BitString> rows(field.m(), BitString(n));
    for (size_t i = 0; i < n; i++) {
        uint32_t x = field.alpha_pow(j * i);
        for (unsigned b = 0; b < field.m(); b++) {
            if ((x >> b) & 1) {
                rows[b].set(i, true);
            }
        }
    }
    return rows;
}

BchCode::BchCode(size_t n, size_t t) : n_(n), t_(t), field_(bch_field_degree(n)), parity_check_(n) {
    if (n == 0 || t == 0) {
        throw std::invalid_argument("BCH code needs n >= 1 and t >= 1");
    }
    if (n > (size_t{1} << 16) - 1) {
        throw std::invalid_argument("BCH code length above 65535 is not supported");
    }
    std::vector<BitString> full;
    for (uint64_t j = 1; j < 2 * t; j += 2) {
        for (auto &row : exponent_rows(field_, j, n)) {
            full.push_back(std::move(row));
        }
    }
    Gf2Eliminator elim(n);
    for (const auto &row : full) {
        if (elim.add(row)) {
            parity_check_.add_row(row);
        }
    }
    if (parity_check_.rows() >= n) {
        throw std::invalid_argument(
            "BCH code with n=" + std::to_string(n) + ", t=" + std::to_string(t) + " has no information bits");
    }
    for (const auto &row : full) {
        BitString mask;
        elim.express(row, mask);
        row_masks_.push_back(std::move(mask));
    }
}

std::optional<BitString> BchCode::locate_errors(const BitString &syndrome) const {
    if (syndrome.size() != parity_check_.rows()) {
        throw std::invalid_argument("BCH syndrome length mismatch");
    }
    unsigned m = field_.m();
    // Odd-index power sums S_j = e(alpha^j) from the stored row combinations.
    std::vector<uint32_t> s(2 * t_ + 1, 0);
    for (size_t jj = 0; jj < t_; jj++) {
        uint32_t value = 0;
        for (unsigned b = 0; b < m; b++) {
            if (row_masks_[jj * m + b].dot(syndrome)) {
                value |= uint32_t{1} << b;
            }
        }
        s[2 * jj + 1] = value;
    }
    for (size_t j = 2; j <= 2 * t_; j += 2) {
        s[j] = field_.mul(s[j / 2], s[j / 2]);
    }

    // Berlekamp-Massey.
    std::vector<uint32_t> c{1}, b{1};
    size_t len = 0;
    size_t shift = 1;
    uint32_t last = 1;
    for (size_t i = 0; i < 2 * t_; i++) {
        uint32_t d = s[i + 1];
        for (size_t k = 1; k <= len && k < c.size(); k++) {
            d ^= field_.mul(c[k], s[i + 1 - k]);
        }
        if (d == 0) {
            shift++;
            continue;
        }
        uint32_t coef = field_.div(d, last);
        std::vector<uint32_t> next = c;
        if (next.size() < b.size() + shift) {
            next.resize(b.size() + shift, 0);
        }
        for (size_t k = 0; k < b.size(); k++) {
            next[k + shift] ^= field_.mul(coef, b[k]);
        }
        if (2 * len <= i) {
            b = c;
            len = i + 1 - len;
            last = d;
            shift = 1;
        } else {
            shift++;
        }
        c = std::move(next);
    }
    if (len > t_) {
        return std::nullopt;
    }

    // Chien search over the first n positions: root alpha^(-i) marks position i.
    BitString e(n_);
    size_t roots = 0;
    for (size_t i = 0; i < n_; i++) {
        uint32_t x_inv = field_.alpha_pow(field_.order() - (i % field_.order()));
        uint32_t acc = 0;
        uint32_t power = 1;
        for (size_t k = 0; k < c.size(); k++) {
            acc ^= field_.mul(c[k], power);
            power = field_.mul(power, x_inv);
        }
        if (acc == 0) {
            e.set(i, true);
            roots++;
        }
    }
    if (roots != len) {
        return std::nullopt;
    }
    if (gf2_matvec(parity_check_, e) != syndrome) {
        return std::nullopt;
    }
    return e;
}

size_t carlitz_uchiyama_bound(unsigned m, size_t t_total, size_t n) {
    double half_ceil = std::ldexp(1.0, static_cast<int>((m + 1) / 2));
    if (t_total == 0 || static_cast<double>(2 * t_total - 1) >= half_ceil + 1) {
        return 0;
    }
    double full = std::ldexp(1.0, static_cast<int>(m)) - 1;
    if (static_cast<double>(n) > full) {
        return 0;
    }
    double bound = std::ldexp(1.0, static_cast<int>(m) - 1) -
                   static_cast<double>(t_total - 1) * std::sqrt(std::ldexp(1.0, static_cast<int>(m))) -
                   (full - static_cast<double>(n));
    if (bound <= 0) {
        return 0;
    }
    return static_cast<size_t>(std::ceil(bound - 1e-9));
}

}  // namespace qkdlab
