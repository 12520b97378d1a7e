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

#include "qkdlab/bits.h"

#include <stdexcept>

namespace qkdlab {

BitString BitString::from_string(std::string_view text) {
    BitString out(text.size());
    for (size_t i = 0; i < text.size(); i++) {
        if (text[i] == '1') {
            out.set(i, true);
        } else if (text[i] != '0') {
            throw std::invalid_argument("bit string may only contain '0' and '1': \"" + std::string(text) + "\"");
        }
    }
    return out;
}

BitString BitString::from_uint(uint64_t value, size_t n) {
    if (n > 64) {
        throw std::invalid_argument("from_uint supports at most 64 bits");
    }
    BitString out(n);
    if (n > 0) {
        out.words_[0] = n == 64 ? value : value & ((uint64_t{1} << n) - 1);
    }
    return out;
}

BitString BitString::random(size_t n, Rng &rng) {
    BitString out(n);
    for (auto &w : out.words_) {
        w = rng.next();
    }
    if (n & 63) {
        out.words_.back() &= (uint64_t{1} << (n & 63)) - 1;
    }
    return out;
}

void BitString::push_back(bool value) {
    if ((n_ & 63) == 0) {
        words_.push_back(0);
    }
    n_++;
    set(n_ - 1, value);
}

size_t BitString::weight() const {
    size_t w = 0;
    for (auto x : words_) {
        w += std::popcount(x);
    }
    return w;
}

bool BitString::is_zero() const {
    for (auto x : words_) {
        if (x) {
            return false;
        }
    }
    return true;
}

bool BitString::dot(const BitString &other) const {
    if (other.n_ != n_) {
        throw std::invalid_argument("BitString::dot length mismatch");
    }
    uint64_t acc = 0;
    for (size_t k = 0; k < words_.size(); k++) {
        acc ^= words_[k] & other.words_[k];
    }
    return std::popcount(acc) & 1;
}

size_t BitString::distance(const BitString &other) const {
    if (other.n_ != n_) {
        throw std::invalid_argument("BitString::distance length mismatch");
    }
    size_t d = 0;
    for (size_t k = 0; k < words_.size(); k++) {
        d += std::popcount(words_[k] ^ other.words_[k]);
    }
    return d;
}

BitString BitString::select(std::span<const size_t> positions) const {
    BitString out(positions.size());
    for (size_t i = 0; i < positions.size(); i++) {
        if (positions[i] >= n_) {
            throw std::out_of_range("BitString::select position out of range");
        }
        if (get(positions[i])) {
            out.set(i, true);
        }
    }
    return out;
}

uint64_t BitString::to_uint() const {
    return words_.empty() ? 0 : words_[0];
}

BitString &BitString::operator^=(const BitString &other) {
    if (other.n_ != n_) {
        throw std::invalid_argument("BitString xor length mismatch");
    }
    for (size_t k = 0; k < words_.size(); k++) {
        words_[k] ^= other.words_[k];
    }
    return *this;
}

bool operator<(const BitString &a, const BitString &b) {
    size_t n = std::min(a.n_, b.n_);
    for (size_t i = 0; i < n; i++) {
        if (a.get(i) != b.get(i)) {
            return b.get(i);
        }
    }
    return a.n_ < b.n_;
}

std::string BitString::str() const {
    std::string out(n_, '0');
    for (size_t i = 0; i < n_; i++) {
        if (get(i)) {
            out[i] = '1';
        }
    }
    return out;
}

std::string BitString::to_hex() const {
    static const char *digits = "0123456789abcdef";
    std::string out = std::to_string(n_) + ":";
    for (size_t i = 0; i < n_; i += 4) {
        int nibble = 0;
        for (size_t k = 0; k < 4; k++) {
            nibble <<= 1;
            if (i + k < n_ && get(i + k)) {
                nibble |= 1;
            }
        }
        out.push_back(digits[nibble]);
    }
    return out;
}

BitString BitString::from_hex(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("hex bit string needs a '<length>:' prefix");
    }
    size_t n = std::stoul(std::string(text.substr(0, colon)));
    auto hex = text.substr(colon + 1);
    if (hex.size() != (n + 3) / 4) {
        throw std::invalid_argument("hex bit string has the wrong number of digits");
    }
    BitString out(n);
    for (size_t d = 0; d < hex.size(); d++) {
        char c = hex[d];
        int nibble;
        if (c >= '0' && c <= '9') {
            nibble = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            nibble = c - 'a' + 10;
        } else {
            throw std::invalid_argument("invalid hex digit");
        }
        for (size_t k = 0; k < 4; k++) {
            size_t i = d * 4 + k;
            bool bit = (nibble >> (3 - k)) & 1;
            if (i < n) {
                out.set(i, bit);
            } else if (bit) {
                throw std::invalid_argument("hex bit string has bits set past its length");
            }
        }
    }
    return out;
}

Gf2Matrix Gf2Matrix::from_strings(const std::vector<std::string> &rows, size_t cols_if_empty) {
    Gf2Matrix m(rows.empty() ? cols_if_empty : rows.front().size());
    for (const auto &r : rows) {
        m.add_row(BitString::from_string(r));
    }
    return m;
}

Gf2Matrix Gf2Matrix::identity(size_t n) {
    Gf2Matrix m(n, n);
    for (size_t i = 0; i < n; i++) {
        m.set(i, i, true);
    }
    return m;
}

Gf2Matrix Gf2Matrix::random(size_t rows, size_t cols, Rng &rng) {
    Gf2Matrix m(cols);
    for (size_t i = 0; i < rows; i++) {
        m.add_row(BitString::random(cols, rng));
    }
    return m;
}

Gf2Matrix Gf2Matrix::stack(const Gf2Matrix &top, const Gf2Matrix &bottom) {
    if (top.cols() != bottom.cols()) {
        throw std::invalid_argument("Gf2Matrix::stack column mismatch");
    }
    Gf2Matrix out = top;
    for (const auto &r : bottom.rows_) {
        out.add_row(r);
    }
    return out;
}

void Gf2Matrix::add_row(BitString row) {
    if (row.size() != cols_) {
        throw std::invalid_argument(
            "row has " + std::to_string(row.size()) + " bits, matrix has " + std::to_string(cols_) + " columns");
    }
    rows_.push_back(std::move(row));
}

size_t Gf2Matrix::rank() const {
    Gf2Eliminator e(cols_);
    for (const auto &r : rows_) {
        e.add(r);
    }
    return e.rank();
}

std::vector<BitString> Gf2Matrix::kernel_basis() const {
    // Reduced row echelon form, then one basis vector per free column.
    std::vector<BitString> work = rows_;
    std::vector<size_t> pivot_cols;
    size_t rank = 0;
    for (size_t c = 0; c < cols_ && rank < work.size(); c++) {
        size_t sel = rank;
        while (sel < work.size() && !work[sel].get(c)) {
            sel++;
        }
        if (sel == work.size()) {
            continue;
        }
        std::swap(work[rank], work[sel]);
        for (size_t i = 0; i < work.size(); i++) {
            if (i != rank && work[i].get(c)) {
                work[i] ^= work[rank];
            }
        }
        pivot_cols.push_back(c);
        rank++;
    }
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivot_cols) {
        is_pivot[c] = true;
    }
    std::vector<BitString> basis;
    for (size_t f = 0; f < cols_; f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitString v(cols_);
        v.set(f, true);
        for (size_t i = 0; i < rank; i++) {
            if (work[i].get(f)) {
                v.set(pivot_cols[i], true);
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

BitString Gf2Matrix::combine(const BitString &mask) const {
    BitString out(cols_);
    for (size_t i = 0; i < rows_.size(); i++) {
        if (mask.get(i)) {
            out ^= rows_[i];
        }
    }
    return out;
}

std::vector<std::string> Gf2Matrix::to_strings() const {
    std::vector<std::string> out;
    for (const auto &r : rows_) {
        out.push_back(r.str());
    }
    return out;
}

BitString gf2_matvec(const Gf2Matrix &m, const BitString &v) {
    if (m.cols() != v.size()) {
        throw std::invalid_argument(
            "gf2_matvec: matrix has " + std::to_string(m.cols()) + " columns, vector has " +
            std::to_string(v.size()) + " bits");
    }
    BitString out(m.rows());
    for (size_t i = 0; i < m.rows(); i++) {
        if (m.row(i).dot(v)) {
            out.set(i, true);
        }
    }
    return out;
}

bool Gf2Eliminator::add(const BitString &v) {
    if (v.size() != cols_) {
        throw std::invalid_argument("Gf2Eliminator: length mismatch");
    }
    BitString r = v;
    BitString origin(pivots_.size() + 1);
    for (size_t k = 0; k < reduced_.size(); k++) {
        if (r.get(pivots_[k])) {
            r ^= reduced_[k];
            for (size_t i = 0; i < origin_[k].size(); i++) {
                if (origin_[k].get(i)) {
                    origin.flip(i);
                }
            }
        }
    }
    if (r.is_zero()) {
        return false;
    }
    size_t pivot = 0;
    while (!r.get(pivot)) {
        pivot++;
    }
    origin.set(pivots_.size(), !origin.get(pivots_.size()));
    for (auto &o : origin_) {
        o.push_back(false);
    }
    reduced_.push_back(std::move(r));
    origin_.push_back(std::move(origin));
    pivots_.push_back(pivot);
    return true;
}

BitString Gf2Eliminator::reduce(const BitString &v) const {
    BitString r = v;
    for (size_t k = 0; k < reduced_.size(); k++) {
        if (r.get(pivots_[k])) {
            r ^= reduced_[k];
        }
    }
    return r;
}

bool Gf2Eliminator::express(const BitString &v, BitString &mask) const {
    if (v.size() != cols_) {
        throw std::invalid_argument("Gf2Eliminator: length mismatch");
    }
    BitString r = v;
    mask = BitString(pivots_.size());
    for (size_t k = 0; k < reduced_.size(); k++) {
        if (r.get(pivots_[k])) {
            r ^= reduced_[k];
            mask ^= origin_[k];
        }
    }
    return r.is_zero();
}

}  // namespace qkdlab
