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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/rng.h"

namespace qkdlab {

/// Bit string over GF(2), packed into 64-bit words. Bits beyond size() in
/// the last word are always zero.
class BitString {
   public:
    BitString() = default;
    explicit BitString(size_t n) : n_(n), words_((n + 63) / 64) {
    }

    /// Parses "0110..." (position 0 first). Rejects other characters.
    static BitString from_string(std::string_view text);
    /// The low `n` bits of `value`, bit i at position i.
    static BitString from_uint(uint64_t value, size_t n);
    static BitString random(size_t n, Rng &rng);

    size_t size() const {
        return n_;
    }
    bool empty() const {
        return n_ == 0;
    }
    bool get(size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    void set(size_t i, bool value) {
        uint64_t mask = uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }
    void flip(size_t i) {
        words_[i >> 6] ^= uint64_t{1} << (i & 63);
    }
    void push_back(bool value);

    size_t weight() const;
    bool is_zero() const;
    /// Parity of the bitwise AND.
    bool dot(const BitString &other) const;
    /// Hamming distance.
    size_t distance(const BitString &other) const;
    /// Bits at the listed positions, in list order.
    BitString select(std::span<const size_t> positions) const;
    /// Low 64 bits as an integer (position 0 is the least significant bit).
    uint64_t to_uint() const;

    BitString &operator^=(const BitString &other);
    friend BitString operator^(BitString a, const BitString &b) {
        return a ^= b;
    }
    friend bool operator==(const BitString &a, const BitString &b) = default;
    /// Lexicographic on positions 0, 1, 2, ...
    friend bool operator<(const BitString &a, const BitString &b);

    std::span<const uint64_t> words() const {
        return words_;
    }
    std::string str() const;
    /// Length-prefixed hex: "<n>:<hex>", position 0 in the top bit of the
    /// first nibble.
    std::string to_hex() const;
    static BitString from_hex(std::string_view text);

   private:
    size_t n_ = 0;
    std::vector<uint64_t> words_;
};

/// Dense matrix over GF(2), stored as row bit strings.
class Gf2Matrix {
   public:
    Gf2Matrix() = default;
    explicit Gf2Matrix(size_t cols) : cols_(cols) {
    }
    Gf2Matrix(size_t rows, size_t cols) : cols_(cols), rows_(rows, BitString(cols)) {
    }

    static Gf2Matrix from_strings(const std::vector<std::string> &rows, size_t cols_if_empty = 0);
    static Gf2Matrix identity(size_t n);
    static Gf2Matrix random(size_t rows, size_t cols, Rng &rng);
    /// Rows of `top` followed by rows of `bottom`.
    static Gf2Matrix stack(const Gf2Matrix &top, const Gf2Matrix &bottom);

    size_t rows() const {
        return rows_.size();
    }
    size_t cols() const {
        return cols_;
    }
    const BitString &row(size_t i) const {
        return rows_[i];
    }
    BitString &row(size_t i) {
        return rows_[i];
    }
    bool get(size_t r, size_t c) const {
        return rows_[r].get(c);
    }
    void set(size_t r, size_t c, bool v) {
        rows_[r].set(c, v);
    }
    void add_row(BitString row);

    size_t rank() const;
    bool has_independent_rows() const {
        return rank() == rows();
    }
    /// Basis of {x : M x = 0}, one BitString per basis vector.
    std::vector<BitString> kernel_basis() const;
    /// XOR of the rows selected by `mask` (bit i selects row i).
    BitString combine(const BitString &mask) const;

    std::vector<std::string> to_strings() const;
    friend bool operator==(const Gf2Matrix &a, const Gf2Matrix &b) = default;

   private:
    size_t cols_ = 0;
    std::vector<BitString> rows_;
};

/// result[i] = XOR_j m[i,j] v[j].
BitString gf2_matvec(const Gf2Matrix &m, const BitString &v);

/// Incremental GF(2) row echelon basis. Tracks, for every accepted vector,
/// which original inputs it was built from.
class Gf2Eliminator {
   public:
    explicit Gf2Eliminator(size_t cols) : cols_(cols) {
    }
    /// Adds `v` if independent of the vectors so far. Returns true if added.
    bool add(const BitString &v);
    /// Expresses `v` over the accepted vectors, as a mask over acceptance
    /// order. Returns false if `v` is outside their span.
    bool express(const BitString &v, BitString &mask) const;
    /// Remainder of `v` after eliminating every pivot. Two vectors share a
    /// coset of the span iff their remainders are equal.
    BitString reduce(const BitString &v) const;
    size_t rank() const {
        return pivots_.size();
    }
    const std::vector<size_t> &pivots() const {
        return pivots_;
    }

   private:
    size_t cols_;
    std::vector<BitString> reduced_;
    std::vector<BitString> origin_;
    std::vector<size_t> pivots_;
};

}  // namespace qkdlab
