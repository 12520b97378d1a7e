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
#include <optional>
#include <vector>

#include "qkdlab/bits.h"

namespace qkdlab {

/// GF(2^m) with log/antilog tables, 3 <= m <= 16.
class GaloisField {
   public:
    explicit GaloisField(unsigned m);

    unsigned m() const {
        return m_;
    }
    /// Multiplicative group order, 2^m - 1.
    uint32_t order() const {
        return order_;
    }
    uint32_t primitive_polynomial() const {
        return poly_;
    }
    /// alpha^k for any k >= 0.
    uint32_t alpha_pow(uint64_t k) const {
        return exp_[k % order_];
    }
    uint32_t mul(uint32_t a, uint32_t b) const {
        if (a == 0 || b == 0) {
            return 0;
        }
        return exp_[log_[a] + log_[b]];
    }
    uint32_t div(uint32_t a, uint32_t b) const;
    uint32_t log(uint32_t a) const {
        return log_[a];
    }

   private:
    unsigned m_;
    uint32_t order_;
    uint32_t poly_;
    std::vector<uint32_t> exp_;
    std::vector<uint32_t> log_;
};

/// Shortened primitive narrow-sense binary BCH code of length n correcting
/// t errors. Its parity check matrix is the set of linearly independent
/// bit-plane rows of alpha^(j i), j = 1, 3, ..., 2t - 1, i < n.
class BchCode {
   public:
    BchCode(size_t n, size_t t);

    size_t n() const {
        return n_;
    }
    size_t t() const {
        return t_;
    }
    const GaloisField &field() const {
        return field_;
    }
    const Gf2Matrix &parity_check() const {
        return parity_check_;
    }

    /// Error pattern e with weight <= t and F e = syndrome, or nullopt if
    /// the syndrome is not that of any correctable pattern.
    std::optional<BitString> locate_errors(const BitString &syndrome) const;

    /// The m bit-plane rows of alpha^(j i) over the first n columns.
    static std::vector<BitString> exponent_rows(const GaloisField &field, uint64_t j, size_t n);

   private:
    size_t n_;
    size_t t_;
    GaloisField field_;
    Gf2Matrix parity_check_;
    // Every full bit-plane row as a mask over the rows of parity_check_.
    std::vector<BitString> row_masks_;
};

/// Smallest m >= 3 with 2^m - 1 >= n.
unsigned bch_field_degree(size_t n);

/// Carlitz-Uchiyama lower bound on the weight of every nonzero word in the
/// span of the bit-plane rows for j = 1, 3, ..., 2 t_total - 1, shortened to
/// length n: 2^(m-1) - (t_total - 1) 2^(m/2) - (2^m - 1 - n). Returns 0 when
/// the bound is not applicable (2 t_total - 1 >= 2^ceil(m/2) + 1) or not
/// positive.
size_t carlitz_uchiyama_bound(unsigned m, size_t t_total, size_t n);

}  // namespace qkdlab
