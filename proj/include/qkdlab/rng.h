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

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace qkdlab {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based split: the seed of stream `stream_id` under `master`.
constexpr uint64_t derive_seed(uint64_t master, uint64_t stream_id) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream_id * 0xD1B54A32D192ED03ULL + 1));
}

/// Seeded random stream. All draws are implemented on top of raw 64-bit
/// engine output so results are identical across standard libraries.
class Rng {
   public:
    explicit Rng(uint64_t seed) : engine_(seed) {
    }

    static Rng stream(uint64_t master, uint64_t stream_id) {
        return Rng(derive_seed(master, stream_id));
    }

    uint64_t next() {
        return engine_();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bit() {
        return (engine_() >> 63) != 0;
    }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) {
            return 0;
        }
        uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        while (true) {
            uint64_t x = engine_();
            if (x < limit) {
                return x % bound;
            }
        }
    }

    double normal() {
        // Box-Muller; only used for generating random test matrices.
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) {
            u1 = 1e-300;
        }
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T> &items) {
        for (size_t i = items.size(); i > 1; i--) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace qkdlab
