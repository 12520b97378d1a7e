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

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qkdlab {

/// Worker count: QKDLAB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
size_t default_thread_count();

/// Evaluates f(0), ..., f(count - 1) on up to `threads` workers and returns
/// the results in index order. Results depend only on the index, so the
/// output is identical for every thread count. The first exception thrown
/// by any task is rethrown after all workers stop.
template <typename F>
auto parallel_map(size_t count, F &&f, size_t threads = 0) -> std::vector<decltype(f(size_t{0}))> {
    using R = decltype(f(size_t{0}));
    std::vector<R> out(count);
    if (threads == 0) {
        threads = default_thread_count();
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (size_t i = 0; i < count; i++) {
            out[i] = f(i);
        }
        return out;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; t++) {
        pool.emplace_back(worker);
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

}  // namespace qkdlab
