#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace entropytest {

// Worker count: ENTROPYTEST_THREADS caps parallelism, 0 or unset means one
// thread per hardware core.
inline size_t effective_threads() {
    size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("ENTROPYTEST_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<size_t>(v);
    }
    return hw;
}

// Counts i in [begin, end) with pred(i) true. The reduction is a sum of
// per-worker integer counts, so the result is independent of the worker count.
inline uint64_t parallel_count(uint64_t begin, uint64_t end,
                               const std::function<bool(uint64_t)>& pred) {
    const uint64_t total = end > begin ? end - begin : 0;
    if (total == 0) return 0;
    size_t workers = effective_threads();
    if (workers > total) workers = static_cast<size_t>(total);
    if (workers <= 1) {
        uint64_t count = 0;
        for (uint64_t i = begin; i < end; ++i)
            if (pred(i)) ++count;
        return count;
    }
    std::vector<uint64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            uint64_t count = 0;
            for (uint64_t i = begin + w; i < end; i += workers)
                if (pred(i)) ++count;
            partial[w] = count;
        });
    }
    for (auto& t : pool) t.join();
    uint64_t count = 0;
    for (uint64_t c : partial) count += c;
    return count;
}

// Runs fn(i) for i in [begin, end), striped across threads. Callers must make
// fn(i) independent of scheduling (write to slot i, or reduce integers after
// the join), so results do not depend on the worker count.
inline void parallel_for(size_t begin, size_t end, const std::function<void(size_t)>& fn) {
    const size_t total = end > begin ? end - begin : 0;
    if (total == 0) return;
    size_t workers = effective_threads();
    if (workers > total) workers = total;
    if (workers <= 1) {
        for (size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (size_t i = begin + w; i < end; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace entropytest
