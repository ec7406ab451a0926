#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace epibundle {

// Worker count: hardware concurrency capped by EPIBUNDLE_THREADS.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EPIBUNDLE_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

// Evaluates body(i) for i in [0,count) across workers. Each index writes its
// own slot, so callers reduce sequentially in index order afterwards and the
// result is bit-stable regardless of the worker count.
inline void parallel_for_index(std::size_t count,
                               const std::function<void(std::size_t)>& body) {
    unsigned workers = worker_count();
    if (workers <= 1 || count < 2 * workers) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([=, &body]() {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace epibundle
