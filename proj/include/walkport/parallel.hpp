#pragma once

#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <vector>

namespace walkport {

/// Worker cap for branch-parallel loops: WALKPORT_THREADS when set,
/// otherwise the hardware concurrency.
inline int max_threads() {
    if (const char* env = std::getenv("WALKPORT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Applies `fn` to every index in [0, count) and returns the results in
/// index order. Work items must be pure. Small batches run inline.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t count, Fn fn) {
    std::vector<Result> results(count);
    const int workers = std::min<int>(max_threads(), static_cast<int>((count + 7) / 8));
    if (workers <= 1 || count < 16) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < count; i += static_cast<std::size_t>(workers))
                results[i] = fn(i);
        }));
    }
    for (auto& f : futures) f.get();
    return results;
}

}  // namespace walkport
