#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace electorate {

inline int resolve_jobs(int jobs) noexcept {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(chunk_index) for every chunk on up to `jobs` threads. Chunks are
// independent units; callers that reduce must do so by chunk index so the
// result does not depend on scheduling.
template <typename Fn>
void parallel_for_chunks(std::size_t n_chunks, int jobs, Fn&& fn) {
    jobs = resolve_jobs(jobs);
    if (jobs <= 1 || n_chunks <= 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_chunks) return;
            fn(i);
        }
    };
    const std::size_t n_threads = std::min<std::size_t>(jobs, n_chunks);
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

}  // namespace electorate
