#pragma once
#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace iet {

/* Deterministic trajectory-parallel driver.  Work is split into fixed-size
   blocks of consecutive trajectory indices; each block produces a Partial,
   and partials are merged strictly in block order after all threads finish.
   Because per-trajectory randomness comes from (seed, index) streams and the
   merge order is fixed, the result is bit-identical for any thread count. */
template <class Partial, class Work>
Partial run_blocks(long long total, int threads, long long block_size, Work work) {
    if (total <= 0) return Partial{};
    if (block_size <= 0) block_size = 1;
    const long long blocks = (total + block_size - 1) / block_size;
    if (threads < 1) threads = 1;
    if (static_cast<long long>(threads) > blocks) threads = static_cast<int>(blocks);

    std::vector<Partial> parts(static_cast<std::size_t>(blocks));
    std::atomic<long long> next{0};
    std::exception_ptr failure = nullptr;
    std::mutex failure_mu;

    auto body = [&]() {
        for (;;) {
            long long b = next.fetch_add(1);
            if (b >= blocks) return;
            long long lo = b * block_size;
            long long hi = std::min(total, lo + block_size);
            try {
                for (long long i = lo; i < hi; ++i)
                    work(i, parts[static_cast<std::size_t>(b)]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
                return;
            }
        }
    };

    if (threads == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    Partial out{};
    for (const Partial& p : parts) out.merge(p);
    return out;
}

} // namespace iet
