#include "steinpair/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace steinpair {

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::uint64_t count, int workers,
                  const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
    const int w = std::min<std::uint64_t>(resolve_workers(workers), std::max<std::uint64_t>(count, 1));
    if (w <= 1 || count < 2) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w));
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::uint64_t chunk = (count + w - 1) / w;
    for (int t = 0; t < w; ++t) {
        const std::uint64_t lo = chunk * static_cast<std::uint64_t>(t);
        const std::uint64_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, lo, hi] {
            try {
                fn(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace steinpair
