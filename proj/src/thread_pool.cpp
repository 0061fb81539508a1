#include "racer/thread_pool.hpp"

#include <algorithm>
#include <stdexcept>

namespace racer {

namespace {
std::atomic<int> g_threads{1};
}

int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void set_thread_count(int n) {
    if (n <= 0) n = hardware_threads();
    g_threads.store(n);
}

int thread_count() { return g_threads.load(); }

void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    chunks = std::min(chunks, n);
    if (chunks == 0) chunks = 1;
    const std::size_t per = (n + chunks - 1) / chunks;

    const int workers = std::min<int>(thread_count(), static_cast<int>(chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t b = c * per;
            fn(c, b, std::min(n, b + per));
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto body = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks || failed.load()) return;
            const std::size_t b = c * per;
            try {
                fn(c, b, std::min(n, b + per));
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace racer
