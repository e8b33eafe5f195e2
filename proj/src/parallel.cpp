#include "natform/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace natform::par {

namespace {

std::atomic<int> g_threads{0};

int default_threads() {
    if (const char* env = std::getenv("NATCHECK_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

void set_threads(int n) { g_threads.store(n > 0 ? n : 0); }

int threads() {
    const int n = g_threads.load();
    return n > 0 ? n : default_threads();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int nt = threads();
    if (nt <= 1 || n < 2048) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    // Dynamic chunk scheduling; safe because every slot is written by exactly
    // one invocation and fn is pure in the slot index.
    const std::size_t chunk = std::max<std::size_t>(256, n / (8 * static_cast<std::size_t>(nt)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const std::size_t end = std::min(n, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nt - 1));
    for (int t = 0; t < nt - 1; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n <= 16) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace natform::par
