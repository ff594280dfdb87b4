#include "hdg/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace hdg {

namespace {
int g_threads = 1;
}

void set_threads(int n) {
    if (n == 0) n = static_cast<int>(std::thread::hardware_concurrency());
    g_threads = std::max(1, n);
}

int threads() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(g_threads), n);
    if (nw <= 1) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + nw - 1) / nw;
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

} // namespace hdg
