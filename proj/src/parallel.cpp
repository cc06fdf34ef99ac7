#include "mapsynth/parallel.hpp"

#include <atomic>
#include <thread>

namespace mapsynth {

int effective_workers(int requested) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (requested < 1) return 1;
    return requested < hw ? requested : hw;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    int w = effective_workers(workers);
    if (w == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
}

}  // namespace mapsynth
