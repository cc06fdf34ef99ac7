#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mapsynth {

// Clamps a requested worker count to [1, hardware_concurrency].
int effective_workers(int requested);

// Runs fn(0..n-1) across `workers` threads. Work is claimed through an
// atomic counter; callers that need deterministic output must write results
// into an index-addressed slot rather than appending.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, int workers, F fn) {
    std::vector<T> out(n);
    parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace mapsynth
