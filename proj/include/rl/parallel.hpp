#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace rl::par {

// Worker cap: min(RLAB_THREADS, hardware). Results of every kernel in this
// project are required to be bit-identical for any worker count, so all
// reductions go through fixed-size blocks that are combined in index order.
int max_threads();
void set_threads(int n);  // 0 = reset to env/default

inline constexpr std::int64_t kBlock = 1024;

// Serial reference implementations. The parallel kernels below must produce
// bit-identical results; tests compare them directly.
namespace serial {

template <class F>
double block_sum(std::int64_t n, F&& f) {
    double total = 0.0;
    for (std::int64_t b = 0; b * kBlock < n; ++b) {
        std::int64_t e = std::min(n, (b + 1) * kBlock);
        double part = 0.0;
        for (std::int64_t i = b * kBlock; i < e; ++i) part += f(i);
        total += part;
    }
    return total;
}

template <class F>
std::pair<double, std::int64_t> block_min(std::int64_t n, F&& f) {
    double best = HUGE_VAL;
    std::int64_t arg = -1;
    for (std::int64_t i = 0; i < n; ++i) {
        double v = f(i);
        if (v < best) { best = v; arg = i; }
    }
    return {best, arg};
}

}  // namespace serial

template <class F>
double block_sum(std::int64_t n, F&& f, bool parallel = true) {
    if (!parallel || n < 2 * kBlock) return serial::block_sum(n, f);
    std::int64_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> part((std::size_t)nblocks, 0.0);
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads())
    for (std::int64_t b = 0; b < nblocks; ++b) {
        std::int64_t e = std::min(n, (b + 1) * kBlock);
        double s = 0.0;
        for (std::int64_t i = b * kBlock; i < e; ++i) s += f(i);
        part[(std::size_t)b] = s;
    }
    double total = 0.0;
    for (double p : part) total += p;
    return total;
}

// Minimum of f over [0, n); ties broken toward the smaller index, so the
// result does not depend on scheduling.
template <class F>
std::pair<double, std::int64_t> block_min(std::int64_t n, F&& f, bool parallel = true) {
    if (!parallel || n < 2 * kBlock) return serial::block_min(n, f);
    std::int64_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<std::pair<double, std::int64_t>> part((std::size_t)nblocks, {HUGE_VAL, -1});
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads())
    for (std::int64_t b = 0; b < nblocks; ++b) {
        std::int64_t e = std::min(n, (b + 1) * kBlock);
        double best = HUGE_VAL;
        std::int64_t arg = -1;
        for (std::int64_t i = b * kBlock; i < e; ++i) {
            double v = f(i);
            if (v < best) { best = v; arg = i; }
        }
        part[(std::size_t)b] = {best, arg};
    }
    std::pair<double, std::int64_t> r{HUGE_VAL, -1};
    for (auto& p : part)
        if (p.second >= 0 && p.first < r.first) r = p;
    return r;
}

// Runs f(i) for i in [0, n). Each index is independent; output arrays are
// indexed by i so the result is scheduling-invariant.
template <class F>
void for_each(std::int64_t n, F&& f, bool parallel = true) {
    if (!parallel) {
        for (std::int64_t i = 0; i < n; ++i) f(i);
        return;
    }
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads())
    for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace rl::par
