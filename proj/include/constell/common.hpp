#pragma once

// Shared small utilities: integer aliases, error types, compensated summation,
// a counter-based RNG (stateless per index, so parallel sampling stays
// reproducible), and a block-parallel driver whose reduction order does not
// depend on the thread count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace constell {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u32 = std::uint32_t;
using i128 = __int128;
using u128 = unsigned __int128;

// Thrown when a verified mathematical property fails (CLI exit code 2).
struct PropertyError : std::runtime_error {
    explicit PropertyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an exact enumeration would exceed the configured term budget.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Neumaier-compensated accumulator; cheap insurance for the long exact sums.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline u64 splitmix64(u64 z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based generator: draw i is a pure function of (seed, i). Monte Carlo
// loops index draws by sample, so partitioning across threads cannot change
// the stream.
class CounterRng {
  public:
    explicit CounterRng(u64 seed = 1) : seed_(seed) {}

    u64 raw(u64 counter) const { return splitmix64(seed_ + counter * 0x9e3779b97f4a7c15ULL); }

    // Uniform value in [0, n); Lemire-style mapping (bias < n / 2^64).
    u64 below(u64 counter, u64 n) const {
        return static_cast<u64>((static_cast<u128>(raw(counter)) * n) >> 64);
    }

    double unit(u64 counter) const { return (raw(counter) >> 11) * 0x1.0p-53; }

    u64 seed() const { return seed_; }

  private:
    u64 seed_;
};

inline int& default_threads() {
    static int n = 1;
    return n;
}

inline int resolve_threads(int requested) {
    int n = requested > 0 ? requested : default_threads();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return n > 0 ? n : 1;
}

// Runs fn(block) for block = 0..n_blocks-1. Callers keep per-block partial
// results and reduce sequentially afterwards, which makes exact-mode output
// independent of the thread count.
template <typename Fn>
void parallel_blocks(u64 n_blocks, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n_blocks <= 1) {
        for (u64 b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<u64> next{0};
    auto worker = [&] {
        for (;;) {
            u64 b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            fn(b);
        }
    };
    std::vector<std::thread> pool;
    int spawn = static_cast<int>(std::min<u64>(static_cast<u64>(threads), n_blocks));
    pool.reserve(spawn);
    for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

// Reduce value into [0, n). Works for any i64 input, n > 0.
inline i64 mod_reduce(i64 v, i64 n) {
    i64 r = v % n;
    return r < 0 ? r + n : r;
}

// n^k as double, for budget checks (overflow-free).
inline double pow_as_double(u64 n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= static_cast<double>(n);
    return r;
}

}  // namespace constell
