#pragma once

// Estimator plumbing shared by every averaging operation: an exact/Monte-Carlo
// mode switch gated by a term budget, and a uniform result record.

#include <cmath>
#include <string>

#include "constell/common.hpp"

namespace constell {

enum class EvalMode { Exact, Mc, Auto };

inline EvalMode parse_eval_mode(const std::string& s) {
    if (s == "exact") return EvalMode::Exact;
    if (s == "mc") return EvalMode::Mc;
    if (s == "auto") return EvalMode::Auto;
    throw std::invalid_argument("unknown mode '" + s + "' (expected exact|mc|auto)");
}

struct EvalOptions {
    EvalMode mode = EvalMode::Auto;
    double budget = 2e9;  // max exact-mode term count (points x forms)
    u64 samples = 200000;
    u64 seed = 1;
    int threads = 0;  // 0 = default_threads()
};

struct EstimatorResult {
    double value = 0.0;
    std::string mode;  // "exact" or "mc"
    u64 samples = 0;   // exact: enumerated points; mc: sample count
    double std_error = 0.0;
    u64 seed = 0;  // 0 for exact mode
};

inline EstimatorResult exact_result(double value, u64 points) {
    return {value, "exact", points, 0.0, 0};
}

inline EstimatorResult mc_result(double sum, double sumsq, u64 n, u64 seed) {
    double mean = sum / static_cast<double>(n);
    double var = 0.0;
    if (n > 1) {
        var = (sumsq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
        if (var < 0) var = 0;  // fp noise on near-constant samples
    }
    return {mean, "mc", n, std::sqrt(var / static_cast<double>(n)), seed};
}

// Decide exact vs MC for a job of `terms` elementary evaluations.
inline bool use_exact(const EvalOptions& opts, double terms) {
    switch (opts.mode) {
        case EvalMode::Exact:
            if (terms > opts.budget)
                throw BudgetError("exact mode needs " + std::to_string(terms) +
                                  " terms, budget is " + std::to_string(opts.budget) +
                                  "; rerun with mode=mc or raise the budget");
            return true;
        case EvalMode::Mc:
            return false;
        case EvalMode::Auto:
            return terms <= opts.budget;
    }
    return true;
}

// Generic Monte Carlo average of fn(sample_index) over `samples` draws.
// fn must derive all randomness from the sample index (counter RNG).
template <typename Fn>
EstimatorResult mc_average(const EvalOptions& opts, Fn&& fn) {
    u64 n = opts.samples;
    if (n == 0) throw std::invalid_argument("mc sample count must be positive");
    int threads = resolve_threads(opts.threads);
    // Fixed block size: the reduction order (and thus the output bits) must
    // not depend on the thread count.
    const u64 per = 8192;
    u64 n_blocks = (n + per - 1) / per;
    std::vector<double> bsum(n_blocks), bsq(n_blocks);
    parallel_blocks(n_blocks, threads, [&](u64 b) {
        KahanSum s, s2;
        u64 lo = b * per, hi = std::min(n, lo + per);
        for (u64 i = lo; i < hi; ++i) {
            double v = fn(i);
            s.add(v);
            s2.add(v * v);
        }
        bsum[b] = s.value();
        bsq[b] = s2.value();
    });
    KahanSum s, s2;
    for (u64 b = 0; b < n_blocks; ++b) {
        s.add(bsum[b]);
        s2.add(bsq[b]);
    }
    return mc_result(s.value(), s2.value(), n, opts.seed);
}

}  // namespace constell
