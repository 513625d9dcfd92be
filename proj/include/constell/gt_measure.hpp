#pragma once

// The sieve-weight pseudo-random measure nu_b built from truncated divisor
// sums, the modified von Mangoldt function it majorizes, and pattern weights
// w(S) with per-axis projection deduplication.

#include <cmath>
#include <set>
#include <vector>

#include "constell/numtheory.hpp"
#include "constell/simplex.hpp"

namespace constell {

struct MeasureParams {
    u64 n_cap = 0;  // N: nu_b lives on [0, N)
    WTrick wt;
    std::vector<u64> residues;  // b_k per coordinate axis, coprime to W
    double r_value = 0.0;       // truncation R > 1
    double eps1 = 0.2;          // window [eps1*N, eps2*N]
    double eps2 = 0.4;
};

// R rule presets. The source's default decays like N^(1/(d*2^(d+5))), which
// is barely above 1 at desk scale; window-sqrt keeps R well inside the window
// (eps1*N > R), the hypothesis the pointwise minorization needs.
inline double paper_default_r(u64 n_cap, int d) {
    return std::pow(static_cast<double>(n_cap), 1.0 / (d * std::pow(2.0, d + 5)));
}
inline double window_sqrt_r(u64 n_cap, double eps1 = 0.2) {
    return std::sqrt(eps1 * static_cast<double>(n_cap));
}

// phi(W)/W * log(Wn+b) when Wn+b is prime, else 0.
inline double mangoldt_bar(u64 n, const WTrick& wt, u64 b, const SieveContext& sieve) {
    if (b < 1 || b >= wt.w || std::gcd(b, wt.w) != 1)
        throw std::invalid_argument("residue b must lie in [1, W) and be coprime to W");
    u64 m = wt.w * n + b;
    if (m > sieve.limit()) throw std::out_of_range("sieve limit too small for W*n+b");
    if (!sieve.is_prime(m)) return 0.0;
    double ratio = static_cast<double>(wt.phi_w) / static_cast<double>(wt.w);
    return ratio * std::log(static_cast<double>(m));
}

// Lambda_R(m) = sum over squarefree d | m, d <= R of mu(d) log(R/d).
inline double gy_divisor_sum(u64 m, double r, const SieveContext& sieve) {
    if (m < 1) throw std::invalid_argument("gy_divisor_sum needs m >= 1");
    if (r <= 1.0) throw std::invalid_argument("gy_divisor_sum needs R > 1");
    std::vector<u64> ps = sieve.distinct_primes(m);
    double log_r = std::log(r);
    double total = 0.0;
    // DFS over squarefree divisors (subsets of distinct primes), pruned at R.
    // Primes ascend, so once prod*p exceeds R no deeper subset fits.
    std::vector<std::pair<size_t, std::pair<u64, int>>> stack;  // (next idx, (prod, sign))
    stack.push_back({0, {1, +1}});
    while (!stack.empty()) {
        auto [idx, ps_pair] = stack.back();
        stack.pop_back();
        auto [prod, sign] = ps_pair;
        total += sign * (log_r - std::log(static_cast<double>(prod)));
        for (size_t i = idx; i < ps.size(); ++i) {
            if (static_cast<double>(prod) * static_cast<double>(ps[i]) > r) break;
            stack.push_back({i + 1, {prod * ps[i], -sign}});
        }
    }
    return total;
}

class GreenTaoMeasure {
  public:
    static GreenTaoMeasure build(MeasureParams params, const SieveContext& sieve) {
        validate(params);
        u64 max_b = 0;
        for (u64 b : params.residues) max_b = std::max(max_b, b);
        if (params.wt.w * params.n_cap + max_b > sieve.limit())
            throw std::out_of_range("sieve limit too small for W*N+b");
        GreenTaoMeasure gm;
        gm.params_ = params;
        gm.stub_ = false;
        const u64 n = params.n_cap;
        const auto [lo, hi] = window_bounds(params);
        const double norm = static_cast<double>(params.wt.phi_w) /
                            static_cast<double>(params.wt.w) / std::log(params.r_value);
        gm.table_.assign(params.residues.size(), std::vector<double>(n, 1.0));
        for (size_t j = 0; j < params.residues.size(); ++j) {
            u64 b = params.residues[j];
            for (u64 i = lo; i <= hi && i < n; ++i) {
                double lam = gy_divisor_sum(params.wt.w * i + b, params.r_value, sieve);
                gm.table_[j][i] = norm * lam * lam;
            }
        }
        return gm;
    }

    // The all-ones stub: nu == 1 everywhere (unit-weight runs).
    static GreenTaoMeasure uniform(u64 n_cap, int d) {
        if (n_cap < 2 || d < 1) throw std::invalid_argument("stub measure needs N >= 2, d >= 1");
        GreenTaoMeasure gm;
        gm.params_.n_cap = n_cap;
        gm.params_.residues.assign(d, 1);
        gm.stub_ = true;
        gm.table_.assign(d, std::vector<double>(n_cap, 1.0));
        return gm;
    }

    static std::pair<u64, u64> window_bounds(const MeasureParams& p) {
        u64 lo = static_cast<u64>(std::ceil(p.eps1 * static_cast<double>(p.n_cap)));
        u64 hi = static_cast<u64>(std::floor(p.eps2 * static_cast<double>(p.n_cap)));
        return {lo, hi};
    }

    int dim() const { return static_cast<int>(table_.size()); }
    u64 n_cap() const { return params_.n_cap; }
    bool is_stub() const { return stub_; }
    const MeasureParams& params() const { return params_; }

    // nu_{b_axis}(n) for n in [0, N). Axis is 0-based.
    double nu(int axis, i64 n) const {
        return table_[static_cast<size_t>(axis)][static_cast<size_t>(n)];
    }

    const std::vector<double>& table(int axis) const { return table_[static_cast<size_t>(axis)]; }

  private:
    static void validate(const MeasureParams& p) {
        if (p.n_cap < 2) throw std::invalid_argument("measure needs N >= 2");
        if (p.residues.empty()) throw std::invalid_argument("measure needs at least one residue");
        if (!(p.r_value > 1.0)) throw std::invalid_argument("R must exceed 1");
        if (!(0.0 < p.eps1 && p.eps1 < p.eps2 && p.eps2 < 1.0))
            throw std::invalid_argument("window needs 0 < eps1 < eps2 < 1");
        for (u64 b : p.residues)
            if (b < 1 || b >= p.wt.w || std::gcd(b, p.wt.w) != 1)
                throw std::invalid_argument("residues must lie in [1, W) and be coprime to W");
    }

    MeasureParams params_;
    std::vector<std::vector<double>> table_;
    bool stub_ = false;
};

// w(S) = prod over axes k of prod over *distinct* projections y in pi_k(S)
// of nu_{b_k}(y). Points carry coordinates in [0, N).
inline double pattern_weight(const std::vector<std::vector<i64>>& points,
                             const GreenTaoMeasure& m) {
    if (points.empty()) throw std::invalid_argument("pattern_weight needs a nonempty set");
    const int d = m.dim();
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != d)
            throw std::invalid_argument("point dimension mismatch with measure");
        for (i64 c : p)
            if (c < 0 || c >= static_cast<i64>(m.n_cap()))
                throw std::out_of_range("point coordinate outside [0, N)");
    }
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
        std::set<i64> proj;
        for (const auto& p : points) proj.insert(p[k]);
        for (i64 y : proj) w *= m.nu(k, y);
    }
    return w;
}

}  // namespace constell
