#pragma once

// Elementary number theory backing everything else: a linear sieve with
// primality / Mobius / totient / smallest-prime-factor tables, the W-trick
// context (primorial W, phi(W)), and prime counts along W n + b.

#include <numeric>
#include <vector>

#include "constell/common.hpp"

namespace constell {

class SieveContext {
  public:
    // Tables cover 0..limit inclusive. Memory is ~10 bytes per entry.
    static SieveContext build(u64 limit, u64 max_bytes = u64(2) << 30) {
        if (limit < 2) throw std::invalid_argument("sieve limit must be >= 2");
        if ((limit + 1) * 10 > max_bytes)
            throw std::invalid_argument("sieve of limit " + std::to_string(limit) +
                                        " exceeds memory bound");
        SieveContext s;
        s.limit_ = limit;
        u64 n = limit + 1;
        s.spf_.assign(n, 0);
        s.mobius_.assign(n, 0);
        s.phi_.assign(n, 0);
        s.mobius_[1] = 1;
        s.phi_[1] = 1;
        std::vector<u32> primes;
        for (u64 i = 2; i < n; ++i) {
            if (s.spf_[i] == 0) {
                s.spf_[i] = static_cast<u32>(i);
                s.mobius_[i] = -1;
                s.phi_[i] = static_cast<u32>(i - 1);
                primes.push_back(static_cast<u32>(i));
            }
            for (u32 p : primes) {
                if (p > s.spf_[i] || i * p >= n) break;
                u64 ip = i * p;
                s.spf_[ip] = p;
                if (i % p == 0) {
                    s.mobius_[ip] = 0;
                    s.phi_[ip] = s.phi_[i] * p;
                } else {
                    s.mobius_[ip] = static_cast<signed char>(-s.mobius_[i]);
                    s.phi_[ip] = s.phi_[i] * (p - 1);
                }
            }
        }
        return s;
    }

    u64 limit() const { return limit_; }

    bool is_prime(u64 n) const {
        check(n);
        return n >= 2 && spf_[n] == n;
    }
    int mobius(u64 n) const {
        check_pos(n);
        return mobius_[n];
    }
    u64 phi(u64 n) const {
        check_pos(n);
        return phi_[n];
    }
    u64 spf(u64 n) const {
        check_pos(n);
        if (n == 1) throw std::invalid_argument("spf(1) undefined");
        return spf_[n];
    }

    // Distinct prime factors of n, ascending.
    std::vector<u64> distinct_primes(u64 n) const {
        check_pos(n);
        std::vector<u64> ps;
        while (n > 1) {
            u64 p = spf_[n];
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
        return ps;
    }

  private:
    void check(u64 n) const {
        if (n > limit_) throw std::out_of_range("value exceeds sieve limit");
    }
    void check_pos(u64 n) const {
        check(n);
        if (n == 0) throw std::invalid_argument("argument must be positive");
    }

    u64 limit_ = 0;
    std::vector<u32> spf_;
    std::vector<signed char> mobius_;
    std::vector<u32> phi_;
};

struct WTrick {
    int omega = 0;  // primes up to omega enter W
    u64 w = 1;
    u64 phi_w = 1;
};

inline WTrick build_wtrick(int omega) {
    if (omega < 2) throw std::invalid_argument("omega must be >= 2");
    WTrick wt;
    wt.omega = omega;
    for (int p = 2; p <= omega; ++p) {
        bool prime = p >= 2;
        for (int q = 2; q * q <= p; ++q)
            if (p % q == 0) {
                prime = false;
                break;
            }
        if (!prime) continue;
        u64 next;
        if (__builtin_mul_overflow(wt.w, static_cast<u64>(p), &next))
            throw std::overflow_error("W overflows 64 bits at omega=" + std::to_string(omega));
        wt.w = next;
        wt.phi_w *= static_cast<u64>(p - 1);
    }
    return wt;
}

// Number of n in [1, n_cap] with W n + b prime.
inline u64 prime_count_in_progression(u64 n_cap, const WTrick& wt, u64 b,
                                      const SieveContext& sieve) {
    if (b < 1 || b >= wt.w || std::gcd(b, wt.w) != 1)
        throw std::invalid_argument("residue b must lie in [1, W) and be coprime to W");
    if (n_cap == 0) return 0;
    if (wt.w * n_cap + b > sieve.limit())
        throw std::out_of_range("sieve limit too small for W*n_cap+b");
    u64 count = 0;
    for (u64 n = 1; n <= n_cap; ++n)
        if (sieve.is_prime(wt.w * n + b)) ++count;
    return count;
}

}  // namespace constell
