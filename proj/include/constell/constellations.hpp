#pragma once

// Affine copies x + t*F of a finite integer pattern: exact counting in
// subsets of [1,N]^d against the N^{d+1} (log N)^{-l} scale, the weighted
// cyclic average over Z_N^d that ties prime constellations to the hypergraph
// measures, residue-class pigeonhole rescaling, wraparound unwrapping, and
// scaling tables across a range of N.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "constell/estimator.hpp"
#include "constell/gt_measure.hpp"
#include "constell/simplex_forms.hpp"

namespace constell {

// A finite set of distinct points in Z^d; unlike a simplex it may have any
// cardinality and may be degenerate.
struct PatternSet {
    int dim = 0;
    std::vector<std::vector<i64>> points;

    static PatternSet make(std::vector<std::vector<i64>> pts) {
        if (pts.empty()) throw std::invalid_argument("pattern needs at least one point");
        PatternSet f;
        f.dim = static_cast<int>(pts[0].size());
        if (f.dim < 1) throw std::invalid_argument("pattern points need >= 1 coordinate");
        for (const auto& p : pts)
            if (static_cast<int>(p.size()) != f.dim)
                throw std::invalid_argument("pattern points have mixed dimensions");
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                if (pts[i] == pts[j])
                    throw std::invalid_argument("pattern points must be distinct");
        f.points = std::move(pts);
        return f;
    }

    static PatternSet parse(const std::string& text) { return make(parse_points(text)); }

    static PatternSet from_simplex(const Simplex& s) {
        PatternSet f;
        f.dim = s.dim;
        f.points = s.verts;
        return f;
    }
};

// l for the predicted scale; 0 when the pattern is not a nondegenerate simplex.
inline int pattern_l(const PatternSet& f) {
    if (static_cast<int>(f.points.size()) != f.dim + 1) return 0;
    try {
        return l_delta(make_simplex(f.points));
    } catch (const std::exception&) {
        return 0;
    }
}

// Membership oracle over integer points with coordinates in [0, side]: a
// dense byte table for dim <= 2 (within a cell cap), a hash set otherwise.
class PointSet {
  public:
    PointSet(int dim, i64 side) : dim_(dim), side_(side) {
        if (dim < 1) throw std::invalid_argument("point set dimension must be >= 1");
        if (side < 0) throw std::invalid_argument("point set side must be >= 0");
        strides_.assign(static_cast<size_t>(dim), 0);
        u64 cells = 1;
        const u64 span = static_cast<u64>(side) + 1;
        for (int k = 0; k < dim; ++k) {
            strides_[static_cast<size_t>(k)] = cells;
            if (cells > (u64(1) << 62) / span)
                throw std::invalid_argument("point set domain exceeds the key space");
            cells *= span;
        }
        cells_ = cells;
        dense_ = dim <= 2 && cells <= (u64(1) << 28);
        if (dense_) bits_.assign(cells, 0);
    }

    // every point with all coordinates in [lo, side]
    static PointSet cube(int dim, i64 lo, i64 side) {
        PointSet s(dim, side);
        if (lo < 0 || lo > side) throw std::invalid_argument("cube needs 0 <= lo <= side");
        if (!s.dense_ && pow_as_double(static_cast<u64>(side - lo) + 1, dim) > 1e8)
            throw std::invalid_argument("cube too large to tabulate");
        std::vector<i64> p(static_cast<size_t>(dim), lo);
        for (;;) {
            s.insert(p);
            int pos = 0;
            while (pos < dim) {
                if (++p[static_cast<size_t>(pos)] <= side) break;
                p[static_cast<size_t>(pos)] = lo;
                ++pos;
            }
            if (pos == dim) break;
        }
        return s;
    }

    // d-tuples with every coordinate a prime in [min_value, side]
    static PointSet primes(int dim, i64 side, const SieveContext& sieve, i64 min_value = 2) {
        if (dim > 2) throw std::invalid_argument("prime tuple sets are tabulated for d <= 2");
        if (static_cast<u64>(side) > sieve.limit())
            throw std::out_of_range("sieve limit too small for the requested side");
        PointSet s(dim, side);
        std::vector<i64> ps;
        for (i64 v = std::max<i64>(2, min_value); v <= side; ++v)
            if (sieve.is_prime(static_cast<u64>(v))) ps.push_back(v);
        if (dim == 1) {
            for (i64 v : ps) s.insert({v});
        } else {
            for (i64 a : ps)
                for (i64 b : ps) s.insert({a, b});
        }
        return s;
    }

    // {x in [0, n_count) ^ d : W x_k + b_k prime for every k}
    static PointSet window_primes(int dim, i64 n_count, const WTrick& wt,
                                  const std::vector<u64>& b, const SieveContext& sieve) {
        if (dim > 2) throw std::invalid_argument("prime tuple sets are tabulated for d <= 2");
        if (static_cast<int>(b.size()) != dim)
            throw std::invalid_argument("one residue per coordinate required");
        if (n_count < 1) throw std::invalid_argument("n_count must be >= 1");
        PointSet s(dim, n_count - 1);
        std::vector<std::vector<i64>> cols(static_cast<size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            const u64 bk = b[static_cast<size_t>(k)];
            if (bk < 1 || bk >= wt.w || std::gcd(bk, wt.w) != 1)
                throw std::invalid_argument("residue must lie in [1, W) and be coprime to W");
            if (wt.w * static_cast<u64>(n_count - 1) + bk > sieve.limit())
                throw std::out_of_range("sieve limit too small for W*n+b");
            for (i64 x = 0; x < n_count; ++x)
                if (sieve.is_prime(wt.w * static_cast<u64>(x) + bk))
                    cols[static_cast<size_t>(k)].push_back(x);
        }
        if (dim == 1) {
            for (i64 x : cols[0]) s.insert({x});
        } else {
            for (i64 a : cols[0])
                for (i64 c : cols[1]) s.insert({a, c});
        }
        return s;
    }

    int dim() const { return dim_; }
    i64 side() const { return side_; }
    u64 size() const { return count_; }
    bool is_dense() const { return dense_; }
    const std::vector<char>& dense_bits() const { return bits_; }
    u64 stride(int k) const { return strides_[static_cast<size_t>(k)]; }

    u64 key_of(const std::vector<i64>& p) const {
        u64 key = 0;
        for (int k = 0; k < dim_; ++k)
            key += static_cast<u64>(p[static_cast<size_t>(k)]) * strides_[static_cast<size_t>(k)];
        return key;
    }

    void insert(const std::vector<i64>& p) {
        check_point(p);
        const u64 key = key_of(p);
        if (dense_) {
            if (!bits_[key]) {
                bits_[key] = 1;
                ++count_;
            }
        } else if (hash_.insert(key).second) {
            ++count_;
        }
    }

    bool contains(const std::vector<i64>& p) const {
        if (static_cast<int>(p.size()) != dim_) return false;
        for (i64 c : p)
            if (c < 0 || c > side_) return false;
        const u64 key = key_of(p);
        return dense_ ? bits_[key] != 0 : hash_.count(key) != 0;
    }

    // visits members in ascending key order (deterministic for both layouts)
    template <typename Fn>
    void for_each(Fn&& fn) const {
        std::vector<i64> p(static_cast<size_t>(dim_), 0);
        if (dense_) {
            for (u64 key = 0; key < cells_; ++key) {
                if (!bits_[key]) continue;
                decode(key, p);
                fn(p);
            }
        } else {
            std::vector<u64> keys(hash_.begin(), hash_.end());
            std::sort(keys.begin(), keys.end());
            for (u64 key : keys) {
                decode(key, p);
                fn(p);
            }
        }
    }

  private:
    void check_point(const std::vector<i64>& p) const {
        if (static_cast<int>(p.size()) != dim_)
            throw std::invalid_argument("point dimension mismatch");
        for (i64 c : p)
            if (c < 0 || c > side_) throw std::out_of_range("point coordinate outside [0, side]");
    }

    void decode(u64 key, std::vector<i64>& p) const {
        const u64 span = static_cast<u64>(side_) + 1;
        for (int k = 0; k < dim_; ++k) {
            p[static_cast<size_t>(k)] = static_cast<i64>(key % span);
            key /= span;
        }
    }

    int dim_ = 0;
    i64 side_ = 0;
    u64 cells_ = 0;
    u64 count_ = 0;
    bool dense_ = false;
    std::vector<u64> strides_;
    std::vector<char> bits_;
    std::unordered_set<u64> hash_;
};

struct CountReport {
    i64 n_cap = 0;
    u64 total_pairs = 0;
    u64 trivial_pairs = 0;  // degenerate images: t = 0 with >= 2 points, or a 1-point pattern
    int l_value = 0;        // 0 when the pattern is not a nondegenerate simplex
    double predicted_scale = 0.0;  // N^{d+1} (log N)^{-l}
    double ratio = 0.0;            // total_pairs / predicted_scale
    i64 t_min = 0, t_max = -1;     // enumerated dilation range (empty when t_max < t_min)
    bool complete = true;          // false when the term budget cut the scan short
};

namespace detail {

// x-box for dilation t: max(1, 1 - t*mn_k) <= x_k <= min(n, n - t*mx_k)
inline bool t_box(i64 t, i64 n, const std::vector<i64>& mn, const std::vector<i64>& mx,
                  std::vector<i64>& lo, std::vector<i64>& hi) {
    const int d = static_cast<int>(mn.size());
    for (int k = 0; k < d; ++k) {
        lo[static_cast<size_t>(k)] = std::max<i64>(1, 1 - t * mn[static_cast<size_t>(k)]);
        hi[static_cast<size_t>(k)] = std::min<i64>(n, n - t * mx[static_cast<size_t>(k)]);
        if (lo[static_cast<size_t>(k)] > hi[static_cast<size_t>(k)]) return false;
    }
    return true;
}

}  // namespace detail

// Exact enumeration of pairs (x, t) with x in [1,N]^d, t >= 1 (or t >= 0 when
// t_positive is false) and every point of x + t*F inside A. A one-point
// pattern F = {y} caps t at N; with y = 0 this counts the documented N*N
// vacuous pairs.
inline CountReport count_affine_copies(const PatternSet& f, const PointSet& a, i64 n_cap,
                                       bool t_positive = true, u64 budget = 0,
                                       int threads = 0) {
    if (a.dim() != f.dim) throw std::invalid_argument("pattern and set dimensions differ");
    if (n_cap < 2) throw std::invalid_argument("N must be >= 2");
    if (a.side() < n_cap) throw std::invalid_argument("set domain must cover [1, N]");
    const int d = f.dim;
    const size_t npts = f.points.size();

    std::vector<i64> mn(static_cast<size_t>(d)), mx(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) {
        mn[static_cast<size_t>(k)] = mx[static_cast<size_t>(k)] = f.points[0][static_cast<size_t>(k)];
        for (const auto& p : f.points) {
            mn[static_cast<size_t>(k)] = std::min(mn[static_cast<size_t>(k)], p[static_cast<size_t>(k)]);
            mx[static_cast<size_t>(k)] = std::max(mx[static_cast<size_t>(k)], p[static_cast<size_t>(k)]);
        }
    }
    i64 reach = 0;  // largest per-axis displacement magnitude
    for (int k = 0; k < d; ++k)
        reach = std::max({reach, mx[static_cast<size_t>(k)], -mn[static_cast<size_t>(k)]});

    CountReport rep;
    rep.n_cap = n_cap;
    rep.l_value = pattern_l(f);
    if (rep.l_value > 0)
        rep.predicted_scale = pow_as_double(static_cast<u64>(n_cap), d + 1) *
                              std::pow(std::log(static_cast<double>(n_cap)),
                                       -static_cast<double>(rep.l_value));
    rep.t_min = t_positive ? 1 : 0;
    rep.t_max = reach == 0 ? n_cap : (n_cap - 1) / reach;
    if (rep.t_max < rep.t_min) return rep;

    // cost-driven budget cut, decided before any enumeration
    std::vector<i64> lo(static_cast<size_t>(d)), hi(static_cast<size_t>(d));
    if (budget > 0) {
        double spent = 0.0;
        i64 t = rep.t_min;
        for (; t <= rep.t_max; ++t) {
            double c = 0.0;
            if (detail::t_box(t, n_cap, mn, mx, lo, hi)) {
                c = 1.0;
                for (int k = 0; k < d; ++k)
                    c *= static_cast<double>(hi[static_cast<size_t>(k)] -
                                             lo[static_cast<size_t>(k)] + 1);
            }
            if (spent + c > static_cast<double>(budget)) break;
            spent += c;
        }
        if (t <= rep.t_max) {
            rep.complete = false;
            rep.t_max = t - 1;
            if (rep.t_max < rep.t_min) return rep;
        }
    }

    const u64 n_ts = static_cast<u64>(rep.t_max - rep.t_min + 1);
    std::vector<u64> per_t(n_ts, 0);
    parallel_blocks(n_ts, threads, [&](u64 blk) {
        const i64 t = rep.t_min + static_cast<i64>(blk);
        std::vector<i64> blo(static_cast<size_t>(d)), bhi(static_cast<size_t>(d));
        if (!detail::t_box(t, n_cap, mn, mx, blo, bhi)) return;
        u64 cnt = 0;
        if (a.is_dense()) {
            const char* bits = a.dense_bits().data();
            std::vector<i64> offs(npts);
            for (size_t j = 0; j < npts; ++j) {
                i64 o = 0;
                for (int k = 0; k < d; ++k)
                    o += t * f.points[j][static_cast<size_t>(k)] *
                         static_cast<i64>(a.stride(k));
                offs[j] = o;
            }
            std::vector<i64> x(blo);
            for (;;) {
                i64 base = 0;
                for (int k = 1; k < d; ++k)
                    base += x[static_cast<size_t>(k)] * static_cast<i64>(a.stride(k));
                for (i64 x0 = blo[0]; x0 <= bhi[0]; ++x0) {
                    const i64 key = base + x0;
                    bool all = true;
                    for (size_t j = 0; j < npts; ++j)
                        if (!bits[key + offs[j]]) {
                            all = false;
                            break;
                        }
                    cnt += all;
                }
                int pos = 1;
                while (pos < d) {
                    if (++x[static_cast<size_t>(pos)] <= bhi[static_cast<size_t>(pos)]) break;
                    x[static_cast<size_t>(pos)] = blo[static_cast<size_t>(pos)];
                    ++pos;
                }
                if (pos >= d) break;
            }
        } else {
            std::vector<i64> x(blo), pt(static_cast<size_t>(d));
            for (;;) {
                bool all = true;
                for (size_t j = 0; j < npts && all; ++j) {
                    for (int k = 0; k < d; ++k)
                        pt[static_cast<size_t>(k)] =
                            x[static_cast<size_t>(k)] + t * f.points[j][static_cast<size_t>(k)];
                    all = a.contains(pt);
                }
                cnt += all;
                int pos = 0;
                while (pos < d) {
                    if (++x[static_cast<size_t>(pos)] <= bhi[static_cast<size_t>(pos)]) break;
                    x[static_cast<size_t>(pos)] = blo[static_cast<size_t>(pos)];
                    ++pos;
                }
                if (pos == d) break;
            }
        }
        per_t[blk] = cnt;
    });

    for (u64 b = 0; b < n_ts; ++b) rep.total_pairs += per_t[b];
    if (npts == 1)
        rep.trivial_pairs = rep.total_pairs;
    else if (rep.t_min == 0)
        rep.trivial_pairs = per_t[0];
    if (rep.predicted_scale > 0)
        rep.ratio = static_cast<double>(rep.total_pairs) / rep.predicted_scale;
    return rep;
}

// E_{y in Z_N^d, t in Z_N} (prod_j 1_A(y + t v_j)) w(y + t Delta), with the
// weight evaluated through per-axis deduplicated vertex values so it matches
// the hypergraph-side form product identically (collision pairs such as t = 0
// follow the form convention).
inline EstimatorResult weighted_simplex_average(const PointSet& a, const Simplex& delta,
                                                const GreenTaoMeasure& m,
                                                const EvalOptions& opts = {}) {
    const int d = delta.dim;
    if (m.dim() != d) throw std::invalid_argument("measure dimension != simplex dimension");
    const i64 n = static_cast<i64>(m.n_cap());
    if (a.dim() != d || a.side() != n - 1)
        throw std::invalid_argument("set must live on Z_N^d (coordinates in [0, N))");
    if (!detail::is_prime_trial(n))
        throw std::invalid_argument("the cyclic average needs a prime modulus N");

    std::vector<std::vector<i64>> vm(delta.verts.size(), std::vector<i64>(static_cast<size_t>(d)));
    for (size_t j = 0; j < delta.verts.size(); ++j)
        for (int k = 0; k < d; ++k)
            vm[j][static_cast<size_t>(k)] = mod_reduce(delta.verts[j][static_cast<size_t>(k)], n);
    std::vector<std::vector<i64>> dvals(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) {
        std::set<i64> s;
        for (const auto& v : vm) s.insert(v[static_cast<size_t>(k)]);
        dvals[static_cast<size_t>(k)].assign(s.begin(), s.end());
    }
    int l = 0;
    for (const auto& v : dvals) l += static_cast<int>(v.size());

    const auto term = [&](const std::vector<i64>& y, i64 t, std::vector<i64>& pt) -> double {
        for (const auto& v : vm) {
            for (int k = 0; k < d; ++k)
                pt[static_cast<size_t>(k)] =
                    (y[static_cast<size_t>(k)] + t * v[static_cast<size_t>(k)]) % n;
            if (!a.contains(pt)) return 0.0;
        }
        double w = 1.0;
        for (int k = 0; k < d; ++k)
            for (i64 v : dvals[static_cast<size_t>(k)])
                w *= m.nu(k, (y[static_cast<size_t>(k)] + t * v) % n);
        return w;
    };

    const double terms =
        pow_as_double(static_cast<u64>(n), d + 1) * static_cast<double>(d + 1 + l);
    if (use_exact(opts, terms)) {
        std::vector<double> part(static_cast<size_t>(n), 0.0);
        parallel_blocks(static_cast<u64>(n), opts.threads, [&](u64 tb) {
            const i64 t = static_cast<i64>(tb);
            KahanSum s;
            std::vector<i64> y(static_cast<size_t>(d), 0), pt(static_cast<size_t>(d));
            for (;;) {
                s.add(term(y, t, pt));
                int pos = 0;
                while (pos < d) {
                    if (++y[static_cast<size_t>(pos)] < n) break;
                    y[static_cast<size_t>(pos)] = 0;
                    ++pos;
                }
                if (pos == d) break;
            }
            part[tb] = s.value();
        });
        KahanSum s;
        for (i64 t = 0; t < n; ++t) s.add(part[static_cast<size_t>(t)]);
        return exact_result(s.value() / pow_as_double(static_cast<u64>(n), d + 1),
                            static_cast<u64>(pow_as_double(static_cast<u64>(n), d + 1)));
    }
    CounterRng rng(opts.seed);
    return mc_average(opts, [&](u64 i) {
        std::vector<i64> y(static_cast<size_t>(d)), pt(static_cast<size_t>(d));
        for (int k = 0; k < d; ++k)
            y[static_cast<size_t>(k)] =
                static_cast<i64>(rng.below(i * static_cast<u64>(d + 1) + static_cast<u64>(k),
                                           static_cast<u64>(n)));
        const i64 t = static_cast<i64>(
            rng.below(i * static_cast<u64>(d + 1) + static_cast<u64>(d), static_cast<u64>(n)));
        return term(y, t, pt);
    });
}

// E_{y in Z_N^d} 1_A(y) prod_k nu_k(y_k)
inline EstimatorResult weighted_density(const PointSet& a, const GreenTaoMeasure& m,
                                        const EvalOptions& opts = {}) {
    const int d = m.dim();
    const i64 n = static_cast<i64>(m.n_cap());
    if (a.dim() != d || a.side() != n - 1)
        throw std::invalid_argument("set must live on Z_N^d (coordinates in [0, N))");
    const double terms = pow_as_double(static_cast<u64>(n), d) * static_cast<double>(d);
    const auto term = [&](const std::vector<i64>& y) -> double {
        if (!a.contains(y)) return 0.0;
        double w = 1.0;
        for (int k = 0; k < d; ++k) w *= m.nu(k, y[static_cast<size_t>(k)]);
        return w;
    };
    if (use_exact(opts, terms)) {
        std::vector<double> part(static_cast<size_t>(n), 0.0);
        parallel_blocks(static_cast<u64>(n), opts.threads, [&](u64 lb) {
            KahanSum s;
            std::vector<i64> y(static_cast<size_t>(d), 0);
            y[static_cast<size_t>(d - 1)] = static_cast<i64>(lb);
            for (;;) {
                s.add(term(y));
                int pos = 0;
                while (pos < d - 1) {
                    if (++y[static_cast<size_t>(pos)] < n) break;
                    y[static_cast<size_t>(pos)] = 0;
                    ++pos;
                }
                if (pos == d - 1) break;
            }
            part[lb] = s.value();
        });
        KahanSum s;
        for (i64 b = 0; b < n; ++b) s.add(part[static_cast<size_t>(b)]);
        return exact_result(s.value() / pow_as_double(static_cast<u64>(n), d),
                            static_cast<u64>(pow_as_double(static_cast<u64>(n), d)));
    }
    CounterRng rng(opts.seed);
    return mc_average(opts, [&](u64 i) {
        std::vector<i64> y(static_cast<size_t>(d));
        for (int k = 0; k < d; ++k)
            y[static_cast<size_t>(k)] = static_cast<i64>(
                rng.below(i * static_cast<u64>(d) + static_cast<u64>(k), static_cast<u64>(n)));
        return term(y);
    });
}

struct PigeonholeReport {
    std::vector<u64> b;      // chosen residue per coordinate (coprime to W)
    u64 captured = 0;        // |A ∩ (W Z^d + b)|
    u64 coprime_total = 0;   // members of A with every residue coprime to W
    u64 classes = 1;         // phi(W)^d
    double average = 0.0;    // coprime_total / classes; captured >= ceil(average)
    i64 n1 = 0;              // rescaled side: m in [1, n1] maps to W(m-1)+b
    PointSet a1{1, 0};       // {m : W(m-1)+b in A}
};

inline PigeonholeReport pigeonhole_residue(const PointSet& a, const WTrick& wt) {
    const int d = a.dim();
    const i64 w = static_cast<i64>(wt.w);
    if (w < 2) throw std::invalid_argument("W must be >= 2");

    std::vector<i64> cop;  // coprime residues in [1, W)
    for (i64 r = 1; r < w; ++r)
        if (std::gcd(r, w) == 1) cop.push_back(r);
    std::vector<i64> cop_index(static_cast<size_t>(w), -1);
    for (size_t i = 0; i < cop.size(); ++i) cop_index[static_cast<size_t>(cop[i])] = static_cast<i64>(i);

    u64 classes = 1;
    for (int k = 0; k < d; ++k) classes *= cop.size();
    std::vector<u64> hist(classes, 0);
    u64 coprime_total = 0;
    a.for_each([&](const std::vector<i64>& p) {
        u64 idx = 0, mul = 1;
        for (int k = 0; k < d; ++k) {
            const i64 r = p[static_cast<size_t>(k)] % w;
            const i64 ci = cop_index[static_cast<size_t>(r)];
            if (ci < 0) return;
            idx += static_cast<u64>(ci) * mul;
            mul *= cop.size();
        }
        ++hist[idx];
        ++coprime_total;
    });

    u64 best_idx = 0;
    for (u64 i = 1; i < classes; ++i)
        if (hist[i] > hist[best_idx]) best_idx = i;  // ties keep the lex-smallest b

    PigeonholeReport rep;
    rep.classes = classes;
    rep.coprime_total = coprime_total;
    rep.captured = hist[best_idx];
    rep.average = static_cast<double>(coprime_total) / static_cast<double>(classes);
    rep.b.resize(static_cast<size_t>(d));
    u64 rem = best_idx;
    for (int k = 0; k < d; ++k) {
        rep.b[static_cast<size_t>(k)] = static_cast<u64>(cop[rem % cop.size()]);
        rem /= cop.size();
    }

    i64 n1 = (a.side() - static_cast<i64>(rep.b[0])) / w + 1;
    for (int k = 1; k < d; ++k)
        n1 = std::min(n1, (a.side() - static_cast<i64>(rep.b[static_cast<size_t>(k)])) / w + 1);
    rep.n1 = std::max<i64>(n1, 0);
    rep.a1 = PointSet(d, std::max<i64>(rep.n1, 1));
    if (rep.n1 > 0) {
        std::vector<i64> mpt(static_cast<size_t>(d));
        a.for_each([&](const std::vector<i64>& p) {
            for (int k = 0; k < d; ++k) {
                const i64 off = p[static_cast<size_t>(k)] - static_cast<i64>(rep.b[static_cast<size_t>(k)]);
                if (off < 0 || off % w != 0) return;
                mpt[static_cast<size_t>(k)] = off / w + 1;
                if (mpt[static_cast<size_t>(k)] > rep.n1) return;
            }
            rep.a1.insert(mpt);
        });
    }
    return rep;
}

struct UnwrapResult {
    bool ok = false;
    i64 t_lift = 0;
    std::vector<std::vector<i64>> points;  // the integer copy when ok
};

// Wraparound dichotomy: a copy of Delta inside a box of Z_N unwraps to a
// genuine integer copy with dilation t or t - N. Failure is reported, not
// thrown: it marks a box too large for the dichotomy.
inline UnwrapResult unwrap_copy(const std::vector<i64>& x, i64 t, const Simplex& delta, i64 lo,
                                i64 hi, i64 n_mod) {
    const int d = delta.dim;
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("base point needs d coordinates");
    if (lo < 0 || hi < lo || hi >= n_mod) throw std::invalid_argument("box must satisfy 0 <= lo <= hi < N");
    if (t < 0 || t >= n_mod) throw std::invalid_argument("t must lie in [0, N)");
    for (i64 c : x)
        if (c < lo || c > hi) throw std::invalid_argument("base point outside the box");
    for (const auto& v : delta.verts)
        for (int k = 0; k < d; ++k) {
            const i64 c = mod_reduce(x[static_cast<size_t>(k)] +
                                     t * mod_reduce(v[static_cast<size_t>(k)], n_mod), n_mod);
            if (c < lo || c > hi)
                throw std::invalid_argument("x + t*Delta is not inside the box mod N");
        }

    UnwrapResult res;
    for (i64 lift : {t, t - n_mod}) {
        bool okay = true;
        std::vector<std::vector<i64>> pts;
        for (const auto& v : delta.verts) {
            std::vector<i64> p(static_cast<size_t>(d));
            for (int k = 0; k < d; ++k) {
                p[static_cast<size_t>(k)] =
                    x[static_cast<size_t>(k)] + lift * v[static_cast<size_t>(k)];
                if (p[static_cast<size_t>(k)] < lo || p[static_cast<size_t>(k)] > hi) okay = false;
            }
            if (!okay) break;
            pts.push_back(std::move(p));
        }
        if (okay) {
            res.ok = true;
            res.t_lift = lift;
            res.points = std::move(pts);
            return res;
        }
        if (t == 0) break;  // both lifts coincide at t = 0 up to the trivial copy
    }
    return res;
}

struct UnwrapSweepRow {
    double eps = 0.0;
    u64 wrapped = 0;   // copies inside the box in Z_N
    u64 failures = 0;  // copies the dichotomy could not unwrap
};

// Exhaustive dichotomy check over boxes [lo, lo + floor(eps*N) - 1] for each
// eps: every (x, t) whose Z_N image lies in the box is fed to unwrap_copy.
inline std::vector<UnwrapSweepRow> unwrap_sweep(const Simplex& delta, i64 n_mod,
                                                const std::vector<double>& eps_list, i64 lo = 0) {
    const int d = delta.dim;
    std::vector<UnwrapSweepRow> rows;
    for (double eps : eps_list) {
        if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("eps must lie in (0, 1]");
        UnwrapSweepRow row;
        row.eps = eps;
        const i64 len = static_cast<i64>(std::floor(eps * static_cast<double>(n_mod)));
        const i64 hi = std::min<i64>(lo + std::max<i64>(len, 1) - 1, n_mod - 1);
        std::vector<i64> x(static_cast<size_t>(d), lo);
        for (;;) {
            for (i64 t = 0; t < n_mod; ++t) {
                bool inside = true;
                for (const auto& v : delta.verts) {
                    for (int k = 0; k < d && inside; ++k) {
                        const i64 c = mod_reduce(
                            x[static_cast<size_t>(k)] +
                                t * mod_reduce(v[static_cast<size_t>(k)], n_mod),
                            n_mod);
                        inside = c >= lo && c <= hi;
                    }
                    if (!inside) break;
                }
                if (!inside) continue;
                ++row.wrapped;
                if (!unwrap_copy(x, t, delta, lo, hi, n_mod).ok) ++row.failures;
            }
            int pos = 0;
            while (pos < d) {
                if (++x[static_cast<size_t>(pos)] <= hi) break;
                x[static_cast<size_t>(pos)] = lo;
                ++pos;
            }
            if (pos == d) break;
        }
        rows.push_back(row);
    }
    return rows;
}

// Prime-constellation counts across a range of N, with the per-N ratio to
// N^{d+1} (log N)^{-l}. use_all_primes=false drops p=2 (parity edge effects).
inline std::vector<CountReport> scaling_experiment(const PatternSet& f,
                                                   const std::vector<i64>& n_list,
                                                   bool use_all_primes,
                                                   const SieveContext& sieve, u64 budget = 0,
                                                   int threads = 0) {
    if (static_cast<int>(f.points.size()) != f.dim + 1 || pattern_l(f) == 0)
        throw std::invalid_argument("scaling experiment needs a nondegenerate simplex pattern");
    std::vector<CountReport> rows;
    for (i64 n : n_list) {
        PointSet a = PointSet::primes(f.dim, n, sieve, use_all_primes ? 2 : 3);
        rows.push_back(count_affine_copies(f, a, n, true, budget, threads));
    }
    return rows;
}

}  // namespace constell
