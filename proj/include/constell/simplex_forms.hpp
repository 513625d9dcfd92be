#pragma once

// Linear form families derived from a simplex: for each omitted vertex j and
// axis k the form L_{e_j}^k(x) = sum_i x_i (v_i^k - v_j^k). Distinct forms are
// deduplicated exactly; the family's structural properties (well-definedness,
// pairwise independence over Q, symmetry on the zero-sum hyperplane M) are
// checked with exact integer arithmetic. Also the parametrization Phi(x) =
// (sum x_i v_i, -sum x_i) with its modular inverse.

#include <optional>
#include <string>
#include <vector>

#include "constell/common.hpp"
#include "constell/simplex.hpp"

namespace constell {

struct LinearForm {
    std::vector<i64> c;  // coefficients over x_0..x_d
    int axis = 0;        // 0-based coordinate axis k
    u32 supp = 0;        // bitmask of vertices with nonzero coefficient
    u32 edge = 0;        // defining edge J \ {j} of first occurrence (bitmask)
};

inline u32 full_vertex_mask(int d) { return (u32(1) << (d + 1)) - 1; }

// Top edges J \ {j}, j = 0..d.
inline std::vector<u32> top_edges(int d) {
    std::vector<u32> es;
    for (int j = 0; j <= d; ++j) es.push_back(full_vertex_mask(d) & ~(u32(1) << j));
    return es;
}

struct HypergraphSystem {
    int d = 0;
    i64 n_mod = 0;
    Simplex delta;
    std::vector<u32> edges;  // the d+1 top edges
};

// Evaluates a form at x (coordinates already in [0, N)), result in [0, N).
inline i64 eval_form(const std::vector<i64>& coeffs, const std::vector<i64>& x, i64 n_mod) {
    i64 acc = 0;
    for (size_t i = 0; i < coeffs.size(); ++i)
        acc += mod_reduce(coeffs[i], n_mod) * mod_reduce(x[i], n_mod) % n_mod;
    return mod_reduce(acc, n_mod);
}

// Display string with sign normalization (leading coefficient positive);
// the stored form is untouched.
inline std::string form_display(const LinearForm& f) {
    std::vector<i64> c = f.c;
    for (i64 v : c) {
        if (v == 0) continue;
        if (v < 0)
            for (auto& w : c) w = -w;
        break;
    }
    std::string out;
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        if (!out.empty()) out += c[i] > 0 ? "+" : "-";
        else if (c[i] < 0)
            out += "-";
        i64 a = std::abs(c[i]);
        if (a != 1) out += std::to_string(a);
        out += "x" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
}

struct FormFamily {
    int d = 0;
    i64 n_mod = 0;
    Simplex delta;
    std::vector<LinearForm> forms;         // distinct forms
    std::vector<std::vector<int>> by_jk;   // [j][k] -> index into forms

    std::vector<int> with_supp_eq(u32 mask) const {
        std::vector<int> out;
        for (size_t i = 0; i < forms.size(); ++i)
            if (forms[i].supp == mask) out.push_back(static_cast<int>(i));
        return out;
    }
    std::vector<int> with_supp_subset(u32 mask) const {
        std::vector<int> out;
        for (size_t i = 0; i < forms.size(); ++i)
            if ((forms[i].supp & ~mask) == 0) out.push_back(static_cast<int>(i));
        return out;
    }

    // Assembles a family from raw parts (corruption tests).
    static FormFamily from_raw(int d, i64 n_mod, std::vector<LinearForm> forms,
                               std::vector<std::vector<int>> by_jk) {
        FormFamily fam;
        fam.d = d;
        fam.n_mod = n_mod;
        fam.forms = std::move(forms);
        fam.by_jk = std::move(by_jk);
        return fam;
    }
};

namespace detail {
inline bool is_prime_trial(i64 n) {
    if (n < 2) return false;
    for (i64 q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}
}  // namespace detail

inline FormFamily build_forms(const Simplex& delta, i64 n_mod) {
    i64 max_diff = 0;
    for (int k = 0; k < delta.dim; ++k)
        for (const auto& vi : delta.verts)
            for (const auto& vj : delta.verts)
                max_diff = std::max(max_diff, std::abs(vi[k] - vj[k]));
    if (!detail::is_prime_trial(n_mod) || n_mod <= max_diff)
        throw std::invalid_argument(
            "modulus must be prime and exceed every coefficient magnitude");

    FormFamily fam;
    fam.d = delta.dim;
    fam.n_mod = n_mod;
    fam.delta = delta;
    fam.by_jk.assign(delta.dim + 1, std::vector<int>(delta.dim, -1));
    for (int j = 0; j <= delta.dim; ++j) {
        for (int k = 0; k < delta.dim; ++k) {
            LinearForm f;
            f.c.resize(delta.dim + 1);
            f.axis = k;
            f.edge = full_vertex_mask(delta.dim) & ~(u32(1) << j);
            for (int i = 0; i <= delta.dim; ++i) {
                f.c[i] = delta.verts[i][k] - delta.verts[j][k];
                if (f.c[i] != 0) f.supp |= u32(1) << i;
            }
            int found = -1;
            for (size_t m = 0; m < fam.forms.size(); ++m)
                if (fam.forms[m].c == f.c) {
                    found = static_cast<int>(m);
                    break;
                }
            if (found >= 0) {
                if (fam.forms[found].axis != k)
                    throw PropertyError("equal forms on different axes; simplex degenerate");
                fam.by_jk[j][k] = found;
            } else {
                fam.forms.push_back(std::move(f));
                fam.by_jk[j][k] = static_cast<int>(fam.forms.size()) - 1;
            }
        }
    }
    return fam;
}

inline HypergraphSystem build_hypergraph(const Simplex& delta, i64 n_mod) {
    return {delta.dim, n_mod, delta, top_edges(delta.dim)};
}

struct CheckResult {
    bool ok = true;
    std::string witness;  // empty when ok
    explicit operator bool() const { return ok; }
};

// supp(L_{e'}^k) subseteq e_j  <=>  v_j^k == v_{j'}^k  <=>  L_{e'}^k == L_{e_j}^k.
inline CheckResult check_well_defined(const FormFamily& fam) {
    for (int j = 0; j <= fam.d; ++j)
        for (int jp = 0; jp <= fam.d; ++jp)
            for (int k = 0; k < fam.d; ++k) {
                const auto& lj = fam.forms[fam.by_jk[j][k]];
                const auto& ljp = fam.forms[fam.by_jk[jp][k]];
                u32 e_j = full_vertex_mask(fam.d) & ~(u32(1) << j);
                bool p1 = (ljp.supp & ~e_j) == 0;
                bool p2 = !fam.delta.verts.empty()
                              ? fam.delta.verts[j][k] == fam.delta.verts[jp][k]
                              : lj.c == ljp.c;  // raw families carry no simplex
                bool p3 = lj.c == ljp.c;
                if (p1 != p2 || p2 != p3)
                    return {false, "(j=" + std::to_string(j) + ", j'=" + std::to_string(jp) +
                                       ", k=" + std::to_string(k + 1) + ")"};
            }
    return {};
}

// Two integer forms are Q-dependent iff all 2x2 cross products vanish.
inline CheckResult check_pairwise_independent(const FormFamily& fam) {
    for (size_t a = 0; a < fam.forms.size(); ++a) {
        bool zero = true;
        for (i64 v : fam.forms[a].c) zero &= v == 0;
        if (zero) return {false, "form " + std::to_string(a) + " is zero"};
        for (size_t b = a + 1; b < fam.forms.size(); ++b) {
            bool dependent = true;
            const auto& ca = fam.forms[a].c;
            const auto& cb = fam.forms[b].c;
            for (size_t i = 0; i < ca.size() && dependent; ++i)
                for (size_t l = i + 1; l < ca.size() && dependent; ++l)
                    if (static_cast<i128>(ca[i]) * cb[l] != static_cast<i128>(ca[l]) * cb[i])
                        dependent = false;
            if (dependent)
                return {false, "forms " + std::to_string(a) + " and " + std::to_string(b) +
                                   " are proportional"};
        }
    }
    return {};
}

// On M = {sum x_i = 0} all forms of a fixed axis agree: exactly when the
// coefficient difference is a constant vector. Backed by randomized
// evaluation at points of M.
inline CheckResult check_symmetric(const FormFamily& fam, int trials = 64, u64 seed = 1) {
    for (int k = 0; k < fam.d; ++k)
        for (int j = 0; j <= fam.d; ++j)
            for (int jp = j + 1; jp <= fam.d; ++jp) {
                const auto& a = fam.forms[fam.by_jk[j][k]].c;
                const auto& b = fam.forms[fam.by_jk[jp][k]].c;
                i64 diff0 = a[0] - b[0];
                for (size_t i = 1; i < a.size(); ++i)
                    if (a[i] - b[i] != diff0)
                        return {false, "(j=" + std::to_string(j) + ", j'=" + std::to_string(jp) +
                                           ", k=" + std::to_string(k + 1) + ") algebraic"};
            }
    CounterRng rng(seed);
    for (int t = 0; t < trials; ++t) {
        std::vector<i64> x(fam.d + 1, 0);
        i64 sum = 0;
        for (int i = 0; i < fam.d; ++i) {
            x[i] = static_cast<i64>(rng.below(static_cast<u64>(t) * (fam.d + 1) + i,
                                              static_cast<u64>(fam.n_mod)));
            sum += x[i];
        }
        x[fam.d] = mod_reduce(-sum, fam.n_mod);
        for (int k = 0; k < fam.d; ++k) {
            i64 v0 = eval_form(fam.forms[fam.by_jk[0][k]].c, x, fam.n_mod);
            for (int j = 1; j <= fam.d; ++j)
                if (eval_form(fam.forms[fam.by_jk[j][k]].c, x, fam.n_mod) != v0)
                    return {false, "(j=0, j'=" + std::to_string(j) + ", k=" +
                                       std::to_string(k + 1) + ") on M sample"};
        }
    }
    return {};
}

namespace detail {
inline i64 pow_mod(i64 base, i64 exp, i64 mod) {
    i64 r = 1;
    base = mod_reduce(base, mod);
    while (exp > 0) {
        if (exp & 1) r = static_cast<i64>(static_cast<i128>(r) * base % mod);
        base = static_cast<i64>(static_cast<i128>(base) * base % mod);
        exp >>= 1;
    }
    return r;
}
}  // namespace detail

// Phi(x) = (sum_i x_i v_i, -sum_i x_i), with modular inverse for prime N.
class PhiMap {
  public:
    PhiMap(const Simplex& delta, i64 n_mod) : d_(delta.dim), n_(n_mod), delta_(delta) {
        if (!detail::is_prime_trial(n_mod))
            throw std::invalid_argument("Phi inversion needs a prime modulus");
        // Matrix rows 0..d-1: y_k = sum_i v_i^k x_i; row d: t = -sum_i x_i.
        std::vector<std::vector<i64>> m(d_ + 1, std::vector<i64>(d_ + 1));
        for (int k = 0; k < d_; ++k)
            for (int i = 0; i <= d_; ++i) m[k][i] = mod_reduce(delta.verts[i][k], n_);
        for (int i = 0; i <= d_; ++i) m[d_][i] = n_ - 1;  // -1 mod N
        inv_ = invert_mod(m);
    }

    std::pair<std::vector<i64>, i64> forward(const std::vector<i64>& x) const {
        std::vector<i64> y(d_, 0);
        i64 t = 0;
        for (int i = 0; i <= d_; ++i) {
            for (int k = 0; k < d_; ++k)
                y[k] = mod_reduce(y[k] + mod_reduce(delta_.verts[i][k], n_) * x[i], n_);
            t = mod_reduce(t - x[i], n_);
        }
        return {y, t};
    }

    std::vector<i64> inverse(const std::vector<i64>& y, i64 t) const {
        std::vector<i64> rhs(y.begin(), y.end());
        rhs.push_back(mod_reduce(t, n_));
        std::vector<i64> x(d_ + 1, 0);
        for (int i = 0; i <= d_; ++i)
            for (int k = 0; k <= d_; ++k) x[i] = mod_reduce(x[i] + inv_[i][k] * rhs[k], n_);
        return x;
    }

  private:
    std::vector<std::vector<i64>> invert_mod(std::vector<std::vector<i64>> m) const {
        const int n = d_ + 1;
        std::vector<std::vector<i64>> inv(n, std::vector<i64>(n, 0));
        for (int i = 0; i < n; ++i) inv[i][i] = 1;
        for (int col = 0; col < n; ++col) {
            int piv = -1;
            for (int r = col; r < n; ++r)
                if (m[r][col] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0)
                throw PropertyError("parametrization not bijective for this modulus");
            std::swap(m[col], m[piv]);
            std::swap(inv[col], inv[piv]);
            i64 ip = detail::pow_mod(m[col][col], n_ - 2, n_);
            for (int c = 0; c < n; ++c) {
                m[col][c] = static_cast<i64>(static_cast<i128>(m[col][c]) * ip % n_);
                inv[col][c] = static_cast<i64>(static_cast<i128>(inv[col][c]) * ip % n_);
            }
            for (int r = 0; r < n; ++r) {
                if (r == col || m[r][col] == 0) continue;
                i64 f = m[r][col];
                for (int c = 0; c < n; ++c) {
                    m[r][c] = mod_reduce(m[r][c] - static_cast<i64>(static_cast<i128>(f) * m[col][c] % n_), n_);
                    inv[r][c] = mod_reduce(inv[r][c] - static_cast<i64>(static_cast<i128>(f) * inv[col][c] % n_), n_);
                }
            }
        }
        return inv;
    }

    int d_;
    i64 n_;
    Simplex delta_;
    std::vector<std::vector<i64>> inv_;
};

// The unique x in M with pi_{e'}(x) = y, where e' = J \ {j'}. Coordinates of
// y follow the ascending order of e'. Phi(x) has t = 0.
inline std::vector<i64> diagonal_section(const std::vector<i64>& y, int j_prime, int d,
                                         i64 n_mod) {
    if (static_cast<int>(y.size()) != d) throw std::invalid_argument("section needs |y| = d");
    if (j_prime < 0 || j_prime > d) throw std::invalid_argument("bad omitted vertex index");
    std::vector<i64> x(d + 1, 0);
    i64 sum = 0;
    int pos = 0;
    for (int i = 0; i <= d; ++i) {
        if (i == j_prime) continue;
        x[i] = mod_reduce(y[pos++], n_mod);
        sum += x[i];
    }
    x[j_prime] = mod_reduce(-sum, n_mod);
    return x;
}

}  // namespace constell
