#pragma once

// Weighted Gowers box norms over a doubled edge. The 2^{d'}-fold inner
// product averages prod_omega F_omega(omega(x,q)) against the full cube
// weight: every form supported inside the edge, evaluated at every x/q
// substitution pattern of its support. That weight is exactly the set of
// parametric forms produced by ParametricWeightSystem::extend_for_box
// (mixed patterns and pure-q patterns together).

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "constell/weight_system.hpp"

namespace constell {

// 2^{d'} functions on V_e plus the weight system that supplies the cube
// weight. fns is indexed by the substitution mask omega: bit i set means
// local coordinate i of the edge takes its value from q instead of x.
struct CubeConfig {
    const WeightSystem* ws = nullptr;
    u32 edge = 0;
    std::vector<const GridFn*> fns;
    double bound = 0.0;  // if > 0, require |F_omega| <= bound everywhere
};

namespace detail {

inline void validate_cube(const CubeConfig& cfg) {
    if (cfg.ws == nullptr) throw std::invalid_argument("cube config needs a weight system");
    const int dp = edge_size(cfg.edge);
    if (dp == 0) throw std::invalid_argument("cube edge must be nonempty");
    if ((cfg.edge & ~cfg.ws->full_edge()) != 0)
        throw std::invalid_argument("edge outside vertex set");
    if (cfg.fns.size() != (size_t(1) << dp))
        throw std::invalid_argument("cube needs 2^{d'} functions");
    for (const GridFn* f : cfg.fns) {
        if (f == nullptr) throw std::invalid_argument("null cube function");
        if (f->n() != cfg.ws->n_mod() || f->arity() != dp)
            throw std::invalid_argument("cube function shape mismatch with edge");
        if (cfg.bound > 0.0)
            for (double v : f->data())
                if (std::abs(v) > cfg.bound + 1e-12)
                    throw std::invalid_argument("cube function exceeds declared bound");
    }
}

}  // namespace detail

// <(F_omega)>_{box,nu_e}: the generalized inner product behind the box norm.
inline EstimatorResult gowers_inner(const CubeConfig& cfg, const EvalOptions& opts = {}) {
    detail::validate_cube(cfg);
    const WeightSystem& ws = *cfg.ws;
    const i64 n = ws.n_mod();
    const int dp = edge_size(cfg.edge);
    const u32 cube = u32(1) << dp;
    const auto coords = edge_coords(cfg.edge);
    const auto pws = ParametricWeightSystem::extend_for_box(ws, cfg.edge);
    const double work_per_point =
        cube + pws.x_forms().size() + pws.psi_forms().size();
    const double terms = pow_as_double(static_cast<u64>(n), 2 * dp) * work_per_point;

    if (use_exact(opts, terms)) {
        // Block over the last q coordinate so the reduction order is fixed.
        std::vector<double> partial(static_cast<size_t>(n), 0.0);
        parallel_blocks(static_cast<u64>(n), opts.threads, [&](u64 blk) {
            std::vector<i64> q(dp, 0);
            q[dp - 1] = static_cast<i64>(blk);
            std::vector<i64> x_full(ws.d() + 1, 0);
            std::vector<i64> pt(dp, 0);
            KahanSum sum;
            for_each_point(n, dp - 1, [&](const std::vector<i64>& q_rest) {
                for (int i = 0; i + 1 < dp; ++i) q[i] = q_rest[i];
                const double psi_w = pws.psi(q);
                if (psi_w == 0.0) return;
                for_each_point(n, dp, [&](const std::vector<i64>& x) {
                    for (int i = 0; i < dp; ++i) x_full[coords[i]] = x[i];
                    double prod = pws.mu_parametric(cfg.edge, x_full, q) * psi_w;
                    if (prod == 0.0) return;
                    for (u32 m = 0; m < cube; ++m) {
                        for (int i = 0; i < dp; ++i) pt[i] = (m >> i) & 1 ? q[i] : x[i];
                        prod *= cfg.fns[m]->at(pt);
                        if (prod == 0.0) return;
                    }
                    sum.add(prod);
                });
            });
            partial[blk] = sum.value();
        });
        KahanSum total;
        for (double p : partial) total.add(p);
        const double points = pow_as_double(static_cast<u64>(n), 2 * dp);
        return exact_result(total.value() / points, static_cast<u64>(points));
    }

    CounterRng rng(opts.seed);
    return mc_average(opts, [&](u64 i) {
        std::vector<i64> x(dp), q(dp), x_full(ws.d() + 1, 0), pt(dp);
        for (int c = 0; c < dp; ++c) {
            x[c] = static_cast<i64>(rng.below(i * (2 * dp) + c, static_cast<u64>(n)));
            q[c] = static_cast<i64>(rng.below(i * (2 * dp) + dp + c, static_cast<u64>(n)));
        }
        for (int i2 = 0; i2 < dp; ++i2) x_full[coords[i2]] = x[i2];
        double prod = pws.mu_parametric(cfg.edge, x_full, q) * pws.psi(q);
        for (u32 m = 0; m < cube && prod != 0.0; ++m) {
            for (int i2 = 0; i2 < dp; ++i2) pt[i2] = (m >> i2) & 1 ? q[i2] : x[i2];
            prod *= cfg.fns[m]->at(pt);
        }
        return prod;
    });
}

struct BoxNormResult {
    double raw_power = 0.0;  // the 2^{d'}-fold average before taking the root
    double norm = 0.0;       // max(raw_power, 0)^{1/2^{d'}}
    bool clamped = false;    // raw_power was negative (fp noise / mc variance)
    EstimatorResult estimator;
};

inline BoxNormResult box_norm(const GridFn& f, const WeightSystem& ws, u32 edge,
                              const EvalOptions& opts = {}) {
    const int dp = edge_size(edge);
    CubeConfig cfg;
    cfg.ws = &ws;
    cfg.edge = edge;
    cfg.fns.assign(size_t(1) << dp, &f);
    BoxNormResult r;
    r.estimator = gowers_inner(cfg, opts);
    r.raw_power = r.estimator.value;
    double base = r.raw_power;
    if (base < 0.0) {
        // The average is a sum of weighted squares, so an exact-mode value
        // below fp noise means the weights themselves are inconsistent.
        if (r.estimator.mode == "exact" && base < -10.0 * 1e-9)
            throw PropertyError("box norm power is " + std::to_string(base) +
                                " in exact mode; weight system is inconsistent");
        base = 0.0;
        r.clamped = true;
    }
    r.norm = std::pow(base, 1.0 / static_cast<double>(u64(1) << dp));
    return r;
}

struct GcsReport {
    double lhs = 0.0;  // |<(F_omega)>|
    double rhs = 0.0;  // prod_omega ||F_omega||
    bool holds = false;
};

// Gowers-Cauchy-Schwarz: |<(F_omega)>| <= prod ||F_omega||.
inline GcsReport gcs_check(const CubeConfig& cfg, const EvalOptions& opts = {}) {
    GcsReport rep;
    rep.lhs = std::abs(gowers_inner(cfg, opts).value);
    rep.rhs = 1.0;
    for (const GridFn* f : cfg.fns)
        rep.rhs *= box_norm(*f, *cfg.ws, cfg.edge, opts).norm;
    rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-9) + 1e-12;
    return rep;
}

struct TriangleReport {
    double lhs = 0.0;        // ||F + G||
    double rhs = 0.0;        // ||F|| + ||G||
    double scaled = 0.0;     // ||lambda F||
    double expected = 0.0;   // |lambda| ||F||
    bool holds = false;
};

inline TriangleReport triangle_check(const GridFn& f, const GridFn& g, const WeightSystem& ws,
                                     u32 edge, double lambda = 2.0,
                                     const EvalOptions& opts = {}) {
    if (f.n() != g.n() || f.arity() != g.arity())
        throw std::invalid_argument("triangle check needs functions of equal shape");
    GridFn sum = f;
    GridFn scaled = f;
    for (size_t i = 0; i < sum.size(); ++i) {
        sum.set_index(i, f.at_index(i) + g.at_index(i));
        scaled.set_index(i, lambda * f.at_index(i));
    }
    TriangleReport rep;
    const double nf = box_norm(f, ws, edge, opts).norm;
    rep.lhs = box_norm(sum, ws, edge, opts).norm;
    rep.rhs = nf + box_norm(g, ws, edge, opts).norm;
    rep.scaled = box_norm(scaled, ws, edge, opts).norm;
    rep.expected = std::abs(lambda) * nf;
    const bool tri = rep.lhs <= rep.rhs + 1e-9;
    const bool hom = std::abs(rep.scaled - rep.expected) <= 1e-9 * std::max(1.0, rep.expected);
    rep.holds = tri && hom;
    return rep;
}

// mu_e(G) = E_x 1_G(x) mu_e(x): the (unnormalized) measure of a set.
inline double restricted_mass(const GridFn& indicator, const WeightSystem& ws, u32 edge,
                              const EvalOptions& opts = {}) {
    const i64 n = ws.n_mod();
    const auto coords = edge_coords(edge);
    const int arity = static_cast<int>(coords.size());
    if (indicator.n() != n || indicator.arity() != arity)
        throw std::invalid_argument("indicator shape mismatch with edge");
    const double terms = pow_as_double(static_cast<u64>(n), arity) *
                         std::max<size_t>(ws.forms_sub(edge).size(), 1);
    if (use_exact(opts, terms)) {
        std::vector<double> partial(static_cast<size_t>(n), 0.0);
        parallel_blocks(static_cast<u64>(n), opts.threads, [&](u64 b) {
            std::vector<i64> x(ws.d() + 1, 0);
            std::vector<i64> local(arity, 0);
            x[coords[arity - 1]] = static_cast<i64>(b);
            local[arity - 1] = static_cast<i64>(b);
            KahanSum sum;
            for_each_point(n, arity - 1, [&](const std::vector<i64>& pt) {
                for (int i = 0; i + 1 < arity; ++i) {
                    x[coords[i]] = pt[i];
                    local[i] = pt[i];
                }
                const double g = indicator.at(local);
                if (g != 0.0) sum.add(g * ws.mu_e(edge, x));
            });
            partial[b] = sum.value();
        });
        KahanSum total;
        for (double p : partial) total.add(p);
        return total.value() / pow_as_double(static_cast<u64>(n), arity);
    }
    CounterRng rng(opts.seed);
    return mc_average(opts, [&](u64 i) {
               std::vector<i64> x(ws.d() + 1, 0);
               std::vector<i64> local(arity, 0);
               for (int c = 0; c < arity; ++c) {
                   i64 v = static_cast<i64>(rng.below(i * arity + c, static_cast<u64>(n)));
                   x[coords[c]] = v;
                   local[c] = v;
               }
               return indicator.at(local) * ws.mu_e(edge, x);
           })
        .value;
}

// ||1_G - mu_e(G) 1||_{box,nu_e}: the regularity defect of a set.
inline double epsilon_regularity(const GridFn& indicator, const WeightSystem& ws, u32 edge,
                                 const EvalOptions& opts = {}) {
    for (double v : indicator.data())
        if (v != 0.0 && v != 1.0)
            throw std::invalid_argument("regularity defect needs a 0/1 indicator");
    const double mass = restricted_mass(indicator, ws, edge, opts);
    GridFn balanced = indicator;
    for (size_t i = 0; i < balanced.size(); ++i)
        balanced.set_index(i, indicator.at_index(i) - mass);
    return box_norm(balanced, ws, edge, opts).norm;
}

struct VonNeumannReport {
    double lhs = 0.0;       // |E_{x in V_J} prod_e F_e(pi_e(x)) mu_J(x)|
    double min_norm = 0.0;  // min_e ||F_e||
    double ratio = 0.0;     // lhs / max(min_norm, floor)
    std::vector<double> norms;
};

// Empirical probe of the weighted von Neumann inequality. fs is indexed by
// the top edges in top_edges(d) order.
inline VonNeumannReport von_neumann_check(const std::vector<const GridFn*>& fs,
                                          const WeightSystem& ws,
                                          const EvalOptions& opts = {}) {
    const int d = ws.d();
    const auto edges = top_edges(d);
    if (fs.size() != edges.size())
        throw std::invalid_argument("need one function per top edge");
    const i64 n = ws.n_mod();
    std::vector<std::vector<int>> coords;
    for (size_t i = 0; i < edges.size(); ++i) {
        coords.push_back(edge_coords(edges[i]));
        if (fs[i] == nullptr || fs[i]->n() != n || fs[i]->arity() != d)
            throw std::invalid_argument("edge function shape mismatch");
    }

    VonNeumannReport rep;
    const int full_arity = d + 1;
    const double terms = pow_as_double(static_cast<u64>(n), full_arity) *
                         (ws.family().forms.size() + edges.size());
    double lhs_signed = 0.0;
    if (use_exact(opts, terms)) {
        std::vector<double> partial(static_cast<size_t>(n), 0.0);
        parallel_blocks(static_cast<u64>(n), opts.threads, [&](u64 b) {
            std::vector<i64> x(full_arity, 0);
            std::vector<i64> local(d, 0);
            x[full_arity - 1] = static_cast<i64>(b);
            KahanSum sum;
            for_each_point(n, full_arity - 1, [&](const std::vector<i64>& pt) {
                for (int i = 0; i + 1 < full_arity; ++i) x[i] = pt[i];
                double prod = ws.mu_full(x);
                for (size_t ei = 0; ei < edges.size() && prod != 0.0; ++ei) {
                    for (int i = 0; i < d; ++i) local[i] = x[coords[ei][i]];
                    prod *= fs[ei]->at(local);
                }
                if (prod != 0.0) sum.add(prod);
            });
            partial[b] = sum.value();
        });
        KahanSum total;
        for (double p : partial) total.add(p);
        lhs_signed = total.value() / pow_as_double(static_cast<u64>(n), full_arity);
    } else {
        CounterRng rng(opts.seed);
        lhs_signed = mc_average(opts, [&](u64 i) {
                         std::vector<i64> x(full_arity, 0);
                         std::vector<i64> local(d, 0);
                         for (int c = 0; c < full_arity; ++c)
                             x[c] = static_cast<i64>(
                                 rng.below(i * full_arity + c, static_cast<u64>(n)));
                         double prod = ws.mu_full(x);
                         for (size_t ei = 0; ei < edges.size() && prod != 0.0; ++ei) {
                             for (int j = 0; j < d; ++j) local[j] = x[coords[ei][j]];
                             prod *= fs[ei]->at(local);
                         }
                         return prod;
                     })
                         .value;
    }
    rep.lhs = std::abs(lhs_signed);
    rep.min_norm = std::numeric_limits<double>::infinity();
    for (size_t ei = 0; ei < edges.size(); ++ei) {
        rep.norms.push_back(box_norm(*fs[ei], ws, edges[ei], opts).norm);
        rep.min_norm = std::min(rep.min_norm, rep.norms.back());
    }
    rep.ratio = rep.lhs / std::max(rep.min_norm, 1e-12);
    return rep;
}

}  // namespace constell
