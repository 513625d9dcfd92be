#pragma once

// Two-variable energy-increment demonstrator: sigma-algebras on V_e generated
// by per-vertex cylinder sets, conditional expectations and energies under
// tabulated measures, the Gamma(q) inner product whose psi-average recovers
// the box-norm power, one increment step (q-scan, sign split, level-set
// refinement), and the Koopman-von-Neumann style iteration that drives the
// box-norm residual of an indicator below a target.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "constell/box_norm.hpp"
#include "constell/weight_system.hpp"

namespace constell {

// Product sigma-algebra on V_e (|e| = 2): generators are subsets of [0,N)
// attached to one of the two boundary vertices; atoms are products of the
// per-axis cells cut out by the generators.
class BoundaryPartition {
  public:
    explicit BoundaryPartition(i64 n) : n_(n) {
        if (n < 1) throw std::invalid_argument("partition needs a nonempty ground set");
    }

    i64 n() const { return n_; }
    int complexity() const { return static_cast<int>(gens_[0].size() + gens_[1].size()); }
    int axis_complexity(int axis) const {
        return static_cast<int>(gens_[check_axis(axis)].size());
    }

    void add_generator(int axis, std::vector<char> indicator) {
        if (indicator.size() != static_cast<size_t>(n_))
            throw std::invalid_argument("generator size mismatch");
        if (complexity() >= 20)
            throw std::invalid_argument("partition complexity cap (20) reached");
        gens_[check_axis(axis)].push_back(std::move(indicator));
    }

    int axis_cell(int axis, i64 v) const {
        const auto& gs = gens_[check_axis(axis)];
        int label = 0;
        for (size_t i = 0; i < gs.size(); ++i)
            if (gs[i][static_cast<size_t>(v)]) label |= 1 << i;
        return label;
    }

    int atom_of(i64 a, i64 b) const {
        return axis_cell(0, a) | (axis_cell(1, b) << static_cast<int>(gens_[0].size()));
    }

    int label_bound() const { return 1 << complexity(); }

    int atom_count() const {
        std::vector<char> seen(static_cast<size_t>(label_bound()), 0);
        int count = 0;
        for (i64 a = 0; a < n_; ++a)
            for (i64 b = 0; b < n_; ++b) {
                int lab = atom_of(a, b);
                if (!seen[static_cast<size_t>(lab)]) {
                    seen[static_cast<size_t>(lab)] = 1;
                    ++count;
                }
            }
        return count;
    }

  private:
    static int check_axis(int axis) {
        if (axis != 0 && axis != 1) throw std::invalid_argument("axis must be 0 or 1");
        return axis;
    }

    i64 n_;
    std::vector<std::vector<char>> gens_[2];
};

namespace detail {

inline void check_pair_edge(const WeightSystem& ws, u32 edge) {
    if (edge_size(edge) != 2)
        throw std::invalid_argument("the increment demonstrator works on |e| = 2 edges");
    if ((edge & ~ws.full_edge()) != 0) throw std::invalid_argument("edge outside vertex set");
}

inline void check_grid(const GridFn& g, i64 n) {
    if (g.n() != n || g.arity() != 2)
        throw std::invalid_argument("expected a function on V_e with |e| = 2");
}

}  // namespace detail

// mu_e tabulated over V_e in local coordinates.
inline GridFn tabulate_mu_e(const WeightSystem& ws, u32 edge) {
    detail::check_pair_edge(ws, edge);
    const auto coords = edge_coords(edge);
    std::vector<i64> x(ws.d() + 1, 0);
    return GridFn::from_fn(ws.n_mod(), 2, [&](const std::vector<i64>& pt) {
        x[coords[0]] = pt[0];
        x[coords[1]] = pt[1];
        return ws.mu_e(edge, x);
    });
}

// mu_{q,e} tabulated over V_e for a fixed parameter point q.
inline GridFn tabulate_mu_param(const ParametricWeightSystem& pws, const std::vector<i64>& q) {
    const WeightSystem& ws = pws.base();
    const u32 edge = pws.edge();
    detail::check_pair_edge(ws, edge);
    const auto coords = edge_coords(edge);
    std::vector<i64> x(ws.d() + 1, 0);
    return GridFn::from_fn(ws.n_mod(), 2, [&](const std::vector<i64>& pt) {
        x[coords[0]] = pt[0];
        x[coords[1]] = pt[1];
        return pws.mu_parametric(edge, x, q);
    });
}

// E_x f(x) g(x) mu(x)
inline double inner_mu(const GridFn& f, const GridFn& g, const GridFn& mu) {
    detail::check_grid(g, f.n());
    detail::check_grid(mu, f.n());
    KahanSum s;
    for (size_t i = 0; i < f.size(); ++i) s.add(f.at_index(i) * g.at_index(i) * mu.at_index(i));
    return s.value() / static_cast<double>(f.size());
}

inline double mean_mu(const GridFn& mu) {
    KahanSum s;
    for (size_t i = 0; i < mu.size(); ++i) s.add(mu.at_index(i));
    return s.value() / static_cast<double>(mu.size());
}

// Atom-wise weighted average; 1 on atoms of zero mass.
inline GridFn conditional_expectation(const GridFn& g, const BoundaryPartition& part,
                                      const GridFn& mu) {
    const i64 n = part.n();
    detail::check_grid(g, n);
    detail::check_grid(mu, n);
    const size_t labels = static_cast<size_t>(part.label_bound());
    std::vector<double> gm(labels, 0.0), m(labels, 0.0);
    for (i64 a = 0; a < n; ++a)
        for (i64 b = 0; b < n; ++b) {
            const size_t lab = static_cast<size_t>(part.atom_of(a, b));
            const double w = mu.at({a, b});
            gm[lab] += g.at({a, b}) * w;
            m[lab] += w;
        }
    std::vector<double> value(labels, 1.0);
    for (size_t lab = 0; lab < labels; ++lab)
        if (m[lab] > 0.0) value[lab] = gm[lab] / m[lab];
    return GridFn::from_fn(n, 2, [&](const std::vector<i64>& pt) {
        return value[static_cast<size_t>(part.atom_of(pt[0], pt[1]))];
    });
}

// ||E(g|B)||^2_{L2(mu)}
inline double energy(const GridFn& g, const BoundaryPartition& part, const GridFn& mu) {
    GridFn ce = conditional_expectation(g, part, mu);
    return inner_mu(ce, ce, mu);
}

inline GridFn balanced_function(const GridFn& g, const BoundaryPartition& part,
                                const GridFn& mu) {
    GridFn ce = conditional_expectation(g, part, mu);
    GridFn f = g;
    for (size_t i = 0; i < f.size(); ++i) f.set_index(i, g.at_index(i) - ce.at_index(i));
    return f;
}

// Gamma(q) = <F, u_q^1 u_q^2>_{mu_{q,e}} with u_q^1(x1) = F(x1, q2) and
// u_q^2(x2) = F(q1, x2) F(q1, q2).
inline double gamma_at(const GridFn& F, const ParametricWeightSystem& pws,
                       const std::vector<i64>& q) {
    const WeightSystem& ws = pws.base();
    const u32 edge = pws.edge();
    detail::check_pair_edge(ws, edge);
    const i64 n = ws.n_mod();
    detail::check_grid(F, n);
    if (q.size() != 2) throw std::invalid_argument("parameter point must have two coordinates");
    const auto coords = edge_coords(edge);
    std::vector<i64> x(ws.d() + 1, 0);
    const double fqq = F.at({q[0], q[1]});
    KahanSum s;
    for (i64 xa = 0; xa < n; ++xa) {
        const double u1 = F.at({xa, q[1]});
        x[coords[0]] = xa;
        for (i64 xb = 0; xb < n; ++xb) {
            const double u2 = F.at({q[0], xb}) * fqq;
            const double val = F.at({xa, xb}) * u1 * u2;
            if (val == 0.0) continue;
            x[coords[1]] = xb;
            s.add(val * pws.mu_parametric(edge, x, q));
        }
    }
    return s.value() / static_cast<double>(n * n);
}

// Spec-shaped wrapper: builds F = 1_G - E_{mu_e}(1_G|part) and evaluates Gamma.
inline double gamma_q(const GridFn& G, const BoundaryPartition& part, const WeightSystem& ws,
                      u32 edge, const std::vector<i64>& q) {
    const GridFn mu_base = tabulate_mu_e(ws, edge);
    const GridFn F = balanced_function(G, part, mu_base);
    return gamma_at(F, ParametricWeightSystem::extend_for_box(ws, edge), q);
}

struct GammaScan {
    std::vector<i64> best_q;    // argmax of Gamma over V_e
    double best_gamma = 0.0;
    double aggregated = 0.0;    // E_q Gamma(q) psi(q); equals the box-norm power
    double threshold = 0.0;
    double good_mass = 0.0;     // psi-measure of {q : Gamma(q) >= threshold}
};

inline GammaScan gamma_scan(const GridFn& F, const WeightSystem& ws, u32 edge,
                            double threshold = 0.0, int threads = 0) {
    detail::check_pair_edge(ws, edge);
    const i64 n = ws.n_mod();
    detail::check_grid(F, n);
    const auto pws = ParametricWeightSystem::extend_for_box(ws, edge);

    struct Block {
        double agg = 0.0;
        double good = 0.0;
        double best = 0.0;
        i64 best_a = -1;
    };
    std::vector<Block> blocks(static_cast<size_t>(n));
    parallel_blocks(static_cast<u64>(n), threads, [&](u64 qb) {
        Block blk;
        KahanSum agg, good;
        std::vector<i64> q = {0, static_cast<i64>(qb)};
        for (i64 qa = 0; qa < n; ++qa) {
            q[0] = qa;
            const double g = gamma_at(F, pws, q);
            const double psi = pws.psi(q);
            agg.add(g * psi);
            if (g >= threshold) good.add(psi);
            if (blk.best_a < 0 || g > blk.best) {
                blk.best = g;
                blk.best_a = qa;
            }
        }
        blk.agg = agg.value();
        blk.good = good.value();
        blocks[qb] = blk;
    });

    GammaScan scan;
    scan.threshold = threshold;
    KahanSum agg, good;
    double best = 0.0;
    i64 best_a = -1, best_b = -1;
    for (i64 qb = 0; qb < n; ++qb) {
        const Block& blk = blocks[static_cast<size_t>(qb)];
        agg.add(blk.agg);
        good.add(blk.good);
        if (best_a < 0 || blk.best > best) {
            best = blk.best;
            best_a = blk.best_a;
            best_b = qb;
        }
    }
    scan.aggregated = agg.value() / static_cast<double>(n * n);
    scan.good_mass = good.value() / static_cast<double>(n * n);
    scan.best_gamma = best;
    scan.best_q = {best_a, best_b};
    return scan;
}

struct IncrementOptions {
    int thresholds = 32;    // uniform level-set grid per boundary vertex
    double fraction = 0.5;  // accepted increment >= fraction * 2^-8 eta^2
    int threads = 0;
};

struct EnergyReport {
    double before = 0.0;     // ||E_{mu_e}(1_G|B)||^2_{L2(mu_e)}
    double after = 0.0;      // ||E_{mu_{q,e}}(1_G|B')||^2_{L2(mu_{q,e})}
    double increment = 0.0;  // after - before
    std::vector<i64> q;
    double gamma = 0.0;
    double eta = 0.0;
    double mass_base = 0.0;
    double mass_param = 0.0;
    bool q_found = false;   // best Gamma >= eta/4
    bool accepted = false;  // q_found and increment >= fraction * 2^-8 eta^2
    int sign_combo = -1;    // bit 0: negative part of u1; bit 1: negative part of u2
    double t1 = 0.0, t2 = 0.0;
    double level_inner = 0.0;  // |<F, 1_{U1} 1_{U2}>_{mu_{q,e}}| at the chosen cut
    std::string note;
};

struct IncrementResult {
    EnergyReport report;
    BoundaryPartition refined;
};

inline IncrementResult increment_step(const GridFn& G, const BoundaryPartition& part,
                                      const WeightSystem& ws, u32 edge, double eta,
                                      const IncrementOptions& io = {}) {
    detail::check_pair_edge(ws, edge);
    const i64 n = ws.n_mod();
    detail::check_grid(G, n);
    if (part.n() != n) throw std::invalid_argument("partition ground set mismatch");
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    for (double v : G.data())
        if (v != 0.0 && v != 1.0) throw std::invalid_argument("G must be a 0/1 indicator");

    IncrementResult res{EnergyReport{}, part};
    EnergyReport& rep = res.report;
    rep.eta = eta;

    const GridFn mu_base = tabulate_mu_e(ws, edge);
    rep.mass_base = mean_mu(mu_base);
    rep.before = energy(G, part, mu_base);
    const GridFn F = balanced_function(G, part, mu_base);

    // vertex weights beyond the edge weight make this a demonstrator only
    const auto coords = edge_coords(edge);
    if (!ws.is_stub())
        for (int i = 0; i < 2; ++i)
            if (!ws.forms_eq(u32(1) << coords[i]).empty()) {
                rep.note = "nontrivial vertex weights: experimental";
                break;
            }

    const auto scan = gamma_scan(F, ws, edge, eta / 4.0, io.threads);
    rep.q = scan.best_q;
    rep.gamma = scan.best_gamma;
    rep.q_found = scan.best_gamma >= eta / 4.0;
    if (!rep.q_found) {
        if (!rep.note.empty()) rep.note += "; ";
        rep.note += "no q reaches eta/4, declining to refine";
        return res;
    }

    const auto pws = ParametricWeightSystem::extend_for_box(ws, edge);
    const GridFn mu_q = tabulate_mu_param(pws, rep.q);
    rep.mass_param = mean_mu(mu_q);

    // u functions at the chosen q, bounded by 1 since |F| <= 1
    std::vector<double> u1(static_cast<size_t>(n)), u2(static_cast<size_t>(n));
    const double fqq = F.at({rep.q[0], rep.q[1]});
    for (i64 v = 0; v < n; ++v) {
        u1[static_cast<size_t>(v)] = F.at({v, rep.q[1]});
        u2[static_cast<size_t>(v)] = F.at({rep.q[0], v}) * fqq;
    }

    // P(xa, xb) = F(xa, xb) mu_q(xa, xb): the bilinear kernel cut by level sets
    GridFn kernel(n, 2);
    for (i64 a = 0; a < n; ++a)
        for (i64 b = 0; b < n; ++b) kernel.set({a, b}, F.at({a, b}) * mu_q.at({a, b}));

    double best_val = -1.0;
    std::vector<char> best_u1, best_u2;
    for (int combo = 0; combo < 4; ++combo) {
        std::vector<double> v1(static_cast<size_t>(n)), v2(static_cast<size_t>(n));
        for (i64 v = 0; v < n; ++v) {
            const double a = u1[static_cast<size_t>(v)];
            const double b = u2[static_cast<size_t>(v)];
            v1[static_cast<size_t>(v)] = (combo & 1) ? std::max(-a, 0.0) : std::max(a, 0.0);
            v2[static_cast<size_t>(v)] = (combo & 2) ? std::max(-b, 0.0) : std::max(b, 0.0);
        }
        for (int k1 = 1; k1 <= io.thresholds; ++k1) {
            const double t1 = static_cast<double>(k1) / io.thresholds;
            std::vector<char> in1(static_cast<size_t>(n));
            for (i64 v = 0; v < n; ++v)
                in1[static_cast<size_t>(v)] = v1[static_cast<size_t>(v)] >= t1 ? 1 : 0;
            for (int k2 = 1; k2 <= io.thresholds; ++k2) {
                const double t2 = static_cast<double>(k2) / io.thresholds;
                std::vector<char> in2(static_cast<size_t>(n));
                for (i64 v = 0; v < n; ++v)
                    in2[static_cast<size_t>(v)] = v2[static_cast<size_t>(v)] >= t2 ? 1 : 0;
                KahanSum s;
                for (i64 a = 0; a < n; ++a) {
                    if (!in1[static_cast<size_t>(a)]) continue;
                    for (i64 b = 0; b < n; ++b)
                        if (in2[static_cast<size_t>(b)]) s.add(kernel.at({a, b}));
                }
                const double val = std::abs(s.value()) / static_cast<double>(n * n);
                if (val > best_val) {
                    best_val = val;
                    best_u1 = in1;
                    best_u2 = in2;
                    rep.sign_combo = combo;
                    rep.t1 = t1;
                    rep.t2 = t2;
                }
            }
        }
    }
    rep.level_inner = best_val;

    res.refined.add_generator(0, best_u1);
    res.refined.add_generator(1, best_u2);
    rep.after = energy(G, res.refined, mu_q);
    rep.increment = rep.after - rep.before;
    rep.accepted = rep.increment >= io.fraction * std::pow(2.0, -8.0) * eta * eta;
    return res;
}

struct KvnRecord {
    int iter = 0;
    double residual = 0.0;     // box norm of 1_G - E(1_G|B) under the base weights
    double energy_base = 0.0;  // energy of 1_G under mu_e and the current partition
    int complexity = 0;
    bool stepped = false;  // an increment step ran after this record
    bool accepted = false;
    std::vector<i64> q;
    double gamma = 0.0;
    double increment = 0.0;
};

struct KvnTrace {
    std::vector<KvnRecord> records;
    bool converged = false;
    double final_residual = 0.0;
    double eta = 0.0;
    BoundaryPartition partition{1};
};

// Iterate increment steps until the base-measure box-norm residual of the
// indicator drops to eps. Refinements accumulate on the base system (the
// single-level demonstrator; deeper parametric towers are out of scope).
inline KvnTrace kvn_loop(const GridFn& G, const WeightSystem& ws, u32 edge, double eps,
                         int max_iters = 16, const IncrementOptions& io = {}) {
    detail::check_pair_edge(ws, edge);
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const i64 n = ws.n_mod();
    detail::check_grid(G, n);

    KvnTrace trace;
    trace.eta = std::pow(eps, 4.0);
    trace.partition = BoundaryPartition(n);
    const GridFn mu_base = tabulate_mu_e(ws, edge);

    for (int iter = 0; iter < max_iters; ++iter) {
        KvnRecord rec;
        rec.iter = iter;
        rec.complexity = trace.partition.complexity();
        rec.energy_base = energy(G, trace.partition, mu_base);
        const GridFn F = balanced_function(G, trace.partition, mu_base);
        EvalOptions ex;
        ex.mode = EvalMode::Exact;
        ex.threads = io.threads;
        rec.residual = box_norm(F, ws, edge, ex).norm;
        trace.final_residual = rec.residual;
        if (rec.residual <= eps) {
            trace.records.push_back(rec);
            trace.converged = true;
            return trace;
        }
        if (trace.partition.complexity() + 2 > 18) {
            trace.records.push_back(rec);
            return trace;  // complexity budget exhausted before convergence
        }
        auto step = increment_step(G, trace.partition, ws, edge, trace.eta, io);
        rec.stepped = true;
        rec.accepted = step.report.accepted;
        rec.q = step.report.q;
        rec.gamma = step.report.gamma;
        rec.increment = step.report.increment;
        trace.records.push_back(rec);
        if (!step.report.accepted) return trace;  // honest stall, not convergence
        trace.partition = step.refined;
    }
    return trace;
}

}  // namespace constell
