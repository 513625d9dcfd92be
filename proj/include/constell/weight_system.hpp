#pragma once

// Weighted hypergraph layer: edge weights nu_e(x) = prod over forms supported
// exactly on e, measures mu_e(x) = prod over forms supported inside e, their
// total masses and marginals, and the parametric extension used by the box
// norm / regularity machinery (forms in (q, x) with classified x-support).

#include <algorithm>
#include <vector>

#include "constell/estimator.hpp"
#include "constell/grid_fn.hpp"
#include "constell/gt_measure.hpp"
#include "constell/simplex_forms.hpp"

namespace constell {

class WeightSystem {
  public:
    static WeightSystem from_measure(FormFamily fam, const GreenTaoMeasure& m) {
        if (m.dim() != fam.d) throw std::invalid_argument("measure dimension != simplex dimension");
        if (static_cast<i64>(m.n_cap()) != fam.n_mod)
            throw std::invalid_argument("measure must cover exactly [0, N)");
        WeightSystem ws;
        ws.fam_ = std::move(fam);
        ws.stub_ = m.is_stub();
        ws.tables_.reserve(ws.fam_.d);
        for (int k = 0; k < ws.fam_.d; ++k) ws.tables_.push_back(m.table(k));
        ws.build_masks();
        return ws;
    }

    static WeightSystem uniform(FormFamily fam) {
        WeightSystem ws;
        ws.stub_ = true;
        ws.tables_.assign(fam.d, std::vector<double>(static_cast<size_t>(fam.n_mod), 1.0));
        ws.fam_ = std::move(fam);
        ws.build_masks();
        return ws;
    }

    const FormFamily& family() const { return fam_; }
    i64 n_mod() const { return fam_.n_mod; }
    int d() const { return fam_.d; }
    bool is_stub() const { return stub_; }
    u32 full_edge() const { return full_vertex_mask(fam_.d); }

    double nu_of(int form_idx, const std::vector<i64>& x) const {
        const auto& f = fam_.forms[static_cast<size_t>(form_idx)];
        i64 val = eval_form(f.c, x, fam_.n_mod);
        return tables_[static_cast<size_t>(f.axis)][static_cast<size_t>(val)];
    }

    // nu_e: product over forms with support == edge (1 if there are none).
    double nu_e(u32 edge, const std::vector<i64>& x) const {
        double p = 1.0;
        for (int idx : eq_[edge]) p *= nu_of(idx, x);
        return p;
    }

    // mu_e: product over forms with support inside edge.
    double mu_e(u32 edge, const std::vector<i64>& x) const {
        double p = 1.0;
        for (int idx : sub_[edge]) p *= nu_of(idx, x);
        return p;
    }

    double mu_full(const std::vector<i64>& x) const { return mu_e(full_edge(), x); }

    const std::vector<int>& forms_eq(u32 edge) const { return eq_[edge]; }
    const std::vector<int>& forms_sub(u32 edge) const { return sub_[edge]; }
    const std::vector<double>& table(int axis) const { return tables_[static_cast<size_t>(axis)]; }

  private:
    void build_masks() {
        u32 n_masks = u32(1) << (fam_.d + 1);
        eq_.assign(n_masks, {});
        sub_.assign(n_masks, {});
        for (u32 m = 0; m < n_masks; ++m) {
            eq_[m] = fam_.with_supp_eq(m);
            sub_[m] = fam_.with_supp_subset(m);
        }
    }

    FormFamily fam_;
    std::vector<std::vector<double>> tables_;  // per axis, size N
    std::vector<std::vector<int>> eq_, sub_;   // per edge mask
    bool stub_ = false;
};

// E_{x in V_e} mu_e(x).
inline EstimatorResult total_mass(const WeightSystem& ws, u32 edge, const EvalOptions& opts = {}) {
    if ((edge & ~ws.full_edge()) != 0) throw std::invalid_argument("edge outside vertex set");
    const i64 n = ws.n_mod();
    const auto coords = edge_coords(edge);
    const int arity = static_cast<int>(coords.size());
    const double n_forms = std::max<size_t>(ws.forms_sub(edge).size(), 1);
    const double terms = pow_as_double(static_cast<u64>(n), arity) * n_forms;

    if (use_exact(opts, terms)) {
        if (arity == 0) return exact_result(1.0, 1);
        const u64 blocks = static_cast<u64>(n);
        std::vector<double> partial(blocks, 0.0);
        parallel_blocks(blocks, opts.threads, [&](u64 b) {
            std::vector<i64> x(ws.d() + 1, 0);
            x[coords[arity - 1]] = static_cast<i64>(b);
            KahanSum sum;
            for_each_point(n, arity - 1, [&](const std::vector<i64>& pt) {
                for (int i = 0; i + 1 < arity; ++i) x[coords[i]] = pt[i];
                sum.add(ws.mu_e(edge, x));
            });
            partial[b] = sum.value();
        });
        KahanSum total;
        for (double p : partial) total.add(p);
        u64 points = 1;
        for (int i = 0; i < arity; ++i) points *= static_cast<u64>(n);
        return exact_result(total.value() / static_cast<double>(points), points);
    }

    CounterRng rng(opts.seed);
    return mc_average(opts, [&](u64 i) {
        std::vector<i64> x(ws.d() + 1, 0);
        for (int c = 0; c < arity; ++c)
            x[coords[c]] = static_cast<i64>(rng.below(i * arity + c, static_cast<u64>(n)));
        return ws.mu_e(edge, x);
    });
}

struct MarginalReport {
    EstimatorResult lhs;  // integral of g over V_e against mu_e
    EstimatorResult rhs;  // integral of g(pi_e(x)) over V_J against mu_J
    double gap = 0.0;
};

// Lemma-style marginal consistency: int_{V_e} g dmu_e vs int_{V_J} g.pi_e dmu_J.
inline MarginalReport marginal_consistency(const WeightSystem& ws, u32 edge, const GridFn& g,
                                           const EvalOptions& opts = {}) {
    const i64 n = ws.n_mod();
    const auto coords = edge_coords(edge);
    const int arity = static_cast<int>(coords.size());
    if (g.n() != n || g.arity() != arity)
        throw std::invalid_argument("grid function shape mismatch with edge");

    MarginalReport rep;
    {
        const double terms =
            pow_as_double(static_cast<u64>(n), arity) * std::max<size_t>(ws.forms_sub(edge).size(), 1);
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
                    sum.add(g.at(local) * ws.mu_e(edge, x));
                });
                partial[b] = sum.value();
            });
            KahanSum total;
            for (double p : partial) total.add(p);
            rep.lhs = exact_result(total.value() / pow_as_double(static_cast<u64>(n), arity),
                                   static_cast<u64>(pow_as_double(static_cast<u64>(n), arity)));
        } else {
            CounterRng rng(opts.seed);
            rep.lhs = mc_average(opts, [&](u64 i) {
                std::vector<i64> x(ws.d() + 1, 0);
                std::vector<i64> local(arity, 0);
                for (int c = 0; c < arity; ++c) {
                    i64 val = static_cast<i64>(rng.below(i * arity + c, static_cast<u64>(n)));
                    x[coords[c]] = val;
                    local[c] = val;
                }
                return g.at(local) * ws.mu_e(edge, x);
            });
        }
    }
    {
        const int full_arity = ws.d() + 1;
        const double terms = pow_as_double(static_cast<u64>(n), full_arity) *
                             std::max<size_t>(ws.forms_sub(ws.full_edge()).size(), 1);
        if (use_exact(opts, terms)) {
            std::vector<double> partial(static_cast<size_t>(n), 0.0);
            parallel_blocks(static_cast<u64>(n), opts.threads, [&](u64 b) {
                std::vector<i64> x(full_arity, 0);
                std::vector<i64> local(arity, 0);
                x[full_arity - 1] = static_cast<i64>(b);
                KahanSum sum;
                for_each_point(n, full_arity - 1, [&](const std::vector<i64>& pt) {
                    for (int i = 0; i + 1 < full_arity; ++i) x[i] = pt[i];
                    for (int i = 0; i < arity; ++i) local[i] = x[coords[i]];
                    sum.add(g.at(local) * ws.mu_full(x));
                });
                partial[b] = sum.value();
            });
            KahanSum total;
            for (double p : partial) total.add(p);
            rep.rhs = exact_result(total.value() / pow_as_double(static_cast<u64>(n), full_arity),
                                   static_cast<u64>(pow_as_double(static_cast<u64>(n), full_arity)));
        } else {
            CounterRng rng(opts.seed + 0x9e3779b9u);
            rep.rhs = mc_average(opts, [&](u64 i) {
                std::vector<i64> x(full_arity, 0);
                std::vector<i64> local(arity, 0);
                for (int c = 0; c < full_arity; ++c)
                    x[c] = static_cast<i64>(rng.below(i * full_arity + c, static_cast<u64>(n)));
                for (int c = 0; c < arity; ++c) local[c] = x[coords[c]];
                return g.at(local) * ws.mu_full(x);
            });
        }
    }
    rep.gap = std::abs(rep.lhs.value - rep.rhs.value);
    return rep;
}

// A linear form in parameters q and variables x; axis picks the nu table.
struct ParamForm {
    std::vector<i64> cx;
    std::vector<i64> cq;
    int axis = 0;
    u32 x_supp = 0;
    u32 q_supp = 0;
};

// The parametric system obtained by doubling the coordinates of one edge:
// every base form supported inside the edge spawns all mixed x/q
// substitution patterns. Pure-q patterns form the parameter measure psi.
class ParametricWeightSystem {
  public:
    static ParametricWeightSystem extend_for_box(const WeightSystem& ws, u32 edge) {
        if ((edge & ~ws.full_edge()) != 0) throw std::invalid_argument("edge outside vertex set");
        ParametricWeightSystem pws;
        pws.ws_ = &ws;
        pws.edge_ = edge;
        pws.q_coords_ = edge_coords(edge);
        const auto& fam = ws.family();
        for (int idx : ws.forms_sub(edge)) {
            const auto& f = fam.forms[static_cast<size_t>(idx)];
            u32 supp = f.supp;
            // iterate x-part over all subsets of the support
            for (u32 sub = supp;; sub = (sub - 1) & supp) {
                ParamForm pf;
                pf.axis = f.axis;
                pf.cx.assign(fam.d + 1, 0);
                pf.cq.assign(pws.q_coords_.size(), 0);
                for (int i = 0; i <= fam.d; ++i) {
                    if (f.c[i] == 0) continue;
                    if (sub & (u32(1) << i)) {
                        pf.cx[i] = f.c[i];
                        pf.x_supp |= u32(1) << i;
                    } else {
                        int pos = pws.q_pos(i);
                        pf.cq[pos] = f.c[i];
                        pf.q_supp |= u32(1) << i;
                    }
                }
                if (pf.x_supp == 0)
                    pws.psi_forms_.push_back(std::move(pf));
                else
                    pws.x_forms_.push_back(std::move(pf));
                if (sub == 0) break;
            }
        }
        return pws;
    }

    int q_dim() const { return static_cast<int>(q_coords_.size()); }
    u32 edge() const { return edge_; }
    const WeightSystem& base() const { return *ws_; }
    const std::vector<ParamForm>& x_forms() const { return x_forms_; }
    const std::vector<ParamForm>& psi_forms() const { return psi_forms_; }

    double eval_nu(const ParamForm& f, const std::vector<i64>& x, const std::vector<i64>& q) const {
        const i64 n = ws_->n_mod();
        i64 acc = 0;
        for (size_t i = 0; i < f.cx.size(); ++i)
            if (f.cx[i] != 0) acc += mod_reduce(f.cx[i], n) * x[i] % n;
        for (size_t r = 0; r < f.cq.size(); ++r)
            if (f.cq[r] != 0) acc += mod_reduce(f.cq[r], n) * q[r] % n;
        return ws_->table(f.axis)[static_cast<size_t>(mod_reduce(acc, n))];
    }

    // mu_{q,e'}(x) = prod over forms with nonempty x-support inside e'.
    double mu_parametric(u32 sub_edge, const std::vector<i64>& x, const std::vector<i64>& q) const {
        double p = 1.0;
        for (const auto& f : x_forms_)
            if ((f.x_supp & ~sub_edge) == 0) p *= eval_nu(f, x, q);
        return p;
    }

    // Parameter-space measure: product of the pure-q forms.
    double psi(const std::vector<i64>& q) const {
        double p = 1.0;
        std::vector<i64> x_dummy(static_cast<size_t>(ws_->d()) + 1, 0);
        for (const auto& f : psi_forms_) p *= eval_nu(f, x_dummy, q);
        return p;
    }

  private:
    int q_pos(int vertex) const {
        for (size_t p = 0; p < q_coords_.size(); ++p)
            if (q_coords_[p] == vertex) return static_cast<int>(p);
        throw std::logic_error("vertex outside parametrized edge");
    }

    const WeightSystem* ws_ = nullptr;
    u32 edge_ = 0;
    std::vector<int> q_coords_;
    std::vector<ParamForm> x_forms_, psi_forms_;
};

}  // namespace constell
