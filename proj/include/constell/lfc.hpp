#pragma once

// Linear forms condition probes: the expectation of a product of measure
// weights composed with pairwise independent linear forms, which should
// approach 1 as N and the sieve level W grow. This is the asymptotic input
// everything else consumes, so the module mostly exists to measure how far
// a finite (N, omega) pair is from the idealized limit.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "constell/estimator.hpp"
#include "constell/grid_fn.hpp"
#include "constell/gt_measure.hpp"
#include "constell/simplex_forms.hpp"

namespace constell {

struct LfcLimits {
    int max_forms = 64;
    int max_vars = 8;
    i64 max_coeff = 1000;
};

class LfcInstance {
  public:
    // forms: m rows of t coefficients; residues: one b per form, coprime to W.
    static LfcInstance make(std::vector<std::vector<i64>> forms, std::vector<i64> residues,
                            MeasureParams mp, const SieveContext& sieve,
                            bool stub = false, const LfcLimits& lim = {}) {
        LfcInstance inst;
        if (forms.empty()) throw std::invalid_argument("need at least one form");
        if (static_cast<int>(forms.size()) > lim.max_forms)
            throw std::invalid_argument("too many forms");
        const size_t t = forms[0].size();
        if (t == 0 || static_cast<int>(t) > lim.max_vars)
            throw std::invalid_argument("variable count out of range");
        for (const auto& row : forms) {
            if (row.size() != t) throw std::invalid_argument("ragged coefficient rows");
            bool nonzero = false;
            for (i64 c : row) {
                if (std::abs(c) > lim.max_coeff)
                    throw std::invalid_argument("coefficient exceeds configured bound");
                nonzero |= c != 0;
            }
            if (!nonzero) throw std::invalid_argument("zero form");
        }
        if (residues.size() != forms.size())
            throw std::invalid_argument("need one residue per form");
        for (i64 b : residues)
            if (b < 1) throw std::invalid_argument("residues must be positive");
        for (size_t i = 0; i < forms.size(); ++i)
            for (size_t j = i + 1; j < forms.size(); ++j)
                if (proportional(forms[i], forms[j]))
                    throw std::invalid_argument("forms " + std::to_string(i) + " and " +
                                                std::to_string(j) + " are proportional");

        inst.forms_ = std::move(forms);
        inst.t_ = static_cast<int>(t);
        // Canonical evaluation order: permuting the input rows must not change
        // the result, so products are always taken in sorted-row order.
        inst.order_.resize(inst.forms_.size());
        std::iota(inst.order_.begin(), inst.order_.end(), 0);
        std::sort(inst.order_.begin(), inst.order_.end(), [&](int a, int b) {
            if (inst.forms_[a] != inst.forms_[b]) return inst.forms_[a] < inst.forms_[b];
            return residues[static_cast<size_t>(a)] < residues[static_cast<size_t>(b)];
        });

        mp.residues.assign(residues.begin(), residues.end());
        if (stub) {
            inst.measure_ = GreenTaoMeasure::uniform(mp.n_cap, static_cast<int>(inst.forms_.size()));
        } else {
            inst.measure_ = GreenTaoMeasure::build(mp, sieve);
        }
        return inst;
    }

    int m() const { return static_cast<int>(forms_.size()); }
    int t() const { return t_; }
    i64 n_cap() const { return static_cast<i64>(measure_.params().n_cap); }
    bool is_stub() const { return measure_.is_stub(); }
    const std::vector<std::vector<i64>>& forms() const { return forms_; }
    const GreenTaoMeasure& measure() const { return measure_; }

    double weight_at(const std::vector<i64>& x) const {
        const i64 n = n_cap();
        double p = 1.0;
        for (int idx : order_) {
            i64 v = eval_form(forms_[static_cast<size_t>(idx)], x, n);
            p *= measure_.nu(idx, v);
        }
        return p;
    }

  private:
    static bool proportional(const std::vector<i64>& u, const std::vector<i64>& v) {
        for (size_t i = 0; i < u.size(); ++i)
            for (size_t j = i + 1; j < u.size(); ++j)
                if (static_cast<i128>(u[i]) * v[j] != static_cast<i128>(u[j]) * v[i])
                    return false;
        return true;
    }

    std::vector<std::vector<i64>> forms_;
    std::vector<int> order_;
    int t_ = 0;
    GreenTaoMeasure measure_;
};

// E_{x in [0,N)^t} prod_i nu_{b_i}(L_i(x)).
inline EstimatorResult lfc_estimate(const LfcInstance& inst, const EvalOptions& opts = {}) {
    const i64 n = inst.n_cap();
    const int t = inst.t();
    const double terms = pow_as_double(static_cast<u64>(n), t) * inst.m();

    if (use_exact(opts, terms)) {
        std::vector<double> partial(static_cast<size_t>(n), 0.0);
        parallel_blocks(static_cast<u64>(n), opts.threads, [&](u64 b) {
            std::vector<i64> x(t, 0);
            x[t - 1] = static_cast<i64>(b);
            KahanSum sum;
            for_each_point(n, t - 1, [&](const std::vector<i64>& pt) {
                for (int i = 0; i + 1 < t; ++i) x[i] = pt[i];
                sum.add(inst.weight_at(x));
            });
            partial[b] = sum.value();
        });
        KahanSum total;
        for (double p : partial) total.add(p);
        const double points = pow_as_double(static_cast<u64>(n), t);
        return exact_result(total.value() / points, static_cast<u64>(points));
    }

    CounterRng rng(opts.seed);
    return mc_average(opts, [&](u64 i) {
        std::vector<i64> x(t, 0);
        for (int c = 0; c < t; ++c)
            x[c] = static_cast<i64>(rng.below(i * t + c, static_cast<u64>(n)));
        return inst.weight_at(x);
    });
}

struct LfcCell {
    i64 n = 0;
    int omega = 0;
    int m = 0;
    int t = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double abs_dev = 0.0;
    std::string mode;
};

enum class RRule { PaperDefault, WindowSqrt };

inline double r_for_rule(RRule rule, u64 n_cap, int d) {
    return rule == RRule::PaperDefault ? paper_default_r(n_cap, d) : window_sqrt_r(n_cap);
}

// Evaluate the same form family across an (N, omega) grid. Residues are
// taken as b_i = 1 for every form, valid for every W.
inline std::vector<LfcCell> lfc_sweep(const std::vector<std::vector<i64>>& forms,
                                      const std::vector<i64>& n_list,
                                      const std::vector<int>& omega_list,
                                      const SieveContext& sieve, const EvalOptions& opts = {},
                                      RRule rule = RRule::WindowSqrt) {
    std::vector<LfcCell> cells;
    for (i64 n : n_list) {
        for (int omega : omega_list) {
            MeasureParams mp;
            mp.n_cap = static_cast<u64>(n);
            mp.wt = build_wtrick(omega);
            mp.r_value = r_for_rule(rule, mp.n_cap, static_cast<int>(forms.size()));
            std::vector<i64> residues(forms.size(), 1);
            auto inst = LfcInstance::make(forms, residues, mp, sieve);
            auto est = lfc_estimate(inst, opts);
            LfcCell cell;
            cell.n = n;
            cell.omega = omega;
            cell.m = inst.m();
            cell.t = inst.t();
            cell.estimate = est.value;
            cell.std_error = est.std_error;
            cell.abs_dev = std::abs(est.value - 1.0);
            cell.mode = est.mode;
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace constell
