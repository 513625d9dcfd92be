// Command-line front door: every library experiment behind one binary with
// deterministic, machine-readable output.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 mathematical
// property failure (reserved for CI gating).

#include <bit>
#include <cctype>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "constell/box_norm.hpp"
#include "constell/constellations.hpp"
#include "constell/csv.hpp"
#include "constell/json_io.hpp"
#include "constell/lfc.hpp"
#include "constell/regularity.hpp"

using namespace constell;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- plumbing

struct CommonOpts {
    std::string mode = "auto";
    i64 samples = -1;    // sentinel: not provided
    i64 seed = -1;       // sentinel: not provided
    double budget = -1;  // sentinel: not provided
    int threads = 0;
    std::string out_path;
    std::string format;       // empty -> per-subcommand default
    std::string config_echo;  // --config is applied in a pre-parse pass
};

EvalOptions eval_options(const CommonOpts& c) {
    EvalOptions o;
    o.mode = parse_eval_mode(c.mode);
    if (o.mode == EvalMode::Exact && c.samples >= 0)
        throw std::invalid_argument("mode=exact forbids --samples");
    if (o.mode == EvalMode::Mc && c.seed < 0)
        throw std::invalid_argument("mode=mc requires --seed");
    if (c.samples >= 0) o.samples = static_cast<u64>(c.samples);
    if (c.seed >= 0) o.seed = static_cast<u64>(c.seed);
    if (c.budget >= 0) o.budget = c.budget;
    o.threads = c.threads;
    return o;
}

// Enumeration budget: 0 = unlimited unless the user asked for a cap.
u64 enumeration_budget(const CommonOpts& c) {
    return c.budget < 0 ? 0 : static_cast<u64>(c.budget);
}

std::string pick_format(const CommonOpts& c, const std::string& dflt) {
    if (c.format.empty()) return dflt;
    if (c.format != "json" && c.format != "csv" && c.format != "jsonl")
        throw std::invalid_argument("unknown format '" + c.format + "' (expected json|csv)");
    return c.format;
}

// Machine payload to --out (or stdout); one human summary line to the other
// stream so machine output stays clean.
void deliver(const CommonOpts& c, const std::string& payload, const std::string& summary) {
    if (!c.out_path.empty()) {
        std::ofstream f(c.out_path, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output file " + c.out_path);
        f << payload;
        if (!f) throw std::invalid_argument("write failed for " + c.out_path);
        std::cout << summary << "\n";
    } else {
        std::cout << payload;
        std::cerr << summary << "\n";
    }
}

std::vector<i64> parse_i64_list(const std::string& text) {
    std::vector<i64> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t pos = 0;
        i64 v = std::stoll(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("bad list entry '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

std::vector<int> to_int_list(const std::vector<i64>& xs) {
    std::vector<int> out;
    for (i64 x : xs) out.push_back(static_cast<int>(x));
    return out;
}

// Values from a JSON config seed the bound variables before CLI11 parses the
// command line, so explicit flags always win.
class ConfigSeeder {
  public:
    void load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::invalid_argument("cannot read config file " + path);
        f >> cfg_;
        if (!cfg_.is_object()) throw std::invalid_argument("config must be a JSON object");
    }

    void seed(const std::string& key, std::string& v) {
        known_.insert(key);
        if (!cfg_.contains(key)) return;
        const json& j = cfg_.at(key);
        if (j.is_array()) {  // lists may be written as arrays
            std::string joined;
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) joined += ',';
                joined += j[i].dump();
            }
            v = joined;
        } else if (j.is_string()) {
            v = j.get<std::string>();
        } else {
            v = j.dump();
        }
    }
    template <typename T>
    void seed(const std::string& key, T& v) {
        known_.insert(key);
        if (cfg_.contains(key)) cfg_.at(key).get_to(v);
    }

    void check_unknown() const {
        for (auto it = cfg_.begin(); it != cfg_.end(); ++it)
            if (!known_.count(it.key()))
                throw std::invalid_argument("unknown config key '" + it.key() + "'");
    }

  private:
    json cfg_ = json::object();
    std::set<std::string> known_;
};

void add_common(CLI::App* sub, CommonOpts& c, ConfigSeeder& seeder) {
    seeder.seed("mode", c.mode);
    seeder.seed("samples", c.samples);
    seeder.seed("seed", c.seed);
    seeder.seed("budget", c.budget);
    seeder.seed("threads", c.threads);
    seeder.seed("out", c.out_path);
    seeder.seed("format", c.format);
    sub->add_option("--mode", c.mode, "evaluation mode: exact|mc|auto");
    sub->add_option("--samples", c.samples, "Monte-Carlo sample count");
    sub->add_option("--seed", c.seed, "Monte-Carlo seed (required for mode=mc)");
    sub->add_option("--budget", c.budget, "exact-mode term budget");
    sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    sub->add_option("--out", c.out_path, "write machine output to this file");
    sub->add_option("--format", c.format, "output format: json|csv");
    sub->add_option("--config", c.config_echo,
                    "JSON config file mirroring the flags (flags override)");
}

const SieveContext& shared_sieve(u64 limit) {
    static SieveContext ctx = SieveContext::build(std::max<u64>(limit, 1000));
    if (ctx.limit() < limit) ctx = SieveContext::build(limit);
    return ctx;
}

MeasureParams measure_params(u64 n, int omega, const std::vector<u64>& residues,
                             const std::string& r_rule, double r_value, double eps1,
                             double eps2) {
    MeasureParams mp;
    mp.n_cap = n;
    mp.wt = build_wtrick(omega);
    mp.residues = residues;
    if (r_value > 0.0)
        mp.r_value = r_value;
    else if (r_rule == "paper")
        mp.r_value = paper_default_r(n, static_cast<int>(residues.size()));
    else if (r_rule == "window")
        mp.r_value = window_sqrt_r(n, eps1);
    else
        throw std::invalid_argument("unknown r rule '" + r_rule + "' (expected paper|window)");
    mp.eps1 = eps1;
    mp.eps2 = eps2;
    return mp;
}

u64 sieve_limit_for(const MeasureParams& mp) {
    u64 top = 0;
    for (u64 b : mp.residues) top = std::max(top, b);
    return mp.wt.w * mp.n_cap + top;
}

// ------------------------------------------------------------- subcommands

struct MeasureProfileCfg {
    i64 n = 0;
    int omega = 2;
    i64 b = 1;
    bool stub = false;
    std::string r_rule = "window";
    double r_value = 0.0;
    double eps1 = 0.2, eps2 = 0.4;
    CommonOpts common;
};

int run_measure_profile(const MeasureProfileCfg& cfg) {
    if (cfg.n < 2) throw std::invalid_argument("--n must be at least 2");
    const u64 n = static_cast<u64>(cfg.n);
    GreenTaoMeasure m = GreenTaoMeasure::uniform(n, 1);
    if (!cfg.stub) {
        auto mp = measure_params(n, cfg.omega, {static_cast<u64>(cfg.b)}, cfg.r_rule,
                                 cfg.r_value, cfg.eps1, cfg.eps2);
        m = GreenTaoMeasure::build(mp, shared_sieve(sieve_limit_for(mp)));
    }
    auto [wlo, whi] = GreenTaoMeasure::window_bounds(m.params());

    KahanSum total, wtotal;
    u64 wcount = 0, wnonzero = 0;
    for (u64 i = 0; i < n; ++i) {
        const double v = m.nu(0, static_cast<i64>(i));
        total.add(v);
        if (i >= wlo && i < whi) {
            wtotal.add(v);
            ++wcount;
            wnonzero += v != 0.0;
        }
    }
    const double mean = total.value() / static_cast<double>(n);
    const double wmean = wcount ? wtotal.value() / static_cast<double>(wcount) : 0.0;

    const std::string fmt = pick_format(cfg.common, "csv");
    std::string payload;
    if (fmt == "csv") {
        CsvTable t({"n", "nu"});
        for (u64 i = 0; i < n; ++i)
            t.row({std::to_string(i), fmt_double(m.nu(0, static_cast<i64>(i)))});
        payload = t.str();
    } else {
        json j = with_schema({{"n", cfg.n},
                              {"omega", cfg.omega},
                              {"b", cfg.b},
                              {"stub", cfg.stub},
                              {"r", m.is_stub() ? 0.0 : m.params().r_value},
                              {"mean", mean},
                              {"window_lo", wlo},
                              {"window_hi", whi},
                              {"window_mean", wmean},
                              {"window_support", wnonzero}});
        json table = json::array();
        for (u64 i = 0; i < n; ++i) table.push_back(m.nu(0, static_cast<i64>(i)));
        j["table"] = std::move(table);
        payload = j.dump(2) + "\n";
    }

    std::ostringstream sum;
    sum << "measure-profile n=" << cfg.n << " omega=" << cfg.omega << " b=" << cfg.b
        << " stub=" << (cfg.stub ? "true" : "false")
        << " r=" << fmt_double(m.is_stub() ? 0.0 : m.params().r_value)
        << " mean=" << fmt_double(mean) << " window=[" << wlo << "," << whi << ")"
        << " window_mean=" << fmt_double(wmean);
    deliver(cfg.common, payload, sum.str());
    return 0;
}

struct FormsCfg {
    std::string simplex;
    i64 n = 101;
    CommonOpts common;
};

int run_forms(const FormsCfg& cfg) {
    auto delta = parse_simplex(cfg.simplex);
    auto fam = build_forms(delta, cfg.n);
    auto wd = check_well_defined(fam);
    auto pi = check_pairwise_independent(fam);
    auto sym = check_symmetric(fam);
    const int l = l_delta(delta);

    const std::string fmt = pick_format(cfg.common, "json");
    std::string payload;
    if (fmt == "csv") {
        CsvTable t({"index", "axis", "coefficients", "support", "edge"});
        for (size_t i = 0; i < fam.forms.size(); ++i) {
            const auto& f = fam.forms[i];
            std::string co;
            for (size_t k = 0; k < f.c.size(); ++k) {
                if (k) co += ' ';
                co += std::to_string(f.c[k]);
            }
            t.row({std::to_string(i), std::to_string(f.axis), co, std::to_string(f.supp),
                   std::to_string(f.edge)});
        }
        payload = t.str();
    } else {
        json j = with_schema({{"simplex", cfg.simplex},
                              {"n", cfg.n},
                              {"d", fam.d},
                              {"l_delta", l},
                              {"form_count", fam.forms.size()},
                              {"well_defined", wd.ok},
                              {"pairwise_independent", pi.ok},
                              {"symmetric", sym.ok},
                              {"forms", fam.forms}});
        if (!wd.ok) j["well_defined_witness"] = wd.witness;
        if (!pi.ok) j["pairwise_independent_witness"] = pi.witness;
        if (!sym.ok) j["symmetric_witness"] = sym.witness;
        payload = j.dump(2) + "\n";
    }

    std::ostringstream sum;
    sum << "forms simplex=" << cfg.simplex << " n=" << cfg.n << " count=" << fam.forms.size()
        << " l_delta=" << l << " well_defined=" << (wd.ok ? "true" : "false")
        << " pairwise_independent=" << (pi.ok ? "true" : "false")
        << " symmetric=" << (sym.ok ? "true" : "false");
    deliver(cfg.common, payload, sum.str());
    return (wd.ok && pi.ok && sym.ok) ? 0 : 2;
}

struct BoxNormCfg {
    i64 n = 7;
    std::string simplex = "0,0;1,0;0,1";
    int edge = 3;
    bool stub_weights = false;
    int omega = 2;
    std::string r_rule = "window";
    double r_value = 0.0;
    double eps1 = 0.2, eps2 = 0.4;
    std::string fn = "const";
    double value = 1.0;
    double density = 0.5;
    i64 fn_seed = 1;
    CommonOpts common;
};

int run_boxnorm(const BoxNormCfg& cfg) {
    auto delta = parse_simplex(cfg.simplex);
    auto fam = build_forms(delta, cfg.n);
    WeightSystem ws = WeightSystem::uniform(fam);
    if (!cfg.stub_weights) {
        auto mp = measure_params(static_cast<u64>(cfg.n), cfg.omega,
                                 std::vector<u64>(static_cast<size_t>(fam.d), 1), cfg.r_rule,
                                 cfg.r_value, cfg.eps1, cfg.eps2);
        ws = WeightSystem::from_measure(fam, GreenTaoMeasure::build(mp, shared_sieve(sieve_limit_for(mp))));
    }
    const u32 edge = static_cast<u32>(cfg.edge);
    const int arity = std::popcount(edge);

    GridFn f(cfg.n, arity, cfg.value);
    if (cfg.fn == "random") {
        CounterRng rng(static_cast<u64>(cfg.fn_seed));
        for (u64 i = 0; i < f.size(); ++i)
            f.set_index(i, rng.unit(i) < cfg.density ? 1.0 : 0.0);
    } else if (cfg.fn != "const") {
        throw std::invalid_argument("unknown fn '" + cfg.fn + "' (expected const|random)");
    }

    auto res = box_norm(f, ws, edge, eval_options(cfg.common));

    const std::string fmt = pick_format(cfg.common, "json");
    std::string payload;
    if (fmt == "csv") {
        CsvTable t({"n", "edge", "raw_power", "norm", "clamped", "mode"});
        t.row({std::to_string(cfg.n), std::to_string(cfg.edge), fmt_double(res.raw_power),
               fmt_double(res.norm), res.clamped ? "true" : "false", res.estimator.mode});
        payload = t.str();
    } else {
        json j = with_schema({{"n", cfg.n},
                              {"simplex", cfg.simplex},
                              {"edge", cfg.edge},
                              {"stub_weights", cfg.stub_weights},
                              {"fn", cfg.fn},
                              {"result", res}});
        payload = j.dump(2) + "\n";
    }

    std::ostringstream sum;
    sum << "boxnorm n=" << cfg.n << " edge=" << cfg.edge << " fn=" << cfg.fn
        << " norm=" << fmt_double(res.norm) << " raw_power=" << fmt_double(res.raw_power)
        << " mode=" << res.estimator.mode;
    deliver(cfg.common, payload, sum.str());
    return 0;
}

struct CountCfg {
    std::string pattern;
    i64 n = 0;
    std::string set = "primes";
    i64 min_prime = 2;
    bool include_t0 = false;
    CommonOpts common;
};

int run_count(const CountCfg& cfg) {
    auto pat = PatternSet::parse(cfg.pattern);
    if (cfg.n < 2) throw std::invalid_argument("--n must be at least 2");
    PointSet a(pat.dim, cfg.n);
    if (cfg.set == "primes")
        a = PointSet::primes(pat.dim, cfg.n, shared_sieve(static_cast<u64>(cfg.n)),
                             cfg.min_prime);
    else if (cfg.set == "all")
        a = PointSet::cube(pat.dim, 1, cfg.n);
    else
        throw std::invalid_argument("unknown set '" + cfg.set + "' (expected primes|all)");

    auto rep = count_affine_copies(pat, a, cfg.n, !cfg.include_t0,
                                   enumeration_budget(cfg.common), cfg.common.threads);

    const std::string fmt = pick_format(cfg.common, "json");
    std::string payload;
    if (fmt == "csv") {
        CsvTable t({"N", "count", "trivial", "l", "predicted_scale", "ratio", "t_min", "t_max",
                    "complete"});
        t.row({std::to_string(rep.n_cap), std::to_string(rep.total_pairs),
               std::to_string(rep.trivial_pairs), std::to_string(rep.l_value),
               fmt_double(rep.predicted_scale), fmt_double(rep.ratio), std::to_string(rep.t_min),
               std::to_string(rep.t_max), rep.complete ? "true" : "false"});
        payload = t.str();
    } else {
        json j = with_schema({{"pattern", cfg.pattern},
                              {"set", cfg.set},
                              {"set_size", a.size()},
                              {"report", rep}});
        payload = j.dump(2) + "\n";
    }

    std::ostringstream sum;
    sum << "count pattern=" << cfg.pattern << " n=" << cfg.n << " set=" << cfg.set
        << " total=" << rep.total_pairs << " trivial=" << rep.trivial_pairs
        << " ratio=" << fmt_double(rep.ratio)
        << " complete=" << (rep.complete ? "true" : "false");
    deliver(cfg.common, payload, sum.str());
    return 0;
}

struct LfcCfg {
    std::string forms = "1";
    std::string n_list = "1000";
    std::string omega_list = "2";
    std::string r_rule = "window";
    CommonOpts common;
};

int run_lfc(const LfcCfg& cfg) {
    auto forms = parse_points(cfg.forms);
    auto ns = parse_i64_list(cfg.n_list);
    auto omegas = to_int_list(parse_i64_list(cfg.omega_list));
    RRule rule;
    if (cfg.r_rule == "paper")
        rule = RRule::PaperDefault;
    else if (cfg.r_rule == "window")
        rule = RRule::WindowSqrt;
    else
        throw std::invalid_argument("unknown r rule '" + cfg.r_rule + "' (expected paper|window)");

    u64 limit = 0;
    for (i64 n : ns)
        for (int om : omegas)
            limit = std::max(limit, build_wtrick(om).w * static_cast<u64>(std::max<i64>(n, 2)) + 1);
    auto cells = lfc_sweep(forms, ns, omegas, shared_sieve(limit), eval_options(cfg.common), rule);

    const std::string fmt = pick_format(cfg.common, "csv");
    std::string payload;
    if (fmt == "csv") {
        CsvTable t({"n", "omega", "m", "t", "estimate", "std_error", "abs_dev", "mode"});
        for (const auto& c : cells)
            t.row({std::to_string(c.n), std::to_string(c.omega), std::to_string(c.m),
                   std::to_string(c.t), fmt_double(c.estimate), fmt_double(c.std_error),
                   fmt_double(c.abs_dev), c.mode});
        payload = t.str();
    } else {
        json j = with_schema({{"forms", forms}, {"cells", cells}});
        payload = j.dump(2) + "\n";
    }

    std::ostringstream sum;
    sum << "lfc forms=" << cfg.forms << " cells=" << cells.size();
    if (!cells.empty()) {
        const auto& last = cells.back();
        sum << " terminal_n=" << last.n << " terminal_abs_dev=" << fmt_double(last.abs_dev)
            << " mode=" << last.mode;
    }
    deliver(cfg.common, payload, sum.str());
    return 0;
}

struct RegDemoCfg {
    i64 n = 11;
    double eps = 0.1;
    std::string graph = "half";
    double density = 0.5;
    i64 graph_seed = 7;
    int max_iters = 16;
    int edge = 3;
    CommonOpts common;
};

int run_regdemo(const RegDemoCfg& cfg) {
    auto fam = build_forms(parse_simplex("0,0;1,0;0,1"), cfg.n);
    auto ws = WeightSystem::uniform(fam);
    GridFn g(cfg.n, 2, 0.0);
    if (cfg.graph == "half") {
        g = GridFn::from_fn(cfg.n, 2,
                            [](const std::vector<i64>& p) { return p[1] <= p[0] ? 1.0 : 0.0; });
    } else if (cfg.graph == "random") {
        CounterRng rng(static_cast<u64>(cfg.graph_seed));
        for (u64 i = 0; i < g.size(); ++i)
            g.set_index(i, rng.unit(i) < cfg.density ? 1.0 : 0.0);
    } else {
        throw std::invalid_argument("unknown graph '" + cfg.graph + "' (expected half|random)");
    }

    IncrementOptions io;
    io.threads = cfg.common.threads;
    auto trace = kvn_loop(g, ws, static_cast<u32>(cfg.edge), cfg.eps, cfg.max_iters, io);

    int steps = 0;
    for (const auto& r : trace.records) steps += r.stepped;

    const std::string fmt = pick_format(cfg.common, "jsonl");
    std::string payload;
    if (fmt == "csv") {
        CsvTable t({"iter", "residual", "energy", "complexity", "stepped", "accepted", "gamma",
                    "increment"});
        for (const auto& r : trace.records)
            t.row({std::to_string(r.iter), fmt_double(r.residual), fmt_double(r.energy_base),
                   std::to_string(r.complexity), r.stepped ? "true" : "false",
                   r.accepted ? "true" : "false", fmt_double(r.gamma),
                   fmt_double(r.increment)});
        payload = t.str();
    } else if (fmt == "json") {
        json j = with_schema({{"n", cfg.n},
                              {"eps", cfg.eps},
                              {"eta", trace.eta},
                              {"graph", cfg.graph},
                              {"converged", trace.converged},
                              {"final_residual", trace.final_residual},
                              {"steps", steps},
                              {"complexity", trace.partition.complexity()},
                              {"records", trace.records}});
        payload = j.dump(2) + "\n";
    } else {  // one JSON line per iteration, then a summary line
        std::string lines;
        for (const auto& r : trace.records) lines += json(r).dump() + "\n";
        lines += with_schema({{"converged", trace.converged},
                              {"final_residual", trace.final_residual},
                              {"eta", trace.eta},
                              {"steps", steps},
                              {"complexity", trace.partition.complexity()}})
                     .dump() +
                 "\n";
        payload = lines;
    }

    std::ostringstream sum;
    sum << "regdemo n=" << cfg.n << " graph=" << cfg.graph << " eps=" << fmt_double(cfg.eps)
        << " converged=" << (trace.converged ? "true" : "false")
        << " final_residual=" << fmt_double(trace.final_residual) << " steps=" << steps
        << " complexity=" << trace.partition.complexity();
    deliver(cfg.common, payload, sum.str());
    return 0;
}

struct SweepCfg {
    std::string pattern;
    std::string n_list;
    bool odd_primes = false;
    CommonOpts common;
};

int run_sweep(const SweepCfg& cfg) {
    auto pat = PatternSet::parse(cfg.pattern);
    auto ns = parse_i64_list(cfg.n_list);
    i64 top = 2;
    for (i64 n : ns) top = std::max(top, n);
    auto rows = scaling_experiment(pat, ns, !cfg.odd_primes, shared_sieve(static_cast<u64>(top)),
                                   enumeration_budget(cfg.common), cfg.common.threads);

    bool all_complete = true;
    double rmin = 0.0, rmax = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
        all_complete &= rows[i].complete;
        const double r = rows[i].ratio;
        if (i == 0 || r < rmin) rmin = r;
        if (i == 0 || r > rmax) rmax = r;
    }

    const std::string fmt = pick_format(cfg.common, "csv");
    std::string payload;
    if (fmt == "csv") {
        CsvTable t({"N", "count", "predicted_scale", "ratio"});
        for (const auto& r : rows)
            t.row({std::to_string(r.n_cap), std::to_string(r.total_pairs),
                   fmt_double(r.predicted_scale), fmt_double(r.ratio)});
        payload = t.str();
    } else {
        json j = with_schema({{"pattern", cfg.pattern},
                              {"odd_primes", cfg.odd_primes},
                              {"rows", rows}});
        payload = j.dump(2) + "\n";
    }

    std::ostringstream sum;
    sum << "sweep pattern=" << cfg.pattern << " rows=" << rows.size()
        << " complete=" << (all_complete ? "true" : "false") << " ratio_min=" << fmt_double(rmin)
        << " ratio_max=" << fmt_double(rmax);
    deliver(cfg.common, payload, sum.str());
    return 0;
}

// --------------------------------------------------------------------- app

int run(int argc, char** argv) {
    ConfigSeeder seeder;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc)
            seeder.load(argv[i + 1]);
        else if (a.rfind("--config=", 0) == 0)
            seeder.load(a.substr(9));
    }

    CLI::App app{"experiments with sieve-weighted measures, box norms, and constellations"};
    app.require_subcommand(1);

    MeasureProfileCfg mp_cfg;
    auto* mp = app.add_subcommand("measure-profile", "tabulate a sieve weight profile");
    seeder.seed("n", mp_cfg.n);
    seeder.seed("omega", mp_cfg.omega);
    seeder.seed("b", mp_cfg.b);
    seeder.seed("stub", mp_cfg.stub);
    seeder.seed("r-rule", mp_cfg.r_rule);
    seeder.seed("r-value", mp_cfg.r_value);
    seeder.seed("eps1", mp_cfg.eps1);
    seeder.seed("eps2", mp_cfg.eps2);
    mp->add_option("--n", mp_cfg.n, "modulus / table length")->required(!mp_cfg.n);
    mp->add_option("--omega", mp_cfg.omega, "sieve level: W = product of primes <= omega-th");
    mp->add_option("--b", mp_cfg.b, "residue class, coprime to W");
    mp->add_flag("--stub", mp_cfg.stub, "constant-1 stub weights");
    mp->add_option("--r-rule", mp_cfg.r_rule, "truncation rule: paper|window");
    mp->add_option("--r-value", mp_cfg.r_value, "explicit truncation R (overrides rule)");
    mp->add_option("--eps1", mp_cfg.eps1, "window lower fraction");
    mp->add_option("--eps2", mp_cfg.eps2, "window upper fraction");
    add_common(mp, mp_cfg.common, seeder);

    FormsCfg f_cfg;
    auto* fo = app.add_subcommand("forms", "derive the linear-form family of a simplex");
    seeder.seed("simplex", f_cfg.simplex);
    seeder.seed("n", f_cfg.n);
    fo->add_option("--simplex", f_cfg.simplex, "vertices, e.g. \"0,0;1,0;0,1\"")
        ->required(f_cfg.simplex.empty());
    fo->add_option("--n", f_cfg.n, "prime modulus");
    add_common(fo, f_cfg.common, seeder);

    BoxNormCfg b_cfg;
    auto* bn = app.add_subcommand("boxnorm", "weighted box norm of a grid function");
    seeder.seed("n", b_cfg.n);
    seeder.seed("simplex", b_cfg.simplex);
    seeder.seed("edge", b_cfg.edge);
    seeder.seed("stub-weights", b_cfg.stub_weights);
    seeder.seed("omega", b_cfg.omega);
    seeder.seed("r-rule", b_cfg.r_rule);
    seeder.seed("r-value", b_cfg.r_value);
    seeder.seed("eps1", b_cfg.eps1);
    seeder.seed("eps2", b_cfg.eps2);
    seeder.seed("fn", b_cfg.fn);
    seeder.seed("value", b_cfg.value);
    seeder.seed("density", b_cfg.density);
    seeder.seed("fn-seed", b_cfg.fn_seed);
    bn->add_option("--n", b_cfg.n, "prime modulus");
    bn->add_option("--simplex", b_cfg.simplex, "simplex defining the weight system");
    bn->add_option("--edge", b_cfg.edge, "vertex-pair bitmask (default 3 = {0,1})");
    bn->add_flag("--stub-weights", b_cfg.stub_weights, "constant-1 weights");
    bn->add_option("--omega", b_cfg.omega, "sieve level for weighted mode");
    bn->add_option("--r-rule", b_cfg.r_rule, "truncation rule: paper|window");
    bn->add_option("--r-value", b_cfg.r_value, "explicit truncation R");
    bn->add_option("--eps1", b_cfg.eps1, "window lower fraction");
    bn->add_option("--eps2", b_cfg.eps2, "window upper fraction");
    bn->add_option("--fn", b_cfg.fn, "grid function: const|random");
    bn->add_option("--value", b_cfg.value, "constant value for fn=const");
    bn->add_option("--density", b_cfg.density, "indicator density for fn=random");
    bn->add_option("--fn-seed", b_cfg.fn_seed, "seed for fn=random");
    add_common(bn, b_cfg.common, seeder);

    CountCfg c_cfg;
    auto* co = app.add_subcommand("count", "count affine pattern copies in [1,N]^d");
    seeder.seed("pattern", c_cfg.pattern);
    seeder.seed("n", c_cfg.n);
    seeder.seed("set", c_cfg.set);
    seeder.seed("min-prime", c_cfg.min_prime);
    seeder.seed("include-t0", c_cfg.include_t0);
    co->add_option("--pattern", c_cfg.pattern, "points, e.g. \"0;1\"")
        ->required(c_cfg.pattern.empty());
    co->add_option("--n", c_cfg.n, "box side N")->required(!c_cfg.n);
    co->add_option("--set", c_cfg.set, "ambient set: primes|all");
    co->add_option("--min-prime", c_cfg.min_prime, "smallest prime admitted (set=primes)");
    co->add_flag("--include-t0", c_cfg.include_t0, "count t = 0 placements too");
    add_common(co, c_cfg.common, seeder);

    LfcCfg l_cfg;
    auto* lf = app.add_subcommand("lfc", "linear-forms condition probe");
    seeder.seed("forms", l_cfg.forms);
    seeder.seed("n-list", l_cfg.n_list);
    seeder.seed("omega-list", l_cfg.omega_list);
    seeder.seed("r-rule", l_cfg.r_rule);
    lf->add_option("--forms", l_cfg.forms, "coefficient rows, e.g. \"1,0;0,1;1,1\"");
    lf->add_option("--n-list", l_cfg.n_list, "comma-separated moduli");
    lf->add_option("--omega-list", l_cfg.omega_list, "comma-separated sieve levels");
    lf->add_option("--r-rule", l_cfg.r_rule, "truncation rule: paper|window");
    add_common(lf, l_cfg.common, seeder);

    RegDemoCfg r_cfg;
    auto* rd = app.add_subcommand("regdemo", "energy-increment demonstrator on Z_N^2");
    seeder.seed("n", r_cfg.n);
    seeder.seed("eps", r_cfg.eps);
    seeder.seed("graph", r_cfg.graph);
    seeder.seed("density", r_cfg.density);
    seeder.seed("graph-seed", r_cfg.graph_seed);
    seeder.seed("max-iters", r_cfg.max_iters);
    seeder.seed("edge", r_cfg.edge);
    rd->add_option("--n", r_cfg.n, "prime modulus");
    rd->add_option("--eps", r_cfg.eps, "target box-norm residual");
    rd->add_option("--graph", r_cfg.graph, "graph: half|random");
    rd->add_option("--density", r_cfg.density, "density for graph=random");
    rd->add_option("--graph-seed", r_cfg.graph_seed, "seed for graph=random");
    rd->add_option("--max-iters", r_cfg.max_iters, "iteration cap");
    rd->add_option("--edge", r_cfg.edge, "vertex-pair bitmask");
    add_common(rd, r_cfg.common, seeder);

    SweepCfg s_cfg;
    auto* sw = app.add_subcommand("sweep", "constellation scaling table across N");
    seeder.seed("pattern", s_cfg.pattern);
    seeder.seed("n-list", s_cfg.n_list);
    seeder.seed("odd-primes", s_cfg.odd_primes);
    sw->add_option("--pattern", s_cfg.pattern, "points, e.g. \"0;1\"")
        ->required(s_cfg.pattern.empty());
    sw->add_option("--n-list", s_cfg.n_list, "comma-separated box sides")
        ->required(s_cfg.n_list.empty());
    sw->add_flag("--odd-primes", s_cfg.odd_primes, "exclude 2 from the prime set");
    add_common(sw, s_cfg.common, seeder);

    seeder.check_unknown();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    if (mp->parsed()) return run_measure_profile(mp_cfg);
    if (fo->parsed()) return run_forms(f_cfg);
    if (bn->parsed()) return run_boxnorm(b_cfg);
    if (co->parsed()) return run_count(c_cfg);
    if (lf->parsed()) return run_lfc(l_cfg);
    if (rd->parsed()) return run_regdemo(r_cfg);
    if (sw->parsed()) return run_sweep(s_cfg);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const PropertyError& e) {
        std::cerr << "property failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
