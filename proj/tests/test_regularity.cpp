#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "constell/regularity.hpp"
#include "test_util.hpp"

using namespace constell;
using testutil::corner_ws;
using testutil::random_bounded;
using testutil::random_indicator;
using testutil::stub_ws;

namespace {

GridFn half_graph(i64 n) {
    return GridFn::from_fn(n, 2,
                           [](const std::vector<i64>& p) { return p[1] <= p[0] ? 1.0 : 0.0; });
}

// generators encoding the binary digits of the coordinate: atoms are points
BoundaryPartition singleton_partition(i64 n) {
    BoundaryPartition part(n);
    for (int axis = 0; axis < 2; ++axis)
        for (int bit = 0; bit < 4; ++bit) {
            std::vector<char> ind(static_cast<size_t>(n));
            for (i64 v = 0; v < n; ++v) ind[static_cast<size_t>(v)] = (v >> bit) & 1;
            part.add_generator(axis, ind);
        }
    return part;
}

double l2_mu(const GridFn& f, const GridFn& mu) { return inner_mu(f, f, mu); }

}  // namespace

TEST_CASE("partition atoms and complexity bookkeeping") {
    BoundaryPartition part(6);
    CHECK(part.complexity() == 0);
    CHECK(part.atom_count() == 1);

    std::vector<char> low = {1, 1, 1, 0, 0, 0};
    std::vector<char> even = {1, 0, 1, 0, 1, 0};
    part.add_generator(0, low);
    CHECK(part.complexity() == 1);
    CHECK(part.atom_count() == 2);
    part.add_generator(1, even);
    CHECK(part.complexity() == 2);
    CHECK(part.atom_count() == 4);
    part.add_generator(0, even);
    CHECK(part.complexity() == 3);
    // axis 0 cells: {0,2},{4},{1},{3,5} and axis 1 cells: evens/odds
    CHECK(part.atom_count() == 8);
    CHECK(part.atom_count() <= part.label_bound());

    // labels cover every point and agree with per-axis cells
    for (i64 a = 0; a < 6; ++a)
        for (i64 b = 0; b < 6; ++b)
            CHECK(part.atom_of(a, b) ==
                  (part.axis_cell(0, a) | (part.axis_cell(1, b) << 2)));

    CHECK_THROWS_AS(part.add_generator(2, even), std::invalid_argument);
    CHECK_THROWS_AS(part.add_generator(0, std::vector<char>{1, 0}), std::invalid_argument);

    BoundaryPartition cap(4);
    std::vector<char> g4 = {1, 0, 1, 0};
    for (int i = 0; i < 20; ++i) cap.add_generator(i % 2, g4);
    CHECK_THROWS_AS(cap.add_generator(0, g4), std::invalid_argument);
}

TEST_CASE("conditional expectation: trivial, singletons, hand case, zero mass") {
    const i64 n = 5;
    auto ws = stub_ws("0,0;1,0;0,1", n);
    const GridFn mu_unif = tabulate_mu_e(ws, 0b110);
    const GridFn f = random_bounded(n, 2, 77);

    // trivial partition, uniform mu: the plain mean everywhere
    BoundaryPartition trivial(n);
    GridFn ce = conditional_expectation(f, trivial, mu_unif);
    KahanSum mean;
    for (size_t i = 0; i < f.size(); ++i) mean.add(f.at_index(i));
    const double m = mean.value() / static_cast<double>(f.size());
    for (size_t i = 0; i < ce.size(); ++i) CHECK(ce.at_index(i) == Catch::Approx(m).margin(1e-12));

    // singleton atoms: ce == f
    GridFn ce_pt = conditional_expectation(f, singleton_partition(n), mu_unif);
    for (size_t i = 0; i < f.size(); ++i)
        CHECK(ce_pt.at_index(i) == Catch::Approx(f.at_index(i)).margin(1e-12));

    // hand case: mu(a,b) = (a+1) * w[b], g(a,b) = a + 2b, cells {0,1} and {2,3,4}
    const double w[5] = {1, 2, 1, 1, 3};
    GridFn mu_hand = GridFn::from_fn(
        n, 2, [&](const std::vector<i64>& p) { return (double)(p[0] + 1) * w[p[1]]; });
    GridFn g_hand = GridFn::from_fn(
        n, 2, [](const std::vector<i64>& p) { return (double)(p[0] + 2 * p[1]); });
    BoundaryPartition two(n);
    two.add_generator(0, std::vector<char>{1, 1, 0, 0, 0});
    GridFn ce_hand = conditional_expectation(g_hand, two, mu_hand);
    // Sum_{a<=1,b} g*mu = 130, mass 24; Sum_{a>=2,b} g*mu = 760, mass 96.
    CHECK(ce_hand.at({0, 3}) == Catch::Approx(65.0 / 12.0).margin(1e-12));
    CHECK(ce_hand.at({1, 0}) == Catch::Approx(65.0 / 12.0).margin(1e-12));
    CHECK(ce_hand.at({2, 4}) == Catch::Approx(95.0 / 12.0).margin(1e-12));
    CHECK(ce_hand.at({4, 1}) == Catch::Approx(95.0 / 12.0).margin(1e-12));
    // independent oracle: direct per-cell quotients
    for (int cell = 0; cell < 2; ++cell) {
        double num = 0.0, den = 0.0;
        for (i64 a = 0; a < n; ++a) {
            if ((a <= 1) != (cell == 0)) continue;
            for (i64 b = 0; b < n; ++b) {
                num += g_hand.at({a, b}) * mu_hand.at({a, b});
                den += mu_hand.at({a, b});
            }
        }
        const i64 probe_a = cell == 0 ? 1 : 3;
        CHECK(ce_hand.at({probe_a, 2}) == Catch::Approx(num / den).margin(1e-12));
    }

    // zero-mass atom takes the value 1
    GridFn mu_gap = mu_hand;
    for (i64 b = 0; b < n; ++b) mu_gap.set({4, b}, 0.0);
    BoundaryPartition iso(n);
    iso.add_generator(0, std::vector<char>{0, 0, 0, 0, 1});
    GridFn ce_gap = conditional_expectation(g_hand, iso, mu_gap);
    for (i64 b = 0; b < n; ++b) CHECK(ce_gap.at({4, b}) == 1.0);
}

TEST_CASE("tower identity and Pythagoras") {
    const i64 n = 11;
    auto ws = corner_ws(n);
    GridFn mu = tabulate_mu_e(ws, 0b110);
    const double mass = mean_mu(mu);
    REQUIRE(mass > 0.1);
    for (size_t i = 0; i < mu.size(); ++i) mu.set_index(i, mu.at_index(i) / mass);

    BoundaryPartition part(n);
    std::vector<char> low(static_cast<size_t>(n)), odd(static_cast<size_t>(n));
    for (i64 v = 0; v < n; ++v) {
        low[static_cast<size_t>(v)] = v < 6;
        odd[static_cast<size_t>(v)] = v & 1;
    }
    part.add_generator(0, low);
    part.add_generator(1, odd);

    for (u64 seed : {3u, 4u, 5u}) {
        const GridFn f = random_bounded(n, 2, seed);
        GridFn ce = conditional_expectation(f, part, mu);
        GridFn ce2 = conditional_expectation(ce, part, mu);
        for (size_t i = 0; i < ce.size(); ++i)
            CHECK(ce2.at_index(i) == Catch::Approx(ce.at_index(i)).margin(1e-12));

        GridFn resid = f;
        for (size_t i = 0; i < f.size(); ++i) resid.set_index(i, f.at_index(i) - ce.at_index(i));
        CHECK(l2_mu(f, mu) ==
              Catch::Approx(l2_mu(ce, mu) + l2_mu(resid, mu)).margin(1e-9));
    }
}

TEST_CASE("energy basics and refinement monotonicity") {
    const i64 n = 11;
    auto stub = stub_ws("0,0;1,0;0,1", n);
    const GridFn mu = tabulate_mu_e(stub, 0b110);
    REQUIRE(mean_mu(mu) == 1.0);

    BoundaryPartition part(n);
    GridFn c = GridFn(n, 2, -0.75);
    CHECK(energy(c, part, mu) == Catch::Approx(0.5625).margin(1e-12));

    CounterRng rng(912);
    for (int trial = 0; trial < 6; ++trial) {
        const GridFn f = random_bounded(n, 2, 100 + static_cast<u64>(trial));
        BoundaryPartition coarse(n);
        std::vector<char> g1(static_cast<size_t>(n)), g2(static_cast<size_t>(n));
        for (i64 v = 0; v < n; ++v) {
            g1[static_cast<size_t>(v)] = rng.unit(static_cast<u64>(trial) * 64 + v) < 0.5;
            g2[static_cast<size_t>(v)] = rng.unit(static_cast<u64>(trial) * 64 + 32 + v) < 0.5;
        }
        coarse.add_generator(0, g1);
        BoundaryPartition fine = coarse;
        fine.add_generator(1, g2);
        fine.add_generator(0, g2);
        CHECK(energy(f, fine, mu) >= energy(f, coarse, mu) - 1e-12);
        CHECK(energy(f, coarse, mu) >= energy(f, BoundaryPartition(n), mu) - 1e-12);
    }
}

TEST_CASE("gamma aggregation matches the box norm power") {
    const i64 n = 11;
    auto stub = stub_ws("0,0;1,0;0,1", n);
    auto weighted = corner_ws(n);
    EvalOptions ex;
    ex.mode = EvalMode::Exact;

    int checked = 0;
    for (const WeightSystem* ws : {&stub, &weighted}) {
        for (u32 edge : {0b110u, 0b011u}) {
            const GridFn mu = tabulate_mu_e(*ws, edge);
            for (u64 seed = 1; seed <= 5; ++seed) {
                const double density = 0.25 + 0.1 * static_cast<double>(seed);
                const GridFn g = random_indicator(n, 2, density, seed * 17);
                BoundaryPartition part(n);
                if (seed % 2 == 0) {
                    std::vector<char> low(static_cast<size_t>(n));
                    for (i64 v = 0; v < n; ++v) low[static_cast<size_t>(v)] = v < 5;
                    part.add_generator(0, low);
                }
                const GridFn f = balanced_function(g, part, mu);
                const auto scan = gamma_scan(f, *ws, edge);
                const auto bn = box_norm(f, *ws, edge, ex);
                CHECK(scan.aggregated == Catch::Approx(bn.raw_power).margin(1e-9));
                ++checked;
            }
        }
    }
    CHECK(checked == 20);

    // the identity is pure algebra: arbitrary bounded f on the weighted system
    const GridFn f = random_bounded(n, 2, 5150);
    const auto scan = gamma_scan(f, weighted, 0b110);
    const auto bn = box_norm(f, weighted, 0b110, ex);
    CHECK(scan.aggregated == Catch::Approx(bn.raw_power).margin(1e-9));

    // gamma_q wrapper equals the manual composition
    const GridFn g = random_indicator(n, 2, 0.4, 99);
    BoundaryPartition trivial(n);
    const GridFn mu = tabulate_mu_e(weighted, 0b110);
    const GridFn fg = balanced_function(g, trivial, mu);
    auto pws = ParametricWeightSystem::extend_for_box(weighted, 0b110);
    for (i64 qa : {0, 4, 10})
        for (i64 qb : {2, 7}) {
            std::vector<i64> q = {qa, qb};
            CHECK(gamma_q(g, trivial, weighted, 0b110, q) == gamma_at(fg, pws, q));
        }
}

TEST_CASE("gamma vanishes when G is everything") {
    const i64 n = 7;
    auto ws = corner_ws(n);
    const GridFn full(n, 2, 1.0);
    BoundaryPartition part(n);
    const GridFn mu = tabulate_mu_e(ws, 0b110);
    const GridFn f = balanced_function(full, part, mu);
    for (size_t i = 0; i < f.size(); ++i) CHECK(f.at_index(i) == 0.0);
    const auto scan = gamma_scan(f, ws, 0b110);
    CHECK(scan.aggregated == 0.0);
    CHECK(scan.best_gamma == 0.0);
}

TEST_CASE("half-graph gamma landscape") {
    const i64 n = 11;
    auto stub = stub_ws("0,0;1,0;0,1", n);
    const u32 edge = 0b110;
    const GridFn hg = half_graph(n);
    BoundaryPartition trivial(n);
    const GridFn mu = tabulate_mu_e(stub, edge);
    const GridFn f = balanced_function(hg, trivial, mu);

    EvalOptions ex;
    ex.mode = EvalMode::Exact;
    const double eps = box_norm(f, stub, edge, ex).norm;
    INFO("half-graph residual " << eps);
    CHECK(eps > 0.1);

    const double eta = std::pow(eps, 4.0);
    const auto scan = gamma_scan(f, stub, edge, eta / 4.0);
    INFO("best gamma " << scan.best_gamma << " good mass " << scan.good_mass);
    CHECK(scan.best_gamma >= eta / 4.0);
    // good q's carry at least eps^8 / 8 of the psi-mass
    CHECK(scan.good_mass >= std::pow(eps, 8.0) / 8.0);
    // aggregation pins the mean: E Gamma psi = eps^4 exactly
    CHECK(scan.aggregated == Catch::Approx(eta).margin(1e-9));
}

TEST_CASE("increment step on the half graph") {
    const i64 n = 11;
    auto stub = stub_ws("0,0;1,0;0,1", n);
    const u32 edge = 0b110;
    const GridFn hg = half_graph(n);
    BoundaryPartition trivial(n);
    const GridFn mu = tabulate_mu_e(stub, edge);
    const GridFn f = balanced_function(hg, trivial, mu);
    EvalOptions ex;
    ex.mode = EvalMode::Exact;
    const double eta = box_norm(f, stub, edge, ex).raw_power;
    REQUIRE(eta > 0.0);

    auto res = increment_step(hg, trivial, stub, edge, eta);
    const auto& rep = res.report;
    INFO("q = (" << rep.q[0] << "," << rep.q[1] << ") gamma " << rep.gamma << " inc "
                 << rep.increment << " combo " << rep.sign_combo << " t " << rep.t1 << "/"
                 << rep.t2);
    CHECK(rep.q_found);
    CHECK(rep.gamma >= eta / 4.0);
    CHECK(rep.increment > 0.0);
    CHECK(rep.accepted);
    CHECK(rep.increment == Catch::Approx(rep.after - rep.before).margin(1e-15));
    CHECK(res.refined.complexity() == trivial.complexity() + 2);
    CHECK(rep.mass_base == 1.0);
    CHECK(rep.mass_param == 1.0);  // stub weights: mu_q is uniform too
    CHECK(rep.note.empty());

    // quasirandom set with an eta far above its correlation level: declines
    const GridFn rnd = random_indicator(n, 2, 0.5, 4242);
    auto dec = increment_step(rnd, trivial, stub, edge, 1.0);
    CHECK_FALSE(dec.report.q_found);
    CHECK(dec.report.note.find("declining") != std::string::npos);
    CHECK(dec.refined.complexity() == 0);
    const GridFn fr = balanced_function(rnd, trivial, mu);
    CHECK(box_norm(fr, stub, edge, ex).norm < 0.45);
}

TEST_CASE("kvn loop on the half graph") {
    const i64 n = 11;
    auto stub = stub_ws("0,0;1,0;0,1", n);
    const u32 edge = 0b110;
    const GridFn hg = half_graph(n);

    auto trace = kvn_loop(hg, stub, edge, 0.1, 16);
    INFO("iterations " << trace.records.size() << " final residual " << trace.final_residual);
    for (const auto& rec : trace.records)
        INFO("iter " << rec.iter << " residual " << rec.residual << " energy " << rec.energy_base
                     << " compl " << rec.complexity << " inc " << rec.increment);
    CHECK(trace.converged);
    CHECK(trace.final_residual <= 0.1);
    REQUIRE(trace.records.size() >= 2);  // the half graph is not 0.1-regular at the start

    const double eta = std::pow(0.1, 4.0);
    for (size_t i = 0; i < trace.records.size(); ++i) {
        const auto& rec = trace.records[i];
        CHECK(rec.complexity <= static_cast<int>(2 * i));
        if (i > 0) {
            CHECK(rec.energy_base >= trace.records[i - 1].energy_base - 1e-12);
            CHECK(rec.complexity <= trace.records[i - 1].complexity + 2);
        }
        if (rec.stepped) {
            CHECK(rec.accepted);
            CHECK(rec.increment >= 0.5 * std::pow(2.0, -8.0) * eta * eta);
        }
    }
    CHECK(trace.partition.complexity() ==
          trace.records.back().complexity);
}

TEST_CASE("kvn loop trivial cases") {
    const i64 n = 11;
    auto stub = stub_ws("0,0;1,0;0,1", n);
    const u32 edge = 0b110;

    // G = V_e: balanced function is exactly zero, zero iterations
    auto trace_full = kvn_loop(GridFn(n, 2, 1.0), stub, edge, 0.1);
    CHECK(trace_full.converged);
    CHECK(trace_full.records.size() == 1);
    CHECK(trace_full.records[0].residual == 0.0);
    CHECK_FALSE(trace_full.records[0].stepped);
    CHECK(trace_full.partition.complexity() == 0);

    // quasirandom G: already below a loose target, zero iterations
    const GridFn rnd = random_indicator(n, 2, 0.5, 4242);
    auto trace_rnd = kvn_loop(rnd, stub, edge, 0.45);
    INFO("quasirandom residual " << trace_rnd.final_residual);
    CHECK(trace_rnd.converged);
    CHECK(trace_rnd.records.size() == 1);
    CHECK_FALSE(trace_rnd.records[0].stepped);

    // weighted system carries the experimental note through a step
    auto weighted = corner_ws(n);
    const GridFn mu_w = tabulate_mu_e(weighted, edge);
    const GridFn fw = balanced_function(half_graph(n), BoundaryPartition(n), mu_w);
    EvalOptions ex;
    ex.mode = EvalMode::Exact;
    const double eta_w = box_norm(fw, weighted, edge, ex).raw_power;
    if (eta_w > 0.0) {
        auto res = increment_step(half_graph(n), BoundaryPartition(n), weighted, edge, eta_w);
        CHECK(res.report.note.find("experimental") != std::string::npos);
    }
}

TEST_CASE("regularity input validation") {
    const i64 n = 7;
    auto stub = stub_ws("0,0;1,0;0,1", n);
    BoundaryPartition part(n);
    GridFn g = random_indicator(n, 2, 0.5, 8);

    CHECK_THROWS_AS(increment_step(GridFn(n, 2, 0.5), part, stub, 0b110, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(increment_step(g, part, stub, 0b110, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(increment_step(g, BoundaryPartition(n + 1), stub, 0b110, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(increment_step(g, part, stub, 0b111, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(kvn_loop(g, stub, 0b110, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tabulate_mu_e(stub, 0b111), std::invalid_argument);
    CHECK_THROWS_AS(gamma_q(g, part, stub, 0b110, {0}), std::invalid_argument);
}

TEST_CASE("regularity determinism across threads") {
    const i64 n = 11;
    auto weighted = corner_ws(n);
    const u32 edge = 0b110;
    const GridFn mu = tabulate_mu_e(weighted, edge);
    const GridFn f = balanced_function(half_graph(n), BoundaryPartition(n), mu);

    auto s1 = gamma_scan(f, weighted, edge, 1e-6, 1);
    auto s4 = gamma_scan(f, weighted, edge, 1e-6, 4);
    CHECK(s1.aggregated == s4.aggregated);
    CHECK(s1.best_gamma == s4.best_gamma);
    CHECK(s1.best_q == s4.best_q);
    CHECK(s1.good_mass == s4.good_mass);

    auto stub = stub_ws("0,0;1,0;0,1", n);
    IncrementOptions io1, io3;
    io1.threads = 1;
    io3.threads = 3;
    auto t1 = kvn_loop(half_graph(n), stub, edge, 0.1, 16, io1);
    auto t3 = kvn_loop(half_graph(n), stub, edge, 0.1, 16, io3);
    REQUIRE(t1.records.size() == t3.records.size());
    for (size_t i = 0; i < t1.records.size(); ++i) {
        CHECK(t1.records[i].residual == t3.records[i].residual);
        CHECK(t1.records[i].energy_base == t3.records[i].energy_base);
        CHECK(t1.records[i].q == t3.records[i].q);
        CHECK(t1.records[i].increment == t3.records[i].increment);
    }
    CHECK(t1.final_residual == t3.final_residual);
}
