#include <doctest.h>

#include "stpp/construct.hpp"
#include "stpp/errors.hpp"
#include "stpp/io.hpp"
#include "test_helpers.hpp"

using namespace stpp;

TEST_CASE("composite per-unit arc cost") {
    test::TinyNet tn;
    auto& net = tn.inst.network;

    SUBCASE("zero volume and zero distance cost nothing") {
        net.arcs[tn.dir0].distance = 0;
        net.arcs[tn.dir0].carbon_cost = 10;
        tn.add_commodity(tn.s0, 3, 1.0, 4);
        tn.done();
        tn.inst.commodities[0].volume = 0;
        CHECK(commodity_arc_cost(tn.inst, tn.dir0, 0) == doctest::Approx(0.0));
    }
    SUBCASE("carbon + capital on a unit-headed arc") {
        net.arcs[tn.dir0].bin_capacity = 2.0;
        net.arcs[tn.dir0].carbon_cost = 10.0;
        net.arcs[tn.dir0].distance = 100.0;
        tn.add_commodity(tn.s0, 3, 1.0, 4, 1, 0.05);
        tn.done();
        // 0.5 * 10 + 100 * 0.05 = 10
        CHECK(commodity_arc_cost(tn.inst, tn.dir0, 0) == doctest::Approx(10.0));
    }
    SUBCASE("platform head adds its handling fee") {
        net.arcs[tn.col00].bin_capacity = 2.0;
        net.arcs[tn.col00].carbon_cost = 10.0;
        net.arcs[tn.col00].distance = 100.0;
        net.locations[tn.p0].platform->unit_cost = 4.0;
        tn.add_commodity(tn.s0, 3, 1.0, 4, 1, 0.05);
        tn.done();
        // 10 + (1/2)*4 = 12
        CHECK(commodity_arc_cost(tn.inst, tn.col00, 0) == doctest::Approx(12.0));
    }
    SUBCASE("outsourced arcs price volume instead of bins") {
        net.arcs[tn.col00].outsourced = true;
        net.arcs[tn.col00].outsource_cost = 8.0;
        net.arcs[tn.col00].bin_capacity = 2.0;
        net.arcs[tn.col00].carbon_cost = 0;
        net.arcs[tn.col00].distance = 0;
        net.locations[tn.p0].platform->unit_cost = 0;
        tn.add_commodity(tn.s0, 3, 1.0, 4);
        tn.done();
        CHECK(commodity_arc_cost(tn.inst, tn.col00, 0) == doctest::Approx(4.0));  // (1/2)*8
    }
}

TEST_CASE("evaluate") {
    SUBCASE("empty solution evaluates to zero") {
        test::TinyNet tn;
        tn.add_commodity(tn.s0, 3, 0.5, 4);
        tn.done();
        Solution sol(tn.inst);
        auto cost = evaluate(sol);
        CHECK(cost.total == 0);
        CHECK(cost.bin_cost == 0);
        CHECK(cost.commodity_cost == 0);
        CHECK(cost.overload_cost == 0);
    }
    SUBCASE("single bundle on a direct arc: one bin plus commodity terms") {
        test::TinyNet tn;
        auto& net = tn.inst.network;
        net.arcs[tn.dir0].carbon_cost = 6.0;    // volume 0.5/1.0 -> 3
        net.arcs[tn.dir0].distance = 100.0;
        tn.add_commodity(tn.s0, 3, 0.5, 2, 1, 0.01);  // capital 1.0
        tn.done();
        Expanded exp = Expanded::build(tn.inst);
        Solution sol = constructive(tn.inst, exp);
        auto cost = evaluate(sol);
        CHECK(cost.bin_cost == doctest::Approx(10.0));      // one bin at 10
        CHECK(cost.commodity_cost == doctest::Approx(4.0)); // 3 + 1
        CHECK(cost.overload_cost == 0);
        CHECK(cost.total == doctest::Approx(14.0));
        CHECK(sol.total_cost() == doctest::Approx(cost.total));
    }
    SUBCASE("platform overload is priced per timed node") {
        test::TinyNet tn;
        auto& net = tn.inst.network;
        // Force both bundles through P0 by deleting the directs and P1 spurs.
        net.arcs[tn.dir0].travel_time = 7;  // unusable within tau
        net.arcs[tn.dir1].travel_time = 7;
        net.locations[tn.p0].platform->capacity = 1.0;
        net.locations[tn.p0].platform->overload_cost = 7.0;
        tn.add_commodity(tn.s0, 3, 2.0, 3);
        tn.add_commodity(tn.s1, 3, 2.0, 3);
        tn.done();
        Expanded exp = Expanded::build(tn.inst);
        Solution sol = constructive(tn.inst, exp);
        // Inbound 4 m3 in one week against capacity 1 -> overload 3 at cost 7.
        auto cost = evaluate(sol);
        CHECK(cost.overload_cost == doctest::Approx(21.0));
    }
}

TEST_CASE("evaluate rejects corrupted manifests") {
    test::TinyNet tn;
    tn.add_commodity(tn.s0, 3, 0.5, 4);
    tn.done();
    Expanded exp = Expanded::build(tn.inst);
    Solution sol = constructive(tn.inst, exp);
    // Corrupt a manifest behind the solution's back.
    auto key = sol.manifests().begin()->first;
    sol.manifest_mut(key).bins[0].used = 99.0;
    CHECK_THROWS_AS(evaluate(sol), ValidationError);
}

TEST_CASE("incremental totals match scratch evaluation through edits") {
    GenParams p = GenParams::preset_of("xs");
    Instance inst = generate(p, 11);
    Expanded exp = Expanded::build(inst);
    Solution sol = constructive(inst, exp);

    auto check_match = [&] {
        auto scratch = evaluate(sol);
        CHECK(sol.total_cost() ==
              doctest::Approx(scratch.total).epsilon(1e-6));
        CHECK(sol.bin_cost() == doctest::Approx(scratch.bin_cost).epsilon(1e-6));
        CHECK(sol.commodity_cost() == doctest::Approx(scratch.commodity_cost).epsilon(1e-6));
    };
    check_match();

    for (int b = 0; b < 3; ++b) {
        remove_bundle(sol, b);
        check_match();
        insert_bundle(sol, exp.tt, exp.sub[b]);
        check_match();
    }
}

TEST_CASE("removing a bundle never raises any arc's bin count") {
    GenParams p = GenParams::preset_of("xs");
    Instance inst = generate(p, 5);
    Expanded exp = Expanded::build(inst);
    Solution sol = constructive(inst, exp);
    std::map<TimedArcKey, long long> before;
    for (const auto& [key, m] : sol.manifests()) before[key] = m.bin_count();
    double bin_cost_before = sol.bin_cost();
    remove_bundle(sol, 0);
    for (const auto& [key, m] : sol.manifests()) CHECK(m.bin_count() <= before[key]);
    CHECK(sol.bin_cost() <= bin_cost_before + 1e-9);
}

TEST_CASE("evaluate is invariant under bin reordering") {
    test::TinyNet tn;
    tn.add_commodity(tn.s0, 3, 0.4, 4);
    tn.add_commodity(tn.s0, 3, 0.9, 4);
    tn.done();
    Expanded exp = Expanded::build(tn.inst);
    Solution sol = constructive(tn.inst, exp);
    double before = evaluate(sol).total;
    for (const auto& [key, m] : sol.manifests()) {
        auto& mm = sol.manifest_mut(key);
        std::reverse(mm.bins.begin(), mm.bins.end());
    }
    CHECK(evaluate(sol).total == doctest::Approx(before));
}
