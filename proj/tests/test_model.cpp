#include <doctest.h>

#include <set>

#include "stpp/errors.hpp"
#include "stpp/io.hpp"
#include "stpp/rng.hpp"
#include "test_helpers.hpp"

using namespace stpp;

TEST_CASE("wrap_week maps onto [1,T]") {
    CHECK(wrap_week(1, 10) == 1);
    CHECK(wrap_week(10, 10) == 10);
    CHECK(wrap_week(11, 10) == 1);
    CHECK(wrap_week(0, 10) == 10);
    CHECK(wrap_week(-3, 10) == 7);
}

TEST_CASE("time-space graph wraps the horizon") {
    test::TinyNet tn(10);
    auto& net = tn.inst.network;
    net.rebuild_indexes();

    // tau=3 arc from week 9 lands on week 2.
    net.arcs[tn.dir0].travel_time = 3;
    TimeSpaceGraph g = build_time_space_graph(net, 10);
    bool found = false;
    for (const auto& ta : g.arcs)
        if (ta.static_arc == tn.dir0 && ta.tail_week == 9) {
            CHECK(ta.head_week == 2);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("time-space graph: zero travel time and counts") {
    Network net;
    auto loc = [&](const std::string& id, LocationKind k) {
        Location l;
        l.id = id;
        l.kind = k;
        if (k == LocationKind::Platform) l.platform = PlatformData{};
        net.locations.push_back(l);
        return static_cast<int>(net.locations.size()) - 1;
    };
    int s = loc("s", LocationKind::Supplier);
    int p = loc("p", LocationKind::Platform);
    int u = loc("u", LocationKind::ProductionUnit);
    Arc a1;
    a1.id = "a1";
    a1.tail = s;
    a1.head = p;
    a1.kind = ArcKind::Collection;
    a1.travel_time = 0;
    a1.bin_capacity = 1;
    net.arcs.push_back(a1);
    Arc a2 = a1;
    a2.id = "a2";
    a2.tail = p;
    a2.head = u;
    a2.kind = ArcKind::Delivery;
    a2.travel_time = 2;
    net.arcs.push_back(a2);
    net.rebuild_indexes();

    SUBCASE("zero travel time stays in week") {
        TimeSpaceGraph g = build_time_space_graph(net, 4);
        for (const auto& ta : g.arcs)
            if (ta.static_arc == 0) CHECK(ta.head_week == ta.tail_week);
    }
    SUBCASE("3 nodes, 2 static arcs, T=5 gives 15 nodes and 10 timed arcs") {
        TimeSpaceGraph g = build_time_space_graph(net, 5);
        CHECK(g.node_count() == 15);
        CHECK(g.arcs.size() == 10);
    }
    SUBCASE("travel time >= T is a horizon error") {
        net.arcs[1].travel_time = 4;
        CHECK_THROWS_AS(build_time_space_graph(net, 4), HorizonError);
    }
}

TEST_CASE("travel-time graph shape") {
    // 1 supplier, 0 platforms, 1 unit.
    Network net;
    Location s;
    s.id = "s";
    s.kind = LocationKind::Supplier;
    net.locations.push_back(s);
    Location u;
    u.id = "u";
    u.kind = LocationKind::ProductionUnit;
    net.locations.push_back(u);

    SUBCASE("script-T = 3 gives 4 nodes and 2 waiting arcs") {
        net.rebuild_indexes();
        TravelTimeGraph tt = build_travel_time_graph(net, 3);
        CHECK(tt.nodes.size() == 4);  // 3 supplier copies + unit at the last step
        int waits = 0;
        for (const auto& a : tt.arcs) waits += a.static_arc < 0;
        CHECK(waits == 2);
    }
    SUBCASE("direct arc with tau=2 has exactly one timed copy (s,1)->(u,3)") {
        Arc d;
        d.id = "d";
        d.tail = 0;
        d.head = 1;
        d.kind = ArcKind::Direct;
        d.travel_time = 2;
        d.bin_capacity = 1;
        net.arcs.push_back(d);
        net.rebuild_indexes();
        TravelTimeGraph tt = build_travel_time_graph(net, 3);
        int copies = 0;
        for (const auto& a : tt.arcs)
            if (a.static_arc == 0) {
                ++copies;
                CHECK(tt.nodes[a.tail].step == 1);
                CHECK(tt.nodes[a.head].step == 3);
            }
        CHECK(copies == 1);
    }
    SUBCASE("arc with tau=4 has zero timed copies at script-T=3") {
        Arc d;
        d.id = "d";
        d.tail = 0;
        d.head = 1;
        d.kind = ArcKind::Direct;
        d.travel_time = 4;
        d.bin_capacity = 1;
        net.arcs.push_back(d);
        net.rebuild_indexes();
        TravelTimeGraph tt = build_travel_time_graph(net, 3);
        for (const auto& a : tt.arcs) CHECK(a.static_arc < 0);
    }
}

TEST_CASE("arcs strictly increase the step coordinate (acyclic)") {
    test::TinyNet tn;
    tn.add_commodity(tn.s0, 3, 0.5, 4);
    tn.done();
    TravelTimeGraph tt = build_travel_time_graph(tn.inst.network, 5);
    for (const auto& a : tt.arcs) CHECK(tt.nodes[a.head].step > tt.nodes[a.tail].step);
}

TEST_CASE("projection formula and shortcut arcs") {
    test::TinyNet tn(10);
    tn.add_commodity(tn.s0, 5, 0.5, 3);
    tn.add_commodity(tn.s0, 2, 0.5, 3);
    tn.done();
    const Instance& inst = tn.inst;

    REQUIRE(inst.orders.size() == 2);
    int o_d5 = inst.orders[0].delivery_week == 5 ? 0 : 1;
    int o_d2 = 1 - o_d5;

    CHECK(project_step(inst, 2, o_d5) == 3);  // 5 - 2
    CHECK(project_step(inst, 5, o_d2) == 7);  // 2 - 5 mod 10

    TravelTimeGraph tt = build_travel_time_graph(inst.network, inst.travel_horizon);
    for (size_t ai = 0; ai < tt.arcs.size(); ++ai) {
        if (tt.arcs[ai].static_arc < 0)
            CHECK(!project_arc(inst, tt, static_cast<int>(ai), o_d5).has_value());
        else
            CHECK(project_arc(inst, tt, static_cast<int>(ai), o_d5).has_value());
    }
}

TEST_CASE("projection consistency along consecutive arcs and injectivity") {
    test::TinyNet tn(9);
    tn.add_commodity(tn.s0, 4, 0.5, 4);
    tn.done();
    const Instance& inst = tn.inst;
    TravelTimeGraph tt = build_travel_time_graph(inst.network, inst.travel_horizon);

    for (size_t a1 = 0; a1 < tt.arcs.size(); ++a1) {
        if (tt.arcs[a1].static_arc < 0) continue;
        for (int a2 : tt.out[tt.arcs[a1].head]) {
            if (tt.arcs[a2].static_arc < 0) continue;
            auto k1 = project_arc(inst, tt, static_cast<int>(a1), 0);
            auto k2 = project_arc(inst, tt, a2, 0);
            REQUIRE(k1);
            REQUIRE(k2);
            CHECK(projected_head_week(inst, *k1) == k2->week);
        }
    }

    std::set<std::pair<int, int>> image;
    for (const auto& n : tt.nodes)
        CHECK(image.insert({n.loc, project_step(inst, n.step, 0)}).second);
}

TEST_CASE("orders and bundles partition commodities") {
    GenParams p = GenParams::preset_of("s");
    Instance inst = generate(p, 42);
    size_t in_orders = 0;
    std::set<int> seen;
    for (const auto& o : inst.orders) {
        in_orders += o.commodities.size();
        for (int m : o.commodities) CHECK(seen.insert(m).second);
    }
    CHECK(in_orders == inst.commodities.size());
    size_t orders_in_bundles = 0;
    for (const auto& b : inst.bundles) orders_in_bundles += b.orders.size();
    CHECK(orders_in_bundles == inst.orders.size());
    for (size_t m = 0; m < inst.commodities.size(); ++m) {
        int o = inst.commodity_order[m];
        CHECK(inst.order_bundle[o] >= 0);
    }
}

TEST_CASE("bundle subgraph prunes and detects infeasibility") {
    SUBCASE("other suppliers never show up") {
        test::TinyNet tn;
        tn.add_commodity(tn.s0, 3, 0.5, 4);
        tn.add_commodity(tn.s1, 3, 0.5, 4);
        tn.done();
        Expanded exp = Expanded::build(tn.inst);
        for (int ai : exp.sub[0].arcs) {
            int tl = exp.tt.nodes[exp.tt.arcs[ai].tail].loc;
            CHECK(tl != tn.s1);
        }
    }
    SUBCASE("platform that cannot reach the sink is pruned") {
        test::TinyNet tn;
        // Remove P1's delivery and its hop back to P0: P1 becomes a trap.
        tn.inst.network.arcs.erase(tn.inst.network.arcs.begin() + tn.del1);
        tn.inst.network.arcs.erase(tn.inst.network.arcs.begin() + tn.pp10);
        tn.add_commodity(tn.s0, 3, 0.5, 4);
        tn.done();
        Expanded exp = Expanded::build(tn.inst);
        for (int ni : exp.sub[0].nodes) CHECK(exp.tt.nodes[ni].loc != tn.p1);
    }
    SUBCASE("deadline below the only route is infeasible") {
        test::TinyNet tn;
        tn.add_commodity(tn.s1, 3, 0.5, 1);  // direct needs 2 weeks
        tn.inst.network.arcs.erase(tn.inst.network.arcs.begin() + tn.col10);
        tn.done();
        CHECK_THROWS_AS(Expanded::build(tn.inst), InfeasibleBundleError);
    }
}

TEST_CASE("order aggregation uses min deadline, bundle uses max") {
    test::TinyNet tn;
    tn.add_commodity(tn.s0, 3, 1.0, 4, 2);  // q=2
    tn.add_commodity(tn.s0, 3, 2.0, 6);
    tn.add_commodity(tn.s0, 5, 0.5, 3);
    tn.done();
    const Instance& inst = tn.inst;
    REQUIRE(inst.orders.size() == 2);
    const Order& o3 = inst.orders[inst.orders[0].delivery_week == 3 ? 0 : 1];
    CHECK(o3.max_delivery_time == 4);          // min(4, 6)
    CHECK(o3.volume == doctest::Approx(4.0));  // 2*1 + 2
    REQUIRE(inst.bundles.size() == 1);
    CHECK(inst.bundles[0].max_delivery_time == 4);  // max over orders (4, 3)
    CHECK(inst.bundles[0].size_key == doctest::Approx(2.0));
}
