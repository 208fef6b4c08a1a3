#pragma once

#include <string>
#include <vector>

#include "stpp/generator.hpp"
#include "stpp/model.hpp"

namespace stpp::test {

// Tiny hand-built network: two suppliers, two platforms, one unit.
//
//   S0 -> P0 -> U0     S0 -> U0 (direct)
//   S1 -> P0 -> U0     S1 -> U0 (direct)
//   P0 <-> P1, S0 -> P1, P1 -> U0
//
// All costs explicit so tests can do arithmetic by hand.
struct TinyNet {
    Instance inst;
    int s0, s1, p0, p1, u0;
    int col00, col01, col10, pp01, pp10, del0, del1, dir0, dir1;

    TinyNet(int horizon = 8, double bin_capacity = 1.0, double bin_cost = 10.0) {
        auto& net = inst.network;
        inst.name = "tiny-net";
        inst.horizon = horizon;
        auto loc = [&](const std::string& id, LocationKind k) {
            Location l;
            l.id = id;
            l.kind = k;
            if (k == LocationKind::Platform) l.platform = PlatformData{100.0, 0.0, 5.0};
            net.locations.push_back(l);
            return static_cast<int>(net.locations.size()) - 1;
        };
        s0 = loc("S0", LocationKind::Supplier);
        s1 = loc("S1", LocationKind::Supplier);
        p0 = loc("P0", LocationKind::Platform);
        p1 = loc("P1", LocationKind::Platform);
        u0 = loc("U0", LocationKind::ProductionUnit);
        auto arc = [&](const std::string& id, int t, int h, ArcKind k, int tau, double dist) {
            Arc a;
            a.id = id;
            a.tail = t;
            a.head = h;
            a.kind = k;
            a.travel_time = tau;
            a.distance = dist;
            a.bin_capacity = bin_capacity;
            a.bin_cost = bin_cost;
            a.carbon_cost = 0;
            net.arcs.push_back(a);
            return static_cast<int>(net.arcs.size()) - 1;
        };
        col00 = arc("col00", s0, p0, ArcKind::Collection, 1, 100);
        col01 = arc("col01", s0, p1, ArcKind::Collection, 1, 120);
        col10 = arc("col10", s1, p0, ArcKind::Collection, 1, 110);
        pp01 = arc("pp01", p0, p1, ArcKind::InterPlatform, 1, 300);
        pp10 = arc("pp10", p1, p0, ArcKind::InterPlatform, 1, 300);
        del0 = arc("del0", p0, u0, ArcKind::Delivery, 1, 200);
        del1 = arc("del1", p1, u0, ArcKind::Delivery, 1, 220);
        dir0 = arc("dir0", s0, u0, ArcKind::Direct, 2, 280);
        dir1 = arc("dir1", s1, u0, ArcKind::Direct, 2, 290);
    }

    // One commodity == one order == its bundle grows per (supplier, week).
    int add_commodity(int supplier, int week, double volume, int tau, long long mult = 1,
                      double capital = 0.0) {
        Commodity c;
        c.id = "c" + std::to_string(inst.commodities.size());
        c.part = "p" + std::to_string(inst.commodities.size());
        c.supplier = supplier;
        c.unit = u0;
        c.delivery_week = week;
        c.volume = volume;
        c.max_delivery_time = tau;
        c.multiplicity = mult;
        c.capital_rate = capital;
        inst.commodities.push_back(c);
        return static_cast<int>(inst.commodities.size()) - 1;
    }

    void done() { inst.finalize(); }
};

}  // namespace stpp::test
