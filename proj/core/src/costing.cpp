#include "stpp/costing.hpp"

#include <cmath>
#include <map>
#include <set>

#include "stpp/errors.hpp"

namespace stpp {

double commodity_arc_cost(const Instance& inst, int arc, int commodity) {
    const Arc& a = inst.network.arcs[arc];
    const Commodity& m = inst.commodities[commodity];
    const double fill = m.volume / a.bin_capacity;
    double c = fill * a.carbon_cost + a.distance * m.capital_rate;
    if (inst.network.locations[a.head].kind == LocationKind::Platform)
        c += fill * inst.network.locations[a.head].platform->unit_cost;
    if (a.outsourced) c += fill * a.outsource_cost;
    return c;
}

double order_arc_cost(const Instance& inst, int arc, int order) {
    double c = 0;
    for (int m : inst.orders[order].commodities)
        c += static_cast<double>(inst.commodities[m].multiplicity) *
             commodity_arc_cost(inst, arc, m);
    return c;
}

double path_commodity_cost(const Instance& inst, const TravelTimeGraph& tt,
                           const std::vector<int>& tt_arcs, int bundle) {
    double c = 0;
    for (int ai : tt_arcs) {
        int sa = tt.arcs[ai].static_arc;
        if (sa < 0) continue;
        for (int o : inst.bundles[bundle].orders) c += order_arc_cost(inst, sa, o);
    }
    return c;
}

CostBreakdown evaluate(const Solution& sol, const EvalOptions& opts) {
    const Instance& inst = sol.instance();
    CostBreakdown out;
    std::vector<std::string> violations;

    // Bins on consolidated arcs.
    for (const auto& [key, m] : sol.manifests()) {
        const Arc& a = inst.network.arcs[key.arc];
        if (a.outsourced)
            violations.push_back("manifest on outsourced arc '" + a.id + "'");
        if (opts.validate) {
            for (size_t bi = 0; bi < m.bins.size(); ++bi) {
                double used = 0;
                for (const auto& [cid, cnt] : m.bins[bi].contents)
                    used += static_cast<double>(cnt) * inst.commodities[cid].volume;
                if (std::abs(used - m.bins[bi].used) > 1e-6)
                    violations.push_back("arc '" + a.id + "' week " + std::to_string(key.week) +
                                         " bin " + std::to_string(bi) + ": stored volume " +
                                         std::to_string(m.bins[bi].used) + " != contents " +
                                         std::to_string(used));
                if (used > a.bin_capacity + 1e-6)
                    violations.push_back("arc '" + a.id + "' week " + std::to_string(key.week) +
                                         " bin " + std::to_string(bi) + " over capacity");
            }
            if (a.max_bins >= 0 && m.bin_count() > a.max_bins)
                violations.push_back("arc '" + a.id + "' week " + std::to_string(key.week) +
                                     ": " + std::to_string(m.bin_count()) + " bins > K_a");
        }
        out.bin_cost += a.bin_cost * static_cast<double>(m.bin_count());
    }
    if (!violations.empty()) throw ValidationError(violations);

    // Commodity terms and platform inbound, recomputed from the paths.
    std::map<NodeWeekKey, double> inbound;
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        if (!sol.has_path(static_cast<int>(b))) continue;
        const auto& st = sol.path(static_cast<int>(b));
        const Bundle& bundle = inst.bundles[b];
        for (size_t oi = 0; oi < bundle.orders.size(); ++oi) {
            int o = bundle.orders[oi];
            const auto& proj = st.projections[oi];
            for (const auto& key : proj.arcs) out.commodity_cost += order_arc_cost(inst, key.arc, o);
            for (const auto& nk : proj.platform_heads) inbound[nk] += inst.orders[o].volume;
        }
    }

    // Platform overload.
    if (opts.aggregate_overload) {
        std::map<int, double> per_platform;
        for (const auto& [key, v] : inbound) per_platform[key.loc] += v;
        for (const auto& [loc, v] : per_platform) {
            const auto& p = *inst.network.locations[loc].platform;
            out.overload_cost += p.overload_cost * std::max(0.0, v - p.capacity);
        }
    } else {
        for (const auto& [key, v] : inbound) {
            const auto& p = *inst.network.locations[key.loc].platform;
            out.overload_cost += p.overload_cost * std::max(0.0, v - p.capacity);
        }
    }

    out.total = out.bin_cost + out.commodity_cost + out.overload_cost;
    return out;
}

namespace {

bool nearly(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<std::string> validate_solution(const Solution& sol, const TravelTimeGraph& tt) {
    const Instance& inst = sol.instance();
    std::vector<std::string> out;

    // Expected flows per timed arc from the stored paths.
    std::map<TimedArcKey, std::map<int, long long>> flows;
    std::map<NodeWeekKey, double> inbound;
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        if (!sol.has_path(static_cast<int>(b))) continue;
        const auto& st = sol.path(static_cast<int>(b));
        const Bundle& bundle = inst.bundles[b];

        // Path shape: consecutive arcs share endpoints, right source/sink,
        // each physical platform visited at most once.
        if (st.tt_arcs.empty()) {
            out.push_back("bundle " + std::to_string(b) + ": empty path");
            continue;
        }
        int expect_tail = tt.node_id(bundle.supplier, bundle_source_step(inst, static_cast<int>(b)));
        std::set<int> visited_platforms;
        for (int ai : st.tt_arcs) {
            const auto& arc = tt.arcs[ai];
            if (arc.tail != expect_tail)
                out.push_back("bundle " + std::to_string(b) + ": disconnected path");
            expect_tail = arc.head;
            int hl = tt.nodes[arc.head].loc;
            if (inst.network.locations[hl].kind == LocationKind::Platform &&
                !visited_platforms.insert(hl).second)
                out.push_back("bundle " + std::to_string(b) + ": platform '" +
                              inst.network.locations[hl].id + "' visited twice");
        }
        if (expect_tail != tt.node_id(bundle.unit, tt.horizon))
            out.push_back("bundle " + std::to_string(b) + ": path does not end at unit");

        for (size_t oi = 0; oi < bundle.orders.size(); ++oi) {
            int o = bundle.orders[oi];
            const auto& proj = st.projections[oi];
            for (const auto& key : proj.arcs) {
                if (!inst.network.arcs[key.arc].outsourced)
                    for (int m : inst.orders[o].commodities)
                        flows[key][m] += inst.commodities[m].multiplicity;
            }
            for (const auto& nk : proj.platform_heads) inbound[nk] += inst.orders[o].volume;
        }
    }

    // Manifests carry exactly the projected units.
    for (const auto& [key, expected] : flows) {
        const BinManifest* m = sol.manifest(key);
        if (!m) {
            out.push_back("missing manifest for arc '" + inst.network.arcs[key.arc].id +
                          "' week " + std::to_string(key.week));
            continue;
        }
        for (const auto& [cid, units] : expected) {
            if (m->units_of(cid) != units)
                out.push_back("arc '" + inst.network.arcs[key.arc].id + "' week " +
                              std::to_string(key.week) + ": commodity '" +
                              inst.commodities[cid].id + "' has " +
                              std::to_string(m->units_of(cid)) + " units, expected " +
                              std::to_string(units));
        }
    }
    for (const auto& [key, m] : sol.manifests()) {
        if (!flows.count(key) && !m.bins.empty())
            out.push_back("stray manifest on arc '" + inst.network.arcs[key.arc].id + "' week " +
                          std::to_string(key.week));
    }

    // Inbound bookkeeping.
    for (const auto& [key, v] : inbound) {
        if (std::abs(sol.inbound_at(key) - v) > 1e-6)
            out.push_back("platform '" + inst.network.locations[key.loc].id + "' week " +
                          std::to_string(key.week) + ": inbound " +
                          std::to_string(sol.inbound_at(key)) + " != recomputed " +
                          std::to_string(v));
    }

    // Incremental totals vs scratch.
    try {
        CostBreakdown scratch = evaluate(sol);
        if (!nearly(scratch.bin_cost, sol.bin_cost(), 1e-6) ||
            !nearly(scratch.commodity_cost, sol.commodity_cost(), 1e-6) ||
            !nearly(scratch.overload_cost, sol.overload_cost(), 1e-6))
            out.push_back("incremental totals drifted from scratch evaluation");
    } catch (const ValidationError& e) {
        for (const auto& v : e.violations()) out.push_back(v);
    }
    return out;
}

}  // namespace stpp
