#include "stpp/model.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

#include "stpp/errors.hpp"

namespace stpp {

const char* to_string(LocationKind k) {
    switch (k) {
        case LocationKind::Supplier: return "supplier";
        case LocationKind::Platform: return "platform";
        case LocationKind::ProductionUnit: return "unit";
    }
    return "?";
}

const char* to_string(ArcKind k) {
    switch (k) {
        case ArcKind::Collection: return "collection";
        case ArcKind::InterPlatform: return "interplatform";
        case ArcKind::Delivery: return "delivery";
        case ArcKind::Direct: return "direct";
    }
    return "?";
}

void Network::rebuild_indexes() {
    location_index.clear();
    arc_index.clear();
    out_arcs.assign(locations.size(), {});
    in_arcs.assign(locations.size(), {});
    for (size_t i = 0; i < locations.size(); ++i) location_index[locations[i].id] = static_cast<int>(i);
    for (size_t i = 0; i < arcs.size(); ++i) {
        arc_index[arcs[i].id] = static_cast<int>(i);
        out_arcs[arcs[i].tail].push_back(static_cast<int>(i));
        in_arcs[arcs[i].head].push_back(static_cast<int>(i));
    }
}

void Instance::finalize() {
    network.rebuild_indexes();
    orders.clear();
    bundles.clear();
    commodity_order.assign(commodities.size(), -1);
    order_bundle.clear();

    // Orders: group by (supplier, unit, delivery week); deterministic by key.
    std::map<std::tuple<int, int, int>, std::vector<int>> by_sud;
    for (size_t m = 0; m < commodities.size(); ++m) {
        const auto& c = commodities[m];
        by_sud[{c.supplier, c.unit, c.delivery_week}].push_back(static_cast<int>(m));
    }
    std::map<std::pair<int, int>, std::vector<int>> by_su;
    for (auto& [key, members] : by_sud) {
        Order o;
        o.supplier = std::get<0>(key);
        o.unit = std::get<1>(key);
        o.delivery_week = std::get<2>(key);
        o.max_delivery_time = commodities[members.front()].max_delivery_time;
        for (int m : members) {
            o.max_delivery_time = std::min(o.max_delivery_time, commodities[m].max_delivery_time);
            o.volume += static_cast<double>(commodities[m].multiplicity) * commodities[m].volume;
            commodity_order[m] = static_cast<int>(orders.size());
        }
        o.commodities = members;
        by_su[{o.supplier, o.unit}].push_back(static_cast<int>(orders.size()));
        orders.push_back(std::move(o));
    }

    // Bundles: group orders by (supplier, unit).
    order_bundle.assign(orders.size(), -1);
    for (auto& [key, members] : by_su) {
        Bundle b;
        b.supplier = key.first;
        b.unit = key.second;
        for (int o : members) {
            b.max_delivery_time = std::max(b.max_delivery_time, orders[o].max_delivery_time);
            for (int m : orders[o].commodities)
                b.size_key = std::max(b.size_key, commodities[m].volume);
            order_bundle[o] = static_cast<int>(bundles.size());
        }
        b.orders = members;
        bundles.push_back(std::move(b));
    }

    travel_horizon = 1;
    for (const auto& o : orders) travel_horizon = std::max(travel_horizon, o.max_delivery_time);
}

TimeSpaceGraph build_time_space_graph(const Network& network, int T) {
    TimeSpaceGraph g;
    g.horizon = T;
    g.n_locations = static_cast<int>(network.locations.size());
    for (size_t a = 0; a < network.arcs.size(); ++a) {
        const Arc& arc = network.arcs[a];
        if (arc.travel_time >= T)
            throw HorizonError("arc '" + arc.id + "': travel time " +
                               std::to_string(arc.travel_time) + " does not fit horizon T=" +
                               std::to_string(T));
        for (int t = 1; t <= T; ++t)
            g.arcs.push_back({static_cast<int>(a), t, wrap_week(t + arc.travel_time, T)});
    }
    return g;
}

TravelTimeGraph build_travel_time_graph(const Network& network, int travel_horizon) {
    TravelTimeGraph g;
    g.horizon = travel_horizon;
    const int n_loc = static_cast<int>(network.locations.size());
    g.node_lookup.assign(static_cast<size_t>(n_loc) * travel_horizon, -1);

    auto add_node = [&](int loc, int step) {
        g.node_lookup[static_cast<size_t>(loc) * travel_horizon + step - 1] =
            static_cast<int>(g.nodes.size());
        g.nodes.push_back({loc, step});
    };
    for (int loc = 0; loc < n_loc; ++loc) {
        if (network.locations[loc].kind == LocationKind::ProductionUnit) {
            add_node(loc, travel_horizon);
        } else {
            for (int t = 1; t <= travel_horizon; ++t) add_node(loc, t);
        }
    }

    auto add_arc = [&](int tail, int head, int static_arc, int tau) {
        g.arcs.push_back({tail, head, static_arc, tau});
    };
    for (size_t a = 0; a < network.arcs.size(); ++a) {
        const Arc& arc = network.arcs[a];
        for (int t = 1; t <= travel_horizon; ++t) {
            int head_step = t + arc.travel_time;
            if (head_step > travel_horizon) break;
            int tail = g.node_id(arc.tail, t);
            int head = g.node_id(arc.head, head_step);
            if (tail < 0 || head < 0) continue;  // units only exist at the final step
            add_arc(tail, head, static_cast<int>(a), arc.travel_time);
        }
    }
    // Waiting arcs between consecutive supplier copies: taking one consumes a
    // week of the deadline, so shorter physical routes become reachable.
    for (int loc = 0; loc < n_loc; ++loc) {
        if (network.locations[loc].kind != LocationKind::Supplier) continue;
        for (int t = 1; t < travel_horizon; ++t)
            add_arc(g.node_id(loc, t), g.node_id(loc, t + 1), -1, 1);
    }

    g.out.assign(g.nodes.size(), {});
    g.in.assign(g.nodes.size(), {});
    for (size_t i = 0; i < g.arcs.size(); ++i) {
        g.out[g.arcs[i].tail].push_back(static_cast<int>(i));
        g.in[g.arcs[i].head].push_back(static_cast<int>(i));
    }
    return g;
}

int bundle_source_step(const Instance& inst, int bundle) {
    return std::max(1, inst.travel_horizon - inst.bundles[bundle].max_delivery_time);
}

int project_step(const Instance& inst, int step, int order) {
    return wrap_week(inst.orders[order].delivery_week - step, inst.horizon);
}

std::optional<TimedArcKey> project_arc(const Instance& inst, const TravelTimeGraph& tt,
                                       int tt_arc, int order) {
    const auto& a = tt.arcs[tt_arc];
    if (a.static_arc < 0) return std::nullopt;
    return TimedArcKey{a.static_arc, project_step(inst, tt.nodes[a.tail].step, order)};
}

int projected_head_week(const Instance& inst, const TimedArcKey& key) {
    return wrap_week(key.week - inst.network.arcs[key.arc].travel_time, inst.horizon);
}

BundleSubgraph bundle_subgraph(const Instance& inst, const TravelTimeGraph& tt, int bundle) {
    const Bundle& b = inst.bundles[bundle];
    const Network& net = inst.network;
    BundleSubgraph sg;
    sg.bundle = bundle;
    sg.source = tt.node_id(b.supplier, bundle_source_step(inst, bundle));
    sg.sink = tt.node_id(b.unit, tt.horizon);
    if (sg.source < 0 || sg.sink < 0)
        throw InfeasibleBundleError(bundle, "bundle has no source or sink node");

    auto allowed_loc = [&](int loc) {
        return loc == b.supplier || loc == b.unit ||
               net.locations[loc].kind == LocationKind::Platform;
    };
    auto usable = [&](const TravelTimeGraph::TtArc& a) {
        int tl = tt.nodes[a.tail].loc, hl = tt.nodes[a.head].loc;
        if (!allowed_loc(tl) || !allowed_loc(hl)) return false;
        if (a.static_arc < 0) return tl == b.supplier;  // waits only at own origin
        return true;
    };

    // Forward reachability from the source...
    std::vector<char> fwd(tt.nodes.size(), 0), bwd(tt.nodes.size(), 0);
    std::deque<int> queue{sg.source};
    fwd[sg.source] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int ai : tt.out[v]) {
            const auto& a = tt.arcs[ai];
            if (!usable(a) || fwd[a.head]) continue;
            fwd[a.head] = 1;
            queue.push_back(a.head);
        }
    }
    // ...and backward from the sink.
    queue.assign(1, sg.sink);
    bwd[sg.sink] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int ai : tt.in[v]) {
            const auto& a = tt.arcs[ai];
            if (!usable(a) || bwd[a.tail]) continue;
            bwd[a.tail] = 1;
            queue.push_back(a.tail);
        }
    }
    if (!fwd[sg.sink])
        throw InfeasibleBundleError(
            bundle, "no path from supplier '" + net.locations[b.supplier].id + "' to unit '" +
                        net.locations[b.unit].id + "' within " +
                        std::to_string(b.max_delivery_time) + " week(s)");

    sg.node_kept.assign(tt.nodes.size(), 0);
    sg.arc_kept.assign(tt.arcs.size(), 0);
    for (size_t v = 0; v < tt.nodes.size(); ++v) {
        if (fwd[v] && bwd[v]) {
            sg.node_kept[v] = 1;
            sg.nodes.push_back(static_cast<int>(v));
        }
    }
    std::vector<char> plat_seen(net.locations.size(), 0);
    for (size_t ai = 0; ai < tt.arcs.size(); ++ai) {
        const auto& a = tt.arcs[ai];
        if (!sg.node_kept[a.tail] || !sg.node_kept[a.head] || !usable(a)) continue;
        sg.arc_kept[ai] = 1;
        sg.arcs.push_back(static_cast<int>(ai));
        int hl = tt.nodes[a.head].loc;
        if (net.locations[hl].kind == LocationKind::Platform && !plat_seen[hl]) {
            plat_seen[hl] = 1;
            sg.platforms.push_back(hl);
        }
    }
    std::sort(sg.platforms.begin(), sg.platforms.end());
    return sg;
}

Expanded Expanded::build(const Instance& inst) {
    Expanded e;
    e.tt = build_travel_time_graph(inst.network, inst.travel_horizon);
    e.sub.reserve(inst.bundles.size());
    for (size_t b = 0; b < inst.bundles.size(); ++b)
        e.sub.push_back(bundle_subgraph(inst, e.tt, static_cast<int>(b)));
    return e;
}

}  // namespace stpp
