#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stpp {

// ---------------------------------------------------------------------------
// Static network
// ---------------------------------------------------------------------------

enum class LocationKind { Supplier, Platform, ProductionUnit };
enum class ArcKind { Collection, InterPlatform, Delivery, Direct };

const char* to_string(LocationKind k);
const char* to_string(ArcKind k);

struct PlatformData {
    double capacity = 0;       // u_p^pla, m3 per week at base rate
    double unit_cost = 0;      // c_p^plat, per m3 handled
    double overload_cost = 0;  // c_p^over, per m3 above capacity
};

struct Location {
    std::string id;
    LocationKind kind = LocationKind::Supplier;
    double lat = 0, lon = 0;
    std::optional<PlatformData> platform;  // present iff kind == Platform
};

struct Arc {
    std::string id;
    int tail = -1, head = -1;  // location indexes
    ArcKind kind = ArcKind::Direct;
    int travel_time = 0;       // whole weeks >= 0
    double distance = 0;       // km
    double bin_capacity = 0;   // L_a, m3 per bin, > 0
    double bin_cost = 0;       // c_a^con, per bin opened (consolidated arcs)
    double carbon_cost = 0;    // c_a^CO2, per full-bin-equivalent of volume
    bool outsourced = false;   // 3PL pricing, no bins on this arc
    double outsource_cost = 0; // c_a^out, per full-bin-equivalent (iff outsourced)
    long long max_bins = -1;   // K_a; -1 means unbounded
};

struct Network {
    std::vector<Location> locations;
    std::vector<Arc> arcs;
    std::map<std::string, int> location_index;
    std::map<std::string, int> arc_index;
    std::vector<std::vector<int>> out_arcs;  // per location, arc indexes
    std::vector<std::vector<int>> in_arcs;

    void rebuild_indexes();
    const Location& loc(int i) const { return locations[i]; }
};

// ---------------------------------------------------------------------------
// Demand hierarchy: commodities -> orders (same s,u,d) -> bundles (same s,u)
// ---------------------------------------------------------------------------

struct Commodity {
    std::string id;
    std::string part;
    int supplier = -1, unit = -1;  // location indexes
    int delivery_week = 1;         // d_m in [1,T]
    double volume = 0;             // l_m, m3 per item
    int max_delivery_time = 1;     // tau_m, weeks >= 1
    long long multiplicity = 1;    // q_m items in week d_m
    double capital_rate = 0;       // c_m^cap per km per item
};

struct Order {
    int supplier = -1, unit = -1;
    int delivery_week = 1;      // d_o
    int max_delivery_time = 1;  // tau_o = min member tau_m
    double volume = 0;          // l_o = sum q_m * l_m
    std::vector<int> commodities;
};

struct Bundle {
    int supplier = -1, unit = -1;
    int max_delivery_time = 1;  // tau_b = max order tau_o
    double size_key = 0;        // l_B = max member l_m
    std::vector<int> orders;
};

// ---------------------------------------------------------------------------
// Instance = network + demand + derived aggregation and expansions
// ---------------------------------------------------------------------------

struct TravelTimeGraph;

struct Instance {
    std::string name;
    int horizon = 1;  // T, weeks
    uint64_t seed = 0;
    Network network;
    std::vector<Commodity> commodities;

    // Derived by finalize():
    std::vector<Order> orders;
    std::vector<Bundle> bundles;
    std::vector<int> commodity_order;  // commodity -> order
    std::vector<int> order_bundle;     // order -> bundle
    int travel_horizon = 1;            // script-T = max_o tau_o

    // Groups commodities into orders and bundles and computes travel_horizon.
    // Must be called after network/commodities change.
    void finalize();

    const Order& order(int o) const { return orders[o]; }
    const Bundle& bundle(int b) const { return bundles[b]; }
};

// Maps x onto [1,T]: wrap_week(0,T) == T, wrap_week(T+1,T) == 1.
inline int wrap_week(int x, int T) {
    int m = (x - 1) % T;
    if (m < 0) m += T;
    return m + 1;
}

// ---------------------------------------------------------------------------
// Time-space graph: full horizon expansion with modular wrap. Tracks actual
// weekly flows; bin manifests live on its timed arcs.
// ---------------------------------------------------------------------------

struct TimeSpaceGraph {
    int horizon = 1;     // T
    int n_locations = 0;

    struct TimedArc {
        int static_arc;  // index into network.arcs
        int tail_week;   // t
        int head_week;   // wrap(t + travel_time)
    };
    std::vector<TimedArc> arcs;  // sorted by (static_arc, tail_week)

    long long node_count() const { return static_cast<long long>(n_locations) * horizon; }
};

// Throws HorizonError if some travel time >= T.
TimeSpaceGraph build_time_space_graph(const Network& network, int T);

// ---------------------------------------------------------------------------
// Travel-time graph: partial expansion over [1, script-T]. Bundle paths are
// computed here; step coordinates increase from the source toward the sink at
// step script-T. Waiting arcs at suppliers model delaying the dispatch by one
// week, which shortens the transit a path may still use.
// ---------------------------------------------------------------------------

struct TravelTimeGraph {
    int horizon = 1;  // script-T

    struct Node {
        int loc;   // location index
        int step;  // 1..horizon
    };
    struct TtArc {
        int tail, head;      // node ids
        int static_arc;      // index into network.arcs, or -1 for waiting arcs
        int travel_time;     // weeks; 1 for waiting arcs
    };

    std::vector<Node> nodes;
    std::vector<TtArc> arcs;
    std::vector<std::vector<int>> out;  // node -> arc ids
    std::vector<std::vector<int>> in;

    // -1 when the (loc, step) combination does not exist.
    int node_id(int loc, int step) const {
        if (step < 1 || step > horizon) return -1;
        return node_lookup[static_cast<size_t>(loc) * horizon + step - 1];
    }
    bool is_waiting(int arc) const { return arcs[arc].static_arc < 0; }

    std::vector<int> node_lookup;  // filled by builder
};

TravelTimeGraph build_travel_time_graph(const Network& network, int travel_horizon);

// Source step for a bundle: max(1, script-T - tau_b). The clamp covers the
// loosest bundle, whose nominal step would be 0.
int bundle_source_step(const Instance& inst, int bundle);

// ---------------------------------------------------------------------------
// Projection onto the time-space universe
// ---------------------------------------------------------------------------

// A timed arc of the time-space graph, keyed by its static arc and the
// projected week of its tail node.
struct TimedArcKey {
    int arc = -1;
    int week = 0;
    auto operator<=>(const TimedArcKey&) const = default;
};

struct NodeWeekKey {
    int loc = -1;
    int week = 0;
    auto operator<=>(const NodeWeekKey&) const = default;
};

// pi((v,t), o) = (v, wrap(d_o - t)).
int project_step(const Instance& inst, int step, int order);

// Projects a travel-time arc for one order; waiting arcs project to nothing.
std::optional<TimedArcKey> project_arc(const Instance& inst, const TravelTimeGraph& tt,
                                       int tt_arc, int order);

// Week of the projected head node of a timed arc.
int projected_head_week(const Instance& inst, const TimedArcKey& key);

// ---------------------------------------------------------------------------
// Bundle-specific pruned subgraph
// ---------------------------------------------------------------------------

struct BundleSubgraph {
    int bundle = -1;
    int source = -1, sink = -1;      // global travel-time node ids
    std::vector<int> nodes;          // kept node ids, ascending
    std::vector<int> arcs;           // kept arc ids, ascending
    std::vector<char> node_kept;     // by global node id
    std::vector<char> arc_kept;
    std::vector<int> platforms;      // distinct platform location indexes present
};

// Restricts the graph to {s_b, u_b} + platforms, then prunes nodes that are
// not on any source-to-sink path. Throws InfeasibleBundleError when no path
// survives.
BundleSubgraph bundle_subgraph(const Instance& inst, const TravelTimeGraph& tt, int bundle);

// Convenience: instance-wide immutable expansion shared by the solver.
struct Expanded {
    TravelTimeGraph tt;
    std::vector<BundleSubgraph> sub;  // per bundle

    static Expanded build(const Instance& inst);
};

}  // namespace stpp
