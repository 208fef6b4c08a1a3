#pragma once

#include <limits>

#include "stpp/costing.hpp"
#include "stpp/solution.hpp"

namespace stpp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Liquid (fractional-bin) cost of routing an order over an arc; the weight of
// the linear relaxation and of path enumeration under frozen costs.
double liquid_order_arc_cost(const Instance& inst, int arc, int order);

// Lazily evaluated, memoized arc weights for one bundle insertion search.
// Weights are c_com + c_over + c_con against the frozen manifests of `sol`
// (or against an empty solution when `empty_costs` is set).
class ArcCostContext {
public:
    ArcCostContext(const Solution& sol, const TravelTimeGraph& tt, const BundleSubgraph& sg,
                   bool empty_costs = false);

    double cost(int tt_arc);  // kInf when the arc cannot take the bundle

private:
    double compute(int tt_arc) const;
    const Solution& sol_;
    const TravelTimeGraph& tt_;
    const BundleSubgraph& sg_;
    bool empty_costs_;
    std::vector<double> memo_;  // by global tt arc id, NaN = unset
};

// c_alpha = c^com + c^over + c^con for one travel-time arc, per the insertion
// subproblem. Shortcut (waiting) arcs cost 0.
double arc_insertion_cost(const Solution& sol, const TravelTimeGraph& tt,
                          const BundleSubgraph& sg, int tt_arc);

struct InsertResult {
    std::vector<int> tt_arcs;
    double cost = 0;  // exact total-cost delta of the commit
};

// Commits the bundle along a fixed path with real packing; returns the exact
// cost delta. The path must start at the bundle source and end at its sink.
double commit_bundle_on_path(Solution& sol, const TravelTimeGraph& tt, int bundle,
                             const std::vector<int>& tt_arcs);

// Minimum-cost insertion: Dijkstra on the bundle subgraph; if the result is
// not elementary, retry with empty-solution costs, then fall back to an exact
// label-setting search with a platform-visited bitmask. Commits the result.
InsertResult insert_bundle(Solution& sol, const TravelTimeGraph& tt, const BundleSubgraph& sg);

struct RemoveSummary {
    double volume_released = 0;
    long long bins_freed = 0;
    int arcs_touched = 0;
};

// Removes the bundle's units from every manifest on its path, refills the
// affected bins (FFD, never more bins than before) and updates overloads.
RemoveSummary remove_bundle(Solution& sol, int bundle);

// Insertion constrained to use some timed copy of a static arc from
// corridor_tail to corridor_head. Returns nothing when no such path exists.
std::optional<InsertResult> insert_bundle_through(Solution& sol, const TravelTimeGraph& tt,
                                                  const BundleSubgraph& sg, int corridor_tail,
                                                  int corridor_head);

// --- path utilities (oracles, candidate sets, flow branching) ---

struct PathEnumeration {
    std::vector<std::vector<int>> paths;  // arc id sequences
    bool truncated = false;               // hit max_paths
};

// Every elementary source-to-sink path (waiting variants included), DFS order.
PathEnumeration enumerate_paths(const TravelTimeGraph& tt, const Instance& inst,
                                const BundleSubgraph& sg, size_t max_paths);

// k cheapest elementary paths under a frozen per-arc weight function.
std::vector<std::vector<int>> k_shortest_paths(const TravelTimeGraph& tt,
                                               const BundleSubgraph& sg,
                                               const std::vector<double>& arc_weight, int k);

// Sum of frozen weights along a path.
double path_weight(const std::vector<int>& tt_arcs, const std::vector<double>& arc_weight);

// Dijkstra under a frozen per-arc weight vector (no packing lookups).
std::optional<InsertResult> shortest_path_static(const TravelTimeGraph& tt,
                                                 const BundleSubgraph& sg,
                                                 const std::vector<double>& arc_weight);

// True if no physical platform appears twice among the path's arc heads.
bool is_elementary(const TravelTimeGraph& tt, const Instance& inst,
                   const std::vector<int>& tt_arcs);

}  // namespace stpp
