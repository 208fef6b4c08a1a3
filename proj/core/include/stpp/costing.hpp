#pragma once

#include <string>
#include <vector>

#include "stpp/solution.hpp"

namespace stpp {

struct CostBreakdown {
    double bin_cost = 0;        // c^con per bin on consolidated arcs
    double commodity_cost = 0;  // carbon + capital + platform + outsourcing
    double overload_cost = 0;   // platform volume above contract capacity
    double total = 0;
};

struct EvalOptions {
    // Overload per timed platform node (default) or aggregated over the whole
    // horizon per platform; the aggregate variant exists for experiments.
    bool aggregate_overload = false;
    bool validate = true;
};

// Composite per-unit cost of commodity m on arc a:
//   (l_m/L_a) c^CO2 + d_a c_m^cap + [head is platform] (l_m/L_a) c^plat
//   + [outsourced] (l_m/L_a) c^out
double commodity_arc_cost(const Instance& inst, int arc, int commodity);

// Sum over the order's members, weighted by multiplicity.
double order_arc_cost(const Instance& inst, int arc, int order);

// Static commodity cost of a bundle path (travel arcs only).
double path_commodity_cost(const Instance& inst, const TravelTimeGraph& tt,
                           const std::vector<int>& tt_arcs, int bundle);

// Recomputes the full breakdown from scratch. Throws ValidationError when
// manifests are structurally invalid (unless opts.validate is off).
CostBreakdown evaluate(const Solution& sol, const EvalOptions& opts = {});

// Full structural check: manifests vs projected flows, capacities, K_a,
// path shape (connectivity, elementarity, endpoints), inbound bookkeeping and
// incremental totals. Returns every violation found.
std::vector<std::string> validate_solution(const Solution& sol, const TravelTimeGraph& tt);

}  // namespace stpp
