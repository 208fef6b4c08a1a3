#pragma once

#include <array>
#include <string>

#include "stpp/construct.hpp"
#include "stpp/rng.hpp"

namespace stpp {

struct TraceRow {
    std::string move;  // "repack" | "reinsert" | "consolidate" | ils phases
    double delta = 0;
    double t = 0;  // elapsed seconds (wall clock, not part of canonical outputs)
};

struct LocalSearchParams {
    double time_limit_seconds = 2700;  // wall-clock cap per search
    long long move_budget = 20000;     // deterministic stop
    std::array<double, 3> weights{1, 1, 1};  // repack, reinsert, consolidate
    bool validate_each_accept = false;
};

struct LocalSearchResult {
    long long moves_tried = 0;
    long long moves_accepted = 0;
    double initial_cost = 0;
    double final_cost = 0;
    std::vector<TraceRow> trace;  // accepted moves only
};

// Re-Pack: best of {current, FFD, BFD} on each given arc; arcs already at the
// volume lower bound are skipped. Never worsens; returns the cost delta.
double repack(Solution& sol, const std::vector<TimedArcKey>& arcs);

// Re-Insert: remove + minimum-cost insert; kept iff improving, otherwise the
// solution is rolled back bit-exactly. Returns the applied delta (0 if rolled
// back).
double reinsert(Solution& sol, const TravelTimeGraph& tt, const BundleSubgraph& sg,
                bool* accepted = nullptr);

// Consolidate-and-Refine on the ordered location pair (u,v): pulls every
// bundle using a u->v arc, reinserts them through the corridor as a group,
// then refines each individually; kept iff the total delta improves.
double consolidate_and_refine(Solution& sol, const Expanded& exp, int u_loc, int v_loc,
                              bool* accepted = nullptr);

// Ordered physical pairs currently shared by >= 2 bundle paths.
std::vector<std::pair<int, int>> shared_corridors(const Solution& sol, const TravelTimeGraph& tt);

LocalSearchResult local_search(Solution& sol, const Expanded& exp, const LocalSearchParams& params,
                               Rng& rng);

}  // namespace stpp
