#pragma once

#include "stpp/local_search.hpp"
#include "stpp/milp.hpp"

namespace stpp {

// Solver knobs. The first block mirrors the published tuning; the second
// holds deterministic desk-scale budgets (wall-clock limits are caps, the
// budgets are what make repeated runs bit-identical).
struct SolverConfig {
    double local_search_seconds = 2700;
    double milp_seconds = 120;
    long long variable_budget = 2000000;
    double path_change_fraction = 0.15;   // perturbation stops once reached
    double path_family_coverage = 0.30;   // Attract/Reduce must cover this
    double cost_tolerance = 0.015;        // per-perturbation acceptance
    double loop_abort = 0.02;             // cumulative increase abort

    long long ls_move_budget = 20000;
    long long milp_node_budget = 200000;
    int ils_rounds = 3;
    int perturb_rounds = 4;
    int paths_per_bundle = 5;     // k-shortest candidates besides the current path
    int random_subset_size = 25;  // Random family size n
    double total_seconds = 0;     // 0 = no wall cap
    int workers = 0;              // 0 = hardware concurrency
    std::array<double, 3> neighborhood_weights{1, 1, 1};
};

enum class SubproblemFamily { SinglePlant, SingleSupplier, Random, Attract, Reduce, Directs };
const char* to_string(SubproblemFamily f);
bool is_flow_family(SubproblemFamily f);

// c-bar_a = c_a * BP(a) / ceil(volume_a / L_a); c_a when the arc is empty.
double slope_scale(const Solution& sol, const TimedArcKey& key);

// Flow-based reoptimization over B-bar: complete elementary path choices per
// bundle, giant capacities, platform rows, slope-scaled costs. Throws
// BudgetExceededError when the variable estimate or enumeration exceeds the
// budget; callers shrink B-bar.
PerturbationMilp build_flow_milp(const Solution& sol, const Expanded& exp,
                                 const std::vector<int>& bundles, long long variable_budget,
                                 bool scale_costs = true);

// Path-based reoptimization: the given candidate sets (must contain each
// bundle's current path).
PerturbationMilp build_path_milp(const Solution& sol, const Expanded& exp,
                                 const std::vector<int>& bundles,
                                 const std::vector<std::vector<std::vector<int>>>& paths,
                                 bool scale_costs = true);

// Candidate paths for one bundle: current path + k cheapest under frozen
// liquid costs, optionally forced through / kept away from a static arc.
std::vector<std::vector<int>> candidate_paths(const Solution& sol, const Expanded& exp, int bundle,
                                              int k, int via_static_arc = -1,
                                              int avoid_static_arc = -1);

// Table 2/3 families. Flow families stack plants/suppliers until the variable
// budget is met; Attract/Reduce stack target arcs until the coverage share is
// reached. Returns the bundle subset (ascending ids) plus the target arcs
// chosen for the path families.
struct Subproblem {
    SubproblemFamily family;
    std::vector<int> bundles;
    std::vector<int> target_arcs;  // static arc ids (Attract/Reduce)
};
Subproblem select_subproblem(SubproblemFamily family, const Solution& sol, const Expanded& exp,
                             Rng& rng, const SolverConfig& config);

struct PerturbStats {
    int rounds_attempted = 0;
    int rounds_applied = 0;
    int paths_changed = 0;
    double cost_delta = 0;
    std::vector<TraceRow> trace;
};

// Alternates flow- and path-based rounds until enough paths changed or the
// cost drifted past the abort threshold; each round is rolled back when its
// true (re-packed) cost exceeds the tolerance. A Directs round always runs
// last, right before the next local search.
PerturbStats perturb(Solution& sol, const Expanded& exp, Rng& rng, const SolverConfig& config);

struct IlsResult {
    Solution best;
    double constructive_cost = 0;
    std::vector<TraceRow> trace;
    long long ls_moves = 0;
    int perturbations_applied = 0;
};

// constructive -> local search -> loop { perturb -> local search }, keeping
// the best solution seen.
IlsResult ils(const Instance& inst, const Expanded& exp, const SolverConfig& config,
              uint64_t seed);

}  // namespace stpp
