#pragma once

#include "stpp/lp.hpp"
#include "stpp/solution.hpp"

namespace stpp {

enum class MilpKind { FlowBased, PathBased };

// Giant-container reoptimization model over a bundle subset B-bar. Bundles
// outside the subset are fixed and enter as constant volumes. Every routing
// option is a per-bundle choice among elementary paths; for flow-based models
// the choice set is the complete enumeration of the bundle subgraph (these
// graphs are DAGs, so binary flows are exactly simple paths).
struct PerturbationMilp {
    MilpKind kind = MilpKind::PathBased;

    struct ArcEntry {
        TimedArcKey key;
        double capacity = 0;      // L_a
        double fixed_volume = 0;  // from bundles outside B-bar
        double scaled_cost = 0;   // c-bar_a (slope scaled, or c_a unscaled)
    };
    struct PlatformEntry {
        NodeWeekKey key;
        double capacity = 0;       // u_p
        double fixed_inbound = 0;  // from bundles outside B-bar
        double overload_cost = 0;  // c_p^over
    };
    struct Choice {
        std::vector<int> arc_idx;        // into arcs
        std::vector<double> arc_volume;  // volume this choice adds there
        std::vector<int> plat_idx;       // into platforms
        std::vector<double> plat_volume;
        double commodity_cost = 0;  // constant along this choice
        std::vector<int> tt_arcs;   // underlying travel-time path
    };

    std::vector<int> bundles;  // instance bundle ids, ascending
    std::vector<ArcEntry> arcs;
    std::vector<PlatformEntry> platforms;
    std::vector<std::vector<Choice>> choices;  // per bundle
    long long variable_count = 0;

    std::map<TimedArcKey, int> arc_lookup;
    std::map<NodeWeekKey, int> plat_lookup;

    int arc_entry(const TimedArcKey& key, double capacity, double scaled_cost);
    int platform_entry(const NodeWeekKey& key, double capacity, double overload_cost);

    // Exact relaxed objective of a full assignment (integer giant bins +
    // overloads + commodity constants).
    double assignment_value(const std::vector<int>& choice_of) const;
};

struct MilpParams {
    double time_limit_seconds = 120;  // <= 0 means uncapped (budget only)
    long long node_budget = 200000;
    bool root_only = false;  // return the root dual bound, no search
};

struct MilpResult {
    enum class Status { Optimal, Feasible, NoIncumbent };
    Status status = Status::NoIncumbent;
    double incumbent_value = 0;
    std::vector<int> choice;  // per model bundle, chosen path index
    double dual_bound = 0;
    long long nodes = 0;
};

// Branch-and-bound over per-bundle path choices, depth first, deterministic.
// Bounds: path-based models use the LP relaxation (simplex) of the reduced
// model; flow-based models use a Lagrangian bound with platform multipliers
// fit by subgradient steps at the root, whose pricing step is the per-bundle
// shortest path over the choice set.
MilpResult solve_milp(const PerturbationMilp& model, const MilpParams& params);

// Explicit LP/MILP encoding with x (path binaries), tau (integer giant bins)
// and z (overload) columns; the escape hatch for external solvers.
LinearProgram build_lp_model(const PerturbationMilp& model, bool relax_integrality = false,
                             bool include_overloads = true);

// Reads a variable assignment (from parse_solution_text) back into a per-
// bundle choice vector by argmax over each bundle's x variables.
std::vector<int> choices_from_lp_solution(const PerturbationMilp& model,
                                          const std::map<std::string, double>& values);

// LP relaxation value of the explicit model, via the embedded simplex.
double lp_relaxation_value(const PerturbationMilp& model, bool include_overloads = true);

}  // namespace stpp
