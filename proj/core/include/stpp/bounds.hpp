#pragma once

#include "stpp/perturb.hpp"

namespace stpp {

enum class BoundKind { LinearRelaxation, MixedGiant, FullGiant };
const char* to_string(BoundKind k);

struct BoundCertificate {
    BoundKind kind = BoundKind::LinearRelaxation;
    double value = 0;
    std::vector<double> per_bundle;  // decomposable kinds only
    double elapsed_seconds = 0;
    bool optimal = true;  // full giant: proven vs stopped at the limit
    std::string notes;
};

// Per-bundle shortest paths under liquid costs, platform overloads excluded
// (the decomposable variant). Sum over bundles.
BoundCertificate linear_bound(const Instance& inst, const Expanded& exp);

// As the linear bound, but direct arcs charge ceil(order volume / L_a) full
// bins per projected order.
BoundCertificate mixed_giant_bound(const Instance& inst, const Expanded& exp);

// Shortest paths backing the mixed bound, for the rounding heuristic.
std::vector<std::vector<int>> mixed_giant_paths(const Instance& inst, const Expanded& exp);

// Giant-container relaxation over every arc: the unscaled flow MILP with
// B-bar = B. Returns the solver's dual bound; `optimal` is set when the
// search closed. time_limit 0 returns the root bound.
BoundCertificate full_giant_bound(const Instance& inst, const Expanded& exp,
                                  double time_limit_seconds, long long node_budget = 200000,
                                  long long variable_budget = 2000000);

// Fixes the mixed-giant paths, packs every timed arc (best of FFD/BFD) and
// evaluates exactly. The LBR benchmark.
Solution rounding_heuristic(const Instance& inst, const Expanded& exp);

// Whole-model linear relaxation value (overloads off) computed through the
// perturbation LP machinery: complete path enumeration, liquid giant bins,
// simplex. Decomposition check against linear_bound.
double whole_model_lp_value(const Instance& inst, const Expanded& exp,
                            size_t max_paths_per_bundle = 5000);

}  // namespace stpp
