#pragma once

#include <functional>

#include "stpp/insertion.hpp"

namespace stpp {

struct ProgressEvent {
    int bundle = -1;           // bundle just inserted
    int bundles_inserted = 0;  // running count
    double insertion_cost = 0;
    double running_cost = 0;
};
using ProgressFn = std::function<void(const ProgressEvent&)>;

// Bundles in decreasing order of their largest packaging size l_B,
// ties by ascending bundle id.
std::vector<int> ffd_bundle_order(const Instance& inst);

// Sequential minimum-cost insertion in FFD order; the paper's constructive
// pass. Propagates InfeasibleBundleError.
Solution constructive(const Instance& inst, const Expanded& exp, const ProgressFn& progress = {});

}  // namespace stpp
