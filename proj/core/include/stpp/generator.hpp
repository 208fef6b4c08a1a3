#pragma once

#include "stpp/model.hpp"

namespace stpp {

// Knobs for the synthetic hub-and-spoke generator. Presets:
//   xs    - desk debugging (<= 20 locations, <= 30 bundles)
//   s     - small benchmark
//   m     - medium benchmark (~500 bundles)
//   tiny  - brute-forceable (<= 4 bundles, few paths per bundle)
//   frag  - fragmentation-heavy (many small orders, conflicting platforms)
struct GenParams {
    std::string preset = "xs";
    int continents = 2;
    int suppliers = 6, platforms = 3, units = 2;
    int horizon = 8;  // T
    int bundles = 10;
    int orders_min = 2, orders_max = 4;
    int commodities_min = 1, commodities_max = 3;
    long long multiplicity_max = 2;
    int tau_slack_min = 0, tau_slack_max = 2;
    double hub_capable_fraction = 0.75;  // bundles whose deadline admits a hub route
    double small_volume_fraction = 0.30;
    double volume_min = 1.0, volume_max = 4.0;   // the main band
    double small_volume_min = 0.15;              // heavy tail below the band
    double outsourced_fraction = 0.10;           // of collection arcs
    double truck_capacity = 20, container_capacity = 55;
    double platform_capacity_factor = 1.0;
    double collection_cost_factor = 1.0;

    static GenParams preset_of(const std::string& name);
};

// Deterministic under (params, seed); the same pair yields a byte-identical
// instance file.
Instance generate(const GenParams& params, uint64_t seed);

}  // namespace stpp
