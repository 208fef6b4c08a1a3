#pragma once

#include <functional>
#include <vector>

#include "stpp/model.hpp"

namespace stpp {

// Capacity comparisons tolerate this much float slack so that items that fit
// exactly (0.6 + 0.4 vs 1.0) never bounce off a bin.
inline constexpr double kPackEps = 1e-9;

struct PackItem {
    int id = -1;          // commodity index (or any stable id for tests)
    double volume = 0;    // per item
    long long count = 1;  // items of this size
};

struct Bin {
    double used = 0;
    std::vector<std::pair<int, long long>> contents;  // (commodity id, units)

    void add(int id, long long units, double item_volume);
};

struct BinManifest {
    TimedArcKey arc;          // which timed arc this manifest belongs to
    double capacity = 0;      // L_a
    long long max_bins = -1;  // K_a, -1 unbounded
    std::vector<Bin> bins;

    long long bin_count() const { return static_cast<long long>(bins.size()); }
    double total_volume() const;
    long long units_of(int commodity) const;  // f_a^m
    bool empty() const { return bins.empty(); }
};

// First-Fit Decreasing: expand items by count, sort by volume descending
// (ties by ascending id), place each in the first bin with room.
// Throws ItemOversizeError if an item exceeds the capacity.
BinManifest ffd_pack(const std::vector<PackItem>& items, double capacity);

// Best-Fit Decreasing: same order, each item goes to the feasible bin with
// the least residual capacity (ties: lowest bin index).
BinManifest bfd_pack(const std::vector<PackItem>& items, double capacity);

// ceil(total volume / capacity): the L1 lower bound on bins.
long long bp_lower_bound(const std::vector<PackItem>& items, double capacity);
long long bp_lower_bound_volume(double total_volume, double capacity);

// A tentative placement of one order's items against an existing manifest.
// Nothing is mutated until apply(); discarding the object discards the move.
struct Placement {
    struct Slot {
        int bin;  // index into manifest.bins; >= old size means a new bin
        int id;
        long long units;
        double item_volume;
    };
    std::vector<Slot> slots;
    long long new_bins = 0;

    void apply(BinManifest& manifest) const;
};

// Greedy insertion used by the shortest-path weights: FFD over the incoming
// items, first fit over existing bins in their original order, then new bins.
// Throws CapacityExhaustedError when K_a would be exceeded and
// ItemOversizeError for oversize items.
Placement tentative_insert(const BinManifest& manifest, const std::vector<PackItem>& items);

// Exact bin count by branch-and-bound; test oracle, <= 14 expanded items.
long long exact_pack(const std::vector<PackItem>& items, double capacity);

// Item volume lookup by commodity id; manifests store counts only.
using VolumeOf = std::function<double(int)>;

// Aggregated (commodity, volume, units) content of a manifest.
std::vector<PackItem> manifest_items(const BinManifest& manifest, const VolumeOf& volume_of);

// Removes every unit of the given commodities from the manifest, then keeps
// the better of the shrunken arrangement and an FFD repack of the remainder.
void remove_commodities(BinManifest& manifest, const std::vector<int>& commodity_ids,
                        const VolumeOf& volume_of);

// Replaces the arrangement with the best of {current, FFD, BFD}. Returns the
// change in bin count (<= 0).
long long repack_best(BinManifest& manifest, const VolumeOf& volume_of);

}  // namespace stpp
