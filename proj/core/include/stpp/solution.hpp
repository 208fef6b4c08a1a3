#pragma once

#include <map>
#include <memory>
#include <optional>

#include "stpp/model.hpp"
#include "stpp/packing.hpp"

namespace stpp {

// Projection of one order along its bundle's path: the timed arcs carrying
// its flow and the platform nodes receiving its volume.
struct OrderProjection {
    std::vector<TimedArcKey> arcs;
    std::vector<NodeWeekKey> platform_heads;
};

struct BundlePathState {
    std::vector<int> tt_arcs;                  // travel-time arc ids, incl. waiting arcs
    double commodity_cost = 0;                 // static along the path, cached
    std::vector<OrderProjection> projections;  // parallel to bundle.orders
};

// A solution = per-bundle path + per-timed-arc bin manifests + platform
// inbound volumes, with incrementally maintained cost totals. All mutation
// goes through the methods below so an open transaction can journal
// before-images and roll back bit-exactly.
class Solution {
public:
    explicit Solution(const Instance& inst) : inst_(&inst) {
        paths_.resize(inst.bundles.size());
    }

    Solution(const Solution& other);
    Solution& operator=(const Solution& other);
    Solution(Solution&&) = default;
    Solution& operator=(Solution&&) = default;

    const Instance& instance() const { return *inst_; }

    bool has_path(int bundle) const { return paths_[bundle].has_value(); }
    const BundlePathState& path(int bundle) const { return *paths_[bundle]; }
    const std::map<TimedArcKey, BinManifest>& manifests() const { return manifests_; }
    const std::map<NodeWeekKey, double>& inbound() const { return inbound_; }
    const BinManifest* manifest(const TimedArcKey& key) const {
        auto it = manifests_.find(key);
        return it == manifests_.end() ? nullptr : &it->second;
    }
    double inbound_at(const NodeWeekKey& key) const {
        auto it = inbound_.find(key);
        return it == inbound_.end() ? 0.0 : it->second;
    }

    double bin_cost() const { return bin_cost_; }
    double commodity_cost() const { return commodity_cost_; }
    double overload_cost() const { return overload_cost_; }
    double total_cost() const { return bin_cost_ + commodity_cost_ + overload_cost_; }
    long long total_bins() const;
    int routed_bundles() const;

    // Marginal overload cost of adding `delta` m3 at a platform node.
    double overload_delta(const NodeWeekKey& key, double delta) const;

    // --- mutation (journaled when a transaction is open) ---
    BinManifest& manifest_mut(const TimedArcKey& key);
    void drop_manifest_if_empty(const TimedArcKey& key);
    void add_inbound(const NodeWeekKey& key, double delta);  // updates overload cost
    void set_path(int bundle, std::optional<BundlePathState> state);
    void add_bin_cost(double delta) { bin_cost_ += delta; }
    void add_commodity_cost(double delta) { commodity_cost_ += delta; }

    // --- transactions ---
    void begin_txn();
    void commit_txn();
    void rollback_txn();
    bool in_txn() const { return journal_ != nullptr; }

    double item_volume(int commodity) const { return inst_->commodities[commodity].volume; }

private:
    struct Journal {
        std::map<TimedArcKey, std::optional<BinManifest>> manifests;
        std::map<NodeWeekKey, std::optional<double>> inbound;
        std::map<int, std::optional<BundlePathState>> paths;
        double bin_cost, commodity_cost, overload_cost;
    };
    void journal_manifest(const TimedArcKey& key);
    void journal_inbound(const NodeWeekKey& key);

    const Instance* inst_;
    std::vector<std::optional<BundlePathState>> paths_;
    std::map<TimedArcKey, BinManifest> manifests_;
    std::map<NodeWeekKey, double> inbound_;
    double bin_cost_ = 0, commodity_cost_ = 0, overload_cost_ = 0;
    std::unique_ptr<Journal> journal_;
};

}  // namespace stpp
