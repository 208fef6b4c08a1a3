#include "stpp/solution.hpp"

#include <cassert>

namespace stpp {

Solution::Solution(const Solution& other)
    : inst_(other.inst_),
      paths_(other.paths_),
      manifests_(other.manifests_),
      inbound_(other.inbound_),
      bin_cost_(other.bin_cost_),
      commodity_cost_(other.commodity_cost_),
      overload_cost_(other.overload_cost_) {
    assert(!other.in_txn());
}

Solution& Solution::operator=(const Solution& other) {
    assert(!other.in_txn() && !in_txn());
    inst_ = other.inst_;
    paths_ = other.paths_;
    manifests_ = other.manifests_;
    inbound_ = other.inbound_;
    bin_cost_ = other.bin_cost_;
    commodity_cost_ = other.commodity_cost_;
    overload_cost_ = other.overload_cost_;
    return *this;
}

long long Solution::total_bins() const {
    long long n = 0;
    for (const auto& [key, m] : manifests_) n += m.bin_count();
    return n;
}

int Solution::routed_bundles() const {
    int n = 0;
    for (const auto& p : paths_)
        if (p) ++n;
    return n;
}

double Solution::overload_delta(const NodeWeekKey& key, double delta) const {
    const auto& loc = inst_->network.locations[key.loc];
    if (!loc.platform) return 0;
    const double cap = loc.platform->capacity;
    const double before = inbound_at(key);
    const double after = before + delta;
    return loc.platform->overload_cost *
           (std::max(0.0, after - cap) - std::max(0.0, before - cap));
}

void Solution::journal_manifest(const TimedArcKey& key) {
    if (!journal_ || journal_->manifests.count(key)) return;
    auto it = manifests_.find(key);
    journal_->manifests[key] =
        it == manifests_.end() ? std::optional<BinManifest>{} : std::optional<BinManifest>{it->second};
}

void Solution::journal_inbound(const NodeWeekKey& key) {
    if (!journal_ || journal_->inbound.count(key)) return;
    auto it = inbound_.find(key);
    journal_->inbound[key] =
        it == inbound_.end() ? std::optional<double>{} : std::optional<double>{it->second};
}

BinManifest& Solution::manifest_mut(const TimedArcKey& key) {
    journal_manifest(key);
    auto it = manifests_.find(key);
    if (it == manifests_.end()) {
        BinManifest m;
        m.arc = key;
        m.capacity = inst_->network.arcs[key.arc].bin_capacity;
        m.max_bins = inst_->network.arcs[key.arc].max_bins;
        it = manifests_.emplace(key, std::move(m)).first;
    }
    return it->second;
}

void Solution::drop_manifest_if_empty(const TimedArcKey& key) {
    auto it = manifests_.find(key);
    if (it != manifests_.end() && it->second.bins.empty()) {
        journal_manifest(key);
        manifests_.erase(key);
    }
}

void Solution::add_inbound(const NodeWeekKey& key, double delta) {
    journal_inbound(key);
    overload_cost_ += overload_delta(key, delta);
    double& v = inbound_[key];
    v += delta;
    if (v <= 1e-12 && v >= -1e-12) {
        // Keep the map canonical so serialized forms do not accumulate zeros.
        inbound_.erase(key);
    }
}

void Solution::set_path(int bundle, std::optional<BundlePathState> state) {
    if (journal_ && !journal_->paths.count(bundle)) journal_->paths[bundle] = paths_[bundle];
    paths_[bundle] = std::move(state);
}

void Solution::begin_txn() {
    assert(!journal_);
    journal_ = std::make_unique<Journal>();
    journal_->bin_cost = bin_cost_;
    journal_->commodity_cost = commodity_cost_;
    journal_->overload_cost = overload_cost_;
}

void Solution::commit_txn() {
    assert(journal_);
    journal_.reset();
}

void Solution::rollback_txn() {
    assert(journal_);
    for (auto& [key, before] : journal_->manifests) {
        if (before)
            manifests_[key] = std::move(*before);
        else
            manifests_.erase(key);
    }
    for (auto& [key, before] : journal_->inbound) {
        if (before)
            inbound_[key] = *before;
        else
            inbound_.erase(key);
    }
    for (auto& [b, before] : journal_->paths) paths_[b] = std::move(before);
    bin_cost_ = journal_->bin_cost;
    commodity_cost_ = journal_->commodity_cost;
    overload_cost_ = journal_->overload_cost;
    journal_.reset();
}

}  // namespace stpp
