#include "stpp/packing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stpp/errors.hpp"

namespace stpp {

void Bin::add(int id, long long units, double item_volume) {
    used += static_cast<double>(units) * item_volume;
    for (auto& [cid, cnt] : contents) {
        if (cid == id) {
            cnt += units;
            return;
        }
    }
    contents.emplace_back(id, units);
}

double BinManifest::total_volume() const {
    double v = 0;
    for (const auto& b : bins) v += b.used;
    return v;
}

long long BinManifest::units_of(int commodity) const {
    long long n = 0;
    for (const auto& b : bins)
        for (const auto& [id, cnt] : b.contents)
            if (id == commodity) n += cnt;
    return n;
}

std::vector<PackItem> manifest_items(const BinManifest& m, const VolumeOf& volume_of) {
    std::map<int, long long> agg;
    for (const auto& bin : m.bins)
        for (const auto& [id, cnt] : bin.contents) agg[id] += cnt;
    std::vector<PackItem> items;
    items.reserve(agg.size());
    for (const auto& [id, cnt] : agg) items.push_back({id, volume_of(id), cnt});
    return items;
}

namespace {

// One entry per physical item, (volume desc, id asc).
struct ExpandedItem {
    int id;
    double volume;
};

std::vector<ExpandedItem> expand_sorted(const std::vector<PackItem>& items, double capacity) {
    std::vector<ExpandedItem> out;
    for (const auto& it : items) {
        if (it.volume > capacity + kPackEps)
            throw ItemOversizeError("item " + std::to_string(it.id) + " of volume " +
                                    std::to_string(it.volume) + " exceeds bin capacity " +
                                    std::to_string(capacity));
        for (long long k = 0; k < it.count; ++k) out.push_back({it.id, it.volume});
    }
    std::stable_sort(out.begin(), out.end(), [](const ExpandedItem& a, const ExpandedItem& b) {
        if (a.volume != b.volume) return a.volume > b.volume;
        return a.id < b.id;
    });
    return out;
}

}  // namespace

BinManifest ffd_pack(const std::vector<PackItem>& items, double capacity) {
    BinManifest m;
    m.capacity = capacity;
    for (const auto& it : expand_sorted(items, capacity)) {
        bool placed = false;
        for (auto& bin : m.bins) {
            if (bin.used + it.volume <= capacity + kPackEps) {
                bin.add(it.id, 1, it.volume);
                placed = true;
                break;
            }
        }
        if (!placed) {
            m.bins.emplace_back();
            m.bins.back().add(it.id, 1, it.volume);
        }
    }
    return m;
}

BinManifest bfd_pack(const std::vector<PackItem>& items, double capacity) {
    BinManifest m;
    m.capacity = capacity;
    for (const auto& it : expand_sorted(items, capacity)) {
        int best = -1;
        double best_residual = 0;
        for (size_t i = 0; i < m.bins.size(); ++i) {
            double residual = capacity - m.bins[i].used;
            if (residual + kPackEps < it.volume) continue;
            if (best < 0 || residual < best_residual) {
                best = static_cast<int>(i);
                best_residual = residual;
            }
        }
        if (best < 0) {
            m.bins.emplace_back();
            best = static_cast<int>(m.bins.size()) - 1;
        }
        m.bins[best].add(it.id, 1, it.volume);
    }
    return m;
}

long long bp_lower_bound_volume(double total_volume, double capacity) {
    if (total_volume <= kPackEps) return 0;
    return static_cast<long long>(std::ceil(total_volume / capacity - kPackEps));
}

long long bp_lower_bound(const std::vector<PackItem>& items, double capacity) {
    double v = 0;
    for (const auto& it : items) v += static_cast<double>(it.count) * it.volume;
    return bp_lower_bound_volume(v, capacity);
}

void Placement::apply(BinManifest& manifest) const {
    for (const auto& s : slots) {
        while (static_cast<size_t>(s.bin) >= manifest.bins.size()) manifest.bins.emplace_back();
        manifest.bins[s.bin].add(s.id, s.units, s.item_volume);
    }
}

Placement tentative_insert(const BinManifest& manifest, const std::vector<PackItem>& items) {
    Placement p;
    std::vector<double> used;
    used.reserve(manifest.bins.size() + 4);
    for (const auto& b : manifest.bins) used.push_back(b.used);
    const size_t existing = used.size();

    auto record = [&](int bin, int id, double vol) {
        if (!p.slots.empty() && p.slots.back().bin == bin && p.slots.back().id == id) {
            p.slots.back().units += 1;
        } else {
            p.slots.push_back({bin, id, 1, vol});
        }
    };

    for (const auto& it : expand_sorted(items, manifest.capacity)) {
        bool placed = false;
        for (size_t i = 0; i < used.size(); ++i) {
            if (used[i] + it.volume <= manifest.capacity + kPackEps) {
                used[i] += it.volume;
                record(static_cast<int>(i), it.id, it.volume);
                placed = true;
                break;
            }
        }
        if (!placed) {
            used.push_back(it.volume);
            record(static_cast<int>(used.size()) - 1, it.id, it.volume);
        }
    }
    p.new_bins = static_cast<long long>(used.size() - existing);
    if (manifest.max_bins >= 0 && static_cast<long long>(used.size()) > manifest.max_bins)
        throw CapacityExhaustedError("arc allows at most " + std::to_string(manifest.max_bins) +
                                     " bins, insertion needs " + std::to_string(used.size()));
    return p;
}

namespace {

struct ExactState {
    double capacity;
    std::vector<double> volumes;  // expanded, sorted desc
    long long best;
    long long global_lb;
    std::vector<double> bins;

    void dfs(size_t i) {
        if (static_cast<long long>(bins.size()) >= best) return;
        if (i == volumes.size()) {
            best = static_cast<long long>(bins.size());
            return;
        }
        double v = volumes[i];
        double prev_residual = -1;
        for (size_t b = 0; b < bins.size(); ++b) {
            double residual = capacity - bins[b];
            if (residual + kPackEps < v) continue;
            if (residual == prev_residual) continue;  // symmetric to the previous try
            prev_residual = residual;
            bins[b] += v;
            dfs(i + 1);
            bins[b] -= v;
            if (best == global_lb) return;
        }
        bins.push_back(v);
        dfs(i + 1);
        bins.pop_back();
    }
};

}  // namespace

long long exact_pack(const std::vector<PackItem>& items, double capacity) {
    ExactState st;
    st.capacity = capacity;
    for (const auto& it : expand_sorted(items, capacity)) st.volumes.push_back(it.volume);
    if (st.volumes.empty()) return 0;
    std::vector<PackItem> singles;
    for (size_t i = 0; i < st.volumes.size(); ++i)
        singles.push_back({static_cast<int>(i), st.volumes[i], 1});
    st.best = ffd_pack(singles, capacity).bin_count();  // initial incumbent
    st.global_lb = bp_lower_bound(items, capacity);
    if (st.best == st.global_lb) return st.best;
    st.dfs(0);
    return st.best;
}

void remove_commodities(BinManifest& manifest, const std::vector<int>& commodity_ids,
                        const VolumeOf& volume_of) {
    auto is_removed = [&](int id) {
        return std::find(commodity_ids.begin(), commodity_ids.end(), id) != commodity_ids.end();
    };
    std::vector<Bin> kept_bins;
    for (auto& bin : manifest.bins) {
        Bin nb;
        for (const auto& [id, cnt] : bin.contents)
            if (!is_removed(id)) nb.add(id, cnt, volume_of(id));
        if (!nb.contents.empty()) kept_bins.push_back(std::move(nb));
    }
    manifest.bins = std::move(kept_bins);

    // Refill: an FFD repack of the remainder replaces the arrangement only
    // when it needs fewer bins, so removal never increases the bin count.
    BinManifest refill = ffd_pack(manifest_items(manifest, volume_of), manifest.capacity);
    if (refill.bin_count() < manifest.bin_count()) manifest.bins = std::move(refill.bins);
}

long long repack_best(BinManifest& manifest, const VolumeOf& volume_of) {
    const long long before = manifest.bin_count();
    auto items = manifest_items(manifest, volume_of);
    if (before <= bp_lower_bound(items, manifest.capacity)) return 0;  // already tight
    BinManifest ffd = ffd_pack(items, manifest.capacity);
    BinManifest bfd = bfd_pack(items, manifest.capacity);
    const BinManifest* winner = nullptr;
    long long best = before;
    if (ffd.bin_count() < best) {
        best = ffd.bin_count();
        winner = &ffd;
    }
    if (bfd.bin_count() < best) {
        best = bfd.bin_count();
        winner = &bfd;
    }
    if (winner) manifest.bins = winner == &ffd ? std::move(ffd.bins) : std::move(bfd.bins);
    return best - before;
}

}  // namespace stpp
