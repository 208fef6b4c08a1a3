#include "stpp/insertion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <set>

#include "stpp/errors.hpp"

namespace stpp {

double liquid_order_arc_cost(const Instance& inst, int arc, int order) {
    const Arc& a = inst.network.arcs[arc];
    double c = order_arc_cost(inst, arc, order);
    if (!a.outsourced) c += inst.orders[order].volume / a.bin_capacity * a.bin_cost;
    return c;
}

namespace {

std::vector<PackItem> order_items(const Instance& inst, int order) {
    std::vector<PackItem> items;
    items.reserve(inst.orders[order].commodities.size());
    for (int m : inst.orders[order].commodities)
        items.push_back({m, inst.commodities[m].volume, inst.commodities[m].multiplicity});
    return items;
}

}  // namespace

ArcCostContext::ArcCostContext(const Solution& sol, const TravelTimeGraph& tt,
                               const BundleSubgraph& sg, bool empty_costs)
    : sol_(sol), tt_(tt), sg_(sg), empty_costs_(empty_costs),
      memo_(tt.arcs.size(), std::numeric_limits<double>::quiet_NaN()) {}

double ArcCostContext::cost(int tt_arc) {
    double& slot = memo_[tt_arc];
    if (std::isnan(slot)) slot = compute(tt_arc);
    return slot;
}

double ArcCostContext::compute(int tt_arc) const {
    const Instance& inst = sol_.instance();
    const auto& a = tt_.arcs[tt_arc];
    if (a.static_arc < 0) return 0.0;  // waiting arc
    const Arc& sa = inst.network.arcs[a.static_arc];
    const Bundle& b = inst.bundles[sg_.bundle];
    const int tail_step = tt_.nodes[a.tail].step;
    const bool head_platform =
        inst.network.locations[sa.head].kind == LocationKind::Platform;

    double total = 0;
    for (int o : b.orders) {
        total += order_arc_cost(inst, a.static_arc, o);
        const TimedArcKey key{a.static_arc, project_step(inst, tail_step, o)};
        const double vol = inst.orders[o].volume;

        if (head_platform) {
            NodeWeekKey nk{sa.head, projected_head_week(inst, key)};
            if (empty_costs_) {
                const auto& p = *inst.network.locations[sa.head].platform;
                total += p.overload_cost * std::max(0.0, vol - p.capacity);
            } else {
                total += sol_.overload_delta(nk, vol);
            }
        }
        if (!sa.outsourced) {
            try {
                if (empty_costs_) {
                    BinManifest empty;
                    empty.capacity = sa.bin_capacity;
                    empty.max_bins = sa.max_bins;
                    total += sa.bin_cost *
                             static_cast<double>(tentative_insert(empty, order_items(inst, o)).new_bins);
                } else if (const BinManifest* m = sol_.manifest(key)) {
                    total += sa.bin_cost *
                             static_cast<double>(tentative_insert(*m, order_items(inst, o)).new_bins);
                } else {
                    BinManifest fresh;
                    fresh.capacity = sa.bin_capacity;
                    fresh.max_bins = sa.max_bins;
                    total += sa.bin_cost *
                             static_cast<double>(tentative_insert(fresh, order_items(inst, o)).new_bins);
                }
            } catch (const CapacityExhaustedError&) {
                return kInf;  // K_a would be exceeded, arc unusable
            }
        }
    }
    return total;
}

double arc_insertion_cost(const Solution& sol, const TravelTimeGraph& tt,
                          const BundleSubgraph& sg, int tt_arc) {
    ArcCostContext ctx(sol, tt, sg);
    return ctx.cost(tt_arc);
}

bool is_elementary(const TravelTimeGraph& tt, const Instance& inst,
                   const std::vector<int>& tt_arcs) {
    std::set<int> seen;
    for (int ai : tt_arcs) {
        int hl = tt.nodes[tt.arcs[ai].head].loc;
        if (inst.network.locations[hl].kind == LocationKind::Platform && !seen.insert(hl).second)
            return false;
    }
    return true;
}

double path_weight(const std::vector<int>& tt_arcs, const std::vector<double>& arc_weight) {
    double w = 0;
    for (int ai : tt_arcs) w += arc_weight[ai];
    return w;
}

namespace {

// Plain Dijkstra over the pruned subgraph with lazily computed weights.
// Returns the arc sequence or nothing when the sink is unreachable.
std::optional<std::vector<int>> dijkstra_path(const TravelTimeGraph& tt, const BundleSubgraph& sg,
                                              ArcCostContext& ctx) {
    std::vector<double> dist(tt.nodes.size(), kInf);
    std::vector<int> parent_arc(tt.nodes.size(), -1);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    dist[sg.source] = 0;
    pq.push({0, sg.source});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        if (v == sg.sink) break;
        for (int ai : tt.out[v]) {
            if (!sg.arc_kept[ai]) continue;
            double w = ctx.cost(ai);
            if (w >= kInf) continue;
            int h = tt.arcs[ai].head;
            if (d + w < dist[h]) {
                dist[h] = d + w;
                parent_arc[h] = ai;
                pq.push({dist[h], h});
            }
        }
    }
    if (dist[sg.sink] >= kInf) return std::nullopt;
    std::vector<int> arcs;
    for (int v = sg.sink; v != sg.source;) {
        int ai = parent_arc[v];
        arcs.push_back(ai);
        v = tt.arcs[ai].tail;
    }
    std::reverse(arcs.begin(), arcs.end());
    return arcs;
}

// Exact elementary shortest path: label setting over (node, visited-platform
// bitmask). Only used in the rare case both Dijkstra passes come back with a
// platform revisit.
std::optional<std::vector<int>> bitmask_path(const TravelTimeGraph& tt, const Instance& inst,
                                             const BundleSubgraph& sg, ArcCostContext& ctx) {
    const auto& platforms = sg.platforms;
    if (platforms.size() > 24) return std::nullopt;
    auto mask_of = [&](int loc) -> uint32_t {
        auto it = std::lower_bound(platforms.begin(), platforms.end(), loc);
        if (it == platforms.end() || *it != loc) return 0;
        return 1u << (it - platforms.begin());
    };

    struct Label {
        double dist;
        int node;
        uint32_t mask;
        int parent;  // label index
        int via_arc;
    };
    std::vector<Label> labels;
    std::vector<std::map<uint32_t, double>> best(tt.nodes.size());
    using Entry = std::tuple<double, int>;  // (dist, label index)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    labels.push_back({0, sg.source, 0, -1, -1});
    best[sg.source][0] = 0;
    pq.push({0, 0});
    int best_sink = -1;
    while (!pq.empty()) {
        auto [d, li] = pq.top();
        pq.pop();
        Label lab = labels[li];
        auto it = best[lab.node].find(lab.mask);
        if (it == best[lab.node].end() || d > it->second) continue;
        if (lab.node == sg.sink) {
            best_sink = li;
            break;
        }
        for (int ai : tt.out[lab.node]) {
            if (!sg.arc_kept[ai]) continue;
            double w = ctx.cost(ai);
            if (w >= kInf) continue;
            int h = tt.arcs[ai].head;
            uint32_t hm = mask_of(tt.nodes[h].loc);
            if (hm & lab.mask) continue;  // platform already visited
            uint32_t nm = lab.mask | hm;
            double nd = d + w;
            auto bit = best[h].find(nm);
            if (bit != best[h].end() && bit->second <= nd) continue;
            best[h][nm] = nd;
            labels.push_back({nd, h, nm, li, ai});
            pq.push({nd, static_cast<int>(labels.size()) - 1});
        }
    }
    if (best_sink < 0) return std::nullopt;
    std::vector<int> arcs;
    for (int li = best_sink; labels[li].parent >= 0; li = labels[li].parent)
        arcs.push_back(labels[li].via_arc);
    std::reverse(arcs.begin(), arcs.end());
    return arcs;
}

}  // namespace

double commit_bundle_on_path(Solution& sol, const TravelTimeGraph& tt, int bundle,
                             const std::vector<int>& tt_arcs) {
    const Instance& inst = sol.instance();
    const Bundle& b = inst.bundles[bundle];
    assert(!sol.has_path(bundle));

    BundlePathState st;
    st.tt_arcs = tt_arcs;
    st.commodity_cost = path_commodity_cost(inst, tt, tt_arcs, bundle);
    st.projections.resize(b.orders.size());

    double delta = st.commodity_cost;
    sol.add_commodity_cost(st.commodity_cost);

    for (int ai : tt_arcs) {
        const auto& arc = tt.arcs[ai];
        if (arc.static_arc < 0) continue;
        const Arc& sa = inst.network.arcs[arc.static_arc];
        const bool head_platform =
            inst.network.locations[sa.head].kind == LocationKind::Platform;
        const int tail_step = tt.nodes[arc.tail].step;
        for (size_t oi = 0; oi < b.orders.size(); ++oi) {
            int o = b.orders[oi];
            TimedArcKey key{arc.static_arc, project_step(inst, tail_step, o)};
            st.projections[oi].arcs.push_back(key);
            if (!sa.outsourced) {
                BinManifest& m = sol.manifest_mut(key);
                Placement p = tentative_insert(m, order_items(inst, o));
                p.apply(m);
                double bins_delta = sa.bin_cost * static_cast<double>(p.new_bins);
                sol.add_bin_cost(bins_delta);
                delta += bins_delta;
            }
            if (head_platform) {
                NodeWeekKey nk{sa.head, projected_head_week(inst, key)};
                st.projections[oi].platform_heads.push_back(nk);
                delta += sol.overload_delta(nk, inst.orders[o].volume);
                sol.add_inbound(nk, inst.orders[o].volume);
            }
        }
    }
    sol.set_path(bundle, std::move(st));
    return delta;
}

InsertResult insert_bundle(Solution& sol, const TravelTimeGraph& tt, const BundleSubgraph& sg) {
    const Instance& inst = sol.instance();

    ArcCostContext live(sol, tt, sg);
    auto path = dijkstra_path(tt, sg, live);
    if (path && !is_elementary(tt, inst, *path)) {
        // Paper fallback: price against an empty solution, which usually
        // removes the consolidation incentive for the revisit.
        ArcCostContext empty(sol, tt, sg, /*empty_costs=*/true);
        path = dijkstra_path(tt, sg, empty);
        if (path && !is_elementary(tt, inst, *path)) path = bitmask_path(tt, inst, sg, live);
    }
    if (!path)
        throw InfeasibleBundleError(sg.bundle, "no usable path for bundle " +
                                                   std::to_string(sg.bundle));
    InsertResult res;
    res.tt_arcs = *path;
    res.cost = commit_bundle_on_path(sol, tt, sg.bundle, res.tt_arcs);
    return res;
}

RemoveSummary remove_bundle(Solution& sol, int bundle) {
    const Instance& inst = sol.instance();
    if (!sol.has_path(bundle))
        throw std::invalid_argument("bundle " + std::to_string(bundle) + " not in solution");
    const Bundle& b = inst.bundles[bundle];
    BundlePathState st = sol.path(bundle);  // copy, the stored one goes away

    RemoveSummary summary;
    sol.add_commodity_cost(-st.commodity_cost);
    auto volume_of = [&](int m) { return inst.commodities[m].volume; };

    for (size_t oi = 0; oi < b.orders.size(); ++oi) {
        int o = b.orders[oi];
        const auto& proj = st.projections[oi];
        for (const auto& key : proj.arcs) {
            const Arc& sa = inst.network.arcs[key.arc];
            if (sa.outsourced) continue;
            BinManifest& m = sol.manifest_mut(key);
            long long before = m.bin_count();
            remove_commodities(m, inst.orders[o].commodities, volume_of);
            long long freed = before - m.bin_count();
            summary.bins_freed += freed;
            summary.arcs_touched += 1;
            sol.add_bin_cost(-sa.bin_cost * static_cast<double>(freed));
            sol.drop_manifest_if_empty(key);
        }
        for (const auto& nk : proj.platform_heads) sol.add_inbound(nk, -inst.orders[o].volume);
        summary.volume_released += inst.orders[o].volume * static_cast<double>(proj.arcs.size());
    }
    sol.set_path(bundle, std::nullopt);
    return summary;
}

std::optional<InsertResult> insert_bundle_through(Solution& sol, const TravelTimeGraph& tt,
                                                  const BundleSubgraph& sg, int corridor_tail,
                                                  int corridor_head) {
    const Instance& inst = sol.instance();
    ArcCostContext ctx(sol, tt, sg);

    // Forward distances from the source.
    std::vector<double> dist_f(tt.nodes.size(), kInf), dist_b(tt.nodes.size(), kInf);
    std::vector<int> par_f(tt.nodes.size(), -1), par_b(tt.nodes.size(), -1);
    using Entry = std::pair<double, int>;
    {
        std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
        dist_f[sg.source] = 0;
        pq.push({0, sg.source});
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > dist_f[v]) continue;
            for (int ai : tt.out[v]) {
                if (!sg.arc_kept[ai]) continue;
                double w = ctx.cost(ai);
                if (w >= kInf) continue;
                int h = tt.arcs[ai].head;
                if (d + w < dist_f[h]) {
                    dist_f[h] = d + w;
                    par_f[h] = ai;
                    pq.push({dist_f[h], h});
                }
            }
        }
    }
    {
        std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
        dist_b[sg.sink] = 0;
        pq.push({0, sg.sink});
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > dist_b[v]) continue;
            for (int ai : tt.in[v]) {
                if (!sg.arc_kept[ai]) continue;
                double w = ctx.cost(ai);
                if (w >= kInf) continue;
                int t = tt.arcs[ai].tail;
                if (d + w < dist_b[t]) {
                    dist_b[t] = d + w;
                    par_b[t] = ai;
                    pq.push({dist_b[t], t});
                }
            }
        }
    }

    // Best timed copy of a corridor arc.
    double best = kInf;
    int best_arc = -1;
    for (int ai : sg.arcs) {
        const auto& a = tt.arcs[ai];
        if (a.static_arc < 0) continue;
        const Arc& sa = inst.network.arcs[a.static_arc];
        if (sa.tail != corridor_tail || sa.head != corridor_head) continue;
        double w = ctx.cost(ai);
        if (w >= kInf) continue;
        double c = dist_f[a.tail] + w + dist_b[a.head];
        if (c < best) {
            best = c;
            best_arc = ai;
        }
    }
    if (best_arc < 0) return std::nullopt;

    std::vector<int> arcs;
    for (int v = tt.arcs[best_arc].tail; v != sg.source;) {
        arcs.push_back(par_f[v]);
        v = tt.arcs[par_f[v]].tail;
    }
    std::reverse(arcs.begin(), arcs.end());
    arcs.push_back(best_arc);
    for (int v = tt.arcs[best_arc].head; v != sg.sink;) {
        arcs.push_back(par_b[v]);
        v = tt.arcs[par_b[v]].head;
    }
    if (!is_elementary(tt, inst, arcs)) return std::nullopt;

    InsertResult res;
    res.tt_arcs = std::move(arcs);
    res.cost = commit_bundle_on_path(sol, tt, sg.bundle, res.tt_arcs);
    return res;
}

std::optional<InsertResult> shortest_path_static(const TravelTimeGraph& tt,
                                                 const BundleSubgraph& sg,
                                                 const std::vector<double>& arc_weight) {
    std::vector<double> dist(tt.nodes.size(), kInf);
    std::vector<int> parent(tt.nodes.size(), -1);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    dist[sg.source] = 0;
    pq.push({0, sg.source});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        if (v == sg.sink) break;
        for (int ai : tt.out[v]) {
            if (!sg.arc_kept[ai]) continue;
            double w = arc_weight[ai];
            if (w >= kInf) continue;
            int h = tt.arcs[ai].head;
            if (d + w < dist[h]) {
                dist[h] = d + w;
                parent[h] = ai;
                pq.push({dist[h], h});
            }
        }
    }
    if (dist[sg.sink] >= kInf) return std::nullopt;
    InsertResult res;
    res.cost = dist[sg.sink];
    for (int v = sg.sink; v != sg.source; v = tt.arcs[parent[v]].tail)
        res.tt_arcs.push_back(parent[v]);
    std::reverse(res.tt_arcs.begin(), res.tt_arcs.end());
    return res;
}

PathEnumeration enumerate_paths(const TravelTimeGraph& tt, const Instance& inst,
                                const BundleSubgraph& sg, size_t max_paths) {
    PathEnumeration out;
    std::vector<int> stack;
    std::set<int> platforms;

    std::function<void(int)> dfs = [&](int v) {
        if (out.truncated) return;
        if (v == sg.sink) {
            if (out.paths.size() >= max_paths) {
                out.truncated = true;
                return;
            }
            out.paths.push_back(stack);
            return;
        }
        for (int ai : tt.out[v]) {
            if (!sg.arc_kept[ai]) continue;
            int hl = tt.nodes[tt.arcs[ai].head].loc;
            bool is_platform = inst.network.locations[hl].kind == LocationKind::Platform;
            if (is_platform && platforms.count(hl)) continue;
            if (is_platform) platforms.insert(hl);
            stack.push_back(ai);
            dfs(tt.arcs[ai].head);
            stack.pop_back();
            if (is_platform) platforms.erase(hl);
            if (out.truncated) return;
        }
    };
    dfs(sg.source);
    return out;
}

std::vector<std::vector<int>> k_shortest_paths(const TravelTimeGraph& tt,
                                               const BundleSubgraph& sg,
                                               const std::vector<double>& arc_weight, int k) {
    // Label-setting with at most k settled labels per (node, platform mask).
    const Instance* inst = nullptr;  // masks come from sg.platforms directly
    (void)inst;
    auto mask_of = [&](int loc) -> uint32_t {
        auto it = std::lower_bound(sg.platforms.begin(), sg.platforms.end(), loc);
        if (it == sg.platforms.end() || *it != loc) return 0;
        return 1u << (it - sg.platforms.begin());
    };

    struct Label {
        double dist;
        int node;
        uint32_t mask;
        int parent, via_arc;
    };
    std::vector<Label> labels;
    std::map<std::pair<int, uint32_t>, int> settled;
    using Entry = std::tuple<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    labels.push_back({0, sg.source, 0, -1, -1});
    pq.push({0, 0});

    std::vector<std::vector<int>> result;
    while (!pq.empty() && static_cast<int>(result.size()) < k) {
        auto [d, li] = pq.top();
        pq.pop();
        Label lab = labels[li];
        int& count = settled[{lab.node, lab.mask}];
        if (count >= k) continue;
        ++count;
        if (lab.node == sg.sink) {
            std::vector<int> arcs;
            for (int c = li; labels[c].parent >= 0; c = labels[c].parent)
                arcs.push_back(labels[c].via_arc);
            std::reverse(arcs.begin(), arcs.end());
            result.push_back(std::move(arcs));
            continue;
        }
        // These graphs are DAGs, so labels cannot cycle.
        for (int ai : tt.out[lab.node]) {
            if (!sg.arc_kept[ai]) continue;
            double w = arc_weight[ai];
            if (w >= kInf) continue;
            int h = tt.arcs[ai].head;
            uint32_t hm = mask_of(tt.nodes[h].loc);
            if (hm & lab.mask) continue;
            labels.push_back({d + w, h, lab.mask | hm, li, ai});
            pq.push({d + w, static_cast<int>(labels.size()) - 1});
        }
    }
    return result;
}

}  // namespace stpp
