#include "stpp/local_search.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "stpp/errors.hpp"

namespace stpp {

double repack(Solution& sol, const std::vector<TimedArcKey>& arcs) {
    const Instance& inst = sol.instance();
    auto volume_of = [&](int m) { return inst.commodities[m].volume; };
    double delta = 0;
    for (const auto& key : arcs) {
        const BinManifest* current = sol.manifest(key);
        if (!current || current->bins.empty()) continue;
        const Arc& sa = inst.network.arcs[key.arc];
        BinManifest& m = sol.manifest_mut(key);
        long long change = repack_best(m, volume_of);
        if (change != 0) {
            double d = sa.bin_cost * static_cast<double>(change);
            sol.add_bin_cost(d);
            delta += d;
        }
    }
    return delta;
}

double reinsert(Solution& sol, const TravelTimeGraph& tt, const BundleSubgraph& sg,
                bool* accepted) {
    if (accepted) *accepted = false;
    if (!sol.has_path(sg.bundle)) return 0;
    const double before = sol.total_cost();
    sol.begin_txn();
    remove_bundle(sol, sg.bundle);
    insert_bundle(sol, tt, sg);
    const double delta = sol.total_cost() - before;
    if (delta < -1e-9) {
        sol.commit_txn();
        if (accepted) *accepted = true;
        return delta;
    }
    sol.rollback_txn();
    return 0;
}

std::vector<std::pair<int, int>> shared_corridors(const Solution& sol, const TravelTimeGraph& tt) {
    const Instance& inst = sol.instance();
    std::map<std::pair<int, int>, int> count;
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        if (!sol.has_path(static_cast<int>(b))) continue;
        std::map<std::pair<int, int>, bool> seen;  // once per bundle
        for (int ai : sol.path(static_cast<int>(b)).tt_arcs) {
            int sa = tt.arcs[ai].static_arc;
            if (sa < 0) continue;
            auto key = std::make_pair(inst.network.arcs[sa].tail, inst.network.arcs[sa].head);
            if (!seen[key]) {
                seen[key] = true;
                count[key] += 1;
            }
        }
    }
    std::vector<std::pair<int, int>> out;
    for (const auto& [key, n] : count)
        if (n >= 2) out.push_back(key);
    return out;
}

double consolidate_and_refine(Solution& sol, const Expanded& exp, int u_loc, int v_loc,
                              bool* accepted) {
    if (accepted) *accepted = false;
    const Instance& inst = sol.instance();
    const TravelTimeGraph& tt = exp.tt;

    // Bundles whose current path uses some u->v arc.
    std::vector<int> members;
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        if (!sol.has_path(static_cast<int>(b))) continue;
        for (int ai : sol.path(static_cast<int>(b)).tt_arcs) {
            int sa = tt.arcs[ai].static_arc;
            if (sa < 0) continue;
            if (inst.network.arcs[sa].tail == u_loc && inst.network.arcs[sa].head == v_loc) {
                members.push_back(static_cast<int>(b));
                break;
            }
        }
    }
    if (members.size() < 2) return 0;

    // Largest packaging first, like the constructive pass.
    std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
        if (inst.bundles[a].size_key != inst.bundles[b].size_key)
            return inst.bundles[a].size_key > inst.bundles[b].size_key;
        return a < b;
    });

    const double before = sol.total_cost();
    sol.begin_txn();
    for (int b : members) remove_bundle(sol, b);
    // Coarse phase: the whole group commits through the corridor, sharing bins.
    for (int b : members) {
        auto r = insert_bundle_through(sol, tt, exp.sub[b], u_loc, v_loc);
        if (!r) insert_bundle(sol, tt, exp.sub[b]);
    }
    // Refine phase: each member re-evaluated individually.
    for (int b : members) {
        remove_bundle(sol, b);
        insert_bundle(sol, tt, exp.sub[b]);
    }
    const double delta = sol.total_cost() - before;
    if (delta < -1e-9) {
        sol.commit_txn();
        if (accepted) *accepted = true;
        return delta;
    }
    sol.rollback_txn();
    return 0;
}

LocalSearchResult local_search(Solution& sol, const Expanded& exp, const LocalSearchParams& params,
                               Rng& rng) {
    LocalSearchResult res;
    res.initial_cost = sol.total_cost();
    res.final_cost = res.initial_cost;
    if (params.time_limit_seconds <= 0 || params.move_budget <= 0) return res;

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    const double wsum = params.weights[0] + params.weights[1] + params.weights[2];

    while (res.moves_tried < params.move_budget && elapsed() < params.time_limit_seconds) {
        ++res.moves_tried;
        double pick = rng.uniform() * wsum;
        if (pick < params.weights[0]) {
            // Re-Pack over all consolidated arcs or one bundle's projections.
            std::vector<TimedArcKey> keys;
            if (rng.chance(0.5)) {
                for (const auto& [key, m] : sol.manifests()) keys.push_back(key);
            } else {
                std::vector<int> routed;
                for (size_t b = 0; b < sol.instance().bundles.size(); ++b)
                    if (sol.has_path(static_cast<int>(b))) routed.push_back(static_cast<int>(b));
                if (!routed.empty()) {
                    int b = routed[rng.below(routed.size())];
                    for (const auto& proj : sol.path(b).projections)
                        for (const auto& key : proj.arcs) keys.push_back(key);
                }
            }
            double d = repack(sol, keys);
            if (d < 0) {
                ++res.moves_accepted;
                res.trace.push_back({"repack", d, elapsed()});
            }
        } else if (pick < params.weights[0] + params.weights[1]) {
            std::vector<int> routed;
            for (size_t b = 0; b < sol.instance().bundles.size(); ++b)
                if (sol.has_path(static_cast<int>(b))) routed.push_back(static_cast<int>(b));
            if (routed.empty()) continue;
            int b = routed[rng.below(routed.size())];
            bool ok = false;
            double d = reinsert(sol, exp.tt, exp.sub[b], &ok);
            if (ok) {
                ++res.moves_accepted;
                res.trace.push_back({"reinsert", d, elapsed()});
            }
        } else {
            auto corridors = shared_corridors(sol, exp.tt);
            if (corridors.empty()) continue;
            auto [u, v] = corridors[rng.below(corridors.size())];
            bool ok = false;
            double d = consolidate_and_refine(sol, exp, u, v, &ok);
            if (ok) {
                ++res.moves_accepted;
                res.trace.push_back({"consolidate", d, elapsed()});
            }
        }
        if (params.validate_each_accept && !res.trace.empty()) {
            auto violations = validate_solution(sol, exp.tt);
            if (!violations.empty()) throw ValidationError(violations);
        }
    }
    res.final_cost = sol.total_cost();
    return res;
}

}  // namespace stpp
