#include "stpp/bounds.hpp"

#include <chrono>

#include "stpp/errors.hpp"

namespace stpp {

const char* to_string(BoundKind k) {
    switch (k) {
        case BoundKind::LinearRelaxation: return "linear";
        case BoundKind::MixedGiant: return "mixed";
        case BoundKind::FullGiant: return "full";
    }
    return "?";
}

namespace {

// Liquid weights; direct consolidated arcs optionally charge whole bins per
// projected order (the mixed-giant strengthening).
std::vector<double> bound_weights(const Instance& inst, const Expanded& exp, int bundle,
                                  bool mixed) {
    std::vector<double> w(exp.tt.arcs.size(), kInf);
    for (int ai : exp.sub[bundle].arcs) {
        const auto& a = exp.tt.arcs[ai];
        if (a.static_arc < 0) {
            w[ai] = 0;
            continue;
        }
        const Arc& sa = inst.network.arcs[a.static_arc];
        double c = 0;
        for (int o : inst.bundles[bundle].orders) {
            c += order_arc_cost(inst, a.static_arc, o);
            if (sa.outsourced) continue;
            if (mixed && sa.kind == ArcKind::Direct) {
                c += sa.bin_cost * static_cast<double>(bp_lower_bound_volume(
                                       inst.orders[o].volume, sa.bin_capacity));
            } else {
                c += inst.orders[o].volume / sa.bin_capacity * sa.bin_cost;
            }
        }
        w[ai] = c;
    }
    return w;
}

BoundCertificate decomposable_bound(const Instance& inst, const Expanded& exp, bool mixed,
                                    std::vector<std::vector<int>>* paths_out) {
    const auto start = std::chrono::steady_clock::now();
    BoundCertificate cert;
    cert.kind = mixed ? BoundKind::MixedGiant : BoundKind::LinearRelaxation;
    cert.per_bundle.resize(inst.bundles.size(), 0.0);
    if (paths_out) paths_out->resize(inst.bundles.size());
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        auto w = bound_weights(inst, exp, static_cast<int>(b), mixed);
        auto sp = shortest_path_static(exp.tt, exp.sub[b], w);
        if (!sp)
            throw InfeasibleBundleError(static_cast<int>(b),
                                        "bundle unreachable in bound computation");
        cert.per_bundle[b] = sp->cost;
        cert.value += sp->cost;
        if (paths_out) (*paths_out)[b] = std::move(sp->tt_arcs);
    }
    cert.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    cert.notes = "platform overloads excluded (decomposable variant)";
    return cert;
}

}  // namespace

BoundCertificate linear_bound(const Instance& inst, const Expanded& exp) {
    return decomposable_bound(inst, exp, /*mixed=*/false, nullptr);
}

BoundCertificate mixed_giant_bound(const Instance& inst, const Expanded& exp) {
    return decomposable_bound(inst, exp, /*mixed=*/true, nullptr);
}

std::vector<std::vector<int>> mixed_giant_paths(const Instance& inst, const Expanded& exp) {
    std::vector<std::vector<int>> paths;
    decomposable_bound(inst, exp, /*mixed=*/true, &paths);
    return paths;
}

BoundCertificate full_giant_bound(const Instance& inst, const Expanded& exp,
                                  double time_limit_seconds, long long node_budget,
                                  long long variable_budget) {
    const auto start = std::chrono::steady_clock::now();
    BoundCertificate cert;
    cert.kind = BoundKind::FullGiant;

    Solution empty(inst);
    std::vector<int> all(inst.bundles.size());
    for (size_t b = 0; b < inst.bundles.size(); ++b) all[b] = static_cast<int>(b);
    PerturbationMilp model =
        build_flow_milp(empty, exp, all, variable_budget, /*scale_costs=*/false);

    MilpParams params;
    params.node_budget = node_budget;
    if (time_limit_seconds == 0) {
        params.root_only = true;
    } else {
        params.time_limit_seconds = time_limit_seconds;
    }
    MilpResult r = solve_milp(model, params);
    cert.value = r.dual_bound;
    cert.optimal = r.status == MilpResult::Status::Optimal;
    cert.notes = cert.optimal ? "search closed, dual bound is the relaxation optimum"
                              : "stopped at the limit, value is the best dual bound";
    cert.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cert;
}

Solution rounding_heuristic(const Instance& inst, const Expanded& exp) {
    auto paths = mixed_giant_paths(inst, exp);
    Solution sol(inst);
    for (int b : ffd_bundle_order(inst)) commit_bundle_on_path(sol, exp.tt, b, paths[b]);
    std::vector<TimedArcKey> keys;
    for (const auto& [key, m] : sol.manifests()) keys.push_back(key);
    repack(sol, keys);
    return sol;
}

double whole_model_lp_value(const Instance& inst, const Expanded& exp,
                            size_t max_paths_per_bundle) {
    Solution empty(inst);
    PerturbationMilp model;
    model.kind = MilpKind::PathBased;
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        auto en = enumerate_paths(exp.tt, inst, exp.sub[b], max_paths_per_bundle);
        if (en.truncated)
            throw BudgetExceededError("whole-model LP needs complete path enumeration");
        model.bundles.push_back(static_cast<int>(b));
        model.choices.emplace_back();
        for (const auto& p : en.paths) {
            // Reuse the flow-model choice construction (unscaled costs).
            PerturbationMilp::Choice ch;
            ch.tt_arcs = p;
            ch.commodity_cost = path_commodity_cost(inst, exp.tt, p, static_cast<int>(b));
            std::map<int, double> arc_load;
            for (int ai : p) {
                const auto& arc = exp.tt.arcs[ai];
                if (arc.static_arc < 0) continue;
                const Arc& sa = inst.network.arcs[arc.static_arc];
                if (sa.outsourced) continue;
                for (int o : inst.bundles[b].orders) {
                    TimedArcKey key{arc.static_arc,
                                    project_step(inst, exp.tt.nodes[arc.tail].step, o)};
                    int e = model.arc_entry(key, sa.bin_capacity, sa.bin_cost);
                    arc_load[e] += inst.orders[o].volume;
                }
            }
            for (const auto& [e, v] : arc_load) {
                ch.arc_idx.push_back(e);
                ch.arc_volume.push_back(v);
            }
            model.choices.back().push_back(std::move(ch));
        }
    }
    return lp_relaxation_value(model, /*include_overloads=*/false);
}

}  // namespace stpp
