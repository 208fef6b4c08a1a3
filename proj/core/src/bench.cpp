#include "stpp/bench.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "stpp/errors.hpp"

namespace stpp {

namespace {

void pack_all_and_settle(Solution& sol) {
    std::vector<TimedArcKey> keys;
    for (const auto& [key, m] : sol.manifests()) keys.push_back(key);
    repack(sol, keys);
}

}  // namespace

Solution shortest_heuristic(const Instance& inst, const Expanded& exp) {
    Solution sol(inst);
    // Distance ignores every cost; waiting arcs are free.
    for (int b : ffd_bundle_order(inst)) {
        std::vector<double> w(exp.tt.arcs.size(), kInf);
        for (int ai : exp.sub[b].arcs) {
            int sa = exp.tt.arcs[ai].static_arc;
            w[ai] = sa < 0 ? 0.0 : inst.network.arcs[sa].distance;
        }
        auto sp = shortest_path_static(exp.tt, exp.sub[b], w);
        if (!sp) throw InfeasibleBundleError(b, "bundle unreachable");
        commit_bundle_on_path(sol, exp.tt, b, sp->tt_arcs);
    }
    pack_all_and_settle(sol);
    return sol;
}

Solution average_heuristic(const Instance& inst, const Expanded& exp) {
    Solution sol(inst);
    // Relaxed giant state per timed arc, fed by the aggregated synthetic
    // orders (delivery week 1, volume = sum of the bundle's orders).
    std::map<TimedArcKey, double> giant;

    std::vector<std::vector<int>> chosen(inst.bundles.size());
    for (int b : ffd_bundle_order(inst)) {
        double agg_volume = 0;
        for (int o : inst.bundles[b].orders) agg_volume += inst.orders[o].volume;

        std::vector<double> w(exp.tt.arcs.size(), kInf);
        for (int ai : exp.sub[b].arcs) {
            const auto& a = exp.tt.arcs[ai];
            if (a.static_arc < 0) {
                w[ai] = 0;
                continue;
            }
            const Arc& sa = inst.network.arcs[a.static_arc];
            double c = 0;
            for (int o : inst.bundles[b].orders) c += order_arc_cost(inst, a.static_arc, o);
            if (!sa.outsourced) {
                // Synthetic order at week 1: project the tail step from d=1.
                TimedArcKey key{a.static_arc,
                                wrap_week(1 - exp.tt.nodes[a.tail].step, inst.horizon)};
                auto it = giant.find(key);
                double before = it == giant.end() ? 0.0 : it->second;
                long long marginal = bp_lower_bound_volume(before + agg_volume, sa.bin_capacity) -
                                     bp_lower_bound_volume(before, sa.bin_capacity);
                c += sa.bin_cost * static_cast<double>(marginal);
            }
            w[ai] = c;
        }
        auto sp = shortest_path_static(exp.tt, exp.sub[b], w);
        if (!sp) throw InfeasibleBundleError(b, "bundle unreachable");
        chosen[b] = sp->tt_arcs;
        for (int ai : chosen[b]) {
            const auto& a = exp.tt.arcs[ai];
            if (a.static_arc < 0 || inst.network.arcs[a.static_arc].outsourced) continue;
            TimedArcKey key{a.static_arc, wrap_week(1 - exp.tt.nodes[a.tail].step, inst.horizon)};
            giant[key] += agg_volume;
        }
    }
    for (int b : ffd_bundle_order(inst)) commit_bundle_on_path(sol, exp.tt, b, chosen[b]);
    pack_all_and_settle(sol);
    return sol;
}

Solution run_method(const std::string& method, const Instance& inst, const Expanded& exp,
                    const SolverConfig& config, uint64_t seed, IlsResult* details) {
    if (method == "constructive") return constructive(inst, exp);
    if (method == "shortest") return shortest_heuristic(inst, exp);
    if (method == "average") return average_heuristic(inst, exp);
    if (method == "lbr") return rounding_heuristic(inst, exp);
    if (method == "ils") {
        IlsResult r = ils(inst, exp, config, seed);
        if (details) *details = r;
        return details ? details->best : r.best;
    }
    throw std::invalid_argument("unknown method '" + method + "'");
}

BenchmarkReport run_benchmark(const Instance& inst, const Expanded& exp,
                              const std::vector<std::string>& methods,
                              const std::vector<uint64_t>& seeds, const SolverConfig& config,
                              bool with_full_bound) {
    BenchmarkReport report;
    report.instance = inst.name;

    BoundCertificate best = mixed_giant_bound(inst, exp);
    report.bound_kind = to_string(best.kind);
    BoundCertificate lin = linear_bound(inst, exp);
    if (lin.value > best.value) {
        best = lin;
        report.bound_kind = to_string(lin.kind);
    }
    if (with_full_bound) {
        BoundCertificate full = full_giant_bound(inst, exp, config.milp_seconds,
                                                 config.milp_node_budget, config.variable_budget);
        if (full.value > best.value) {
            best = full;
            report.bound_kind = to_string(full.kind);
        }
    }
    report.bound = best.value;

    for (const auto& method : methods) {
        for (uint64_t seed : seeds) {
            auto t0 = std::chrono::steady_clock::now();
            Solution sol = run_method(method, inst, exp, config, seed);
            BenchmarkRow row;
            row.method = method;
            row.seed = seed;
            row.cost = sol.total_cost();
            row.bound = report.bound;
            row.gap = report.bound > 0 ? (row.cost - report.bound) / report.bound : 0.0;
            row.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            row.valid = validate_solution(sol, exp.tt).empty();
            report.rows.push_back(row);
        }
    }
    return report;
}

std::string format_report(const BenchmarkReport& report) {
    std::ostringstream os;
    os << "instance " << report.instance << "  bound(" << report.bound_kind
       << ") = " << report.bound << "\n";
    os << "method        seed       cost        gap%   time(s)  valid\n";
    for (const auto& r : report.rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-12s %6llu %12.2f %8.2f %8.2f  %s\n", r.method.c_str(),
                      static_cast<unsigned long long>(r.seed), r.cost, 100.0 * r.gap,
                      r.wall_seconds, r.valid ? "yes" : "NO");
        os << buf;
    }
    return os.str();
}

}  // namespace stpp
