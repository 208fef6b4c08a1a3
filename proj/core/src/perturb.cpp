#include "stpp/perturb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <set>

#include "stpp/errors.hpp"

namespace stpp {

const char* to_string(SubproblemFamily f) {
    switch (f) {
        case SubproblemFamily::SinglePlant: return "single_plant";
        case SubproblemFamily::SingleSupplier: return "single_supplier";
        case SubproblemFamily::Random: return "random";
        case SubproblemFamily::Attract: return "attract";
        case SubproblemFamily::Reduce: return "reduce";
        case SubproblemFamily::Directs: return "directs";
    }
    return "?";
}

bool is_flow_family(SubproblemFamily f) {
    return f == SubproblemFamily::SinglePlant || f == SubproblemFamily::SingleSupplier ||
           f == SubproblemFamily::Random;
}

double slope_scale(const Solution& sol, const TimedArcKey& key) {
    const Arc& a = sol.instance().network.arcs[key.arc];
    const BinManifest* m = sol.manifest(key);
    if (!m || m->bins.empty()) return a.bin_cost;
    long long denom = bp_lower_bound_volume(m->total_volume(), a.bin_capacity);
    if (denom <= 0) return a.bin_cost;
    return a.bin_cost * static_cast<double>(m->bin_count()) / static_cast<double>(denom);
}

namespace {

// Rough count of the spec's variable blocks for the budget guard:
// x arcs per bundle + projected flows + giant bins + overloads.
long long flow_variable_estimate(const Instance& inst, const Expanded& exp,
                                 const std::vector<int>& bundles) {
    long long n = 0;
    for (int b : bundles) {
        long long arcs = static_cast<long long>(exp.sub[b].arcs.size());
        n += arcs * (1 + static_cast<long long>(inst.bundles[b].orders.size()));
    }
    return n;
}

void add_choice(PerturbationMilp& model, const Solution& sol, const Expanded& exp, int bundle,
                const std::vector<int>& tt_arcs, bool scale_costs) {
    const Instance& inst = sol.instance();
    PerturbationMilp::Choice ch;
    ch.tt_arcs = tt_arcs;
    ch.commodity_cost = path_commodity_cost(inst, exp.tt, tt_arcs, bundle);
    std::map<int, double> arc_load;   // entry -> volume
    std::map<int, double> plat_load;  // entry -> volume
    for (int ai : tt_arcs) {
        const auto& arc = exp.tt.arcs[ai];
        if (arc.static_arc < 0) continue;
        const Arc& sa = inst.network.arcs[arc.static_arc];
        for (int o : inst.bundles[bundle].orders) {
            TimedArcKey key{arc.static_arc, project_step(inst, exp.tt.nodes[arc.tail].step, o)};
            double vol = inst.orders[o].volume;
            if (!sa.outsourced) {
                double cost = scale_costs ? slope_scale(sol, key) : sa.bin_cost;
                int e = model.arc_entry(key, sa.bin_capacity, cost);
                arc_load[e] += vol;
            }
            if (inst.network.locations[sa.head].kind == LocationKind::Platform) {
                const auto& p = *inst.network.locations[sa.head].platform;
                NodeWeekKey nk{sa.head, projected_head_week(inst, key)};
                int e = model.platform_entry(nk, p.capacity, p.overload_cost);
                plat_load[e] += vol;
            }
        }
    }
    for (const auto& [e, v] : arc_load) {
        ch.arc_idx.push_back(e);
        ch.arc_volume.push_back(v);
    }
    for (const auto& [e, v] : plat_load) {
        ch.plat_idx.push_back(e);
        ch.plat_volume.push_back(v);
    }
    model.choices.back().push_back(std::move(ch));
}

// Fixed contributions from every routed bundle outside B-bar.
void add_fixed_context(PerturbationMilp& model, const Solution& sol, const Expanded& exp) {
    const Instance& inst = sol.instance();
    std::set<int> inside(model.bundles.begin(), model.bundles.end());
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        int bi = static_cast<int>(b);
        if (inside.count(bi) || !sol.has_path(bi)) continue;
        const auto& st = sol.path(bi);
        for (size_t oi = 0; oi < inst.bundles[b].orders.size(); ++oi) {
            int o = inst.bundles[b].orders[oi];
            const auto& proj = st.projections[oi];
            for (const auto& key : proj.arcs) {
                auto it = model.arc_lookup.find(key);
                if (it != model.arc_lookup.end())
                    model.arcs[it->second].fixed_volume += inst.orders[o].volume;
            }
            for (const auto& nk : proj.platform_heads) {
                auto it = model.plat_lookup.find(nk);
                if (it != model.plat_lookup.end())
                    model.platforms[it->second].fixed_inbound += inst.orders[o].volume;
            }
        }
    }
}

long long model_variable_count(const PerturbationMilp& model) {
    long long n = static_cast<long long>(model.arcs.size() + model.platforms.size());
    for (const auto& c : model.choices) n += static_cast<long long>(c.size());
    return n;
}

}  // namespace

PerturbationMilp build_flow_milp(const Solution& sol, const Expanded& exp,
                                 const std::vector<int>& bundles, long long variable_budget,
                                 bool scale_costs) {
    const Instance& inst = sol.instance();
    if (bundles.empty()) throw std::invalid_argument("empty bundle subset");
    long long estimate = flow_variable_estimate(inst, exp, bundles);
    if (estimate > variable_budget)
        throw BudgetExceededError("flow model estimate " + std::to_string(estimate) +
                                  " exceeds variable budget " + std::to_string(variable_budget));

    PerturbationMilp model;
    model.kind = MilpKind::FlowBased;
    model.bundles = bundles;
    std::sort(model.bundles.begin(), model.bundles.end());
    const size_t max_paths_per_bundle = 4000;
    for (int b : model.bundles) {
        auto en = enumerate_paths(exp.tt, inst, exp.sub[b], max_paths_per_bundle);
        if (en.truncated)
            throw BudgetExceededError("path enumeration for bundle " + std::to_string(b) +
                                      " exceeds " + std::to_string(max_paths_per_bundle));
        model.choices.emplace_back();
        for (const auto& path : en.paths) add_choice(model, sol, exp, b, path, scale_costs);
    }
    add_fixed_context(model, sol, exp);
    model.variable_count = std::max(estimate, model_variable_count(model));
    if (model.variable_count > variable_budget)
        throw BudgetExceededError("flow model has " + std::to_string(model.variable_count) +
                                  " variables, budget " + std::to_string(variable_budget));
    return model;
}

PerturbationMilp build_path_milp(const Solution& sol, const Expanded& exp,
                                 const std::vector<int>& bundles,
                                 const std::vector<std::vector<std::vector<int>>>& paths,
                                 bool scale_costs) {
    const Instance& inst = sol.instance();
    (void)inst;
    PerturbationMilp model;
    model.kind = MilpKind::PathBased;
    model.bundles = bundles;
    for (size_t i = 0; i < bundles.size(); ++i) {
        if (paths[i].empty())
            throw PathEnumerationError("no candidate paths for bundle " +
                                       std::to_string(bundles[i]));
        if (sol.has_path(bundles[i])) {
            const auto& cur = sol.path(bundles[i]).tt_arcs;
            bool found = false;
            for (const auto& p : paths[i]) found |= p == cur;
            if (!found)
                throw PathEnumerationError("candidate set for bundle " +
                                           std::to_string(bundles[i]) +
                                           " is missing the current path");
        }
        model.choices.emplace_back();
        for (const auto& p : paths[i]) add_choice(model, sol, exp, bundles[i], p, scale_costs);
    }
    add_fixed_context(model, sol, exp);
    model.variable_count = model_variable_count(model);
    return model;
}

std::vector<std::vector<int>> candidate_paths(const Solution& sol, const Expanded& exp, int bundle,
                                              int k, int via_static_arc, int avoid_static_arc) {
    const Instance& inst = sol.instance();
    const auto& sg = exp.sub[bundle];

    // Frozen liquid weights.
    std::vector<double> w(exp.tt.arcs.size(), kInf);
    for (int ai : sg.arcs) {
        const auto& a = exp.tt.arcs[ai];
        if (a.static_arc < 0) {
            w[ai] = 0;
            continue;
        }
        if (a.static_arc == avoid_static_arc) continue;  // stays kInf
        double c = 0;
        for (int o : inst.bundles[bundle].orders)
            c += liquid_order_arc_cost(inst, a.static_arc, o);
        w[ai] = c;
    }

    std::vector<std::vector<int>> out;
    if (sol.has_path(bundle)) out.push_back(sol.path(bundle).tt_arcs);
    for (auto& p : k_shortest_paths(exp.tt, sg, w, k)) out.push_back(std::move(p));

    if (via_static_arc >= 0) {
        // Cheapest liquid path through the target arc: forward/backward
        // distances glued at each timed copy.
        std::vector<double> df(exp.tt.nodes.size(), kInf), db(exp.tt.nodes.size(), kInf);
        std::vector<int> pf(exp.tt.nodes.size(), -1), pb(exp.tt.nodes.size(), -1);
        auto run = [&](bool forward) {
            auto& dist = forward ? df : db;
            auto& par = forward ? pf : pb;
            using E = std::pair<double, int>;
            std::priority_queue<E, std::vector<E>, std::greater<E>> pq;
            int s = forward ? sg.source : sg.sink;
            dist[s] = 0;
            pq.push({0, s});
            while (!pq.empty()) {
                auto [d, v] = pq.top();
                pq.pop();
                if (d > dist[v]) continue;
                const auto& adj = forward ? exp.tt.out[v] : exp.tt.in[v];
                for (int ai : adj) {
                    if (!sg.arc_kept[ai] || w[ai] >= kInf) continue;
                    int nxt = forward ? exp.tt.arcs[ai].head : exp.tt.arcs[ai].tail;
                    if (d + w[ai] < dist[nxt]) {
                        dist[nxt] = d + w[ai];
                        par[nxt] = ai;
                        pq.push({dist[nxt], nxt});
                    }
                }
            }
        };
        run(true);
        run(false);
        double best = kInf;
        int best_arc = -1;
        for (int ai : sg.arcs) {
            if (exp.tt.arcs[ai].static_arc != via_static_arc || w[ai] >= kInf) continue;
            double c = df[exp.tt.arcs[ai].tail] + w[ai] + db[exp.tt.arcs[ai].head];
            if (c < best) {
                best = c;
                best_arc = ai;
            }
        }
        if (best_arc >= 0) {
            std::vector<int> arcs;
            for (int v = exp.tt.arcs[best_arc].tail; v != sg.source; v = exp.tt.arcs[pf[v]].tail)
                arcs.push_back(pf[v]);
            std::reverse(arcs.begin(), arcs.end());
            arcs.push_back(best_arc);
            for (int v = exp.tt.arcs[best_arc].head; v != sg.sink; v = exp.tt.arcs[pb[v]].head)
                arcs.push_back(pb[v]);
            if (is_elementary(exp.tt, inst, arcs)) out.push_back(std::move(arcs));
        }
    }

    // Dedupe, first occurrence wins (current path stays first).
    std::vector<std::vector<int>> unique;
    for (auto& p : out) {
        bool dup = false;
        for (const auto& q : unique) dup |= q == p;
        if (!dup) unique.push_back(std::move(p));
    }
    return unique;
}

namespace {

std::vector<int> bundles_using_static_arc(const Solution& sol, const TravelTimeGraph& tt,
                                          int static_arc, bool users) {
    const Instance& inst = sol.instance();
    std::vector<int> out;
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        if (!sol.has_path(static_cast<int>(b))) continue;
        bool uses = false;
        for (int ai : sol.path(static_cast<int>(b)).tt_arcs)
            uses |= tt.arcs[ai].static_arc == static_arc;
        if (uses == users) out.push_back(static_cast<int>(b));
    }
    return out;
}

bool subgraph_has_static_arc(const Expanded& exp, int bundle, int static_arc) {
    for (int ai : exp.sub[bundle].arcs)
        if (exp.tt.arcs[ai].static_arc == static_arc) return true;
    return false;
}

}  // namespace

Subproblem select_subproblem(SubproblemFamily family, const Solution& sol, const Expanded& exp,
                             Rng& rng, const SolverConfig& config) {
    const Instance& inst = sol.instance();
    Subproblem out;
    out.family = family;

    std::vector<int> routed;
    for (size_t b = 0; b < inst.bundles.size(); ++b)
        if (sol.has_path(static_cast<int>(b))) routed.push_back(static_cast<int>(b));
    if (routed.empty()) return out;

    switch (family) {
        case SubproblemFamily::SinglePlant:
        case SubproblemFamily::SingleSupplier: {
            const bool by_plant = family == SubproblemFamily::SinglePlant;
            std::vector<int> keys;
            for (size_t l = 0; l < inst.network.locations.size(); ++l) {
                auto kind = inst.network.locations[l].kind;
                if (by_plant ? kind == LocationKind::ProductionUnit
                             : kind == LocationKind::Supplier)
                    keys.push_back(static_cast<int>(l));
            }
            if (keys.empty()) return out;
            size_t start = rng.below(keys.size());
            std::set<int> chosen;
            for (size_t i = 0; i < keys.size(); ++i) {
                int key = keys[(start + i) % keys.size()];
                std::vector<int> cand;
                for (int b : routed) {
                    int end = by_plant ? inst.bundles[b].unit : inst.bundles[b].supplier;
                    if (end == key && !chosen.count(b)) cand.push_back(b);
                }
                if (cand.empty()) continue;
                std::vector<int> next(out.bundles);
                next.insert(next.end(), cand.begin(), cand.end());
                if (!out.bundles.empty() &&
                    flow_variable_estimate(inst, exp, next) > config.variable_budget)
                    break;  // stacking stops at the budget
                out.bundles = std::move(next);
                for (int b : cand) chosen.insert(b);
            }
            break;
        }
        case SubproblemFamily::Random: {
            std::vector<int> pool = routed;
            rng.shuffle(pool);
            size_t n = std::min<size_t>(static_cast<size_t>(config.random_subset_size),
                                        pool.size());
            out.bundles.assign(pool.begin(), pool.begin() + n);
            break;
        }
        case SubproblemFamily::Attract:
        case SubproblemFamily::Reduce: {
            const bool attract = family == SubproblemFamily::Attract;
            // Candidates per target arc: bundles that could switch onto it
            // (Attract) or already sit on it (Reduce). Arcs ranked by share.
            std::map<int, std::vector<int>> candidates;  // static arc -> bundles
            for (size_t a = 0; a < inst.network.arcs.size(); ++a) {
                auto kind = inst.network.arcs[a].kind;
                if (kind != ArcKind::InterPlatform && kind != ArcKind::Delivery) continue;
                auto users = bundles_using_static_arc(sol, exp.tt, static_cast<int>(a), true);
                std::vector<int> cand;
                if (attract) {
                    for (int b : routed) {
                        bool uses = std::binary_search(users.begin(), users.end(), b);
                        if (!uses && subgraph_has_static_arc(exp, b, static_cast<int>(a)))
                            cand.push_back(b);
                    }
                } else {
                    cand = std::move(users);
                }
                if (!cand.empty()) candidates[static_cast<int>(a)] = std::move(cand);
            }
            std::vector<std::pair<long long, int>> ranked;  // (-count, arc)
            for (const auto& [arc, cand] : candidates)
                ranked.push_back({-static_cast<long long>(cand.size()), arc});
            std::sort(ranked.begin(), ranked.end());
            std::set<int> chosen;
            const size_t want = static_cast<size_t>(
                std::ceil(config.path_family_coverage * static_cast<double>(routed.size())));
            for (const auto& [neg, arc] : ranked) {
                out.target_arcs.push_back(arc);
                for (int b : candidates[arc]) chosen.insert(b);
                if (chosen.size() >= want) break;
            }
            out.bundles.assign(chosen.begin(), chosen.end());
            break;
        }
        case SubproblemFamily::Directs: {
            for (int b : routed) {
                for (int ai : sol.path(b).tt_arcs) {
                    int sa = exp.tt.arcs[ai].static_arc;
                    if (sa >= 0 && inst.network.arcs[sa].kind == ArcKind::Direct) {
                        out.bundles.push_back(b);
                        break;
                    }
                }
            }
            break;
        }
    }
    std::sort(out.bundles.begin(), out.bundles.end());
    return out;
}

namespace {

// Applies a MILP result: reroute every bundle whose chosen path differs,
// with real packing. Returns the number of changed paths; rolls back and
// returns -1 when the true cost exceeds the tolerance.
int apply_assignment(Solution& sol, const Expanded& exp, const PerturbationMilp& model,
                     const std::vector<int>& choice, double tolerance) {
    const Instance& inst = sol.instance();
    std::vector<std::pair<int, const std::vector<int>*>> changes;
    for (size_t i = 0; i < model.bundles.size(); ++i) {
        int b = model.bundles[i];
        const auto& path = model.choices[i][choice[i]].tt_arcs;
        if (!sol.has_path(b) || sol.path(b).tt_arcs != path) changes.push_back({b, &path});
    }
    if (changes.empty()) return 0;

    // Largest packaging first, like every other sequential commit.
    std::stable_sort(changes.begin(), changes.end(), [&](const auto& x, const auto& y) {
        if (inst.bundles[x.first].size_key != inst.bundles[y.first].size_key)
            return inst.bundles[x.first].size_key > inst.bundles[y.first].size_key;
        return x.first < y.first;
    });

    const double before = sol.total_cost();
    sol.begin_txn();
    for (auto& [b, path] : changes)
        if (sol.has_path(b)) remove_bundle(sol, b);
    for (auto& [b, path] : changes) commit_bundle_on_path(sol, exp.tt, b, *path);
    if (sol.total_cost() > before * (1.0 + tolerance) + 1e-9) {
        sol.rollback_txn();
        return -1;
    }
    sol.commit_txn();
    return static_cast<int>(changes.size());
}

}  // namespace

PerturbStats perturb(Solution& sol, const Expanded& exp, Rng& rng, const SolverConfig& config) {
    const Instance& inst = sol.instance();
    PerturbStats stats;
    const double entry_cost = sol.total_cost();
    const int routed = sol.routed_bundles();
    if (routed == 0) return stats;

    std::vector<std::vector<int>> entry_paths(inst.bundles.size());
    for (size_t b = 0; b < inst.bundles.size(); ++b)
        if (sol.has_path(static_cast<int>(b))) entry_paths[b] = sol.path(static_cast<int>(b)).tt_arcs;

    auto changed_fraction = [&] {
        int changed = 0;
        for (size_t b = 0; b < inst.bundles.size(); ++b) {
            if (!sol.has_path(static_cast<int>(b))) continue;
            if (sol.path(static_cast<int>(b)).tt_arcs != entry_paths[b]) ++changed;
        }
        stats.paths_changed = changed;
        return static_cast<double>(changed) / static_cast<double>(routed);
    };

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    // Strict flow/path alternation; Directs is reserved for the final round.
    const SubproblemFamily flow_rotation[] = {SubproblemFamily::SinglePlant,
                                              SubproblemFamily::SingleSupplier,
                                              SubproblemFamily::Random};
    const SubproblemFamily path_rotation[] = {SubproblemFamily::Attract, SubproblemFamily::Reduce};
    int flow_at = 0, path_at = 0;

    auto run_round = [&](SubproblemFamily family) {
        ++stats.rounds_attempted;
        Subproblem sp = select_subproblem(family, sol, exp, rng, config);
        if (sp.bundles.empty()) return;
        try {
            PerturbationMilp model;
            if (is_flow_family(family)) {
                // Shrink on budget overflow, halving the subset.
                std::vector<int> subset = sp.bundles;
                for (int attempt = 0;; ++attempt) {
                    try {
                        model = build_flow_milp(sol, exp, subset, config.variable_budget);
                        break;
                    } catch (const BudgetExceededError&) {
                        if (attempt >= 4 || subset.size() <= 1) throw;
                        subset.resize(std::max<size_t>(1, subset.size() / 2));
                    }
                }
            } else {
                std::vector<std::vector<std::vector<int>>> paths;
                paths.reserve(sp.bundles.size());
                for (int b : sp.bundles) {
                    int via = -1, avoid = -1;
                    if (family == SubproblemFamily::Attract && !sp.target_arcs.empty())
                        via = sp.target_arcs.front();
                    if (family == SubproblemFamily::Reduce && !sp.target_arcs.empty())
                        avoid = sp.target_arcs.front();
                    paths.push_back(
                        candidate_paths(sol, exp, b, config.paths_per_bundle, via, avoid));
                }
                model = build_path_milp(sol, exp, sp.bundles, paths);
            }
            MilpParams mp;
            mp.time_limit_seconds = config.milp_seconds;
            mp.node_budget = config.milp_node_budget;
            MilpResult mr = solve_milp(model, mp);
            if (mr.status == MilpResult::Status::NoIncumbent) return;
            int changed = apply_assignment(sol, exp, model, mr.choice, config.cost_tolerance);
            if (changed >= 0) {
                ++stats.rounds_applied;
                stats.trace.push_back({std::string("perturb:") + to_string(family),
                                       sol.total_cost() - entry_cost - stats.cost_delta,
                                       elapsed()});
                stats.cost_delta = sol.total_cost() - entry_cost;
            }
        } catch (const BudgetExceededError&) {
            // Family skipped this round.
        } catch (const PathEnumerationError&) {
        }
    };

    for (int round = 0; round < config.perturb_rounds; ++round) {
        SubproblemFamily family = (round % 2 == 0)
                                      ? flow_rotation[(flow_at++) % 3]
                                      : path_rotation[(path_at++) % 2];
        run_round(family);
        if (changed_fraction() >= config.path_change_fraction) break;
        if (sol.total_cost() > entry_cost * (1.0 + config.loop_abort)) break;
    }
    run_round(SubproblemFamily::Directs);  // the last perturbation before local search
    changed_fraction();
    stats.cost_delta = sol.total_cost() - entry_cost;
    return stats;
}

IlsResult ils(const Instance& inst, const Expanded& exp, const SolverConfig& config,
              uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    auto out_of_time = [&] {
        return config.total_seconds > 0 && elapsed() >= config.total_seconds;
    };

    Solution sol = constructive(inst, exp);

    IlsResult res{sol};
    res.constructive_cost = sol.total_cost();
    res.trace.push_back({"constructive", sol.total_cost(), elapsed()});

    LocalSearchParams ls;
    ls.time_limit_seconds = config.local_search_seconds;
    ls.move_budget = config.ls_move_budget;
    ls.weights = config.neighborhood_weights;

    {
        Rng rng(derive_seed(seed, "ls", 0));
        auto r = local_search(sol, exp, ls, rng);
        res.ls_moves += r.moves_accepted;
        for (auto& row : r.trace) res.trace.push_back(row);
    }
    res.best = sol;

    for (int round = 1; round <= config.ils_rounds && !out_of_time(); ++round) {
        Rng prng(derive_seed(seed, "perturb", static_cast<uint64_t>(round)));
        auto ps = perturb(sol, exp, prng, config);
        res.perturbations_applied += ps.rounds_applied;
        for (auto& row : ps.trace) res.trace.push_back(row);

        Rng lrng(derive_seed(seed, "ls", static_cast<uint64_t>(round)));
        auto r = local_search(sol, exp, ls, lrng);
        res.ls_moves += r.moves_accepted;
        for (auto& row : r.trace) res.trace.push_back(row);

        if (sol.total_cost() < res.best.total_cost() - 1e-9) res.best = sol;
    }
    res.trace.push_back({"best", res.best.total_cost(), elapsed()});
    return res;
}

}  // namespace stpp
