#include "stpp/milp.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <set>

#include "stpp/errors.hpp"
#include "stpp/insertion.hpp"
#include "stpp/packing.hpp"

namespace stpp {

int PerturbationMilp::arc_entry(const TimedArcKey& key, double capacity, double scaled_cost) {
    auto it = arc_lookup.find(key);
    if (it != arc_lookup.end()) return it->second;
    int idx = static_cast<int>(arcs.size());
    arcs.push_back({key, capacity, 0.0, scaled_cost});
    arc_lookup[key] = idx;
    return idx;
}

int PerturbationMilp::platform_entry(const NodeWeekKey& key, double capacity,
                                     double overload_cost) {
    auto it = plat_lookup.find(key);
    if (it != plat_lookup.end()) return it->second;
    int idx = static_cast<int>(platforms.size());
    platforms.push_back({key, capacity, 0.0, overload_cost});
    plat_lookup[key] = idx;
    return idx;
}

double PerturbationMilp::assignment_value(const std::vector<int>& choice_of) const {
    double value = 0;
    std::vector<double> load(arcs.size(), 0.0), inb(platforms.size(), 0.0);
    for (size_t b = 0; b < bundles.size(); ++b) {
        const Choice& ch = choices[b][choice_of[b]];
        value += ch.commodity_cost;
        for (size_t i = 0; i < ch.arc_idx.size(); ++i) load[ch.arc_idx[i]] += ch.arc_volume[i];
        for (size_t i = 0; i < ch.plat_idx.size(); ++i) inb[ch.plat_idx[i]] += ch.plat_volume[i];
    }
    for (size_t a = 0; a < arcs.size(); ++a) {
        double total = arcs[a].fixed_volume + load[a];
        value += arcs[a].scaled_cost *
                 static_cast<double>(bp_lower_bound_volume(total, arcs[a].capacity));
    }
    for (size_t p = 0; p < platforms.size(); ++p) {
        double total = platforms[p].fixed_inbound + inb[p];
        value += platforms[p].overload_cost * std::max(0.0, total - platforms[p].capacity);
    }
    return value;
}

LinearProgram build_lp_model(const PerturbationMilp& model, bool relax_integrality,
                             bool include_overloads) {
    LinearProgram lp;
    lp.name = model.kind == MilpKind::FlowBased ? "flow_reopt" : "path_reopt";

    std::vector<std::vector<int>> xcol(model.bundles.size());
    for (size_t b = 0; b < model.bundles.size(); ++b) {
        for (size_t j = 0; j < model.choices[b].size(); ++j) {
            std::string name = "x_b" + std::to_string(model.bundles[b]) + "_k" + std::to_string(j);
            xcol[b].push_back(
                lp.add_col(name, model.choices[b][j].commodity_cost, relax_integrality ? 'c' : 'b'));
        }
    }
    std::vector<int> tcol(model.arcs.size());
    for (size_t a = 0; a < model.arcs.size(); ++a) {
        const auto& e = model.arcs[a];
        std::string name = "tau_a" + std::to_string(e.key.arc) + "_w" + std::to_string(e.key.week);
        tcol[a] = lp.add_col(name, e.scaled_cost, relax_integrality ? 'c' : 'i');
    }
    std::vector<int> zcol(model.platforms.size(), -1);
    if (include_overloads) {
        for (size_t p = 0; p < model.platforms.size(); ++p) {
            const auto& e = model.platforms[p];
            std::string name =
                "z_p" + std::to_string(e.key.loc) + "_w" + std::to_string(e.key.week);
            zcol[p] = lp.add_col(name, e.overload_cost, 'c');
        }
    }

    for (size_t b = 0; b < model.bundles.size(); ++b) {
        std::vector<std::pair<int, double>> coef;
        for (int c : xcol[b]) coef.push_back({c, 1.0});
        lp.add_row("conv_b" + std::to_string(model.bundles[b]), std::move(coef), 'E', 1.0);
    }
    // fixed + sum(vol x) <= L tau
    std::vector<std::vector<std::pair<int, double>>> cap_coef(model.arcs.size());
    std::vector<std::vector<std::pair<int, double>>> over_coef(model.platforms.size());
    for (size_t b = 0; b < model.bundles.size(); ++b) {
        for (size_t j = 0; j < model.choices[b].size(); ++j) {
            const auto& ch = model.choices[b][j];
            for (size_t i = 0; i < ch.arc_idx.size(); ++i)
                cap_coef[ch.arc_idx[i]].push_back({xcol[b][j], ch.arc_volume[i]});
            for (size_t i = 0; i < ch.plat_idx.size(); ++i)
                over_coef[ch.plat_idx[i]].push_back({xcol[b][j], ch.plat_volume[i]});
        }
    }
    for (size_t a = 0; a < model.arcs.size(); ++a) {
        auto coef = cap_coef[a];
        coef.push_back({tcol[a], -model.arcs[a].capacity});
        lp.add_row("cap_a" + std::to_string(model.arcs[a].key.arc) + "_w" +
                       std::to_string(model.arcs[a].key.week),
                   std::move(coef), 'L', -model.arcs[a].fixed_volume);
    }
    if (include_overloads) {
        for (size_t p = 0; p < model.platforms.size(); ++p) {
            auto coef = over_coef[p];
            coef.push_back({zcol[p], -1.0});
            lp.add_row("over_p" + std::to_string(model.platforms[p].key.loc) + "_w" +
                           std::to_string(model.platforms[p].key.week),
                       std::move(coef), 'L',
                       model.platforms[p].capacity - model.platforms[p].fixed_inbound);
        }
    }
    return lp;
}

double lp_relaxation_value(const PerturbationMilp& model, bool include_overloads) {
    LinearProgram lp = build_lp_model(model, /*relax_integrality=*/true, include_overloads);
    LpResult r = solve_lp(lp);
    if (r.status != LpResult::Status::Optimal)
        throw std::runtime_error("LP relaxation did not solve to optimality");
    return r.value;
}

std::vector<int> choices_from_lp_solution(const PerturbationMilp& model,
                                          const std::map<std::string, double>& values) {
    std::vector<int> out(model.bundles.size(), 0);
    for (size_t b = 0; b < model.bundles.size(); ++b) {
        double best = -1;
        for (size_t j = 0; j < model.choices[b].size(); ++j) {
            auto it = values.find("x_b" + std::to_string(model.bundles[b]) + "_k" +
                                  std::to_string(j));
            double v = it == values.end() ? 0.0 : it->second;
            if (v > best) {
                best = v;
                out[b] = static_cast<int>(j);
            }
        }
    }
    return out;
}

namespace {

// Shared bounding machinery. The linear giant term (c/L per m3) is folded
// into each choice; only platform overloads couple bundles, handled either
// by an LP (path models) or by Lagrangian multipliers (flow models).
struct Bounder {
    const PerturbationMilp& model;
    std::vector<std::vector<double>> folded_cost;  // commodity + linear giant, per choice
    std::vector<double> mu;                        // platform multipliers (flow models)
    double fixed_linear = 0;                       // linear giant cost of fixed volume

    explicit Bounder(const PerturbationMilp& m) : model(m) {
        folded_cost.resize(m.choices.size());
        for (size_t b = 0; b < m.choices.size(); ++b) {
            folded_cost[b].reserve(m.choices[b].size());
            for (const auto& ch : m.choices[b]) {
                double c = ch.commodity_cost;
                for (size_t i = 0; i < ch.arc_idx.size(); ++i) {
                    const auto& e = m.arcs[ch.arc_idx[i]];
                    c += e.scaled_cost / e.capacity * ch.arc_volume[i];
                }
                folded_cost[b].push_back(c);
            }
        }
        for (const auto& e : m.arcs)
            fixed_linear += e.scaled_cost / e.capacity * e.fixed_volume;
        mu.assign(m.platforms.size(), 0.0);
    }

    // Lagrangian value for a partial assignment (choice_of[b] < 0 == free).
    // Pricing per free bundle = shortest path over its choice set under the
    // folded weights plus platform multipliers.
    double lagrangian(const std::vector<int>& choice_of, std::vector<int>* minimizer = nullptr) const {
        double value = fixed_linear;
        std::vector<double> fixed_inb(model.platforms.size(), 0.0);
        for (size_t p = 0; p < model.platforms.size(); ++p)
            fixed_inb[p] = model.platforms[p].fixed_inbound;
        for (size_t b = 0; b < model.bundles.size(); ++b) {
            if (choice_of[b] < 0) continue;
            const auto& ch = model.choices[b][choice_of[b]];
            value += folded_cost[b][choice_of[b]];
            for (size_t i = 0; i < ch.plat_idx.size(); ++i)
                fixed_inb[ch.plat_idx[i]] += ch.plat_volume[i];
        }
        for (size_t p = 0; p < model.platforms.size(); ++p)
            value += mu[p] * (fixed_inb[p] - model.platforms[p].capacity);
        for (size_t b = 0; b < model.bundles.size(); ++b) {
            if (choice_of[b] >= 0) continue;
            double best = kInf;
            int best_j = 0;
            for (size_t j = 0; j < model.choices[b].size(); ++j) {
                double c = folded_cost[b][j];
                const auto& ch = model.choices[b][j];
                for (size_t i = 0; i < ch.plat_idx.size(); ++i)
                    c += mu[ch.plat_idx[i]] * ch.plat_volume[i];
                if (c < best) {
                    best = c;
                    best_j = static_cast<int>(j);
                }
            }
            value += best;
            if (minimizer) (*minimizer)[b] = best_j;
        }
        return value;
    }

    // Fits mu by projected subgradient ascent at the root. Any iterate is a
    // valid bound; the best one is kept.
    void fit_multipliers() {
        if (model.platforms.empty()) return;
        std::vector<int> free_all(model.bundles.size(), -1);
        std::vector<int> mins(model.bundles.size(), 0);
        double best_dual = lagrangian(free_all, &mins);
        std::vector<double> best_mu = mu;
        // Upper estimate from the pricing minimizers.
        double ub = model.assignment_value(mins);
        double theta = 1.0;
        for (int it = 0; it < 40; ++it) {
            double dual = lagrangian(free_all, &mins);
            if (dual > best_dual + 1e-12) {
                best_dual = dual;
                best_mu = mu;
            } else {
                theta *= 0.8;
            }
            ub = std::min(ub, model.assignment_value(mins));
            // Subgradient of the relaxed overload rows at the minimizer.
            std::vector<double> g(model.platforms.size(), 0.0);
            double norm2 = 0;
            for (size_t p = 0; p < model.platforms.size(); ++p)
                g[p] = model.platforms[p].fixed_inbound - model.platforms[p].capacity;
            for (size_t b = 0; b < model.bundles.size(); ++b) {
                const auto& ch = model.choices[b][mins[b]];
                for (size_t i = 0; i < ch.plat_idx.size(); ++i)
                    g[ch.plat_idx[i]] += ch.plat_volume[i];
            }
            for (double v : g) norm2 += v * v;
            if (norm2 < 1e-18) break;
            double step = theta * std::max(1e-9, ub - dual) / norm2;
            for (size_t p = 0; p < model.platforms.size(); ++p)
                mu[p] = std::clamp(mu[p] + step * g[p], 0.0, model.platforms[p].overload_cost);
        }
        mu = best_mu;
    }

    // LP bound for path models: free bundles with folded costs + z columns.
    double lp_bound(const std::vector<int>& choice_of) const {
        LinearProgram lp;
        double constant = fixed_linear;
        std::vector<double> fixed_inb(model.platforms.size(), 0.0);
        for (size_t p = 0; p < model.platforms.size(); ++p)
            fixed_inb[p] = model.platforms[p].fixed_inbound;

        std::vector<std::vector<std::pair<int, double>>> over_coef(model.platforms.size());
        std::vector<std::vector<int>> xcol(model.bundles.size());
        for (size_t b = 0; b < model.bundles.size(); ++b) {
            if (choice_of[b] >= 0) {
                constant += folded_cost[b][choice_of[b]];
                const auto& ch = model.choices[b][choice_of[b]];
                for (size_t i = 0; i < ch.plat_idx.size(); ++i)
                    fixed_inb[ch.plat_idx[i]] += ch.plat_volume[i];
                continue;
            }
            for (size_t j = 0; j < model.choices[b].size(); ++j) {
                int col = lp.add_col("x", folded_cost[b][j]);
                xcol[b].push_back(col);
                const auto& ch = model.choices[b][j];
                for (size_t i = 0; i < ch.plat_idx.size(); ++i)
                    over_coef[ch.plat_idx[i]].push_back({col, ch.plat_volume[i]});
            }
        }
        for (size_t b = 0; b < model.bundles.size(); ++b) {
            if (choice_of[b] >= 0) continue;
            std::vector<std::pair<int, double>> coef;
            for (int c : xcol[b]) coef.push_back({c, 1.0});
            lp.add_row("conv", std::move(coef), 'E', 1.0);
        }
        for (size_t p = 0; p < model.platforms.size(); ++p) {
            double slack = model.platforms[p].capacity - fixed_inb[p];
            if (over_coef[p].empty()) {
                constant += model.platforms[p].overload_cost * std::max(0.0, -slack);
                continue;
            }
            int z = lp.add_col("z", model.platforms[p].overload_cost);
            auto coef = over_coef[p];
            coef.push_back({z, -1.0});
            lp.add_row("over", std::move(coef), 'L', slack);
        }
        if (lp.n_cols() == 0) return constant;
        LpResult r = solve_lp(lp);
        if (r.status != LpResult::Status::Optimal) return -kInf;  // no usable bound
        return constant + r.value;
    }

    double bound(const std::vector<int>& choice_of) const {
        if (model.kind == MilpKind::PathBased) return lp_bound(choice_of);
        return lagrangian(choice_of);
    }
};

}  // namespace

MilpResult solve_milp(const PerturbationMilp& model, const MilpParams& params) {
    MilpResult res;
    if (model.bundles.empty()) {
        res.status = MilpResult::Status::Optimal;
        res.incumbent_value = model.assignment_value({});
        res.dual_bound = res.incumbent_value;
        return res;
    }
    for (const auto& ch : model.choices)
        if (ch.empty()) throw PathEnumerationError("bundle without any routing choice");

    Bounder bounder(model);
    if (model.kind == MilpKind::FlowBased) bounder.fit_multipliers();

    std::vector<int> root(model.bundles.size(), -1);
    double root_bound = bounder.bound(root);
    res.dual_bound = root_bound;
    if (params.root_only) return res;

    const auto start = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (params.time_limit_seconds <= 0) return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
               params.time_limit_seconds;
    };

    struct Node {
        std::vector<int> assign;
        int depth;
        double bound;
    };
    std::vector<Node> stack;
    std::multiset<double> open;
    stack.push_back({std::move(root), 0, root_bound});
    open.insert(root_bound);

    double incumbent = kInf;
    std::vector<int> best_choice;
    const int n = static_cast<int>(model.bundles.size());
    bool stopped = false;

    while (!stack.empty()) {
        if (res.nodes >= params.node_budget || ((res.nodes & 63) == 0 && out_of_time())) {
            stopped = true;
            break;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        open.erase(open.find(node.bound));
        ++res.nodes;
        if (node.bound >= incumbent - 1e-9) continue;
        if (node.depth == n) {
            double value = model.assignment_value(node.assign);
            if (value < incumbent - 1e-12) {
                incumbent = value;
                best_choice = node.assign;
            }
            continue;
        }
        // Tighten with a fresh bound at expansion time; children inherit it,
        // the inherited value stays a valid lower bound for their subtrees.
        if (node.depth > 0) {
            node.bound = std::max(node.bound, bounder.bound(node.assign));
            if (node.bound >= incumbent - 1e-9) continue;
        }
        // Children in reverse choice order so the lowest index pops first.
        const int b = node.depth;
        for (int j = static_cast<int>(model.choices[b].size()) - 1; j >= 0; --j) {
            node.assign[b] = j;
            Node child{node.assign, node.depth + 1, node.bound};
            stack.push_back(std::move(child));
            open.insert(node.bound);
        }
        node.assign[b] = -1;
    }

    if (best_choice.empty()) {
        res.status = MilpResult::Status::NoIncumbent;
        res.dual_bound = stopped && !open.empty() ? std::min(root_bound, *open.begin()) : root_bound;
        return res;
    }
    res.incumbent_value = incumbent;
    res.choice = std::move(best_choice);
    if (stopped && !open.empty()) {
        res.status = MilpResult::Status::Feasible;
        res.dual_bound = std::min(incumbent, *open.begin());
    } else {
        res.status = MilpResult::Status::Optimal;
        res.dual_bound = incumbent;
    }
    return res;
}

}  // namespace stpp
