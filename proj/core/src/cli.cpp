#include "stpp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <future>
#include <iostream>

#include "stpp/bench.hpp"
#include "stpp/errors.hpp"
#include "stpp/generator.hpp"
#include "stpp/io.hpp"

namespace stpp {

namespace {

using json = nlohmann::ordered_json;

void apply_config_file(SolverConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    json doc = json::parse(in);
    auto get = [&](const char* key, auto& slot) {
        if (doc.contains(key)) slot = doc[key].get<std::decay_t<decltype(slot)>>();
    };
    get("local_search_seconds", config.local_search_seconds);
    get("milp_seconds", config.milp_seconds);
    get("variable_budget", config.variable_budget);
    get("path_change_fraction", config.path_change_fraction);
    get("path_family_coverage", config.path_family_coverage);
    get("cost_tolerance", config.cost_tolerance);
    get("loop_abort", config.loop_abort);
    get("ls_move_budget", config.ls_move_budget);
    get("milp_node_budget", config.milp_node_budget);
    get("ils_rounds", config.ils_rounds);
    get("perturb_rounds", config.perturb_rounds);
    get("paths_per_bundle", config.paths_per_bundle);
    get("random_subset_size", config.random_subset_size);
    get("total_seconds", config.total_seconds);
    get("workers", config.workers);
    if (doc.contains("neighborhood_weights")) {
        auto w = doc["neighborhood_weights"].get<std::vector<double>>();
        for (size_t i = 0; i < std::min<size_t>(3, w.size()); ++i)
            config.neighborhood_weights[i] = w[i];
    }
}

int error_out(const std::string& kind, const std::string& message, int code) {
    json err;
    err["error"] = kind;
    err["message"] = message;
    std::cerr << err.dump() << "\n";
    return code;
}

struct SolveArtifacts {
    Solution sol;
    std::vector<TraceRow> trace;
    std::vector<std::pair<int, double>> profile;
};

SolveArtifacts solve_with_trace(const std::string& method, const Instance& inst,
                                const Expanded& exp, const SolverConfig& config, uint64_t seed) {
    if (method == "ils") {
        IlsResult r = ils(inst, exp, config, seed);
        return {std::move(r.best), std::move(r.trace), {}};
    }
    if (method == "constructive") {
        std::vector<std::pair<int, double>> profile;
        Solution sol = constructive(
            inst, exp, [&](const ProgressEvent& e) { profile.push_back({e.bundles_inserted, e.running_cost}); });
        return {std::move(sol), {}, std::move(profile)};
    }
    return {run_method(method, inst, exp, config, seed), {}, {}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Shipper transportation plan solver: route order bundles through a "
                 "time-expanded hub-and-spoke network with bin-packed consolidation"};
    app.require_subcommand(1);

    SolverConfig config;
    std::string config_path;
    uint64_t seed = 1;
    app.add_option("--config", config_path, "JSON file overriding solver knobs")
        ->configurable(false);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic instance");
    std::string gen_preset = "xs", gen_out = "instance.json";
    GenParams gen_overrides;
    bool has_overrides = false;
    int ov_bundles = -1, ov_suppliers = -1, ov_platforms = -1, ov_units = -1, ov_horizon = -1;
    gen->add_option("--preset", gen_preset, "xs | s | m | tiny | frag")->capture_default_str();
    gen->add_option("--seed", seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output path")->capture_default_str();
    gen->add_option("--bundles", ov_bundles, "override bundle count");
    gen->add_option("--suppliers", ov_suppliers, "override supplier count");
    gen->add_option("--platforms", ov_platforms, "override platform count");
    gen->add_option("--units", ov_units, "override unit count");
    gen->add_option("--horizon", ov_horizon, "override horizon T");

    // validate
    auto* val = app.add_subcommand("validate", "Check an instance file");
    std::string val_path;
    val->add_option("instance", val_path)->required();

    // solve
    auto* solve = app.add_subcommand("solve", "Run a heuristic and write plan/metrics");
    std::string solve_path, solve_method = "ils";
    std::string out_plan, out_metrics, out_trace;
    double time_limit = 0;
    bool with_timings = false, aggregate_overload = false;
    solve->add_option("instance", solve_path)->required();
    solve->add_option("--method", solve_method, "constructive | ils | shortest | average | lbr")
        ->capture_default_str();
    solve->add_option("--seed", seed, "solver seed")->capture_default_str();
    solve->add_option("--time-limit", time_limit,
                      "wall-clock cap in seconds (0 = deterministic budgets only)")
        ->capture_default_str();
    solve->add_option("--out-plan", out_plan, "plan file path");
    solve->add_option("--out-metrics", out_metrics, "metrics file path");
    solve->add_option("--trace", out_trace, "trace CSV path (accepted moves / cost profile)");
    solve->add_flag("--timings", with_timings, "include wall times in metrics (not byte-stable)");
    solve->add_option("--ls-moves", config.ls_move_budget, "local search move budget")
        ->capture_default_str();
    solve->add_option("--ils-rounds", config.ils_rounds, "perturbation rounds")
        ->capture_default_str();
    solve->add_option("--workers", config.workers, "worker threads (0 = hardware)")
        ->capture_default_str();

    // bound
    auto* bound = app.add_subcommand("bound", "Compute a lower bound certificate");
    std::string bound_path, bound_kind = "mixed", bound_metrics;
    double bound_time = 60;
    bound->add_option("instance", bound_path)->required();
    bound->add_option("--kind", bound_kind, "linear | mixed | full")->capture_default_str();
    bound->add_option("--time-limit", bound_time, "full-giant search cap (0 = root bound)")
        ->capture_default_str();
    bound->add_option("--out-metrics", bound_metrics, "metrics file path");
    bound->add_flag("--timings", with_timings, "include wall times in metrics");

    // benchmark
    auto* benchc = app.add_subcommand("benchmark", "Compare methods over seeds");
    std::vector<std::string> bench_paths;
    std::string bench_methods = "constructive,shortest,average,lbr";
    std::string bench_seeds = "1,2,3", bench_report;
    bool bench_full = false;
    benchc->add_option("instances", bench_paths)->required()->expected(-1);
    benchc->add_option("--methods", bench_methods, "comma-separated methods")
        ->capture_default_str();
    benchc->add_option("--seeds", bench_seeds, "comma-separated seeds")->capture_default_str();
    benchc->add_option("--out-report", bench_report, "report JSON path");
    benchc->add_flag("--full-bound", bench_full, "also compute the full giant bound");
    benchc->add_option("--workers", config.workers, "instances solved concurrently");

    // score
    auto* score = app.add_subcommand("score", "Evaluate an external plan against a bound");
    std::string score_inst, score_plan, score_bound = "mixed";
    score->add_option("instance", score_inst)->required();
    score->add_option("plan", score_plan)->required();
    score->add_option("--bound-kind", score_bound, "linear | mixed | full")
        ->capture_default_str();
    score->add_flag("--aggregate-overload", aggregate_overload,
                    "score overloads aggregated per platform instead of per week");

    std::vector<std::string> argv_copy = args;
    std::vector<char*> argv;
    std::string prog = "stpp";
    argv.push_back(prog.data());
    for (auto& a : argv_copy) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!config_path.empty()) apply_config_file(config, config_path);

        if (gen->parsed()) {
            GenParams p = GenParams::preset_of(gen_preset);
            if (ov_bundles > 0) p.bundles = ov_bundles;
            if (ov_suppliers > 0) p.suppliers = ov_suppliers;
            if (ov_platforms > 0) p.platforms = ov_platforms;
            if (ov_units > 0) p.units = ov_units;
            if (ov_horizon > 0) p.horizon = ov_horizon;
            (void)has_overrides;
            (void)gen_overrides;
            Instance inst = generate(p, seed);
            write_instance(inst, gen_out);
            std::cout << "wrote " << gen_out << ": " << inst.network.locations.size()
                      << " locations, " << inst.network.arcs.size() << " arcs, "
                      << inst.commodities.size() << " commodities, " << inst.bundles.size()
                      << " bundles\n";
            return 0;
        }

        if (val->parsed()) {
            Instance inst = load_instance(val_path);  // throws on violations
            std::cout << "ok: " << inst.network.locations.size() << " locations, "
                      << inst.bundles.size() << " bundles, horizon " << inst.horizon << "\n";
            return 0;
        }

        if (solve->parsed()) {
            Instance inst = load_instance(solve_path);
            Expanded exp = Expanded::build(inst);
            if (time_limit > 0) config.total_seconds = time_limit;

            auto t0 = std::chrono::steady_clock::now();
            SolveArtifacts art = solve_with_trace(solve_method, inst, exp, config, seed);
            double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            auto violations = validate_solution(art.sol, exp.tt);
            if (!violations.empty()) throw ValidationError(violations);

            Metrics m;
            m.instance = inst.name;
            m.method = solve_method;
            m.seed = seed;
            m.cost = evaluate(art.sol);
            m.bounds.push_back(linear_bound(inst, exp));
            m.bounds.push_back(mixed_giant_bound(inst, exp));
            double best_bound = 0;
            for (auto& c : m.bounds) best_bound = std::max(best_bound, c.value);
            if (best_bound > 0) m.gap = (m.cost.total - best_bound) / best_bound;
            for (const auto& row : art.trace) m.trace_summary[row.move] += 1;
            m.include_timings = with_timings;
            if (with_timings) m.timings["solve_seconds"] = wall;

            if (!out_plan.empty()) write_plan(art.sol, exp.tt, out_plan);
            if (!out_metrics.empty()) write_metrics(m, out_metrics);
            if (!out_trace.empty()) {
                if (!art.trace.empty() || art.profile.empty())
                    write_trace_csv(art.trace, out_trace);
                else
                    write_profile_csv(art.profile, out_trace);
            }
            std::cout << solve_method << " cost " << m.cost.total;
            if (m.gap >= 0) std::cout << "  gap " << 100.0 * m.gap << "%";
            std::cout << "\n";
            return 0;
        }

        if (bound->parsed()) {
            Instance inst = load_instance(bound_path);
            Expanded exp = Expanded::build(inst);
            BoundCertificate cert;
            if (bound_kind == "linear") {
                cert = linear_bound(inst, exp);
            } else if (bound_kind == "mixed") {
                cert = mixed_giant_bound(inst, exp);
            } else if (bound_kind == "full") {
                cert = full_giant_bound(inst, exp, bound_time, config.milp_node_budget,
                                        config.variable_budget);
            } else {
                throw ValidationError("unknown bound kind '" + bound_kind + "'");
            }
            Metrics m;
            m.instance = inst.name;
            m.method = "bound";
            m.seed = seed;
            m.bounds.push_back(cert);
            m.include_timings = with_timings;
            if (with_timings) m.timings["bound_seconds"] = cert.elapsed_seconds;
            if (!bound_metrics.empty()) write_metrics(m, bound_metrics);
            std::cout << to_string(cert.kind) << " bound " << cert.value
                      << (cert.optimal ? "" : " (limit reached)") << "\n";
            return 0;
        }

        if (benchc->parsed()) {
            auto split = [](const std::string& s) {
                std::vector<std::string> out;
                std::string cur;
                for (char c : s) {
                    if (c == ',') {
                        if (!cur.empty()) out.push_back(cur);
                        cur.clear();
                    } else {
                        cur += c;
                    }
                }
                if (!cur.empty()) out.push_back(cur);
                return out;
            };
            std::vector<std::string> methods = split(bench_methods);
            std::vector<uint64_t> seeds;
            for (const auto& s : split(bench_seeds)) seeds.push_back(std::stoull(s));

            json all = json::array();
            std::vector<BenchmarkReport> reports(bench_paths.size());
            int workers = config.workers > 0
                              ? config.workers
                              : static_cast<int>(std::thread::hardware_concurrency());
            workers = std::max(1, std::min<int>(workers, static_cast<int>(bench_paths.size())));
            std::atomic<size_t> next{0};
            auto work = [&] {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= bench_paths.size()) return;
                    Instance inst = load_instance(bench_paths[i]);
                    Expanded exp = Expanded::build(inst);
                    reports[i] = run_benchmark(inst, exp, methods, seeds, config, bench_full);
                }
            };
            std::vector<std::future<void>> futs;
            for (int w = 1; w < workers; ++w) futs.push_back(std::async(std::launch::async, work));
            work();
            for (auto& f : futs) f.get();

            for (const auto& report : reports) {
                std::cout << format_report(report);
                for (const auto& r : report.rows) {
                    json row;
                    row["instance"] = report.instance;
                    row["method"] = r.method;
                    row["seed"] = r.seed;
                    row["cost"] = r.cost;
                    row["bound"] = r.bound;
                    row["bound_kind"] = report.bound_kind;
                    row["gap"] = r.gap;
                    row["valid"] = r.valid;
                    all.push_back(std::move(row));
                }
            }
            if (!bench_report.empty()) atomic_write(bench_report, all.dump(2) + "\n");
            return 0;
        }

        if (score->parsed()) {
            Instance inst = load_instance(score_inst);
            Expanded exp = Expanded::build(inst);
            std::ifstream in(score_plan, std::ios::binary);
            if (!in) throw ValidationError("cannot open plan '" + score_plan + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            Solution sol = plan_from_text(inst, exp, ss.str());
            auto violations = validate_solution(sol, exp.tt);
            if (!violations.empty()) throw ValidationError(violations);

            EvalOptions opts;
            opts.aggregate_overload = aggregate_overload;
            CostBreakdown cost = evaluate(sol, opts);
            CostBreakdown stored = plan_summary_from_text(ss.str());
            if (std::abs(cost.total - stored.total) >
                1e-6 * std::max({1.0, cost.total, stored.total}))
                throw ValidationError("plan summary total " + std::to_string(stored.total) +
                                      " does not match re-evaluated " +
                                      std::to_string(cost.total));

            BoundCertificate cert;
            if (score_bound == "linear")
                cert = linear_bound(inst, exp);
            else if (score_bound == "mixed")
                cert = mixed_giant_bound(inst, exp);
            else if (score_bound == "full")
                cert = full_giant_bound(inst, exp, config.milp_seconds, config.milp_node_budget,
                                        config.variable_budget);
            else
                throw ValidationError("unknown bound kind '" + score_bound + "'");

            double gap = cert.value > 0 ? (cost.total - cert.value) / cert.value : 0.0;
            std::cout << "cost " << cost.total << "  bound(" << to_string(cert.kind) << ") "
                      << cert.value << "  gap " << 100.0 * gap << "%\n";
            return 0;
        }
    } catch (const InfeasibleBundleError& e) {
        return error_out("infeasible", e.what(), 2);
    } catch (const PerturbationSkipped& e) {
        return error_out("timeout", e.what(), 3);
    } catch (const ValidationError& e) {
        return error_out("validation", e.what(), 1);
    } catch (const std::exception& e) {
        return error_out("error", e.what(), 1);
    }
    return 0;
}

}  // namespace stpp
