#pragma once

#include "stpp/bounds.hpp"

namespace stpp {

// Distance-only shortest paths, then pack everything and evaluate.
Solution shortest_heuristic(const Instance& inst, const Expanded& exp);

// Orders collapsed into one synthetic order at week 1; sequential insertion
// under giant-container marginal arc costs; the chosen paths then carry the
// real orders.
Solution average_heuristic(const Instance& inst, const Expanded& exp);

struct BenchmarkRow {
    std::string method;
    uint64_t seed = 0;
    double cost = 0;
    double bound = 0;
    double gap = 0;  // (cost - bound) / bound
    double wall_seconds = 0;
    bool valid = false;
};

struct BenchmarkReport {
    std::string instance;
    std::string bound_kind;
    double bound = 0;
    std::vector<BenchmarkRow> rows;
};

// Runs each named method ("constructive", "ils", "shortest", "average",
// "lbr") for each seed; gaps are measured against the best available
// certificate (linear and mixed always, full giant when `with_full_bound`).
BenchmarkReport run_benchmark(const Instance& inst, const Expanded& exp,
                              const std::vector<std::string>& methods,
                              const std::vector<uint64_t>& seeds, const SolverConfig& config,
                              bool with_full_bound = false);

// Human table, one row per (method, seed) plus a bound line.
std::string format_report(const BenchmarkReport& report);

// Dispatch helper shared with the CLI.
Solution run_method(const std::string& method, const Instance& inst, const Expanded& exp,
                    const SolverConfig& config, uint64_t seed, IlsResult* details = nullptr);

}  // namespace stpp
