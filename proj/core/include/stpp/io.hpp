#pragma once

#include <optional>
#include <string>

#include "stpp/bounds.hpp"
#include "stpp/local_search.hpp"

namespace stpp {

// --- instance files (versioned JSON, canonical key order, byte-stable) ---

std::string instance_to_text(const Instance& inst);
Instance instance_from_text(const std::string& text);  // parses + validates
Instance load_instance(const std::string& path);
void write_instance(const Instance& inst, const std::string& path);

// Every violation found, with its location ("arcs[3]: ...").
std::vector<std::string> validate_instance(const Instance& inst);

// --- plan files ---

std::string plan_to_text(const Solution& sol, const TravelTimeGraph& tt);
Solution plan_from_text(const Instance& inst, const Expanded& exp, const std::string& text);
void write_plan(const Solution& sol, const TravelTimeGraph& tt, const std::string& path);
Solution load_plan(const Instance& inst, const Expanded& exp, const std::string& path);

// Stored summary of a plan file without rebuilding the solution.
CostBreakdown plan_summary_from_text(const std::string& text);

// --- metrics / trace ---

struct Metrics {
    std::string instance;
    std::string method;
    uint64_t seed = 0;
    CostBreakdown cost;
    std::vector<BoundCertificate> bounds;
    double gap = -1;  // against the best bound, when any bound is present
    std::map<std::string, long long> trace_summary;
    // Wall times are emitted only when requested so repeated runs stay
    // byte-identical.
    bool include_timings = false;
    std::map<std::string, double> timings;
};

std::string metrics_to_text(const Metrics& m);
void write_metrics(const Metrics& m, const std::string& path);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

// CSV rows "bundles,cost" of the constructive cost profile.
void write_profile_csv(const std::vector<std::pair<int, double>>& profile,
                       const std::string& path);

// Manifest table export (arc, week, bin, commodity, units), for plotting.
void write_manifest_csv(const Solution& sol, const std::string& path);

// write-temp-then-rename
void atomic_write(const std::string& path, const std::string& content);

}  // namespace stpp
