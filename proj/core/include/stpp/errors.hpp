#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stpp {

// Input or solution fails a structural invariant. Collects every violation
// found so callers can report them all at once.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
    explicit ValidationError(const std::string& msg)
        : ValidationError(std::vector<std::string>{msg}) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out.empty() ? std::string("validation failed") : out;
    }
    std::vector<std::string> violations_;
};

// A bundle has no source-to-sink path in its travel-time subgraph.
class InfeasibleBundleError : public std::runtime_error {
public:
    InfeasibleBundleError(int bundle, const std::string& what)
        : std::runtime_error(what), bundle_(bundle) {}
    int bundle() const { return bundle_; }

private:
    int bundle_;
};

// Some arc travel time does not fit in the requested horizon.
class HorizonError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An item is larger than the bin capacity it should be packed into.
class ItemOversizeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Packing would need more bins than K_a allows on the arc.
class CapacityExhaustedError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A perturbation model would exceed the configured variable budget.
class BudgetExceededError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Path enumeration came back empty where at least one path was required.
class PathEnumerationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The MILP search hit its limit before finding any incumbent.
class PerturbationSkipped : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stpp
