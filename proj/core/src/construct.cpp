#include "stpp/construct.hpp"

#include <algorithm>
#include <numeric>

namespace stpp {

std::vector<int> ffd_bundle_order(const Instance& inst) {
    std::vector<int> order(inst.bundles.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (inst.bundles[a].size_key != inst.bundles[b].size_key)
            return inst.bundles[a].size_key > inst.bundles[b].size_key;
        return a < b;
    });
    return order;
}

Solution constructive(const Instance& inst, const Expanded& exp, const ProgressFn& progress) {
    Solution sol(inst);
    int inserted = 0;
    for (int b : ffd_bundle_order(inst)) {
        InsertResult r = insert_bundle(sol, exp.tt, exp.sub[b]);
        ++inserted;
        if (progress) progress({b, inserted, r.cost, sol.total_cost()});
    }
    return sol;
}

}  // namespace stpp
