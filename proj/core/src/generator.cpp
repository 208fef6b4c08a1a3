#include "stpp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stpp/errors.hpp"
#include "stpp/io.hpp"
#include "stpp/rng.hpp"

namespace stpp {

GenParams GenParams::preset_of(const std::string& name) {
    GenParams p;
    p.preset = name;
    if (name == "xs") {
        // defaults
    } else if (name == "s") {
        p.continents = 2;
        p.suppliers = 25;
        p.platforms = 5;
        p.units = 3;
        p.horizon = 10;
        p.bundles = 60;
    } else if (name == "m") {
        p.continents = 3;
        p.suppliers = 150;
        p.platforms = 8;
        p.units = 4;
        p.horizon = 12;
        p.bundles = 500;
    } else if (name == "tiny") {
        p.continents = 1;
        p.suppliers = 2;
        p.platforms = 2;
        p.units = 1;
        p.horizon = 6;
        p.bundles = 3;
        p.orders_min = 1;
        p.orders_max = 2;
        p.commodities_min = 1;
        p.commodities_max = 2;
        p.multiplicity_max = 1;
        p.tau_slack_min = 0;
        p.tau_slack_max = 1;
        p.volume_min = 0.8;
        p.volume_max = 4.0;
        p.outsourced_fraction = 0;
    } else if (name == "frag") {
        p.continents = 1;
        p.suppliers = 24;
        p.platforms = 3;
        p.units = 3;
        p.horizon = 8;
        p.bundles = 70;
        p.orders_min = 2;
        p.orders_max = 3;
        p.commodities_min = 1;
        p.commodities_max = 2;
        p.multiplicity_max = 1;
        p.small_volume_fraction = 0.85;
        p.small_volume_min = 0.2;
        p.volume_min = 0.6;
        p.volume_max = 1.6;
        p.hub_capable_fraction = 1.0;
        p.tau_slack_min = 1;
        p.tau_slack_max = 2;
        p.collection_cost_factor = 2.0;
        p.outsourced_fraction = 0;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return p;
}

namespace {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    auto rad = [](double d) { return d * 3.14159265358979323846 / 180.0; };
    double dlat = rad(lat2 - lat1), dlon = rad(lon2 - lon1);
    double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
               std::cos(rad(lat1)) * std::cos(rad(lat2)) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * 6371.0 * std::asin(std::min(1.0, std::sqrt(a)));
}

struct Builder {
    const GenParams& p;
    Rng rng;
    Instance inst;
    std::vector<int> continent_of;  // per location index
    std::vector<int> supplier_ids, platform_ids, unit_ids;
    std::vector<std::pair<double, double>> centers;

    Builder(const GenParams& params, uint64_t seed) : p(params), rng(seed) {}

    std::pair<double, double> sample_near(int continent, double sigma) {
        return {centers[continent].first + rng.uniform(-sigma, sigma),
                centers[continent].second + rng.uniform(-sigma, sigma)};
    }

    int add_location(const std::string& id, LocationKind kind, int continent, double sigma) {
        Location l;
        l.id = id;
        l.kind = kind;
        auto [lat, lon] = sample_near(continent, sigma);
        l.lat = lat;
        l.lon = lon;
        continent_of.push_back(continent);
        inst.network.locations.push_back(std::move(l));
        return static_cast<int>(inst.network.locations.size()) - 1;
    }

    double dist(int a, int b) const {
        const auto& la = inst.network.locations[a];
        const auto& lb = inst.network.locations[b];
        return haversine_km(la.lat, la.lon, lb.lat, lb.lon);
    }

    int add_arc(const std::string& id, int tail, int head, ArcKind kind, int tau, double capacity,
                double bin_cost, bool outsourced = false, double out_cost = 0) {
        Arc a;
        a.id = id;
        a.tail = tail;
        a.head = head;
        a.kind = kind;
        a.travel_time = tau;
        a.distance = std::round(dist(tail, head) + 1.0);
        a.bin_capacity = capacity;
        a.bin_cost = std::round(bin_cost * 100) / 100;
        a.carbon_cost = std::round(0.04 * a.distance * 100) / 100;
        a.outsourced = outsourced;
        a.outsource_cost = std::round(out_cost * 100) / 100;
        inst.network.arcs.push_back(std::move(a));
        return static_cast<int>(inst.network.arcs.size()) - 1;
    }

    int travel_weeks(int a, int b, int floor_weeks) {
        if (continent_of[a] == continent_of[b]) return floor_weeks;
        // Intercontinental legs run three to eight weeks, distance scaled.
        int span = 3 + static_cast<int>(dist(a, b) / 4000.0) + rng.uniform_int(0, 1);
        span = std::min(span, std::max(3, p.horizon - 4));
        return std::min(8, span);
    }

    Instance build() {
        inst.name = p.preset;
        inst.horizon = p.horizon;

        for (int c = 0; c < p.continents; ++c)
            centers.push_back({rng.uniform(-30, 55), -150.0 + 320.0 * c / std::max(1, p.continents) +
                                                         rng.uniform(-10, 10)});

        for (int i = 0; i < p.platforms; ++i)
            platform_ids.push_back(
                add_location("P" + std::to_string(i), LocationKind::Platform, i % p.continents, 5));
        for (int i = 0; i < p.units; ++i)
            unit_ids.push_back(add_location("U" + std::to_string(i), LocationKind::ProductionUnit,
                                            i % p.continents, 4));
        for (int i = 0; i < p.suppliers; ++i)
            supplier_ids.push_back(add_location("S" + std::to_string(i), LocationKind::Supplier,
                                                static_cast<int>(rng.below(p.continents)), 9));

        // Dense platform core.
        for (int i = 0; i < p.platforms; ++i) {
            for (int j = 0; j < p.platforms; ++j) {
                if (i == j) continue;
                int a = platform_ids[i], b = platform_ids[j];
                int tau = travel_weeks(a, b, 1);
                double d = dist(a, b);
                add_arc("a_pp_" + std::to_string(i) + "_" + std::to_string(j), a, b,
                        ArcKind::InterPlatform, tau, p.container_capacity, 0.35 * d + 400.0);
            }
        }
        // Deliveries: every platform serves every unit.
        for (int i = 0; i < p.platforms; ++i) {
            for (int j = 0; j < p.units; ++j) {
                int a = platform_ids[i], b = unit_ids[j];
                int tau = travel_weeks(a, b, 1);
                add_arc("a_del_" + std::to_string(i) + "_" + std::to_string(j), a, b,
                        ArcKind::Delivery, tau, p.truck_capacity, 0.8 * dist(a, b) + 150.0);
            }
        }
        // Collections: each supplier joins its one or two nearest platforms.
        for (int i = 0; i < p.suppliers; ++i) {
            int s = supplier_ids[i];
            std::vector<std::pair<double, int>> near;
            for (int pi = 0; pi < p.platforms; ++pi)
                near.push_back({dist(s, platform_ids[pi]), pi});
            std::sort(near.begin(), near.end());
            int links = 1 + (p.platforms > 1 && rng.chance(0.6) ? 1 : 0);
            for (int k = 0; k < links; ++k) {
                int pi = near[k].second;
                int a = platform_ids[pi];
                bool outsourced = rng.chance(p.outsourced_fraction);
                double base = (0.8 * dist(s, a) + 150.0) * p.collection_cost_factor;
                add_arc("a_col_" + std::to_string(i) + "_" + std::to_string(pi), s, a,
                        ArcKind::Collection, travel_weeks(s, a, 1), p.truck_capacity, base,
                        outsourced, outsourced ? base * 1.25 : 0.0);
            }
        }

        // Bundles: distinct (supplier, unit) pairs, each with a direct arc.
        std::set<std::pair<int, int>> pairs;
        std::vector<std::pair<int, int>> bundle_pairs;
        int guard = 0;
        while (static_cast<int>(bundle_pairs.size()) < p.bundles &&
               guard++ < p.bundles * 200) {
            int s = supplier_ids[static_cast<int>(rng.below(supplier_ids.size()))];
            int u = unit_ids[static_cast<int>(rng.below(unit_ids.size()))];
            if (pairs.insert({s, u}).second) bundle_pairs.push_back({s, u});
        }

        std::map<std::pair<int, int>, int> direct_tau;
        for (size_t i = 0; i < bundle_pairs.size(); ++i) {
            auto [s, u] = bundle_pairs[i];
            int tau = travel_weeks(s, u, 1);
            direct_tau[{s, u}] = tau;
            add_arc("a_dir_" + std::to_string(i), s, u, ArcKind::Direct, tau, p.truck_capacity,
                    1.0 * dist(s, u) + 200.0);
        }

        // Cheapest static hub route per pair (collection + platforms + delivery).
        auto hub_time = [&](int s, int u) {
            // Tiny network; Bellman-Ford over platform nodes is plenty.
            std::map<int, int> best;  // platform -> weeks from s
            for (const auto& a : inst.network.arcs)
                if (a.kind == ArcKind::Collection && a.tail == s)
                    best[a.head] = best.count(a.head) ? std::min(best[a.head], a.travel_time)
                                                      : a.travel_time;
            for (int round = 0; round < p.platforms; ++round)
                for (const auto& a : inst.network.arcs)
                    if (a.kind == ArcKind::InterPlatform && best.count(a.tail)) {
                        int t = best[a.tail] + a.travel_time;
                        if (!best.count(a.head) || t < best[a.head]) best[a.head] = t;
                    }
            int out = -1;
            for (const auto& a : inst.network.arcs)
                if (a.kind == ArcKind::Delivery && a.head == u && best.count(a.tail)) {
                    int t = best[a.tail] + a.travel_time;
                    if (out < 0 || t < out) out = t;
                }
            return out;
        };

        int next_part = 0;
        for (size_t i = 0; i < bundle_pairs.size(); ++i) {
            auto [s, u] = bundle_pairs[i];
            int tau_dir = direct_tau[{s, u}];
            int tau_hub = hub_time(s, u);
            bool hub_capable = tau_hub > 0 && rng.chance(p.hub_capable_fraction);
            int base_tau = hub_capable ? std::max(tau_dir, tau_hub) : tau_dir;

            int n_orders = rng.uniform_int(p.orders_min, p.orders_max);
            int first_week = rng.uniform_int(1, p.horizon);
            for (int o = 0; o < n_orders; ++o) {
                int week = wrap_week(first_week + o, p.horizon);
                int slack = rng.uniform_int(p.tau_slack_min, p.tau_slack_max);
                int tau = std::min(base_tau + slack, p.horizon - 1);
                int n_com = rng.uniform_int(p.commodities_min, p.commodities_max);
                for (int c = 0; c < n_com; ++c) {
                    Commodity m;
                    m.id = "c" + std::to_string(inst.commodities.size());
                    m.part = "part" + std::to_string(next_part++ % std::max(1, p.bundles * 2));
                    m.supplier = s;
                    m.unit = u;
                    m.delivery_week = week;
                    m.volume = rng.chance(p.small_volume_fraction)
                                   ? rng.uniform(p.small_volume_min, std::max(p.small_volume_min + 0.05, 1.0))
                                   : rng.uniform(p.volume_min, p.volume_max);
                    m.volume = std::round(m.volume * 100) / 100;
                    m.max_delivery_time = tau;
                    m.multiplicity = 1 + static_cast<long long>(rng.below(p.multiplicity_max));
                    m.capital_rate = std::round(rng.uniform(0.002, 0.012) * 10000) / 10000;
                    inst.commodities.push_back(std::move(m));
                }
            }
        }

        // Platform contracts sized around the expected weekly volume share.
        double total_volume = 0;
        for (const auto& m : inst.commodities)
            total_volume += m.volume * static_cast<double>(m.multiplicity);
        double weekly = total_volume / p.horizon;
        for (int pi : platform_ids) {
            PlatformData pd;
            pd.capacity = std::round(p.platform_capacity_factor *
                                     std::max(4.0, weekly / p.platforms * rng.uniform(0.8, 1.4)));
            pd.unit_cost = std::round(rng.uniform(1.0, 3.0) * 100) / 100;
            pd.overload_cost = std::round(rng.uniform(5.0, 15.0) * 100) / 100;
            inst.network.locations[pi].platform = pd;
        }

        inst.seed = 0;  // set by generate()
        inst.finalize();
        return inst;
    }
};

}  // namespace

Instance generate(const GenParams& params, uint64_t seed) {
    Builder b(params, derive_seed(seed, "generate"));
    Instance inst = b.build();
    inst.seed = seed;
    inst.name = params.preset + "-" + std::to_string(seed);
    auto violations = validate_instance(inst);
    if (!violations.empty()) throw ValidationError(violations);
    return inst;
}

}  // namespace stpp
