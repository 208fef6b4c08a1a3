#include "stpp/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "stpp/errors.hpp"

namespace stpp {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kInstanceSchema = "stpp-instance/1";
constexpr const char* kPlanSchema = "stpp-plan/1";
constexpr const char* kMetricsSchema = "stpp-metrics/1";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kind_name(LocationKind k) { return to_string(k); }

LocationKind location_kind_from(const std::string& s, const std::string& where) {
    if (s == "supplier") return LocationKind::Supplier;
    if (s == "platform") return LocationKind::Platform;
    if (s == "unit") return LocationKind::ProductionUnit;
    throw ValidationError(where + ": unknown location kind '" + s + "'");
}

ArcKind arc_kind_from(const std::string& s, const std::string& where) {
    if (s == "collection") return ArcKind::Collection;
    if (s == "interplatform") return ArcKind::InterPlatform;
    if (s == "delivery") return ArcKind::Delivery;
    if (s == "direct") return ArcKind::Direct;
    throw ValidationError(where + ": unknown arc kind '" + s + "'");
}

}  // namespace

std::string instance_to_text(const Instance& inst) {
    json doc;
    doc["schema"] = kInstanceSchema;
    doc["meta"] = {{"name", inst.name}, {"horizon", inst.horizon}, {"seed", inst.seed}};
    doc["locations"] = json::array();
    for (const auto& l : inst.network.locations) {
        json jl;
        jl["id"] = l.id;
        jl["kind"] = kind_name(l.kind);
        jl["lat"] = l.lat;
        jl["lon"] = l.lon;
        if (l.platform) {
            jl["platform"] = {{"capacity", l.platform->capacity},
                              {"unit_cost", l.platform->unit_cost},
                              {"overload_cost", l.platform->overload_cost}};
        }
        doc["locations"].push_back(std::move(jl));
    }
    doc["arcs"] = json::array();
    for (const auto& a : inst.network.arcs) {
        json ja;
        ja["id"] = a.id;
        ja["tail"] = inst.network.locations[a.tail].id;
        ja["head"] = inst.network.locations[a.head].id;
        ja["kind"] = to_string(a.kind);
        ja["travel_time"] = a.travel_time;
        ja["distance"] = a.distance;
        ja["bin_capacity"] = a.bin_capacity;
        ja["bin_cost"] = a.bin_cost;
        ja["carbon_cost"] = a.carbon_cost;
        if (a.outsourced) ja["outsource_cost"] = a.outsource_cost;
        if (a.max_bins >= 0) ja["max_bins"] = a.max_bins;
        doc["arcs"].push_back(std::move(ja));
    }
    doc["commodities"] = json::array();
    for (const auto& c : inst.commodities) {
        json jc;
        jc["id"] = c.id;
        jc["part"] = c.part;
        jc["supplier"] = inst.network.locations[c.supplier].id;
        jc["unit"] = inst.network.locations[c.unit].id;
        jc["delivery_week"] = c.delivery_week;
        jc["volume"] = c.volume;
        jc["max_delivery_time"] = c.max_delivery_time;
        jc["multiplicity"] = c.multiplicity;
        jc["capital_rate"] = c.capital_rate;
        doc["commodities"].push_back(std::move(jc));
    }
    return doc.dump(2) + "\n";
}

std::vector<std::string> validate_instance(const Instance& inst) {
    std::vector<std::string> out;
    const auto& net = inst.network;
    if (inst.horizon < 1) out.push_back("meta: horizon must be >= 1");

    std::map<std::string, int> loc_seen;
    for (size_t i = 0; i < net.locations.size(); ++i) {
        const auto& l = net.locations[i];
        std::string where = "locations[" + std::to_string(i) + "]";
        if (l.id.empty()) out.push_back(where + ": empty id");
        if (loc_seen.count(l.id)) out.push_back(where + ": duplicate id '" + l.id + "'");
        loc_seen[l.id] = static_cast<int>(i);
        if ((l.kind == LocationKind::Platform) != l.platform.has_value())
            out.push_back(where + ": platform fields present iff kind is platform");
        if (l.platform) {
            if (l.platform->capacity < 0) out.push_back(where + ": platform capacity < 0");
            if (l.platform->unit_cost < 0 || l.platform->overload_cost < 0)
                out.push_back(where + ": negative platform costs");
        }
    }
    std::map<std::string, int> arc_seen;
    for (size_t i = 0; i < net.arcs.size(); ++i) {
        const auto& a = net.arcs[i];
        std::string where = "arcs[" + std::to_string(i) + "]";
        if (arc_seen.count(a.id)) out.push_back(where + ": duplicate id '" + a.id + "'");
        arc_seen[a.id] = static_cast<int>(i);
        if (a.tail < 0 || a.head < 0 ||
            a.tail >= static_cast<int>(net.locations.size()) ||
            a.head >= static_cast<int>(net.locations.size())) {
            out.push_back(where + ": arc endpoint missing");
            continue;
        }
        auto tk = net.locations[a.tail].kind, hk = net.locations[a.head].kind;
        bool ok = (a.kind == ArcKind::Collection && tk == LocationKind::Supplier &&
                   hk == LocationKind::Platform) ||
                  (a.kind == ArcKind::InterPlatform && tk == LocationKind::Platform &&
                   hk == LocationKind::Platform) ||
                  (a.kind == ArcKind::Delivery && tk == LocationKind::Platform &&
                   hk == LocationKind::ProductionUnit) ||
                  (a.kind == ArcKind::Direct && tk == LocationKind::Supplier &&
                   hk == LocationKind::ProductionUnit);
        if (!ok)
            out.push_back(where + ": kind '" + std::string(to_string(a.kind)) +
                          "' inconsistent with endpoints " + net.locations[a.tail].id + " -> " +
                          net.locations[a.head].id);
        if (a.travel_time < 0) out.push_back(where + ": negative travel time");
        if (a.travel_time >= inst.horizon)
            out.push_back(where + ": travel time " + std::to_string(a.travel_time) +
                          " does not fit horizon " + std::to_string(inst.horizon));
        if (a.bin_capacity <= 0) out.push_back(where + ": bin capacity must be > 0");
        if (a.bin_cost < 0 || a.carbon_cost < 0) out.push_back(where + ": negative costs");
        if (a.outsourced && a.kind != ArcKind::Collection)
            out.push_back(where + ": outsourced arcs must be collection arcs");
        if (a.outsourced && a.outsource_cost < 0) out.push_back(where + ": negative outsource cost");
        if (a.max_bins == 0 || a.max_bins < -1) out.push_back(where + ": max_bins must be positive");
    }
    for (size_t i = 0; i < inst.commodities.size(); ++i) {
        const auto& c = inst.commodities[i];
        std::string where = "commodities[" + std::to_string(i) + "]";
        if (c.supplier < 0 || c.supplier >= static_cast<int>(net.locations.size()) ||
            net.locations[c.supplier].kind != LocationKind::Supplier)
            out.push_back(where + ": supplier missing or not a supplier");
        if (c.unit < 0 || c.unit >= static_cast<int>(net.locations.size()) ||
            net.locations[c.unit].kind != LocationKind::ProductionUnit)
            out.push_back(where + ": unit missing or not a production unit");
        if (c.delivery_week < 1 || c.delivery_week > inst.horizon)
            out.push_back(where + ": delivery week outside [1,T]");
        if (c.volume <= 0) out.push_back(where + ": volume must be > 0");
        if (c.max_delivery_time < 1) out.push_back(where + ": max delivery time must be >= 1");
        if (c.multiplicity < 1) out.push_back(where + ": multiplicity must be >= 1");
        if (c.capital_rate < 0) out.push_back(where + ": negative capital rate");
    }
    if (!out.empty()) return out;

    // One item must fit one bin on every arc its bundle could use.
    try {
        Expanded exp = Expanded::build(inst);
        for (size_t b = 0; b < inst.bundles.size(); ++b) {
            double min_cap = kInf;
            for (int ai : exp.sub[b].arcs) {
                int sa = exp.tt.arcs[ai].static_arc;
                if (sa >= 0) min_cap = std::min(min_cap, net.arcs[sa].bin_capacity);
            }
            for (int o : inst.bundles[b].orders)
                for (int m : inst.orders[o].commodities)
                    if (inst.commodities[m].volume > min_cap + 1e-9)
                        out.push_back("commodities[" + std::to_string(m) + "]: volume " +
                                      std::to_string(inst.commodities[m].volume) +
                                      " exceeds every usable bin capacity (oversize)");
        }
    } catch (const InfeasibleBundleError& e) {
        out.push_back(std::string("bundle ") + std::to_string(e.bundle()) + ": " + e.what());
    }
    return out;
}

Instance instance_from_text(const std::string& text) {
    json doc = json::parse(text);
    if (!doc.contains("schema") || doc["schema"] != kInstanceSchema)
        throw ValidationError("schema: expected '" + std::string(kInstanceSchema) + "'");
    Instance inst;
    inst.name = doc["meta"].value("name", "");
    inst.horizon = doc["meta"].value("horizon", 1);
    inst.seed = doc["meta"].value("seed", 0ULL);

    std::map<std::string, int> loc_of;
    for (size_t i = 0; i < doc["locations"].size(); ++i) {
        const auto& jl = doc["locations"][i];
        Location l;
        l.id = jl.value("id", "");
        l.kind = location_kind_from(jl.value("kind", ""), "locations[" + std::to_string(i) + "]");
        l.lat = jl.value("lat", 0.0);
        l.lon = jl.value("lon", 0.0);
        if (jl.contains("platform")) {
            PlatformData p;
            p.capacity = jl["platform"].value("capacity", 0.0);
            p.unit_cost = jl["platform"].value("unit_cost", 0.0);
            p.overload_cost = jl["platform"].value("overload_cost", 0.0);
            l.platform = p;
        }
        loc_of[l.id] = static_cast<int>(inst.network.locations.size());
        inst.network.locations.push_back(std::move(l));
    }
    auto resolve = [&](const std::string& id, const std::string& where) {
        auto it = loc_of.find(id);
        if (it == loc_of.end())
            throw ValidationError(where + ": unknown location '" + id + "'");
        return it->second;
    };
    for (size_t i = 0; i < doc["arcs"].size(); ++i) {
        const auto& ja = doc["arcs"][i];
        std::string where = "arcs[" + std::to_string(i) + "]";
        Arc a;
        a.id = ja.value("id", "");
        a.tail = resolve(ja.value("tail", ""), where);
        a.head = resolve(ja.value("head", ""), where);
        a.kind = arc_kind_from(ja.value("kind", ""), where);
        a.travel_time = ja.value("travel_time", 0);
        a.distance = ja.value("distance", 0.0);
        a.bin_capacity = ja.value("bin_capacity", 0.0);
        a.bin_cost = ja.value("bin_cost", 0.0);
        a.carbon_cost = ja.value("carbon_cost", 0.0);
        a.outsourced = ja.contains("outsource_cost");
        a.outsource_cost = ja.value("outsource_cost", 0.0);
        a.max_bins = ja.value("max_bins", -1LL);
        inst.network.arcs.push_back(std::move(a));
    }
    for (size_t i = 0; i < doc["commodities"].size(); ++i) {
        const auto& jc = doc["commodities"][i];
        std::string where = "commodities[" + std::to_string(i) + "]";
        Commodity c;
        c.id = jc.value("id", "");
        c.part = jc.value("part", "");
        c.supplier = resolve(jc.value("supplier", ""), where);
        c.unit = resolve(jc.value("unit", ""), where);
        c.delivery_week = jc.value("delivery_week", 1);
        c.volume = jc.value("volume", 0.0);
        c.max_delivery_time = jc.value("max_delivery_time", 1);
        c.multiplicity = jc.value("multiplicity", 1LL);
        c.capital_rate = jc.value("capital_rate", 0.0);
        inst.commodities.push_back(std::move(c));
    }
    inst.finalize();
    auto violations = validate_instance(inst);
    if (!violations.empty()) throw ValidationError(violations);
    return inst;
}

Instance load_instance(const std::string& path) { return instance_from_text(read_file(path)); }

void write_instance(const Instance& inst, const std::string& path) {
    atomic_write(path, instance_to_text(inst));
}

std::string plan_to_text(const Solution& sol, const TravelTimeGraph& tt) {
    const Instance& inst = sol.instance();
    json doc;
    doc["schema"] = kPlanSchema;
    doc["instance"] = inst.name;
    doc["bundles"] = json::array();
    for (size_t b = 0; b < inst.bundles.size(); ++b) {
        if (!sol.has_path(static_cast<int>(b))) continue;
        const auto& st = sol.path(static_cast<int>(b));
        json jb;
        jb["bundle"] = static_cast<int>(b);
        jb["supplier"] = inst.network.locations[inst.bundles[b].supplier].id;
        jb["unit"] = inst.network.locations[inst.bundles[b].unit].id;
        // Ordered node/step sequence plus the arc taken at each hop ("wait"
        // for dispatch delays); self-describing for external producers.
        jb["nodes"] = json::array();
        jb["arcs"] = json::array();
        if (!st.tt_arcs.empty()) {
            int tail = tt.arcs[st.tt_arcs.front()].tail;
            jb["nodes"].push_back(json::array(
                {inst.network.locations[tt.nodes[tail].loc].id, tt.nodes[tail].step}));
        }
        for (int ai : st.tt_arcs) {
            const auto& arc = tt.arcs[ai];
            jb["arcs"].push_back(arc.static_arc < 0 ? std::string("wait")
                                                    : inst.network.arcs[arc.static_arc].id);
            jb["nodes"].push_back(json::array(
                {inst.network.locations[tt.nodes[arc.head].loc].id, tt.nodes[arc.head].step}));
        }
        doc["bundles"].push_back(std::move(jb));
    }
    doc["manifests"] = json::array();
    for (const auto& [key, m] : sol.manifests()) {
        for (size_t bi = 0; bi < m.bins.size(); ++bi) {
            for (const auto& [cid, units] : m.bins[bi].contents) {
                json row;
                row["arc"] = inst.network.arcs[key.arc].id;
                row["week"] = key.week;
                row["bin"] = static_cast<int>(bi);
                row["commodity"] = inst.commodities[cid].id;
                row["units"] = units;
                doc["manifests"].push_back(std::move(row));
            }
        }
    }
    doc["summary"] = {{"bin_cost", sol.bin_cost()},
                      {"commodity_cost", sol.commodity_cost()},
                      {"overload_cost", sol.overload_cost()},
                      {"total", sol.total_cost()}};
    return doc.dump(2) + "\n";
}

CostBreakdown plan_summary_from_text(const std::string& text) {
    json doc = json::parse(text);
    CostBreakdown out;
    out.bin_cost = doc["summary"].value("bin_cost", 0.0);
    out.commodity_cost = doc["summary"].value("commodity_cost", 0.0);
    out.overload_cost = doc["summary"].value("overload_cost", 0.0);
    out.total = doc["summary"].value("total", 0.0);
    return out;
}

Solution plan_from_text(const Instance& inst, const Expanded& exp, const std::string& text) {
    json doc = json::parse(text);
    if (!doc.contains("schema") || doc["schema"] != kPlanSchema)
        throw ValidationError("schema: expected '" + std::string(kPlanSchema) + "'");
    Solution sol(inst);

    for (const auto& jb : doc["bundles"]) {
        int b = jb.value("bundle", -1);
        if (b < 0 || b >= static_cast<int>(inst.bundles.size()))
            throw ValidationError("plan: bundle index out of range");

        // Walk the hops from the bundle source, resolving each arc id (or
        // "wait") to the unique travel-time arc leaving the current node.
        std::vector<int> arcs;
        int at = exp.tt.node_id(inst.bundles[b].supplier, bundle_source_step(inst, b));
        for (const auto& hop : jb["arcs"]) {
            std::string aid = hop.get<std::string>();
            int want_static = -1;
            if (aid != "wait") {
                auto it = inst.network.arc_index.find(aid);
                if (it == inst.network.arc_index.end())
                    throw ValidationError("plan: unknown arc '" + aid + "' on bundle " +
                                          std::to_string(b));
                want_static = it->second;
            }
            int found = -1;
            for (int ai : exp.tt.out[at])
                if (exp.tt.arcs[ai].static_arc == want_static) found = ai;
            if (found < 0)
                throw ValidationError("plan: arc '" + aid + "' does not leave node on bundle " +
                                      std::to_string(b));
            arcs.push_back(found);
            at = exp.tt.arcs[found].head;
        }
        if (at != exp.tt.node_id(inst.bundles[b].unit, exp.tt.horizon))
            throw ValidationError("plan: path of bundle " + std::to_string(b) +
                                  " does not end at its unit");

        BundlePathState st;
        st.tt_arcs = arcs;
        st.commodity_cost = path_commodity_cost(inst, exp.tt, arcs, b);
        const Bundle& bundle = inst.bundles[b];
        st.projections.resize(bundle.orders.size());
        for (size_t oi = 0; oi < bundle.orders.size(); ++oi) {
            int o = bundle.orders[oi];
            for (int ai : arcs) {
                auto key = project_arc(inst, exp.tt, ai, o);
                if (!key) continue;
                st.projections[oi].arcs.push_back(*key);
                const Arc& sa = inst.network.arcs[key->arc];
                if (inst.network.locations[sa.head].kind == LocationKind::Platform) {
                    NodeWeekKey nk{sa.head, projected_head_week(inst, *key)};
                    st.projections[oi].platform_heads.push_back(nk);
                    sol.add_inbound(nk, inst.orders[o].volume);
                }
            }
        }
        sol.add_commodity_cost(st.commodity_cost);
        sol.set_path(b, std::move(st));
    }

    for (const auto& row : doc["manifests"]) {
        auto ait = inst.network.arc_index.find(row.value("arc", ""));
        if (ait == inst.network.arc_index.end())
            throw ValidationError("plan: unknown arc '" + row.value("arc", "") + "'");
        TimedArcKey key{ait->second, row.value("week", 0)};
        BinManifest& m = sol.manifest_mut(key);
        int bin = row.value("bin", 0);
        while (m.bin_count() <= bin) m.bins.emplace_back();
        auto cit = std::find_if(inst.commodities.begin(), inst.commodities.end(),
                                [&](const Commodity& c) { return c.id == row.value("commodity", ""); });
        if (cit == inst.commodities.end())
            throw ValidationError("plan: unknown commodity '" + row.value("commodity", "") + "'");
        int cid = static_cast<int>(cit - inst.commodities.begin());
        m.bins[bin].add(cid, row.value("units", 0LL), inst.commodities[cid].volume);
    }
    double bin_cost = 0;
    for (const auto& [key, m] : sol.manifests())
        bin_cost += inst.network.arcs[key.arc].bin_cost * static_cast<double>(m.bin_count());
    sol.add_bin_cost(bin_cost);
    return sol;
}

void write_plan(const Solution& sol, const TravelTimeGraph& tt, const std::string& path) {
    atomic_write(path, plan_to_text(sol, tt));
}

Solution load_plan(const Instance& inst, const Expanded& exp, const std::string& path) {
    return plan_from_text(inst, exp, read_file(path));
}

std::string metrics_to_text(const Metrics& m) {
    json doc;
    doc["schema"] = kMetricsSchema;
    doc["instance"] = m.instance;
    doc["method"] = m.method;
    doc["seed"] = m.seed;
    doc["cost"] = {{"bin_cost", m.cost.bin_cost},
                   {"commodity_cost", m.cost.commodity_cost},
                   {"overload_cost", m.cost.overload_cost},
                   {"total", m.cost.total}};
    doc["bounds"] = json::array();
    for (const auto& c : m.bounds) {
        json jc;
        jc["kind"] = to_string(c.kind);
        jc["value"] = c.value;
        jc["optimal"] = c.optimal;
        jc["notes"] = c.notes;
        if (!c.per_bundle.empty()) jc["per_bundle"] = c.per_bundle;
        if (m.include_timings) jc["elapsed_seconds"] = c.elapsed_seconds;
        doc["bounds"].push_back(std::move(jc));
    }
    if (m.gap >= 0) doc["gap"] = m.gap;
    doc["trace_summary"] = m.trace_summary;
    if (m.include_timings)
        doc["timings"] = m.timings;
    else
        doc["timings"] = nullptr;
    return doc.dump(2) + "\n";
}

void write_metrics(const Metrics& m, const std::string& path) {
    atomic_write(path, metrics_to_text(m));
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    std::ostringstream os;
    os << "move,delta,t\n";
    for (const auto& r : trace) os << r.move << "," << r.delta << "," << r.t << "\n";
    atomic_write(path, os.str());
}

void write_profile_csv(const std::vector<std::pair<int, double>>& profile,
                       const std::string& path) {
    std::ostringstream os;
    os << "bundles,cost\n";
    for (const auto& [n, c] : profile) os << n << "," << c << "\n";
    atomic_write(path, os.str());
}

void write_manifest_csv(const Solution& sol, const std::string& path) {
    const Instance& inst = sol.instance();
    std::ostringstream os;
    os << "arc,week,bin,commodity,units\n";
    for (const auto& [key, m] : sol.manifests())
        for (size_t bi = 0; bi < m.bins.size(); ++bi)
            for (const auto& [cid, units] : m.bins[bi].contents)
                os << inst.network.arcs[key.arc].id << "," << key.week << "," << bi << ","
                   << inst.commodities[cid].id << "," << units << "\n";
    atomic_write(path, os.str());
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace stpp
