#include <doctest.h>

#include "stpp/errors.hpp"
#include "stpp/packing.hpp"
#include "stpp/rng.hpp"

using namespace stpp;

namespace {

std::vector<PackItem> items(std::initializer_list<double> volumes) {
    std::vector<PackItem> out;
    int id = 0;
    for (double v : volumes) out.push_back({id++, v, 1});
    return out;
}

double manifest_volume_of(const BinManifest& m, int bin) { return m.bins[bin].used; }

}  // namespace

TEST_CASE("ffd_pack basics") {
    CHECK(ffd_pack({}, 1.0).bin_count() == 0);

    auto m = ffd_pack(items({0.6, 0.5, 0.4, 0.3}), 1.0);
    CHECK(m.bin_count() == 2);
    CHECK(manifest_volume_of(m, 0) == doctest::Approx(1.0));   // 0.6 + 0.4
    CHECK(manifest_volume_of(m, 1) == doctest::Approx(0.8));   // 0.5 + 0.3
    CHECK(exact_pack(items({0.6, 0.5, 0.4, 0.3}), 1.0) == 2);  // oracle agrees

    CHECK(ffd_pack({{1, 1.0, 3}}, 1.0).bin_count() == 3);
    CHECK_THROWS_AS(ffd_pack({{1, 1.5, 1}}, 1.0), ItemOversizeError);
}

TEST_CASE("bfd_pack basics") {
    CHECK(bfd_pack({}, 1.0).bin_count() == 0);
    CHECK(bfd_pack(items({0.6, 0.5, 0.4, 0.3}), 1.0).bin_count() == 2);

    auto m = bfd_pack(items({0.7, 0.3, 0.3}), 1.0);
    REQUIRE(m.bin_count() == 2);
    CHECK(manifest_volume_of(m, 0) == doctest::Approx(1.0));  // 0.7 + 0.3 (tightest fit)
    CHECK(manifest_volume_of(m, 1) == doctest::Approx(0.3));
}

TEST_CASE("bp lower bound") {
    CHECK(bp_lower_bound({{0, 0.8, 3}}, 1.0) == 3);   // 2.4 total
    CHECK(bp_lower_bound({}, 1.0) == 0);
    CHECK(bp_lower_bound(items({0.51, 0.51, 0.51, 0.51}), 1.0) == 3);
    CHECK(exact_pack(items({0.51, 0.51, 0.51, 0.51}), 1.0) == 4);  // bound not tight
}

TEST_CASE("exact_pack oracle") {
    CHECK(exact_pack({}, 1.0) == 0);
    CHECK(exact_pack(items({0.51, 0.51, 0.51, 0.51}), 1.0) == 4);
    CHECK(exact_pack(items({0.6, 0.5, 0.4, 0.3}), 1.0) == 2);
}

TEST_CASE("tentative_insert traces and atomic commit") {
    SUBCASE("empty manifest opens one bin") {
        BinManifest m;
        m.capacity = 1.0;
        auto p = tentative_insert(m, {{7, 0.4, 1}});
        CHECK(p.new_bins == 1);
        CHECK(m.bins.empty());  // nothing mutated yet
        p.apply(m);
        CHECK(m.bin_count() == 1);
        CHECK(m.units_of(7) == 1);
    }
    SUBCASE("fits the residual of an existing bin") {
        BinManifest m = ffd_pack({{1, 0.6, 1}}, 1.0);
        auto p = tentative_insert(m, {{2, 0.4, 1}});
        CHECK(p.new_bins == 0);
    }
    SUBCASE("two nearly full bins, two small items share one new bin") {
        BinManifest m = ffd_pack({{1, 0.9, 2}}, 1.0);
        auto p = tentative_insert(m, {{2, 0.2, 2}});
        CHECK(p.new_bins == 1);
        p.apply(m);
        CHECK(m.bin_count() == 3);
        CHECK(m.bins[2].used == doctest::Approx(0.4));
    }
    SUBCASE("discarding a placement leaves the manifest untouched") {
        BinManifest m = ffd_pack({{1, 0.6, 1}}, 1.0);
        BinManifest before = m;
        { auto p = tentative_insert(m, {{2, 0.3, 4}}); }
        CHECK(m.bin_count() == before.bin_count());
        CHECK(m.bins[0].used == before.bins[0].used);
    }
    SUBCASE("K_a exhaustion") {
        BinManifest m;
        m.capacity = 1.0;
        m.max_bins = 1;
        CHECK_THROWS_AS(tentative_insert(m, {{1, 0.8, 2}}), CapacityExhaustedError);
    }
}

TEST_CASE("removal refills with FFD and never adds bins") {
    auto volume_of = [](int id) { return id == 1 ? 0.5 : 0.4; };
    BinManifest m;
    m.capacity = 1.0;
    m.bins.resize(2);
    m.bins[0].add(1, 1, 0.5);
    m.bins[0].add(2, 1, 0.4);
    m.bins[1].add(2, 1, 0.4);

    SUBCASE("removing a shared-bin commodity keeps the arrangement") {
        BinManifest copy = m;
        remove_commodities(copy, {2}, volume_of);
        CHECK(copy.bin_count() == 1);
        CHECK(copy.units_of(1) == 1);
        CHECK(copy.units_of(2) == 0);
    }
    SUBCASE("removing everything empties the manifest") {
        BinManifest copy = m;
        remove_commodities(copy, {1, 2}, volume_of);
        CHECK(copy.bin_count() == 0);
    }
}

TEST_CASE("repack_best merges fragmented bins") {
    auto volume_of = [](int) { return 0.5; };
    BinManifest m;
    m.capacity = 1.0;
    m.bins.resize(2);
    m.bins[0].add(1, 1, 0.5);
    m.bins[1].add(2, 1, 0.5);
    CHECK(repack_best(m, volume_of) == -1);
    CHECK(m.bin_count() == 1);
    // Already at the volume bound: nothing to do.
    CHECK(repack_best(m, volume_of) == 0);
}

TEST_CASE("random instances: FFD guarantee and oracle sandwich") {
    Rng rng(20240817);
    for (int round = 0; round < 300; ++round) {
        int n = 1 + static_cast<int>(rng.below(12));
        std::vector<PackItem> inst;
        for (int i = 0; i < n; ++i) inst.push_back({i, rng.uniform(0.05, 1.0), 1});
        long long opt = exact_pack(inst, 1.0);
        long long ffd = ffd_pack(inst, 1.0).bin_count();
        long long bfd = bfd_pack(inst, 1.0).bin_count();
        long long lb = bp_lower_bound(inst, 1.0);
        CHECK(lb <= opt);
        CHECK(opt <= ffd);
        CHECK(opt <= bfd);
        // FFD(I) <= 11/9 OPT + 6/9
        CHECK(9 * ffd <= 11 * opt + 6);
    }
}

TEST_CASE("packing determinism under fixed input order") {
    std::vector<PackItem> inst = {{3, 0.4, 2}, {1, 0.7, 1}, {2, 0.4, 1}, {0, 0.2, 3}};
    auto a = ffd_pack(inst, 1.0);
    auto b = ffd_pack(inst, 1.0);
    REQUIRE(a.bin_count() == b.bin_count());
    for (size_t i = 0; i < a.bins.size(); ++i) {
        CHECK(a.bins[i].used == b.bins[i].used);
        CHECK(a.bins[i].contents == b.bins[i].contents);
    }
}
