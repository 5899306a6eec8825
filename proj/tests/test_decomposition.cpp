#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "whitney/error.hpp"
#include "whitney/harness.hpp"
#include "whitney/rng.hpp"

using namespace whitney;

namespace {

WhitneyDecomposition random_2d(std::size_t count, std::uint64_t seed, int max_depth = 8) {
    SiteSpec spec;
    spec.count = count;
    spec.seed = seed;
    return WhitneyDecomposition::build(SpaceParams(2, 1.5, 6), generate_sites(spec, 2, 1), 1, max_depth);
}

} // namespace

TEST_CASE("single site on the line matches the brute-force scan") {
    for (int L : {0, 2, 4}) {
        auto w = WhitneyDecomposition::build(SpaceParams(1, 1.5, 4), {Point{0.0}}, L, 9);
        std::set<std::tuple<int, std::int64_t>> got;
        for (const auto& q : w.cubes()) {
            got.emplace(q.level, q.a[0]);
        }
        CHECK(got == oracle::scan_single_site_1d(L, 9));
        CHECK(got == oracle::closed_form_single_site_1d(L, 9));
    }
}

TEST_CASE("random planar sites satisfy the exact cube properties") {
    auto w = random_2d(12, 4);
    auto b = oracle::whitney_bounds(w);
    CHECK(b.checked == w.cubes().size());
    CHECK(b.violations == 0);
    CHECK(oracle::nested_pairs(w) == 0);
    CHECK(oracle::touching_level_jumps(w) == 0);
    auto rep = w.verify_structure();
    for (const auto& c : rep.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
    CHECK(rep.max_neighbors <= 12);
}

TEST_CASE("a corrupted cube list fails exactly the bound and overlap checks") {
    auto w = random_2d(6, 9);
    auto cubes = w.cubes();
    auto it = std::find_if(cubes.begin(), cubes.end(), [](const DyadicCube& q) { return q.level == 5; });
    REQUIRE(it != cubes.end());
    *it = it->parent();
    auto bad = WhitneyDecomposition::from_parts(w.params(), w.sites(), w.domain_exp(), w.max_depth(), w.depth_cap(),
                                                cubes, w.fringe());
    VerifyOptions opts;
    opts.neighbor_scan = false;
    auto rep = bad.verify_structure(opts);
    std::vector<std::string> failed;
    for (const auto& c : rep.checks) {
        if (!c.pass) {
            failed.push_back(c.name);
        }
    }
    std::sort(failed.begin(), failed.end());
    CHECK(failed == std::vector<std::string>{"disjoint_interiors", "whitney_bounds"});
    CHECK(oracle::nested_pairs(bad) > 0);
    CHECK(oracle::whitney_bounds(bad).violations == 1);
}

TEST_CASE("neighbors touch, are symmetric and respect the level ratio") {
    auto w = random_2d(5, 2);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < w.cubes().size(); i += 97) {
        const auto& q = w.cubes()[i];
        for (const auto& r : w.neighbors(q)) {
            CHECK(cubes_touch(q, r));
            CHECK(std::abs(q.level - r.level) <= 1);
            auto back = w.neighbors(r);
            CHECK(std::find_if(back.begin(), back.end(), [&](const DyadicCube& c) {
                      return c.level == q.level && c.a == q.a;
                  }) != back.end());
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("locate returns the cubes whose closed box holds the point") {
    auto w = random_2d(5, 3);
    SampleRng rng(5, 0);
    for (int k = 0; k < 200; ++k) {
        Point x{rng.uniform() * 4.0 - 2.0, rng.uniform() * 4.0 - 2.0};
        for (const auto& q : w.locate(x)) {
            CHECK(q.box().contains(x));
            CHECK(w.is_cube(q));
        }
    }
}

TEST_CASE("anchors realize the distance to the site set") {
    auto w = random_2d(8, 6);
    for (std::size_t i = 0; i < w.cubes().size(); i += 53) {
        const auto& q = w.cubes()[i];
        i128 best = oracle::dist2_scan(w.grid().box(q), w.grid_sites());
        CHECK(w.dist2_to_sites(q) == best);
        auto site = w.grid().to_grid(w.anchor(q));
        REQUIRE(site);
        CHECK(dist2(w.grid().box(q), *site) == best);
    }
}

TEST_CASE("sites off the grid or outside the domain are rejected") {
    CHECK_THROWS_AS(WhitneyDecomposition::build(SpaceParams(1, 1.5, 4), {Point{5.0}}, 1, 6), Error);
}
