#include <doctest.h>

#include <algorithm>

#include "whitney/harness.hpp"
#include "whitney/partition.hpp"
#include "whitney/rng.hpp"

using namespace whitney;

TEST_CASE("smooth step is symmetric and flat outside [0, 1]") {
    for (double u : {0.1, 0.3, 0.5, 0.77}) {
        CHECK(smooth_step(u, 0)[0] + smooth_step(1.0 - u, 0)[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(smooth_step(0.5, 0)[0] == doctest::Approx(0.5));
    CHECK(smooth_step(-0.2, 3)[0] == 0.0);
    CHECK(smooth_step(1.2, 3)[0] == 1.0);
    CHECK(smooth_step(1.2, 3)[1] == 0.0);
}

TEST_CASE("bump of the unit interval") {
    DyadicCube q(0, {0});
    CHECK(phi(q, Point{0.5}, 0).value() == 1.0);
    CHECK(phi(q, Point{1.0}, 0).value() == 1.0);
    // t = 1.05, halfway through the transition
    CHECK(phi(q, Point{1.025}, 0).value() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(phi(q, Point{1.05}, 0).value() == 0.0);
    CHECK(phi(q, Point{-0.06}, 0).value() == 0.0);
    CHECK(in_support(q, Point{1.049}));
    CHECK_FALSE(in_support(q, Point{1.05}));
}

TEST_CASE("covering cubes agree with a scan of containing cubes and their neighbors") {
    SiteSpec spec;
    spec.count = 7;
    spec.seed = 13;
    auto w = WhitneyDecomposition::build(SpaceParams(2, 1.5, 6), generate_sites(spec, 2, 1), 1, 8);
    SampleRng rng(3, 0);
    for (int k = 0; k < 300; ++k) {
        Point x{rng.uniform() * 4.0 - 2.0, rng.uniform() * 4.0 - 2.0};
        auto holding = w.locate(x);
        if (holding.empty() || std::any_of(holding.begin(), holding.end(),
                                           [&](const DyadicCube& q) { return q.level >= w.max_depth() - 1; })) {
            continue;
        }
        std::vector<DyadicCube> scan;
        for (const auto& q : holding) {
            scan.push_back(q);
            for (const auto& r : w.neighbors(q)) {
                scan.push_back(r);
            }
        }
        std::erase_if(scan, [&](const DyadicCube& q) { return !in_support(q, x); });
        std::sort(scan.begin(), scan.end(), cube_less);
        scan.erase(std::unique(scan.begin(), scan.end(),
                               [](const DyadicCube& a, const DyadicCube& b) { return a.level == b.level && a.a == b.a; }),
                   scan.end());
        auto got = covering_cubes(w, x);
        REQUIRE(got.size() == scan.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].level == scan[i].level);
            CHECK(got[i].a == scan[i].a);
        }
    }
}

TEST_CASE("partition of unity and its derivatives") {
    SiteSpec spec;
    spec.count = 6;
    spec.seed = 2;
    auto w = WhitneyDecomposition::build(SpaceParams(2, 1.5, 6), generate_sites(spec, 2, 1), 1, 9);
    auto unity = partition_unity_check(w, 2000, 4);
    CHECK(unity.pass);
    CHECK(unity.max_error <= 1e-12);
    auto fd = finite_difference_check(w, 40, 4);
    CHECK(fd.pass);
    auto bounds = verify_derivative_bounds(w, 2);
    CHECK(bounds.pass);
    CHECK(bounds.rows.size() == 3);
}

TEST_CASE("theta vanishes away from the dilated cube") {
    auto w = WhitneyDecomposition::build(SpaceParams(1, 1.5, 4), {Point{0.0}}, 3, 8);
    const auto& q = w.cubes().front();
    Point far{q.center()[0] + 2.0 * q.side()};
    if (w.in_domain(far)) {
        CHECK(theta(w, q, far, 2).value() == 0.0);
    }
    CHECK(theta(w, q, q.center(), 2).value() > 0.0);
}
