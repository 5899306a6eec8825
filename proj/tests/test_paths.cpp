#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "whitney/harness.hpp"

using namespace whitney;

namespace {

WhitneyDecomposition line(std::vector<Point> sites, int max_depth = 10) {
    return WhitneyDecomposition::build(SpaceParams(1, 1.5, 4), std::move(sites), 2, max_depth);
}

bool same(const DyadicCube& a, const DyadicCube& b) { return a.level == b.level && a.a == b.a; }

} // namespace

TEST_CASE("on the line the path is every cube crossed by the segment") {
    auto w = line({Point{0.0}, Point{0.8125}, Point{-1.5}});
    auto targets = sample_cubes_by_level(w, 60, 3);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto& p = targets[k];
        auto s = sample_A_P(w, p, 5, k);
        auto path = build_path(w, p, s.x);
        const double x = s.x[0];
        const double xp = w.anchor(p)[0];
        const double lo = std::min(x, xp), hi = std::max(x, xp);
        std::vector<DyadicCube> crossed;
        for (const auto& q : w.cubes()) {
            if (q.box().lo[0] < hi && q.box().hi[0] > lo) {
                crossed.push_back(q);
            }
        }
        // order along the segment: distance from x to each interval
        auto gap = [&](const DyadicCube& q) {
            return std::max({0.0, q.box().lo[0] - x, x - q.box().hi[0]});
        };
        std::sort(crossed.begin(), crossed.end(),
                  [&](const DyadicCube& a, const DyadicCube& b) { return gap(a) < gap(b); });
        REQUIRE(path.cubes.size() == crossed.size());
        for (std::size_t j = 0; j < crossed.size(); ++j) {
            CHECK(same(path.cubes[j], crossed[j]));
        }
        CHECK(path.truncation == Truncation::DiameterFloor);
    }
}

TEST_CASE("the two-ring is the neighbors of neighbors") {
    SiteSpec spec;
    spec.count = 5;
    spec.seed = 4;
    auto w = WhitneyDecomposition::build(SpaceParams(2, 1.5, 6), generate_sites(spec, 2, 1), 1, 8);
    for (std::size_t i = 0; i < w.cubes().size(); i += 811) {
        const auto& p = w.cubes()[i];
        std::vector<DyadicCube> hull{p};
        for (const auto& q : w.neighbors(p)) {
            hull.push_back(q);
            for (const auto& r : w.neighbors(q)) {
                hull.push_back(r);
            }
        }
        std::sort(hull.begin(), hull.end(), cube_less);
        hull.erase(std::unique(hull.begin(), hull.end(), same), hull.end());
        auto ring = two_ring(w, p);
        REQUIRE(ring.size() == hull.size());
        for (std::size_t j = 0; j < ring.size(); ++j) {
            CHECK(same(ring[j], hull[j]));
        }
    }
}

TEST_CASE("planar paths pass every structural check") {
    SiteSpec spec;
    spec.count = 8;
    spec.seed = 6;
    auto w = WhitneyDecomposition::build(SpaceParams(2, 1.5, 6), generate_sites(spec, 2, 1), 1, 9);
    auto targets = sample_cubes_by_level(w, 40, 8);
    std::vector<CubePath> corpus;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        auto s = sample_A_P(w, targets[k], 8, k);
        CHECK(within_A_P_scale(w, targets[k], s.grid));
        auto path = build_path(w, targets[k], s.x);
        auto c = check_path(w, path, 200);
        INFO(c.detail);
        CHECK(c.pass());
        corpus.push_back(std::move(path));
    }
    auto fit = fit_decay(corpus);
    CHECK(fit.a < 1.0);
    for (const auto& p : corpus) {
        CHECK(decay_holds(p, fit));
    }
}

TEST_CASE("single-site paths on the line have blocks of ten") {
    auto w = WhitneyDecomposition::build(SpaceParams(1, 1.5, 4), {Point{0.0}}, 5, 12);
    auto targets = sample_cubes_by_level(w, 50, 2);
    std::vector<CubePath> corpus;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        corpus.push_back(build_path(w, targets[k], sample_A_P(w, targets[k], 2, k).x));
    }
    auto fit = fit_decay(corpus);
    CHECK(fit.C_n == 10);
    CHECK(fit.a == std::exp2(-0.1));
}

TEST_CASE("exit parameters are exact fractions") {
    Grid g(1, 2);
    DyadicCube q(0, {0});
    GridPoint x{1, {g.side(2)}};
    GridPoint t{1, {4 * g.side(0)}};
    auto e = exit_parameter(g, q, x, t);
    // from 1/4 towards 4, leaving [0, 1] at 1
    CHECK(e == PathParam{1, 5});
    CHECK(e.value() == doctest::Approx(0.2));
    CHECK(segment_point_in(g, q, x, t, PathParam{1, 5}));
    CHECK_FALSE(segment_point_in(g, q, x, t, PathParam{1, 4}));
}

TEST_CASE("polynomial data leave nothing for the chain sum to bound") {
    auto w = line({Point{0.0}, Point{0.75}}, 10);
    auto targets = sample_cubes_by_level(w, 4, 9);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        auto x = sample_A_P(w, targets[k], 9, k).x;
        auto r = lemma12_check(w, targets[k], x, random_polynomial(1, 1, 4, k));
        CHECK(r.lhs == 0.0);
        CHECK(r.lhs_zero);
        auto g = lemma12_check(w, targets[k], x, std::make_shared<Gaussian>(Point{0.3}, 0.7));
        CHECK(std::isfinite(g.fine.ratio));
        CHECK(g.stable);
    }
}

TEST_CASE("paths reject origins on sites or off the grid") {
    auto w = line({Point{0.0}});
    const auto& p = w.cubes().front();
    CHECK_THROWS(build_path(w, p, Point{0.0}));
    CHECK_THROWS(build_path(w, p, Point{0.1}));
}
