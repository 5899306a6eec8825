#include <doctest.h>

#include <cmath>

#include "whitney/core.hpp"
#include "whitney/error.hpp"
#include "whitney/rng.hpp"
#include "whitney/test_functions.hpp"

using namespace whitney;

TEST_CASE("multi-index keys and graded enumeration") {
    MultiIndex k{2, 0, 1};
    CHECK(k.order() == 3);
    CHECK(k.factorial() == doctest::Approx(2.0));
    CHECK(MultiIndex::parse_key(k.key()) == k);
    CHECK(multi_indices_up_to(2, 2).size() == 6);
    CHECK(multi_indices_of_order(3, 2).size() == 6);
    auto order1 = multi_indices_of_order(2, 1);
    CHECK(order1.front() == MultiIndex{1, 0});
}

TEST_CASE("dyadic cube ids, parents and children") {
    DyadicCube q(3, {-5, 2});
    CHECK(DyadicCube::parse_id(q.id()).a == q.a);
    CHECK(q.parent().level == 2);
    CHECK(q.parent().a[0] == -3);
    CHECK(q.parent().a[1] == 1);
    CHECK(q.side() == 0.125);
    for (unsigned mask = 0; mask < 4; ++mask) {
        CHECK(cube_contains(q, q.child(mask)));
    }
    CHECK(cubes_touch(DyadicCube(0, {0, 0}), DyadicCube(1, {2, 1})));
    CHECK_FALSE(cubes_touch(DyadicCube(0, {0, 0}), DyadicCube(1, {3, 1})));
    CHECK_THROWS_AS(DyadicCube::parse_id("3:1,x"), Error);
}

TEST_CASE("jets of a polynomial reproduce it") {
    Polynomial f(2, {{MultiIndex{0, 0}, 1.5}, {MultiIndex{1, 0}, -2.0}, {MultiIndex{1, 1}, 0.25}});
    Jet j = Jet::from_function(f, Point{0.3, -0.2}, 2);
    for (Point x : {Point{0.0, 0.0}, Point{1.0, -2.0}, Point{-0.7, 0.4}}) {
        CHECK(jet_eval(j, x) == doctest::Approx(f.value(x)).epsilon(1e-14));
    }
    Jet d = jet_derivative(j, MultiIndex{1, 0});
    CHECK(jet_eval(d, Point{0.5, 0.5}) == doctest::Approx(-2.0 + 0.25 * 0.5));
}

TEST_CASE("space parameters and the standing hypothesis") {
    SpaceParams a(2, 1.5, 6);
    CHECK(a.floor_s() == 1);
    CHECK(a.frac_s() == doctest::Approx(0.5));
    CHECK(a.standing_hypothesis());
    SpaceParams b(1, 0.5, 2);
    CHECK_FALSE(b.standing_hypothesis());
    CHECK_THROWS_AS(b.require_standing_hypothesis(), Error);
}

TEST_CASE("philox known-answer vectors") {
    auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);
    auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("sample streams depend only on seed and index") {
    SampleRng a(7, 12), b(7, 12), c(7, 13);
    double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    SampleRng r(1, 0);
    for (int i = 0; i < 1000; ++i) {
        CHECK(r.below(5) < 5);
    }
}

TEST_CASE("mean-value witness of the Taylor remainder") {
    Gaussian g(Point{0.0}, 1.0);
    auto w = taylor_remainder_witness(g, Point{0.4}, Point{0.1}, 1);
    CHECK(w.t > 0.0);
    CHECK(w.t < 1.0);
    CHECK(std::abs(w.residual) < 1e-10);
}
