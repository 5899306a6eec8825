#include <doctest.h>

#include <cmath>

#include "whitney/harness.hpp"
#include "whitney/rng.hpp"

using namespace whitney;

namespace {

std::shared_ptr<const WhitneyDecomposition> planar(std::size_t count, std::uint64_t seed, double s = 1.5) {
    SiteSpec spec;
    spec.count = count;
    spec.seed = seed;
    return build_decomposition([&] {
        Scenario sc;
        sc.params = SpaceParams(2, s, 6);
        sc.sites = spec;
        sc.max_depth = 9;
        return sc;
    }());
}

} // namespace

TEST_CASE("affine functions are reproduced") {
    auto w = planar(6, 1);
    for (std::uint64_t k = 0; k < 5; ++k) {
        auto poly = random_polynomial(2, 1, 3, k);
        auto r = polynomial_reproduction(w, poly, 300, k);
        CHECK(r.pass);
        CHECK(r.max_error <= 1e-10 * (1.0 + r.max_value));
    }
}

TEST_CASE("Tf takes the jet data on the sites") {
    auto w = planar(4, 2);
    Gaussian g(Point{0.2, 0.1}, 0.6);
    ExtensionField tf(w, JetField::from_function(w->params(), g, w->sites()));
    for (const auto& x : w->sites()) {
        CHECK(tf.eval(x, MultiIndex{0, 0}) == doctest::Approx(g.value(x)).epsilon(1e-15));
        CHECK(tf.eval(x, MultiIndex{1, 0}) == doctest::Approx(g.derivative(x, MultiIndex{1, 0})).epsilon(1e-15));
    }
}

TEST_CASE("constant jets give a constant extension") {
    auto w = planar(5, 3);
    auto c = Polynomial::constant(2, 2.5);
    ExtensionField tf(w, JetField::from_function(w->params(), c, w->sites()));
    SampleRng rng(9, 0);
    for (int k = 0; k < 200; ++k) {
        Point x{rng.uniform() * 3.8 - 1.9, rng.uniform() * 3.8 - 1.9};
        if (w->site_at(x) >= 0) {
            continue;
        }
        CHECK(tf.eval(x, MultiIndex{0, 0}) == doctest::Approx(2.5).epsilon(1e-14));
        CHECK(std::abs(tf.eval(x, MultiIndex{0, 1})) < 1e-10);
    }
}

TEST_CASE("jet agreement orders for a Gaussian") {
    auto w = planar(4, 5);
    Gaussian g(Point{0.0, 0.3}, 0.9);
    ExtensionField tf(w, JetField::from_function(w->params(), g, w->sites()));
    for (int site = 0; site < 4; ++site) {
        auto radii = jet_radii(*w, site);
        for (const auto& i : multi_indices_up_to(2, 1)) {
            auto r = jet_agreement_check(tf, site, i, radii, &g);
            INFO("site " << site << " index " << i.key() << " order " << r.order_true);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("fitted order of an exact power law") {
    std::vector<double> r{1.0, 0.5, 0.25, 0.125};
    std::vector<double> e;
    for (double x : r) {
        e.push_back(3.0 * x * x * std::sqrt(x));
    }
    CHECK(fitted_order(r, e) == doctest::Approx(2.5));
    std::vector<double> zeros(4, 0.0);
    CHECK(std::isinf(fitted_order(r, zeros)));
}

TEST_CASE("jet fields combine linearly") {
    auto w = planar(3, 7);
    Gaussian a(Point{0.0, 0.0}, 1.0);
    Gaussian b(Point{0.5, 0.0}, 0.5);
    auto fa = JetField::from_function(w->params(), a, w->sites());
    auto fb = JetField::from_function(w->params(), b, w->sites());
    auto sum = JetField::combine(2.0, fa, -1.0, fb);
    ExtensionField ta(w, fa), tb(w, fb), ts(w, sum);
    Point x{0.91, -0.37};
    MultiIndex k{1, 0};
    CHECK(ts.eval(x, k) == doctest::Approx(2.0 * ta.eval(x, k) - tb.eval(x, k)).epsilon(1e-12));
}
