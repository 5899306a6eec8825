#include <doctest.h>

#include <cmath>

#include "whitney/harness.hpp"

using namespace whitney;

namespace {

// int_0^1 int_a^{a+1} |x - y|^{-gamma} dy dx for a >= 1, gamma not in {1, 2}
double interval_pair(double a, double gamma) {
    auto F = [&](double d) { return d > 0.0 ? std::pow(d, 2.0 - gamma) : 0.0; };
    return (F(a + 1.0) - 2.0 * F(a) + F(a - 1.0)) / ((1.0 - gamma) * (2.0 - gamma));
}

} // namespace

TEST_CASE("kernel integrals of interval pairs match the closed form") {
    for (double gamma : {-1.0, 0.5, 1.5}) {
        KernelIntegrator k(1, gamma);
        for (std::int64_t a : {1, 2, 5}) {
            if (a == 1 && gamma >= 1.0) {
                continue;
            }
            std::int64_t e[1] = {a};
            INFO("gamma " << gamma << " offset " << a);
            CHECK(k.unit_offset(e) == doctest::Approx(interval_pair(static_cast<double>(a), gamma)).epsilon(1e-9));
        }
    }
    std::int64_t touching[1] = {1};
    CHECK_THROWS(KernelIntegrator(1, 1.5).unit_offset(touching));
    KernelIntegrator k(1, 0.5);
    Box a{1, {0.0}, {1.0}}, b{1, {3.0}, {4.0}};
    CHECK(k.separated(a, b) == doctest::Approx(interval_pair(3.0, 0.5)).epsilon(1e-9));
}

TEST_CASE("seminorm of the identity on the unit interval") {
    SpaceParams params(1, 0.5, 2);
    auto line = std::make_shared<Polynomial>(1, std::vector<std::pair<MultiIndex, double>>{{MultiIndex{1}, 1.0}});
    AnalyticField f(line, 0);
    Region unit(Box{1, {0.0}, {1.0}});
    auto tq = gagliardo(f, unit, params, Method::TensorQuad, 100000, 1);
    CHECK(tq.value == doctest::Approx(1.0).epsilon(1e-3));
    auto mc = gagliardo(f, unit, params, Method::PlainMC, 100000, 1);
    CHECK(std::abs(mc.value - 1.0) <= 2.0 * mc.error_bound);
}

TEST_CASE("polynomials below the top order have zero seminorm") {
    SpaceParams params(2, 1.5, 4);
    auto affine = random_polynomial(2, 1, 2, 0);
    AnalyticField f(affine, 1);
    Region box(Box{2, {-1.0, -1.0}, {1.0, 1.0}});
    for (Method m : {Method::PlainMC, Method::ImportanceMC, Method::TensorQuad}) {
        auto e = gagliardo(f, box, params, m, 20000, 3);
        CHECK(e.value == 0.0);
    }
}

TEST_CASE("estimators agree on a smooth planar field") {
    SpaceParams params(2, 0.5, 4);
    AnalyticField f(std::make_shared<Gaussian>(Point{0.1, 0.0}, 0.8), 0);
    Region box(Box{2, {-1.0, -1.0}, {1.0, 1.0}});
    auto a = gagliardo(f, box, params, Method::PlainMC, 200000, 5);
    auto b = gagliardo(f, box, params, Method::TensorQuad, 200000, 5);
    CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound);
}

TEST_CASE("method names parse and print") {
    for (Method m : {Method::PlainMC, Method::ImportanceMC, Method::TensorQuad}) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK_THROWS(parse_method("simpson"));
}

TEST_CASE("cube pair ratios are self-similar around one site") {
    SpaceParams params(1, 1.5, 4);
    auto w = WhitneyDecomposition::build(params, {Point{0.0}}, 6, 10);
    std::vector<int> levels{0, 1, 2};
    auto r = lemma7_scale_check(w, params, levels, 6);
    CHECK(r.pass);
    CHECK(r.bounded);
    CHECK(r.touching_spread < 0.10);
    CHECK(r.far_spread < 0.10);
}
