#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "whitney/harness.hpp"

using namespace whitney;

namespace {

Scenario small_line() {
    Scenario sc;
    sc.name = "small-line";
    sc.params = SpaceParams(1, 1.5, 4);
    sc.sites.kind = "list";
    sc.sites.points = {Point{0.0}, Point{0.375}};
    sc.function = Json{{"name", "gaussian"}, {"center", {0.2}}, {"width", 0.8}};
    sc.domain_exp = 1;
    sc.max_depth = 9;
    sc.estimator.budget = 20000;
    sc.checks.unity_samples = 500;
    sc.checks.fd_samples = 20;
    sc.checks.reproduction_points = 200;
    sc.checks.path_count = 10;
    sc.checks.chain_checks = 1;
    sc.checks.pair_cubes = 2;
    return sc;
}

} // namespace

TEST_CASE("decomposition survives a JSON round trip") {
    auto w = build_decomposition(small_line());
    Json j = decomposition_to_json(*w);
    auto back = decomposition_from_json(Json::parse(j.dump()));
    REQUIRE(back.cubes().size() == w->cubes().size());
    for (std::size_t i = 0; i < back.cubes().size(); ++i) {
        CHECK(back.cubes()[i].id() == w->cubes()[i].id());
        CHECK(back.anchor_index(i) == w->anchor_index(i));
    }
    CHECK(back.fringe().size() == w->fringe().size());
    CHECK(back.verify_structure().all_pass());
}

TEST_CASE("jets and functions survive a JSON round trip") {
    SpaceParams params(2, 1.5, 6);
    Gaussian g(Point{0.1, -0.2}, 0.7, 2.0);
    std::vector<Point> sites{Point{0.0, 0.0}, Point{0.5, 0.25}};
    auto jets = JetField::from_function(params, g, sites);
    auto back = jets_from_json(Json::parse(jets_to_json(jets).dump()), params);
    REQUIRE(back.jets().size() == 2);
    CHECK(jet_eval(back.jets()[1], Point{0.3, 0.3}) == jet_eval(jets.jets()[1], Point{0.3, 0.3}));
    CHECK_FALSE(back.validated());

    auto f = function_from_json(function_to_json(g), 2);
    CHECK(f->value(Point{0.4, 0.1}) == g.value(Point{0.4, 0.1}));
    Json sum{{"name", "sum"},
             {"parts",
              {{{"weight", 2.0}, {"function", {{"name", "constant"}, {"value", 1.5}}}},
               {{"weight", -1.0}, {"function", {{"name", "polynomial"}, {"terms", {{{"index", {1, 0}}, {"coeff", 3.0}}}}}}}}}};
    auto s = function_from_json(sum, 2);
    CHECK(s->value(Point{0.5, 9.0}) == doctest::Approx(3.0 - 1.5));
    CHECK_THROWS(function_from_json(Json{{"name", "sinc"}}, 2));
}

TEST_CASE("scenario files round trip and require a schema") {
    Scenario sc = small_line();
    Json j = sc.to_json();
    Scenario back = Scenario::from_json(j);
    CHECK(back.to_json() == j);
    j.erase("schema");
    CHECK_THROWS(Scenario::from_json(j));
}

TEST_CASE("a rerun produces the identical report") {
    Scenario sc = small_line();
    auto a = to_json(verify_all(sc)).dump(2);
    auto b = to_json(verify_all(sc)).dump(2);
    CHECK(a == b);
    auto r1 = to_json(run_bound_experiment(sc)).dump();
    auto r2 = to_json(run_bound_experiment(sc)).dump();
    CHECK(r1 == r2);
}

TEST_CASE("the small scenario passes every module check") {
    auto rep = verify_all(small_line());
    for (const auto& e : rep.entries) {
        INFO(e.module << "/" << e.name << ": " << e.detail);
        CHECK(e.pass);
    }
    CHECK(rep.pass);
}

TEST_CASE("constant data give a degenerate ratio and zero terms") {
    Scenario sc = small_line();
    sc.function = Json{{"name", "constant"}, {"value", 3.0}};
    auto rep = run_bound_experiment(sc);
    CHECK(rep.status == "degenerate: both vanish");
    CHECK(std::isnan(rep.rho));
    auto t = run_term_split(sc);
    // sum theta = 1 only to rounding, so Tf is constant to about 1e-16
    for (const auto* e : {&t.i_extension, &t.ii, &t.iii, &t.iv, &t.whole}) {
        CHECK(e->value < 1e-8);
    }
    CHECK(t.f_whole.value_p == 0.0);
    CHECK(t.additive);
}

TEST_CASE("a Gaussian gives a finite ratio and an additive split") {
    Scenario sc = small_line();
    auto rep = run_bound_experiment(sc);
    CHECK(rep.status == "ok");
    CHECK(std::isfinite(rep.rho));
    CHECK(rep.rho > 0.0);
    auto t = run_term_split(sc);
    CHECK(t.additive);
    CHECK(t.i_below_f);
}

TEST_CASE("generated sites are reproducible and distinct") {
    SiteSpec spec;
    spec.count = 30;
    spec.seed = 12;
    auto a = generate_sites(spec, 2, 1);
    auto b = generate_sites(spec, 2, 1);
    CHECK(a == b);
    CHECK(a.size() == 30);
    spec.kind = "cantor";
    spec.stage = 3;
    auto c = generate_sites(spec, 1, 1);
    CHECK(c.size() == 16);
    spec.kind = "grid";
    spec.per_axis = 3;
    CHECK(generate_sites(spec, 2, 1).size() == 9);
}

TEST_CASE("svg rendering is planar only") {
    Scenario sc = small_line();
    auto w = build_decomposition(sc);
    CHECK_THROWS(render_decomposition_svg(*w));
    sc.params = SpaceParams(2, 1.5, 6);
    sc.sites.points = {Point{0.0, 0.0}};
    sc.max_depth = 6;
    auto w2 = build_decomposition(sc);
    auto svg = render_decomposition_svg(*w2);
    CHECK(svg.rfind("<svg", 0) == 0);
}
