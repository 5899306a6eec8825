// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "whitney/harness.hpp"
#include "whitney/rng.hpp"

using namespace whitney;

namespace {

constexpr double kUnityTol = 1e-12;
constexpr double kFiniteDifferenceTol = 1e-5;
constexpr double kDerivativeSpread = 1.25;
constexpr double kReproductionTol = 1e-10;
constexpr double kJetMargin = 0.5;
constexpr double kCalibrationTol = 0.01;
constexpr double kScaleSpreadTol = 0.10;
constexpr double kTruncationTol = 0.20;
constexpr double kGrowthTol = 2.0;
constexpr double kDecompositionSeconds = 60.0;
constexpr double kSuiteSeconds = 30.0 * 60.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::shared_ptr<const WhitneyDecomposition> random_decomposition(int n, double s, double p, std::size_t count,
                                                               std::uint64_t seed, int domain_exp, int max_depth) {
    SiteSpec spec;
    spec.count = count;
    spec.seed = seed;
    return std::make_shared<const WhitneyDecomposition>(WhitneyDecomposition::build(
        SpaceParams(n, s, p), generate_sites(spec, n, domain_exp), domain_exp, max_depth));
}

Outcome decomposition_exactness() {
    auto t0 = Clock::now();
    std::size_t scenarios = 0, cubes = 0, bound_bad = 0, nested = 0, jumps = 0, lib_bad = 0;
    for (int n = 1; n <= 3; ++n) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            // 3-D shells hold ~10^5 cubes per site and level, so the 3-D runs keep few sites on a small domain
            std::size_t count = n == 3 ? 1 + seed % 2 : 5 * seed;
            int domain_exp = n == 3 ? -2 : 1;
            auto w = random_decomposition(n, 1.5, 4, count, 100 * n + seed, domain_exp, 12);
            auto b = oracle::whitney_bounds(*w);
            bound_bad += b.violations;
            cubes += b.checked;
            nested += oracle::nested_pairs(*w);
            jumps += oracle::touching_level_jumps(*w);
            VerifyOptions vo;
            vo.neighbor_scan = n < 3;
            auto rep = w->verify_structure(vo);
            for (const char* name : {"whitney_bounds", "disjoint_interiors", "maximality"}) {
                const auto* c = rep.find(name);
                lib_bad += (c && c->pass) ? 0 : 1;
            }
            ++scenarios;
        }
    }
    double secs = seconds_since(t0);
    Outcome o;
    o.pass = bound_bad == 0 && nested == 0 && jumps == 0 && lib_bad == 0 && secs <= kDecompositionSeconds;
    o.detail = std::to_string(scenarios) + " scenarios, " + std::to_string(cubes) + " cubes; bound violations " +
               std::to_string(bound_bad) + ", nested " + std::to_string(nested) + ", touching level jumps " +
               std::to_string(jumps) + ", library check failures " + std::to_string(lib_bad) + "; " + fmt(secs) +
               " s";
    return o;
}

Outcome single_site_oracle() {
    const int L = 3, Lmax = 12;
    auto w = WhitneyDecomposition::build(SpaceParams(1, 1.5, 4), {Point{0.0}}, L, Lmax);
    std::set<std::tuple<int, std::int64_t>> got;
    for (const auto& q : w.cubes()) {
        got.emplace(q.level, q.a[0]);
    }
    auto scan = oracle::scan_single_site_1d(L, Lmax);
    auto closed = oracle::closed_form_single_site_1d(L, Lmax);
    Outcome o;
    o.pass = got == scan && scan == closed;
    o.detail = std::to_string(got.size()) + " cubes enumerated, scan " + std::to_string(scan.size()) +
               ", closed form " + std::to_string(closed.size());
    return o;
}

Outcome partition_of_unity() {
    Outcome o{true, ""};
    std::ostringstream d;
    struct Case {
        int n;
        double s, p;
        std::size_t sites;
    };
    for (Case c : {Case{2, 1.5, 6, 20}, Case{1, 2.5, 2, 8}}) {
        auto w = random_decomposition(c.n, c.s, c.p, c.sites, 7, 1, 10);
        auto unity = partition_unity_check(*w, 10000, 1, kUnityTol);
        auto fd = finite_difference_check(*w, 100, 1, kFiniteDifferenceTol);
        DerivativeBoundOptions opts;
        opts.levels = 4;
        opts.tolerance = kDerivativeSpread;
        auto bounds = verify_derivative_bounds(*w, w->params().floor_s() + 1, opts);
        double spread = 1.0;
        for (const auto& row : bounds.rows) {
            spread = std::max(spread, row.spread);
        }
        o.pass = o.pass && unity.pass && fd.pass && bounds.pass;
        d << "n=" << c.n << ": unity " << fmt(unity.max_error) << ", fd " << fmt(fd.max_error) << ", spread "
          << fmt(spread) << "; ";
    }
    o.detail = d.str();
    return o;
}

Outcome polynomial_reproduction_corpus() {
    Outcome o{true, ""};
    std::ostringstream d;
    struct Case {
        int n;
        double s, p;
        std::size_t sites;
    };
    for (Case c : {Case{2, 1.5, 6, 20}, Case{1, 2.5, 2, 10}}) {
        auto w = random_decomposition(c.n, c.s, c.p, c.sites, 3, 1, 10);
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 20; ++k) {
            auto poly = random_polynomial(c.n, static_cast<int>(k % (w->params().floor_s() + 1)), 5, k);
            auto r = polynomial_reproduction(w, poly, 1000, 9 + k);
            o.pass = o.pass && r.pass && r.max_error <= kReproductionTol * (1.0 + r.max_value);
            worst = std::max(worst, r.max_error / (1.0 + r.max_value));
        }
        d << "n=" << c.n << ": worst |Tf - P| / (1 + max|P|) " << fmt(worst) << "; ";
    }
    o.detail = d.str();
    return o;
}

Outcome jet_agreement() {
    Outcome o{true, ""};
    std::ostringstream d;
    struct Case {
        int n;
        double s, p;
    };
    for (Case c : {Case{2, 1.5, 6}, Case{1, 2.5, 2}}) {
        auto w = random_decomposition(c.n, c.s, c.p, 5, 21, 1, 12);
        Point center(c.n);
        center[0] = 0.1;
        auto f = std::make_shared<Gaussian>(center, 0.8);
        JetField jets = JetField::from_function(w->params(), *f, w->sites());
        ExtensionField tf(w, std::move(jets));
        double worst = std::numeric_limits<double>::infinity();
        for (int site = 0; site < static_cast<int>(w->sites().size()); ++site) {
            auto radii = jet_radii(*w, site);
            for (const auto& i : multi_indices_up_to(c.n, w->params().floor_s())) {
                auto r = jet_agreement_check(tf, site, i, radii, f.get(), kJetMargin);
                o.pass = o.pass && r.pass;
                worst = std::min(worst, r.order_true - r.expected);
            }
        }
        d << "n=" << c.n << ": smallest fitted order - (floor s - |i|) = " << fmt(worst) << "; ";
    }
    o.detail = d.str();
    return o;
}

struct Corpus {
    std::vector<CubePath> paths;
    std::size_t failed = 0;
    std::size_t scale_bad = 0;
    std::size_t entry_checked = 0;
    std::size_t entry_bad = 0;
};

Corpus path_corpus(const WhitneyDecomposition& w, std::size_t count, std::uint64_t seed, std::size_t coverage) {
    Corpus c;
    auto cubes = sample_cubes_by_level(w, count, seed);
    for (std::size_t k = 0; k < cubes.size(); ++k) {
        auto s = sample_A_P(w, cubes[k], seed, k);
        c.scale_bad += within_A_P_scale(w, cubes[k], s.grid) ? 0 : 1;
        CubePath path = build_path(w, cubes[k], s.x);
        auto chk = check_path(w, path, coverage);
        c.failed += chk.pass() ? 0 : 1;
        c.entry_checked += chk.entry_checked;
        c.entry_bad += chk.entry_violations;
        c.paths.push_back(std::move(path));
    }
    return c;
}

Outcome path_properties() {
    Outcome o{true, ""};
    std::ostringstream d;
    struct Case {
        int n;
        std::size_t sites;
        int domain_exp, max_depth;
    };
    for (Case c : {Case{1, 10, 1, 12}, Case{2, 20, 1, 10}, Case{3, 2, -2, 8}}) {
        auto w = random_decomposition(c.n, 1.5, 4, c.sites, 31, c.domain_exp, c.max_depth);
        auto corpus = path_corpus(*w, 200, 17, 1000);
        auto fit = fit_decay(corpus.paths);
        std::size_t decay_bad = 0;
        for (const auto& p : corpus.paths) {
            decay_bad += decay_holds(p, fit) ? 0 : 1;
        }
        o.pass = o.pass && corpus.failed == 0 && corpus.scale_bad == 0 && decay_bad == 0 && fit.a < 1.0;
        d << "n=" << c.n << ": " << corpus.paths.size() - corpus.failed << "/" << corpus.paths.size()
          << " paths pass, a = " << fmt(fit.a) << "; ";
    }
    auto single = WhitneyDecomposition::build(SpaceParams(1, 1.5, 4), {Point{0.0}}, 5, 12);
    auto corpus = path_corpus(single, 200, 19, 1000);
    auto fit = fit_decay(corpus.paths);
    const double expected_a = std::exp2(-1.0 / 10.0);
    o.pass = o.pass && corpus.failed == 0 && fit.C_n == 10 && fit.a == expected_a;
    d << "single site: C_n = " << fit.C_n << ", a = " << fmt(fit.a) << (fit.a == expected_a ? " (= 2^-1/10)" : "");
    o.detail = d.str();
    return o;
}

Outcome entry_distance_bound() {
    auto w = random_decomposition(2, 1.5, 6, 20, 41, 1, 10);
    auto corpus = path_corpus(*w, 10000, 43, 4);
    Outcome o;
    o.pass = corpus.entry_bad == 0 && corpus.entry_checked > 0;
    o.detail = std::to_string(corpus.paths.size()) + " sampled cubes, " + std::to_string(corpus.entry_checked) +
               " entry points, " + std::to_string(corpus.entry_bad) + " outside [10, 131] delta";
    return o;
}

Outcome seminorm_calibration() {
    Outcome o{true, ""};
    std::ostringstream d;
    SpaceParams params(1, 0.5, 2);
    auto line = std::make_shared<Polynomial>(1, std::vector<std::pair<MultiIndex, double>>{{MultiIndex{1}, 1.0}});
    AnalyticField field(line, 0);
    Region unit(Box{1, {0.0}, {1.0}});
    for (Method m : {Method::PlainMC, Method::ImportanceMC, Method::TensorQuad}) {
        auto e = gagliardo(field, unit, params, m, 1000000, 1);
        bool ok = std::abs(e.value - 1.0) <= kCalibrationTol;
        o.pass = o.pass && ok;
        d << to_string(m) << " " << fmt(e.value) << ", ";
    }

    std::size_t agree = 0;
    const int configs = 10;
    for (int k = 0; k < configs; ++k) {
        const int n = 1 + k % 2;
        const double s = k < 5 ? 0.5 : 1.5;
        const double p = 2.0 + 2.0 * (k % 3);
        SampleRng rng(57, static_cast<std::uint64_t>(k));
        Point center(n);
        for (int i = 0; i < n; ++i) {
            center[i] = rng.uniform() - 0.5;
        }
        auto g = std::make_shared<Gaussian>(center, 0.5 + rng.uniform());
        SpaceParams sp(n, s, p);
        AnalyticField gf(g, sp.floor_s());
        Box box{n, {}, {}};
        for (int i = 0; i < n; ++i) {
            box.lo[i] = -1.0;
            box.hi[i] = 1.0;
        }
        auto a = gagliardo(gf, Region(box), sp, Method::PlainMC, 1000000, 3);
        auto b = gagliardo(gf, Region(box), sp, Method::TensorQuad, 1000000, 3);
        agree += std::abs(a.value - b.value) <= a.error_bound + b.error_bound ? 1 : 0;
    }
    o.pass = o.pass && agree == configs;
    d << "plain-mc vs tensor-quad agree on " << agree << "/" << configs;
    o.detail = d.str();
    return o;
}

Outcome pair_scale_stability() {
    Outcome o{true, ""};
    std::ostringstream d;
    for (int n = 1; n <= 2; ++n) {
        SpaceParams params(n, 1.5, n == 1 ? 4 : 6);
        auto ref = WhitneyDecomposition::build(params, {Point(n)}, 6, 10);
        std::vector<int> levels{0, 1, 2};
        auto r = lemma7_scale_check(ref, params, levels, 8, kScaleSpreadTol);
        o.pass = o.pass && r.pass;
        d << "n=" << n << ": touching spread " << fmt(r.touching_spread) << ", far spread " << fmt(r.far_spread)
          << "; ";
    }
    o.detail = d.str();
    return o;
}

Outcome chain_inequality() {
    Outcome o{true, ""};
    Lemma12Options opts;
    opts.stability_tolerance = kTruncationTol;
    double max_ratio = 0.0, max_change = 0.0;
    std::size_t zero_lhs = 0, polys = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto w = random_decomposition(1, 1.5, 4, 3 + k % 6, 61 + k, 1, 12);
        SampleRng rng(67, k);
        auto f = std::make_shared<Gaussian>(Point{rng.uniform() - 0.5}, 0.3 + rng.uniform());
        auto p = sample_cubes_by_level(*w, 1, 71 + k).front();
        auto x = sample_A_P(*w, p, 73, k).x;
        auto r = lemma12_check(*w, p, x, f, opts);
        bool finite = std::isfinite(r.fine.ratio) && std::isfinite(r.coarse.ratio);
        o.pass = o.pass && finite && r.stable;
        max_ratio = std::max(max_ratio, r.fine.ratio);
        max_change = std::max(max_change, r.ratio_change);

        auto poly = random_polynomial(1, 1, 79, k);
        auto rp = lemma12_check(*w, p, x, poly, opts);
        ++polys;
        zero_lhs += (rp.lhs == 0.0) ? 1 : 0;
    }
    o.pass = o.pass && zero_lhs == polys;
    o.detail = "max LHS/RHS " + fmt(max_ratio) + ", largest change under refinement " + fmt(max_change) +
               ", polynomial LHS = 0 in " + std::to_string(zero_lhs) + "/" + std::to_string(polys);
    return o;
}

Scenario envelope_scenario(std::size_t sites, std::uint64_t seed) {
    Scenario sc;
    sc.name = "envelope-" + std::to_string(sites) + "-" + std::to_string(seed);
    sc.params = SpaceParams(2, 1.5, 6);
    sc.sites.kind = "random";
    sc.sites.count = sites;
    sc.sites.seed = seed;
    sc.function = Json{{"name", "gaussian"}, {"center", {0.2, -0.1}}, {"width", 0.7}};
    sc.domain_exp = 1;
    sc.max_depth = 10;
    sc.estimator.method = Method::PlainMC;
    sc.estimator.budget = 100000;
    sc.estimator.seed = seed;
    return sc;
}

Outcome boundedness_envelope(Clock::time_point suite_start) {
    Outcome o{true, ""};
    std::ostringstream d;
    double prev = 0.0;
    for (std::size_t sites : {10, 25, 50, 75, 100}) {
        double stage_max = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto r = run_bound_experiment(envelope_scenario(sites, seed));
            bool finite = std::isfinite(r.rho) && r.status == "ok";
            o.pass = o.pass && finite;
            if (finite) {
                stage_max = std::max(stage_max, r.rho);
            }
        }
        if (prev > 0.0 && stage_max >= kGrowthTol * prev) {
            o.pass = false;
        }
        d << sites << " sites: max rho " << fmt(stage_max) << "; ";
        prev = stage_max;
    }
    double secs = seconds_since(suite_start);
    o.pass = o.pass && secs <= kSuiteSeconds;
    d << "suite time so far " << fmt(secs) << " s";
    o.detail = d.str();
    return o;
}

Outcome reproducibility() {
    Scenario sc = envelope_scenario(20, 5);
    sc.checks.path_count = 20;
    sc.checks.chain_checks = 2;
    auto first = to_json(verify_all(sc)).dump(2);
    auto second = to_json(verify_all(sc)).dump(2);
    auto b1 = to_json(run_bound_experiment(sc)).dump(2);
    auto b2 = to_json(run_bound_experiment(sc)).dump(2);
    Outcome o;
    o.pass = first == second && b1 == b2;
    o.detail = "suite report " + std::string(first == second ? "identical" : "differs") + " (" +
               std::to_string(first.size()) + " bytes), bound report " + (b1 == b2 ? "identical" : "differs");
    return o;
}

} // namespace

int main() {
    auto start = Clock::now();
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {1, "decomposition exactness", decomposition_exactness},
        {2, "single-site 1-D oracle", single_site_oracle},
        {3, "partition of unity", partition_of_unity},
        {4, "polynomial reproduction", polynomial_reproduction_corpus},
        {5, "jet agreement", jet_agreement},
        {6, "path properties", path_properties},
        {7, "entry point distance bound", entry_distance_bound},
        {8, "seminorm calibration", seminorm_calibration},
        {9, "cube pair scale stability", pair_scale_stability},
        {10, "chain inequality", chain_inequality},
        {11, "boundedness envelope", [&] { return boundedness_envelope(start); }},
        {12, "reproducibility", reproducibility},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
                  << " [" << fmt(seconds_since(t0)) << " s]" << std::endl;
    }
    std::cout << (failed ? "FAILED " + std::to_string(failed) + " of " : "passed all ") << criteria.size()
              << " criteria in " << fmt(seconds_since(start)) << " s" << std::endl;
    return failed ? 1 : 0;
}
