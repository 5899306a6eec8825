// whitney: command-line front end for decomposition, extension, paths, seminorms and the scenario harness.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "whitney/error.hpp"
#include "whitney/harness.hpp"

namespace fs = std::filesystem;
using namespace whitney;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

struct Options {
    std::string config;
    std::string out;
    std::string sites;
    std::string cubes;
    std::string jets;
    std::string queries;
    std::string deriv;
    std::string cube_id;
    std::string field;
    std::string region;
    std::string method = "plain-mc";
    int domain_exp = 1;
    int max_depth = 10;
    int depth_cap = -1;
    int order = -1;
    int index = 0;
    double s = 1.5;
    double p = 4.0;
    std::size_t samples = 0;
    std::size_t budget = 100000;
    std::uint64_t seed = 1;
    bool no_verify = false;
};

int exit_code(bool pass) { return pass ? kPass : kFail; }

Scenario load_scenario(const Options& o) { return Scenario::from_json(read_json_file(o.config)); }

/// Output directory of a --config run: --out if given, else the scenario's own.
std::string out_dir(const Options& o, const Scenario& sc) {
    std::string dir = o.out.empty() ? sc.output : o.out;
    fs::create_directories(dir);
    return dir;
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::shared_ptr<const WhitneyDecomposition> load_cubes(const std::string& path) {
    return std::make_shared<const WhitneyDecomposition>(decomposition_from_json(read_json_file(path)));
}

/// Either the scenario's decomposition or a cubes.json file.
std::shared_ptr<const WhitneyDecomposition> decomposition_for(const Options& o) {
    if (!o.config.empty()) {
        return build_decomposition(load_scenario(o));
    }
    if (o.cubes.empty()) {
        throw Error("need --cubes or --config");
    }
    return load_cubes(o.cubes);
}

void need(const std::string& value, const char* flag) {
    if (value.empty()) {
        throw Error(std::string("missing ") + flag);
    }
}

int cmd_decompose(const Options& o) {
    std::shared_ptr<const WhitneyDecomposition> w;
    std::string cubes_out = o.out;
    std::string dir;
    if (!o.config.empty()) {
        Scenario sc = load_scenario(o);
        dir = out_dir(o, sc);
        cubes_out = join(dir, "cubes.json");
        w = build_decomposition(sc);
    } else {
        need(o.sites, "--sites");
        need(o.out, "--out");
        Json j = read_json_file(o.sites);
        const Json& list = j.is_array() ? j : j.at("sites");
        auto sites = list.get<std::vector<Point>>();
        if (sites.empty()) {
            throw Error("no sites in " + o.sites);
        }
        SpaceParams params = (j.is_object() && j.contains("params"))
                                 ? params_from_json(j.at("params"))
                                 : SpaceParams(sites.front().dim, o.s, o.p);
        w = std::make_shared<const WhitneyDecomposition>(
            WhitneyDecomposition::build(params, std::move(sites), o.domain_exp, o.max_depth, o.depth_cap));
    }
    write_json_file(cubes_out, decomposition_to_json(*w));
    std::cout << w->cubes().size() << " cubes, " << w->fringe().size() << " fringe cells -> " << cubes_out << '\n';
    if (o.no_verify) {
        return kPass;
    }
    auto rep = w->verify_structure();
    for (const auto& c : rep.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
    }
    if (!dir.empty()) {
        write_json_file(join(dir, "report.json"), to_json(rep));
        if (w->dim() == 2) {
            write_text_file(join(dir, "decomp.svg"), render_decomposition_svg(*w));
        }
    }
    return exit_code(rep.all_pass());
}

int cmd_render(const Options& o) {
    auto w = decomposition_for(o);
    std::string path = o.out;
    if (!o.config.empty()) {
        path = join(out_dir(o, load_scenario(o)), "decomp.svg");
    }
    need(path, "--out");
    write_text_file(path, render_decomposition_svg(*w));
    std::cout << "wrote " << path << '\n';
    return kPass;
}

int cmd_pou_check(const Options& o) {
    auto w = decomposition_for(o);
    std::string path = o.out;
    if (!o.config.empty()) {
        path = join(out_dir(o, load_scenario(o)), "report.json");
    }
    need(path, "--out");
    const int order = o.order >= 0 ? o.order : w->params().floor_s() + 1;
    const std::size_t samples = o.samples ? o.samples : 10000;
    auto unity = partition_unity_check(*w, samples, o.seed);
    auto fd = finite_difference_check(*w, std::max<std::size_t>(1, samples / 100), o.seed);
    auto bounds = verify_derivative_bounds(*w, order);
    bool pass = unity.pass && fd.pass && bounds.pass;
    Json rep{{"pass", pass},
             {"unity", {{"samples", unity.samples}, {"max_error", unity.max_error}, {"pass", unity.pass}}},
             {"finite_differences", {{"samples", fd.samples}, {"max_error", fd.max_error}, {"pass", fd.pass}}},
             {"derivative_bounds", to_json(bounds)}};
    write_json_file(path, rep);
    std::cout << (unity.pass ? "PASS" : "FAIL") << " unity: max error " << unity.max_error << '\n'
              << (fd.pass ? "PASS" : "FAIL") << " finite differences: max error " << fd.max_error << '\n'
              << (bounds.pass ? "PASS" : "FAIL") << " derivative bounds up to order " << order << '\n';
    return exit_code(pass);
}

int cmd_extend(const Options& o) {
    std::shared_ptr<const WhitneyDecomposition> w;
    std::optional<JetField> jets;
    std::string path = o.out;
    if (!o.config.empty()) {
        Scenario sc = load_scenario(o);
        w = build_decomposition(sc);
        jets = JetField::from_function(sc.params, *scenario_function(sc), w->sites());
        path = join(out_dir(o, sc), "values.csv");
    } else {
        need(o.cubes, "--cubes");
        need(o.jets, "--jets");
        w = load_cubes(o.cubes);
        jets = jets_from_json(read_json_file(o.jets), w->params());
    }
    need(path, "--out");
    ExtensionField tf(w, std::move(*jets));
    const int n = w->dim();
    MultiIndex deriv = o.deriv.empty() ? MultiIndex(n) : MultiIndex::parse_key(o.deriv);
    if (deriv.dim() != n) {
        throw Error("--deriv has the wrong dimension");
    }

    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out.precision(17);
    std::size_t errors = 0;
    if (o.queries.empty()) {
        GridSpec grid;
        grid.box = w->domain_box();
        for (int i = 0; i < n; ++i) {
            grid.count[i] = n == 1 ? 1025 : (n == 2 ? 129 : 33);
        }
        auto sample = sample_field(tf, grid, deriv);
        write_csv(sample, out);
        errors = sample.errors.size();
    } else {
        auto points = read_points_csv(o.queries, n);
        for (int i = 0; i < n; ++i) {
            out << 'x' << i << ',';
        }
        out << "value,error\n";
        for (const auto& x : points) {
            for (int i = 0; i < n; ++i) {
                out << x[i] << ',';
            }
            try {
                out << tf.eval(x, deriv) << ",\n";
            } catch (const Error& e) {
                ++errors;
                out << "nan," << e.what() << '\n';
            }
        }
    }
    std::cout << "wrote " << path << " (" << errors << " points failed, " << tf.jets().mode() << ")\n";
    return errors ? kFail : kPass;
}

int cmd_paths(const Options& o) {
    auto w = decomposition_for(o);
    std::string path = o.out;
    std::vector<DyadicCube> targets;
    const std::size_t samples = o.samples ? o.samples : 20;
    if (!o.config.empty()) {
        Scenario sc = load_scenario(o);
        path = join(out_dir(o, sc), "paths.json");
        if (o.cube_id.empty()) {
            targets = sample_cubes_by_level(*w, samples, o.seed);
        }
    }
    need(path, "--out");
    if (targets.empty()) {
        need(o.cube_id, "--cube-id");
        DyadicCube p = DyadicCube::parse_id(o.cube_id);
        if (!w->is_cube(p)) {
            throw Error(o.cube_id + " is not a cube of the decomposition");
        }
        targets.assign(samples, p);
    }
    std::vector<CubePath> corpus;
    Json paths = Json::array();
    bool pass = true;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        auto s = sample_A_P(*w, targets[k], o.seed, k);
        CubePath cp = build_path(*w, targets[k], s.x);
        auto check = check_path(*w, cp);
        bool scale = within_A_P_scale(*w, targets[k], s.grid);
        pass = pass && check.pass() && scale;
        Json j = to_json(cp, w->grid());
        j["check"] = to_json(check);
        j["within_A_P_scale"] = scale;
        paths.push_back(j);
        corpus.push_back(std::move(cp));
    }
    auto decay = fit_decay(corpus);
    pass = pass && decay.a < 1.0;
    write_json_file(path, Json{{"pass", pass}, {"decay", to_json(decay)}, {"paths", paths}});
    std::cout << (pass ? "PASS " : "FAIL ") << corpus.size() << " paths, C_n = " << decay.C_n << ", a = " << decay.a
              << ", A = " << decay.A << " -> " << path << '\n';
    return exit_code(pass);
}

int cmd_paths_render(const Options& o) {
    auto w = decomposition_for(o);
    std::string path = o.out;
    DyadicCube p;
    if (!o.config.empty()) {
        path = join(out_dir(o, load_scenario(o)), "path.svg");
    }
    need(path, "--out");
    if (o.cube_id.empty()) {
        p = sample_cubes_by_level(*w, 1, o.seed).front();
    } else {
        p = DyadicCube::parse_id(o.cube_id);
    }
    auto s = sample_A_P(*w, p, o.seed, static_cast<std::uint64_t>(o.index));
    CubePath cp = build_path(*w, p, s.x);
    write_text_file(path, render_path_svg(*w, cp));
    std::cout << "wrote " << path << " (" << cp.size() << " cubes)\n";
    return kPass;
}

std::unique_ptr<TopField> field_from_spec(const std::string& spec, const SpaceParams& params) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw Error("--field must be analytic:NAME or extension:cubes.json+jets.json");
    }
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    if (kind == "analytic") {
        Json fj = fs::exists(rest) ? read_json_file(rest) : Json{{"name", rest}};
        return std::make_unique<AnalyticField>(function_from_json(fj, params.n()), params.floor_s());
    }
    if (kind == "extension") {
        auto plus = rest.find('+');
        if (plus == std::string::npos) {
            throw Error("extension field needs cubes.json+jets.json");
        }
        auto w = load_cubes(rest.substr(0, plus));
        auto jets = jets_from_json(read_json_file(rest.substr(plus + 1)), params);
        return std::make_unique<ExtensionTopField>(std::make_shared<const ExtensionField>(w, std::move(jets)));
    }
    throw Error("unknown field kind: " + kind);
}

int cmd_seminorm(const Options& o) {
    if (!o.config.empty()) {
        // the scenario's F and Tf over Omega, with the scenario's estimator
        Scenario sc = load_scenario(o);
        auto rep = run_bound_experiment(sc);
        std::string path = join(out_dir(o, sc), "est.json");
        write_json_file(path, Json{{"Tf", to_json(rep.tf)}, {"F", to_json(rep.f)}});
        std::cout << "||Tf|| = " << rep.tf.value << " +- " << rep.tf.error_bound << ", ||F|| = " << rep.f.value
                  << " +- " << rep.f.error_bound << '\n';
        return kPass;
    }
    need(o.field, "--field");
    need(o.region, "--region");
    need(o.out, "--out");
    Region region = region_from_json(read_json_file(o.region));
    SpaceParams params(region.dim(), o.s, o.p);
    auto field = field_from_spec(o.field, params);
    auto est = gagliardo(*field, region, params, parse_method(o.method), o.budget, o.seed);
    write_json_file(o.out, to_json(est));
    std::cout << "||f||_{L^{s,p}} = " << est.value << " +- " << est.error_bound << " (" << to_string(est.method)
              << ")\n";
    for (const auto& wmsg : est.warnings) {
        std::cout << "warning: " << wmsg << '\n';
    }
    return kPass;
}

int cmd_bound(const Options& o) {
    need(o.config, "--config");
    Scenario sc = load_scenario(o);
    std::string dir = out_dir(o, sc);
    auto rep = run_bound_experiment(sc);
    write_json_file(join(dir, "report.json"), to_json(rep));
    std::ostringstream csv;
    csv.precision(17);
    csv << "scenario,sites,Tf,Tf_error,F,F_error,rho,rho_error,status\n"
        << sc.name << ',' << rep.sites << ',' << rep.tf.value << ',' << rep.tf.error_bound << ',' << rep.f.value << ','
        << rep.f.error_bound << ',' << rep.rho << ',' << rep.rho_error << ',' << rep.status << '\n';
    write_text_file(join(dir, "bound.csv"), csv.str());
    std::cout << "rho = " << rep.rho << " +- " << rep.rho_error << " (" << rep.status << ")\n";
    return exit_code(rep.status != "unbounded: F vanishes" && !std::isinf(rep.rho));
}

int cmd_split(const Options& o) {
    need(o.config, "--config");
    Scenario sc = load_scenario(o);
    std::string dir = out_dir(o, sc);
    auto t = run_term_split(sc);
    write_json_file(join(dir, "report.json"), to_json(t));
    std::ostringstream csv;
    csv.precision(17);
    csv << "term,value_p,error_bound_p\n";
    auto row = [&](const char* name, const SeminormEstimate& e) {
        csv << name << ',' << e.value_p << ',' << e.error_bound_p << '\n';
    };
    row("I", t.i_extension);
    row("I_direct", t.i_direct);
    row("II", t.ii);
    row("III", t.iii);
    row("IV", t.iv);
    row("whole", t.whole);
    row("F_whole", t.f_whole);
    write_text_file(join(dir, "terms.csv"), csv.str());
    bool pass = t.additive && t.i_below_f && t.i_agree;
    std::cout << (t.additive ? "PASS" : "FAIL") << " I+II+III+IV matches the whole estimate\n"
              << (t.i_below_f ? "PASS" : "FAIL") << " I <= ||F||^p\n"
              << (t.i_agree ? "PASS" : "FAIL") << " I direct vs extension\n";
    return exit_code(pass);
}

int cmd_verify(const Options& o) {
    need(o.config, "--config");
    Scenario sc = load_scenario(o);
    std::string dir = out_dir(o, sc);
    auto rep = verify_all(sc);
    write_json_file(join(dir, "report.json"), to_json(rep));
    std::ostringstream csv;
    csv << "module,name,pass,detail\n";
    for (const auto& e : rep.entries) {
        std::string detail = e.detail;
        std::replace(detail.begin(), detail.end(), '"', '\'');
        csv << e.module << ',' << e.name << ',' << (e.pass ? 1 : 0) << ",\"" << detail << "\"\n";
    }
    write_text_file(join(dir, "checks.csv"), csv.str());
    std::string text = summary(rep);
    write_text_file(join(dir, "summary.txt"), text);
    std::cout << text;
    return exit_code(rep.pass);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Whitney extension of jets on finite sets: decomposition, extension, paths and seminorm checks"};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* c) {
        c->add_option("--config", o.config, "scenario.json (schema 1)")->check(CLI::ExistingFile);
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "random seed"); };

    auto* decompose = app.add_subcommand("decompose", "Whitney cubes of the complement of a site set");
    add_config(decompose);
    decompose->add_option("--sites", o.sites, "sites.json: [[x...], ...] or {\"params\", \"sites\"}");
    decompose->add_option("--domain-exp", o.domain_exp, "Omega = [-2^L, 2^L]^n");
    decompose->add_option("--max-depth", o.max_depth, "finest enumerated level");
    decompose->add_option("--depth-cap", o.depth_cap, "deepest lazily resolved level");
    decompose->add_option("--s", o.s, "smoothness s when sites.json has no params");
    decompose->add_option("--p", o.p, "integrability p when sites.json has no params");
    decompose->add_option("--out", o.out, "cubes.json, or output directory with --config");
    decompose->add_flag("--no-verify", o.no_verify, "skip the structure checks");

    auto* render = app.add_subcommand("render", "SVG of a 2-D decomposition");
    add_config(render);
    render->add_option("--cubes", o.cubes, "cubes.json");
    render->add_option("--out", o.out, "decomp.svg, or output directory with --config");

    auto* pou = app.add_subcommand("pou-check", "partition of unity and derivative bounds");
    add_config(pou);
    pou->add_option("--cubes", o.cubes, "cubes.json");
    pou->add_option("--order", o.order, "highest derivative order (default floor(s) + 1)");
    pou->add_option("--samples", o.samples, "points for the unity check");
    add_seed(pou);
    pou->add_option("--out", o.out, "report.json, or output directory with --config");

    auto* extend = app.add_subcommand("extend", "evaluate Tf or one of its partials");
    add_config(extend);
    extend->add_option("--cubes", o.cubes, "cubes.json");
    extend->add_option("--jets", o.jets, "jets.json");
    extend->add_option("--queries", o.queries, "queries.csv (default: a grid over Omega)");
    extend->add_option("--deriv", o.deriv, "multi-index, e.g. \"0,1\"");
    extend->add_option("--out", o.out, "values.csv, or output directory with --config");

    auto* paths = app.add_subcommand("paths", "exponentially decreasing cube chains towards a cube's anchor");
    add_config(paths);
    paths->add_option("--cubes", o.cubes, "cubes.json");
    paths->add_option("--cube-id", o.cube_id, "target cube, \"level:a1,a2\"");
    paths->add_option("--samples", o.samples, "number of paths");
    add_seed(paths);
    paths->add_option("--out", o.out, "paths.json, or output directory with --config");

    auto* paths_render = app.add_subcommand("paths-render", "SVG of one path (n = 2)");
    add_config(paths_render);
    paths_render->add_option("--cubes", o.cubes, "cubes.json");
    paths_render->add_option("--cube-id", o.cube_id, "target cube");
    paths_render->add_option("--index", o.index, "sample index of the origin");
    add_seed(paths_render);
    paths_render->add_option("--out", o.out, "path.svg, or output directory with --config");

    auto* seminorm = app.add_subcommand("seminorm", "Gagliardo seminorm estimate");
    add_config(seminorm);
    seminorm->add_option("--field", o.field, "analytic:NAME|FILE or extension:cubes.json+jets.json");
    seminorm->add_option("--region", o.region, "box.json");
    seminorm->add_option("--s", o.s, "smoothness");
    seminorm->add_option("--p", o.p, "integrability");
    seminorm->add_option("--method", o.method, "plain-mc, importance-mc or tensor-quad");
    seminorm->add_option("--budget", o.budget, "samples (or quadrature budget)");
    add_seed(seminorm);
    seminorm->add_option("--out", o.out, "est.json, or output directory with --config");

    auto* bound = app.add_subcommand("bound", "rho = ||Tf|| / ||F|| for a scenario");
    auto* split = app.add_subcommand("split", "four-term split of ||Tf||^p for a scenario");
    auto* verify = app.add_subcommand("verify", "every module check on a scenario");
    for (auto* c : {bound, split, verify}) {
        add_config(c);
        c->add_option("--out", o.out, "output directory (default: the scenario's)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kError;
    }
    try {
        if (*decompose) return cmd_decompose(o);
        if (*render) return cmd_render(o);
        if (*pou) return cmd_pou_check(o);
        if (*extend) return cmd_extend(o);
        if (*paths) return cmd_paths(o);
        if (*paths_render) return cmd_paths_render(o);
        if (*seminorm) return cmd_seminorm(o);
        if (*bound) return cmd_bound(o);
        if (*split) return cmd_split(o);
        if (*verify) return cmd_verify(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
