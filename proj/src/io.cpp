#include "whitney/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "whitney/error.hpp"

namespace whitney {

void to_json(Json& j, const Point& x) { j = x.to_vector(); }

void from_json(const Json& j, Point& x) {
    auto v = j.get<std::vector<double>>();
    if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) {
        throw Error("point must have 1.." + std::to_string(kMaxDim) + " coordinates");
    }
    x = Point::from(v);
}

void to_json(Json& j, const MultiIndex& k) { j = std::vector<int>(k.components().begin(), k.components().end()); }

void from_json(const Json& j, MultiIndex& k) {
    auto v = j.get<std::vector<int>>();
    k = MultiIndex::from(v);
}

void to_json(Json& j, const DyadicCube& q) {
    j = Json{{"level", q.level}, {"coords", std::vector<std::int64_t>(q.a.begin(), q.a.begin() + q.dim)}};
}

void from_json(const Json& j, DyadicCube& q) {
    auto coords = j.at("coords").get<std::vector<std::int64_t>>();
    if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxDim)) {
        throw Error("cube coords must have 1.." + std::to_string(kMaxDim) + " entries");
    }
    std::array<std::int64_t, kMaxDim> a{};
    std::copy(coords.begin(), coords.end(), a.begin());
    q = DyadicCube(j.at("level").get<int>(), static_cast<int>(coords.size()), a);
}

void to_json(Json& j, const Box& b) {
    std::vector<double> lo(b.lo.begin(), b.lo.begin() + b.dim), hi(b.hi.begin(), b.hi.begin() + b.dim);
    j = Json{{"lo", lo}, {"hi", hi}};
}

void from_json(const Json& j, Box& b) {
    auto lo = j.at("lo").get<std::vector<double>>();
    auto hi = j.at("hi").get<std::vector<double>>();
    if (lo.size() != hi.size() || lo.empty() || lo.size() > static_cast<std::size_t>(kMaxDim)) {
        throw Error("box lo/hi size mismatch");
    }
    b = Box{};
    b.dim = static_cast<int>(lo.size());
    for (int i = 0; i < b.dim; ++i) {
        if (!(lo[i] < hi[i])) {
            throw Error("box must have lo < hi on every axis");
        }
        b.lo[i] = lo[i];
        b.hi[i] = hi[i];
    }
}

void to_json(Json& j, const Jet& jet) {
    Json coeffs = Json::object();
    const auto& basis = jet.basis();
    for (std::size_t i = 0; i < basis.size(); ++i) {
        coeffs[basis[i].key()] = jet.coeffs()[i];
    }
    j = Json{{"anchor", jet.anchor()}, {"order", jet.order()}, {"coeffs", coeffs}};
}

Jet jet_from_json(const Json& j) {
    Point anchor = j.at("anchor").get<Point>();
    Jet jet(anchor, j.at("order").get<int>());
    for (const auto& [key, v] : j.at("coeffs").items()) {
        MultiIndex k = MultiIndex::parse_key(key);
        if (k.dim() != anchor.dim) {
            throw Error("jet coefficient " + key + " has the wrong dimension");
        }
        jet.set_coeff(k, v.get<double>());
    }
    return jet;
}

Json params_to_json(const SpaceParams& p) { return Json{{"n", p.n()}, {"s", p.s()}, {"p", p.p()}}; }

SpaceParams params_from_json(const Json& j) {
    return SpaceParams(j.at("n").get<int>(), j.at("s").get<double>(), j.at("p").get<double>());
}

Json decomposition_to_json(const WhitneyDecomposition& w) {
    Json anchors = Json::object();
    for (std::size_t i = 0; i < w.cubes().size(); ++i) {
        anchors[w.cubes()[i].id()] = w.sites()[static_cast<std::size_t>(w.anchor_index(i))];
    }
    return Json{{"params", params_to_json(w.params())},
                {"sites", w.sites()},
                {"domain_exp", w.domain_exp()},
                {"max_depth", w.max_depth()},
                {"depth_cap", w.depth_cap()},
                {"cubes", w.cubes()},
                {"anchors", anchors},
                {"fringe", w.fringe()}};
}

WhitneyDecomposition decomposition_from_json(const Json& j) {
    SpaceParams params = params_from_json(j.at("params"));
    auto sites = j.at("sites").get<std::vector<Point>>();
    auto cubes = j.at("cubes").get<std::vector<DyadicCube>>();
    auto fringe = j.value("fringe", std::vector<DyadicCube>{});
    int depth_cap = j.value("depth_cap", -1);
    return WhitneyDecomposition::from_parts(params, std::move(sites), j.at("domain_exp").get<int>(),
                                            j.at("max_depth").get<int>(), depth_cap, std::move(cubes),
                                            std::move(fringe));
}

Json jets_to_json(const JetField& f) {
    return Json{{"params", params_to_json(f.params())}, {"validated", f.validated()}, {"jets", f.jets()}};
}

JetField jets_from_json(const Json& j, const SpaceParams& params) {
    const Json& list = j.is_array() ? j : j.at("jets");
    std::vector<Jet> jets;
    for (const auto& e : list) {
        jets.push_back(jet_from_json(e));
    }
    // Loaded jets carry no proof of realizability, whatever the file claims.
    return JetField(params, std::move(jets), false);
}

TestFunctionPtr function_from_json(const Json& j, int dim) {
    const std::string name = j.at("name").get<std::string>();
    auto center = [&] {
        Point c = j.contains("center") ? j.at("center").get<Point>() : Point(dim);
        if (c.dim != dim) {
            throw Error("function center has dimension " + std::to_string(c.dim));
        }
        return c;
    };
    if (name == "gaussian") {
        return std::make_shared<Gaussian>(center(), j.value("width", 1.0), j.value("amplitude", 1.0));
    }
    if (name == "bump") {
        return std::make_shared<BumpProduct>(center(), j.value("width", 1.0), j.value("amplitude", 1.0));
    }
    if (name == "radial_power") {
        return std::make_shared<RadialPower>(center(), j.at("beta").get<double>());
    }
    if (name == "constant") {
        return std::make_shared<Polynomial>(Polynomial::constant(dim, j.value("value", 1.0)));
    }
    if (name == "polynomial") {
        std::vector<std::pair<MultiIndex, double>> terms;
        for (const auto& t : j.at("terms")) {
            MultiIndex k = t.at("index").get<MultiIndex>();
            if (k.dim() != dim) {
                throw Error("polynomial term has the wrong dimension");
            }
            terms.emplace_back(k, t.at("coeff").get<double>());
        }
        return std::make_shared<Polynomial>(dim, std::move(terms));
    }
    if (name == "sum") {
        std::vector<std::pair<double, TestFunctionPtr>> parts;
        for (const auto& part : j.at("parts")) {
            parts.emplace_back(part.value("weight", 1.0), function_from_json(part.at("function"), dim));
        }
        return std::make_shared<LinearCombination>(std::move(parts));
    }
    throw Error("unknown test function: " + name);
}

Json function_to_json(const TestFunction& f) {
    if (auto* g = dynamic_cast<const Gaussian*>(&f)) {
        return Json{{"name", "gaussian"}, {"center", g->center()}, {"width", g->width()}, {"amplitude", g->amplitude()}};
    }
    if (auto* b = dynamic_cast<const BumpProduct*>(&f)) {
        return Json{{"name", "bump"}, {"center", b->center()}, {"width", b->width()}, {"amplitude", b->amplitude()}};
    }
    if (auto* r = dynamic_cast<const RadialPower*>(&f)) {
        return Json{{"name", "radial_power"}, {"center", r->center()}, {"beta", r->beta()}};
    }
    if (auto* p = dynamic_cast<const Polynomial*>(&f)) {
        Json terms = Json::array();
        for (const auto& [k, c] : p->terms()) {
            terms.push_back(Json{{"index", k}, {"coeff", c}});
        }
        return Json{{"name", "polynomial"}, {"terms", terms}};
    }
    return Json{{"name", f.name()}};
}

Region region_from_json(const Json& j) {
    if (j.contains("boxes")) {
        return Region(j.at("boxes").get<std::vector<Box>>());
    }
    return Region(j.get<Box>());
}

Json to_json(const StructureReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"violations", c.violations}, {"detail", c.detail}});
    }
    return Json{{"pass", r.all_pass()},
                {"checks", checks},
                {"cube_count", r.cube_count},
                {"fringe_count", r.fringe_count},
                {"min_level", r.min_level},
                {"max_level", r.max_level},
                {"max_neighbors", r.max_neighbors},
                {"max_overlap", r.max_overlap}};
}

Json to_json(const DerivativeBoundReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"order", row.order}, {"levels", row.levels}, {"sup", row.sup}, {"spread", row.spread},
                            {"pass", row.pass}});
    }
    return Json{{"pass", r.pass}, {"samples", r.samples}, {"rows", rows}};
}

Json to_json(const SeminormEstimate& e) {
    return Json{{"value", e.value},
                {"error_bound", e.error_bound},
                {"value_p", e.value_p},
                {"error_bound_p", e.error_bound_p},
                {"method", to_string(e.method)},
                {"seed", e.seed},
                {"budget", e.budget},
                {"region", e.region.boxes},
                {"warnings", e.warnings},
                {"fallback_fraction", e.fallback_fraction}};
}

namespace {

Json param_json(const PathParam& t) {
    return Json{{"num", static_cast<double>(t.num)}, {"den", static_cast<double>(t.den)}, {"t", t.value()}};
}

} // namespace

Json to_json(const CubePath& p, const Grid& grid) {
    Json cubes = Json::array();
    for (std::size_t j = 0; j < p.size(); ++j) {
        cubes.push_back(Json{{"cube", p.cubes[j]}, {"id", p.cubes[j].id()}, {"entry", param_json(p.entries[j])},
                             {"exit", param_json(p.exits[j])}});
    }
    return Json{{"target_cube", p.target_cube.id()},
                {"origin", grid.to_point(p.origin)},
                {"target", grid.to_point(p.target)},
                {"target_site", p.target_site},
                {"truncation", to_string(p.truncation)},
                {"detail", p.detail},
                {"block_length", block_length(p)},
                {"cubes", cubes}};
}

Json to_json(const PathCheck& c) {
    return Json{{"pass", c.pass()},
                {"adjacency", c.adjacency},
                {"monotone", c.monotone},
                {"coverage", c.coverage},
                {"greedy", c.greedy},
                {"entry_bound", c.entry_bound},
                {"entry_checked", c.entry_checked},
                {"entry_violations", c.entry_violations},
                {"coverage_samples", c.coverage_samples},
                {"detail", c.detail}};
}

Json to_json(const PathDecayConstants& c) {
    return Json{{"A", c.A}, {"log2_A", c.log2_A}, {"a", c.a}, {"C_n", c.C_n}, {"paths", c.paths}, {"cubes", c.cubes}};
}

namespace {

Json truncation_json(const Lemma12Truncation& t) {
    return Json{{"floor_level", t.floor_level}, {"cubes", t.cubes}, {"rhs", t.rhs},
                {"ratio", t.ratio},             {"tail", t.tail},   {"tail_flag", t.tail_flag}};
}

} // namespace

Json to_json(const Lemma12Report& r) {
    return Json{{"lhs", r.lhs},
                {"epsilon", r.epsilon},
                {"coarse", truncation_json(r.coarse)},
                {"fine", truncation_json(r.fine)},
                {"ratio_change", r.ratio_change},
                {"lhs_zero", r.lhs_zero},
                {"stable", r.stable}};
}

Json to_json(const Lemma7ScaleReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"level", row.level},
                            {"pairs", row.pairs},
                            {"touching_mean", row.touching_mean},
                            {"touching_max", row.touching_max},
                            {"far_cubes", row.far_cubes},
                            {"far_mean", row.far_mean},
                            {"far_max", row.far_max}});
    }
    return Json{{"pass", r.pass},
                {"rows", rows},
                {"touching_spread", r.touching_spread},
                {"far_spread", r.far_spread},
                {"comparator", r.comparator},
                {"far_below_comparator", r.far_below_comparator},
                {"touching_comparator", r.touching_comparator},
                {"touching_below_comparator", r.touching_below_comparator},
                {"bounded", r.bounded}};
}

Json to_json(const JetAgreementReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"radius", row.radius}, {"error_jet", row.error_jet}, {"error_true", row.error_true}});
    }
    return Json{{"site", r.site},
                {"index", r.index},
                {"order_jet", r.order_jet},
                {"order_true", r.order_true},
                {"has_true", r.has_true},
                {"expected", r.expected},
                {"pass", r.pass},
                {"rows", rows}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << text;
}

std::vector<Point> read_points_csv(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::vector<Point> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw Error(path + ": non-numeric row '" + line + "'");
        }
        first = false;
        if (static_cast<int>(v.size()) != dim) {
            throw Error(path + ": row has " + std::to_string(v.size()) + " coordinates, expected " +
                        std::to_string(dim));
        }
        out.push_back(Point::from(v));
    }
    return out;
}

namespace {

struct SvgFrame {
    double lo_x, lo_y, span, px;

    double X(double x) const { return (x - lo_x) / span * px; }
    double Y(double y) const { return px - (y - lo_y) / span * px; }
    double L(double d) const { return d / span * px; }
};

SvgFrame frame_of(const WhitneyDecomposition& w, double px) {
    if (w.dim() != 2) {
        throw Error("rendering needs n = 2");
    }
    Box b = w.domain_box();
    return {b.lo[0], b.lo[1], b.hi[0] - b.lo[0], px};
}

std::string svg_head(double px) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px << "\" height=\"" << px << "\" viewBox=\"0 0 "
      << px << ' ' << px << "\">\n"
      << "<defs><marker id=\"arr\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\">"
      << "<path d=\"M0,0 L6,3 L0,6 z\" fill=\"#c33\"/></marker></defs>\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return s.str();
}

void svg_rect(std::ostringstream& s, const SvgFrame& f, const DyadicCube& q, const char* style) {
    s << "<rect x=\"" << f.X(q.lo(0)) << "\" y=\"" << f.Y(q.hi(1)) << "\" width=\"" << f.L(q.side())
      << "\" height=\"" << f.L(q.side()) << "\" " << style << "/>\n";
}

void svg_sites(std::ostringstream& s, const SvgFrame& f, const WhitneyDecomposition& w) {
    for (const auto& x : w.sites()) {
        s << "<circle cx=\"" << f.X(x[0]) << "\" cy=\"" << f.Y(x[1]) << "\" r=\"2.5\" fill=\"black\"/>\n";
    }
}

} // namespace

std::string render_decomposition_svg(const WhitneyDecomposition& w, std::size_t max_arrows) {
    const double px = 800.0;
    SvgFrame f = frame_of(w, px);
    std::ostringstream s;
    s << std::setprecision(6) << svg_head(px);
    for (const auto& q : w.cubes()) {
        svg_rect(s, f, q, "fill=\"none\" stroke=\"#357\" stroke-width=\"0.4\"");
    }
    for (const auto& q : w.fringe()) {
        svg_rect(s, f, q, "fill=\"#fc9\" stroke=\"none\"");
    }
    // arrows for the coarsest cubes only; finer ones are too small to read
    std::vector<std::size_t> order(w.cubes().size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w.cubes()[a].level < w.cubes()[b].level; });
    order.resize(std::min(order.size(), max_arrows));
    for (std::size_t i : order) {
        Point c = w.cubes()[i].center();
        const Point& a = w.sites()[static_cast<std::size_t>(w.anchor_index(i))];
        s << "<line x1=\"" << f.X(c[0]) << "\" y1=\"" << f.Y(c[1]) << "\" x2=\"" << f.X(a[0]) << "\" y2=\""
          << f.Y(a[1]) << "\" stroke=\"#c33\" stroke-width=\"0.5\" marker-end=\"url(#arr)\"/>\n";
    }
    svg_sites(s, f, w);
    s << "</svg>\n";
    return s.str();
}

std::string render_path_svg(const WhitneyDecomposition& w, const CubePath& path) {
    const double px = 800.0;
    SvgFrame f = frame_of(w, px);
    std::ostringstream s;
    s << std::setprecision(6) << svg_head(px);
    for (const auto& q : path.cubes) {
        svg_rect(s, f, q, "fill=\"#9cf\" fill-opacity=\"0.4\" stroke=\"#357\" stroke-width=\"0.6\"");
    }
    Point x = w.grid().to_point(path.origin);
    Point t = w.grid().to_point(path.target);
    s << "<line x1=\"" << f.X(x[0]) << "\" y1=\"" << f.Y(x[1]) << "\" x2=\"" << f.X(t[0]) << "\" y2=\"" << f.Y(t[1])
      << "\" stroke=\"#c33\" stroke-width=\"1\"/>\n";
    s << "<circle cx=\"" << f.X(x[0]) << "\" cy=\"" << f.Y(x[1]) << "\" r=\"3\" fill=\"#c33\"/>\n";
    svg_sites(s, f, w);
    s << "</svg>\n";
    return s.str();
}

} // namespace whitney
