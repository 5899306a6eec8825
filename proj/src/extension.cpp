#include "whitney/extension.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "whitney/error.hpp"
#include "whitney/parallel.hpp"
#include "whitney/partition.hpp"

namespace whitney {

JetField::JetField(const SpaceParams& params, std::vector<Jet> jets, bool validated)
    : params_(params), jets_(std::move(jets)), validated_(validated) {
    if (jets_.empty()) {
        throw Error("empty jet field");
    }
    for (const auto& j : jets_) {
        if (j.dim() != params.n()) {
            throw Error("jet dimension mismatch");
        }
        if (j.order() != params.floor_s()) {
            throw Error("jet order must equal floor(s)");
        }
    }
    std::vector<Point> anchors;
    for (const auto& j : jets_) {
        anchors.push_back(j.anchor());
    }
    std::sort(anchors.begin(), anchors.end(), lex_less);
    if (std::adjacent_find(anchors.begin(), anchors.end()) != anchors.end()) {
        throw Error("duplicate jet anchor");
    }
}

JetField JetField::from_function(const SpaceParams& params, const TestFunction& f, std::span<const Point> sites) {
    std::vector<Jet> jets;
    jets.reserve(sites.size());
    for (const auto& x : sites) {
        jets.push_back(Jet::from_function(f, x, params.floor_s()));
    }
    return JetField(params, std::move(jets), true);
}

int JetField::find(const Point& x) const {
    for (std::size_t k = 0; k < jets_.size(); ++k) {
        if (jets_[k].anchor() == x) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

JetField JetField::combine(double a, const JetField& f, double b, const JetField& g) {
    std::vector<Jet> out;
    for (const auto& jf : f.jets()) {
        int k = g.find(jf.anchor());
        if (k < 0) {
            throw Error("jet fields have different anchors");
        }
        const Jet& jg = g.jets()[static_cast<std::size_t>(k)];
        std::vector<double> c(jf.coeffs().size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] = a * jf.coeffs()[i] + b * jg.coeffs()[i];
        }
        out.emplace_back(jf.anchor(), jf.order(), std::move(c));
    }
    return JetField(f.params(), std::move(out), f.validated() && g.validated());
}

ExtensionField::ExtensionField(std::shared_ptr<const WhitneyDecomposition> w, JetField jets)
    : w_(std::move(w)), jets_(std::move(jets)) {
    if (w_->dim() != jets_.params().n()) {
        throw Error("jet field dimension mismatch");
    }
    by_site_.assign(w_->sites().size(), -1);
    for (std::size_t k = 0; k < jets_.jets().size(); ++k) {
        int s = w_->site_at(jets_.jets()[k].anchor());
        if (s < 0) {
            throw Error("jet anchored off the site set");
        }
        by_site_[static_cast<std::size_t>(s)] = static_cast<int>(k);
    }
    for (std::size_t s = 0; s < by_site_.size(); ++s) {
        if (by_site_[s] < 0) {
            throw Error("missing jet for a site");
        }
    }
}

TaylorValue jet_taylor(const Jet& j, const Point& x, int order) {
    TaylorValue t(j.dim(), order, 0.0);
    std::vector<double> b(j.basis().size());
    j.expand_at(x, b);
    // both bases are graded-lex, so the lower-order one is a prefix of the other
    std::size_t m = std::min(b.size(), t.size());
    for (std::size_t k = 0; k < m; ++k) {
        t[k] = b[k];
    }
    return t;
}

TaylorValue ExtensionField::expand(const Point& x, int order) const {
    PartitionAt at = partition_at(*w_, x, order);
    TaylorValue num(dim(), order, 0.0);
    for (const auto& term : at.terms) {
        const Jet& j = site_jet(w_->anchor_site(term.cube));
        num.add_product(term.phi, jet_taylor(j, x, order));
    }
    return num / at.total;
}

double ExtensionField::eval(const Point& x, const MultiIndex& i) const {
    if (i.order() > jets_.params().floor_s()) {
        throw Error("order exceeded");
    }
    if (!w_->in_domain(x)) {
        throw DomainError("outside computational domain");
    }
    int s = w_->site_at(x);
    if (s >= 0) {
        return site_jet(s).coeff(i);
    }
    return expand(x, i.order()).partial(i);
}

double extend_eval(const ExtensionField& tf, const Point& x, const MultiIndex& i) { return tf.eval(x, i); }

double fitted_order(std::span<const double> r, std::span<const double> e) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (e[k] > 0.0 && r[k] > 0.0) {
            double lx = std::log(r[k]);
            double ly = std::log(e[k]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++m;
        }
    }
    if (m == 0) {
        return std::numeric_limits<double>::infinity();
    }
    if (m == 1) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

std::vector<Point> probe_directions(int n) {
    std::vector<Point> dirs;
    for (int i = 0; i < n; ++i) {
        for (double sg : {1.0, -1.0}) {
            Point u(n);
            u[i] = sg;
            dirs.push_back(u);
        }
    }
    if (n > 1) {
        const double c = 1.0 / std::sqrt(static_cast<double>(n));
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            Point u(n);
            for (int i = 0; i < n; ++i) {
                u[i] = (mask >> i) & 1u ? -c : c;
            }
            dirs.push_back(u);
        }
    }
    return dirs;
}

} // namespace

JetAgreementReport jet_agreement_check(const ExtensionField& tf, int site, const MultiIndex& i,
                                       std::span<const double> radii, const TestFunction* f, double margin) {
    const auto& w = tf.decomposition();
    if (site < 0 || static_cast<std::size_t>(site) >= w.sites().size()) {
        throw Error("site index out of range");
    }
    const int fs = tf.jets().params().floor_s();
    if (i.order() > fs) {
        throw Error("order exceeded");
    }
    JetAgreementReport rep;
    rep.site = site;
    rep.index = i;
    rep.has_true = f != nullptr;
    rep.expected = fs - i.order();
    const Point x0 = w.sites()[static_cast<std::size_t>(site)];
    const Jet dj = jet_derivative(tf.site_jet(site), i);
    const auto dirs = probe_directions(w.dim());
    std::vector<double> rs, ej, et;
    // errors within a few ulps of the derivative's size are roundoff and stay out of the fit
    auto noise = [](double e, double scale) {
        return e <= 32.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale) ? 0.0 : e;
    };
    for (double r : radii) {
        JetAgreementRow row;
        row.radius = r;
        double scale = 0.0;
        for (const auto& u : dirs) {
            Point y = x0 + r * u;
            if (!w.in_domain(y)) {
                continue;
            }
            double v = tf.eval(y, i);
            scale = std::max(scale, std::abs(v));
            row.error_jet = std::max(row.error_jet, std::abs(v - jet_eval(dj, y)));
            if (f) {
                row.error_true = std::max(row.error_true, std::abs(v - f->derivative(y, i)));
            }
        }
        rs.push_back(r);
        ej.push_back(noise(row.error_jet, scale));
        et.push_back(noise(row.error_true, scale));
        rep.rows.push_back(row);
    }
    rep.order_jet = fitted_order(rs, ej);
    rep.order_true = f ? fitted_order(rs, et) : std::numeric_limits<double>::quiet_NaN();
    double decisive = f ? rep.order_true : rep.order_jet;
    rep.pass = decisive >= rep.expected + margin;
    return rep;
}

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int i = 0; i < box.dim; ++i) {
        s *= static_cast<std::size_t>(count[i]);
    }
    return s;
}

Point GridSpec::node(std::size_t k) const {
    Point x(box.dim);
    for (int i = box.dim - 1; i >= 0; --i) {
        auto m = static_cast<std::size_t>(count[i]);
        std::size_t j = k % m;
        k /= m;
        // t = j/(m-1) is a correctly rounded rational, so refined grids reproduce shared nodes bitwise
        double t = m > 1 ? static_cast<double>(j) / static_cast<double>(m - 1) : 0.0;
        x[i] = box.lo[i] + t * (box.hi[i] - box.lo[i]);
    }
    return x;
}

FieldSample sample_field(const ExtensionField& tf, const GridSpec& grid, const MultiIndex& i) {
    for (int a = 0; a < grid.box.dim; ++a) {
        if (grid.count[a] < 1) {
            throw Error("grid count must be positive");
        }
    }
    FieldSample out;
    out.grid = grid;
    out.deriv = i;
    const std::size_t total = grid.size();
    out.values.assign(total, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> messages(total);
    parallel_for(total, [&](std::size_t k) {
        try {
            out.values[k] = tf.eval(grid.node(k), i);
        } catch (const std::exception& e) {
            messages[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < total; ++k) {
        if (!messages[k].empty()) {
            out.errors.push_back({k, grid.node(k), messages[k]});
        }
    }
    return out;
}

void write_csv(const FieldSample& s, std::ostream& out) {
    const int n = s.grid.box.dim;
    for (int i = 0; i < n; ++i) {
        out << "x" << i << ",";
    }
    out << "value\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        Point x = s.grid.node(k);
        for (int i = 0; i < n; ++i) {
            out << x[i] << ",";
        }
        out << s.values[k] << "\n";
    }
}

} // namespace whitney
