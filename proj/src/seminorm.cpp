#include "whitney/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "whitney/error.hpp"
#include "whitney/parallel.hpp"
#include "whitney/quadrature.hpp"
#include "whitney/rng.hpp"

namespace whitney {

std::size_t TopField::top_count() const { return multi_indices_of_order(dim(), order()).size(); }

AnalyticField::AnalyticField(TestFunctionPtr f, int order)
    : f_(std::move(f)), order_(order), top_(multi_indices_of_order(f_->dim(), order)) {}

bool AnalyticField::smooth() const { return dynamic_cast<const RadialPower*>(f_.get()) == nullptr; }

void AnalyticField::top(const Point& x, std::span<double> out) const {
    for (std::size_t k = 0; k < top_.size(); ++k) {
        out[k] = f_->derivative(x, top_[k]);
    }
}

ExtensionTopField::ExtensionTopField(std::shared_ptr<const ExtensionField> tf)
    : tf_(std::move(tf)), order_(tf_->jets().params().floor_s()),
      guard2_(std::ldexp(1.0, -2 * tf_->decomposition().max_depth())),
      top_(multi_indices_of_order(tf_->dim(), order_)) {}

void ExtensionTopField::top(const Point& x, std::span<double> out) const {
    const auto& w = tf_->decomposition();
    ++evals_;
    int nearest = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < w.sites().size(); ++k) {
        double d = norm2(x - w.sites()[k]);
        if (d < best) {
            best = d;
            nearest = static_cast<int>(k);
        }
    }
    if (best < guard2_) {
        ++fallbacks_;
        const Jet& j = tf_->site_jet(nearest);
        for (std::size_t k = 0; k < top_.size(); ++k) {
            out[k] = j.coeff(top_[k]);
        }
        return;
    }
    TaylorValue t = tf_->expand(x, order_);
    for (std::size_t k = 0; k < top_.size(); ++k) {
        out[k] = t.partial(top_[k]);
    }
}

std::string to_string(Method m) {
    switch (m) {
    case Method::PlainMC:
        return "plain-mc";
    case Method::ImportanceMC:
        return "importance-mc";
    case Method::TensorQuad:
        return "tensor-quad";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    if (s == "plain-mc") {
        return Method::PlainMC;
    }
    if (s == "importance-mc") {
        return Method::ImportanceMC;
    }
    if (s == "tensor-quad") {
        return Method::TensorQuad;
    }
    throw Error("unknown method '" + s + "'");
}

double Region::volume() const {
    double v = 0.0;
    for (const auto& b : boxes) {
        v += b.volume();
    }
    return v;
}

double Region::diameter() const {
    Box hull = boxes.front();
    for (const auto& b : boxes) {
        for (int i = 0; i < b.dim; ++i) {
            hull.lo[i] = std::min(hull.lo[i], b.lo[i]);
            hull.hi[i] = std::max(hull.hi[i], b.hi[i]);
        }
    }
    return hull.diameter();
}

bool Region::contains(const Point& x) const {
    return std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return b.contains(x); });
}

Point Region::sample(std::span<const double> u, double pick) const {
    const Box* b = &boxes.front();
    if (boxes.size() > 1) {
        double target = pick * volume();
        double acc = 0.0;
        for (const auto& c : boxes) {
            acc += c.volume();
            b = &c;
            if (target < acc) {
                break;
            }
        }
    }
    Point x(b->dim);
    for (int i = 0; i < b->dim; ++i) {
        x[i] = b->lo[i] + u[i] * (b->hi[i] - b->lo[i]);
    }
    return x;
}

double gagliardo_integrand(std::span<const double> fx, std::span<const double> fy, const Point& x, const Point& y,
                           const SpaceParams& params) {
    double num = 0.0;
    for (std::size_t k = 0; k < fx.size(); ++k) {
        num += std::abs(fx[k] - fy[k]);
    }
    if (num == 0.0) {
        return 0.0;
    }
    double r2 = norm2(x - y);
    return std::pow(num, params.p()) * std::pow(r2, -0.5 * (params.n() + params.frac_s() * params.p()));
}

double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

void finish_estimate(SeminormEstimate& e, const SpaceParams& params) {
    const double p = params.p();
    e.value_p = std::max(e.value_p, 0.0);
    e.value = std::pow(e.value_p, 1.0 / p);
    if (e.value_p > 0.0) {
        // delta method, capped by the cruder bound ((I + dI)^{1/p} - I^{1/p})
        double lin = e.error_bound_p / (p * std::pow(e.value_p, 1.0 - 1.0 / p));
        double crude = std::pow(e.value_p + e.error_bound_p, 1.0 / p) - e.value;
        e.error_bound = std::max(lin, crude);
    } else {
        e.error_bound = std::pow(e.error_bound_p, 1.0 / p);
    }
}

namespace {

struct Moments {
    double mean = 0.0;
    double stderr_ = 0.0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) {
        return m;
    }
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    m.mean = s / static_cast<double>(v.size());
    double q = 0.0;
    for (double x : v) {
        q += (x - m.mean) * (x - m.mean);
    }
    if (v.size() > 1) {
        m.stderr_ = std::sqrt(q / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return m;
}

void fallback_fraction(const TopField& f, SeminormEstimate& e, std::size_t evals0, std::size_t fb0) {
    if (auto* ef = dynamic_cast<const ExtensionTopField*>(&f)) {
        std::size_t evals = ef->evaluations() - evals0;
        std::size_t fb = ef->fallbacks() - fb0;
        e.fallback_fraction = evals ? static_cast<double>(fb) / static_cast<double>(evals) : 0.0;
    }
}

std::pair<std::size_t, std::size_t> counters(const TopField& f) {
    if (auto* ef = dynamic_cast<const ExtensionTopField*>(&f)) {
        return {ef->evaluations(), ef->fallbacks()};
    }
    return {0, 0};
}

SeminormEstimate importance_mc(const TopField& f, const Region& region, const SpaceParams& params,
                               std::size_t budget, std::uint64_t seed) {
    const int n = f.dim();
    const std::size_t K = f.top_count();
    const double beta = params.p() - params.frac_s() * params.p() - 1.0;
    const double rmax = region.diameter();
    const double rmin = 1e-8 * rmax;
    const double b1 = beta + 1.0;
    const double lo = std::pow(rmin, b1);
    const double hi = std::pow(rmax, b1);
    const double Z = (hi - lo) / b1;
    const double scale = region.volume() * sphere_area(n) * Z;
    std::vector<double> contrib(budget, 0.0);
    std::vector<double> radius(budget, 0.0);
    parallel_for(budget, [&](std::size_t i) {
        SampleRng rng(seed, i);
        std::array<double, kMaxDim> u{};
        for (int a = 0; a < n; ++a) {
            u[a] = rng.uniform();
        }
        Point x = region.sample({u.data(), static_cast<std::size_t>(n)}, rng.uniform());
        Point dir(n);
        if (n == 1) {
            dir[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        } else {
            double len = 0.0;
            while (len == 0.0) {
                for (int a = 0; a < n; ++a) {
                    dir[a] = rng.normal();
                }
                len = norm(dir);
            }
            dir = (1.0 / len) * dir;
        }
        double r = std::pow(lo + rng.uniform() * (hi - lo), 1.0 / b1);
        radius[i] = r;
        Point y = x + r * dir;
        if (!region.contains(y)) {
            return;
        }
        std::vector<double> fx(K), fy(K);
        f.top(x, fx);
        f.top(y, fy);
        double g = gagliardo_integrand(fx, fy, x, y, params);
        contrib[i] = scale * g * std::pow(r, n - 1 - beta);
    });
    SeminormEstimate e;
    Moments m = moments(contrib);
    e.value_p = m.mean;
    e.error_bound_p = 2.0 * m.stderr_;
    // the excluded ball r < r_min, bounded by the mean weight over that radial mass
    e.error_bound_p += m.mean * (lo / b1) / Z;
    // contributions from the smallest radii should not dominate for an integrable diagonal
    double small = 0.0;
    std::size_t small_count = 0;
    for (std::size_t i = 0; i < budget; ++i) {
        if (radius[i] < 1e-6 * rmax) {
            small += contrib[i];
            ++small_count;
        }
    }
    if (small_count >= 20 && m.mean > 0.0 && small / static_cast<double>(small_count) > 1e3 * m.mean) {
        throw Error("diagonal not integrable");
    }
    return e;
}

SeminormEstimate plain_mc(const TopField& f, const Region& region, const SpaceParams& params, std::size_t budget,
                          std::uint64_t seed) {
    auto parts = plain_mc_split(f, region, params, budget, seed, 1, [](const Point&, const Point&) { return 0; });
    return parts.front();
}

/// Tensor Gauss quadrature on an M^n cell grid; the near block of each cell is integrated
/// with a pyramid (polar) substitution that absorbs the r^beta behaviour at the diagonal.
double tensor_quad_once(const TopField& f, const Box& box, const SpaceParams& params, int M, int q) {
    const int n = f.dim();
    const std::size_t K = f.top_count();
    const GaussRule& G = gauss_legendre(q);
    const double beta = params.p() - params.frac_s() * params.p() - 1.0;
    const double b1 = beta + 1.0;
    std::array<double, kMaxDim> h{};
    for (int i = 0; i < n; ++i) {
        h[i] = (box.hi[i] - box.lo[i]) / M;
    }
    std::size_t cells = 1, per_cell = 1;
    for (int i = 0; i < n; ++i) {
        cells *= static_cast<std::size_t>(M);
        per_cell *= static_cast<std::size_t>(q);
    }
    const double cell_vol = [&] {
        double v = 1.0;
        for (int i = 0; i < n; ++i) {
            v *= h[i];
        }
        return v;
    }();
    auto cell_coords = [&](std::size_t c) {
        std::array<int, kMaxDim> a{};
        for (int i = 0; i < n; ++i) {
            a[i] = static_cast<int>(c % static_cast<std::size_t>(M));
            c /= static_cast<std::size_t>(M);
        }
        return a;
    };
    const std::size_t total = cells * per_cell;
    std::vector<Point> pts(total);
    std::vector<double> wts(total);
    std::vector<double> tops(total * K);
    parallel_for(total, [&](std::size_t idx) {
        auto a = cell_coords(idx / per_cell);
        std::size_t node = idx % per_cell;
        Point x(n);
        double w = cell_vol;
        for (int i = 0; i < n; ++i) {
            int k = static_cast<int>(node % static_cast<std::size_t>(q));
            node /= static_cast<std::size_t>(q);
            x[i] = box.lo[i] + (a[i] + G.x[k]) * h[i];
            w *= G.w[k];
        }
        pts[idx] = x;
        wts[idx] = w;
        f.top(x, {tops.data() + idx * K, K});
    });

    // pyramid integral of g(x, .) over box B with apex x
    auto pyramid = [&](const Point& x, std::span<const double> fx, const Box& B) {
        double acc = 0.0;
        std::vector<double> fy(K);
        for (int a = 0; a < n; ++a) {
            for (int side = 0; side < 2; ++side) {
                double F = side ? B.hi[a] : B.lo[a];
                double hgt = std::abs(F - x[a]);
                if (hgt == 0.0) {
                    continue;
                }
                // split the face at the foot of x
                std::array<std::array<double, 3>, kMaxDim> cuts{};
                std::array<int, kMaxDim> ncut{};
                for (int j = 0; j < n; ++j) {
                    if (j == a) {
                        continue;
                    }
                    cuts[j][0] = B.lo[j];
                    int c = 1;
                    if (x[j] > B.lo[j] && x[j] < B.hi[j]) {
                        cuts[j][c++] = x[j];
                    }
                    cuts[j][c++] = B.hi[j];
                    ncut[j] = c - 1;
                }
                std::array<int, kMaxDim> pick{};
                while (true) {
                    // Gauss nodes over this sub-face
                    std::size_t face_nodes = 1;
                    for (int j = 0; j < n; ++j) {
                        if (j != a) {
                            face_nodes *= static_cast<std::size_t>(q);
                        }
                    }
                    for (std::size_t fn = 0; fn < face_nodes; ++fn) {
                        Point z(n);
                        z[a] = F;
                        double wz = 1.0;
                        std::size_t rest = fn;
                        for (int j = 0; j < n; ++j) {
                            if (j == a) {
                                continue;
                            }
                            int k = static_cast<int>(rest % static_cast<std::size_t>(q));
                            rest /= static_cast<std::size_t>(q);
                            double l = cuts[j][pick[j]], r = cuts[j][pick[j] + 1];
                            z[j] = l + G.x[k] * (r - l);
                            wz *= G.w[k] * (r - l);
                        }
                        for (int k = 0; k < q; ++k) {
                            double lam = std::pow(G.x[k], 1.0 / b1);
                            Point y = x + lam * (z - x);
                            f.top(y, fy);
                            double g = gagliardo_integrand(fx, fy, x, y, params);
                            acc += wz * G.w[k] * hgt * std::pow(lam, n - 1 - beta) / b1 * g;
                        }
                    }
                    int j = 0;
                    while (j < n && (j == a || ++pick[j] == ncut[j])) {
                        if (j != a) {
                            pick[j] = 0;
                        }
                        ++j;
                    }
                    if (j == n) {
                        break;
                    }
                }
            }
        }
        return acc;
    };

    std::vector<double> per(cells, 0.0);
    parallel_for(cells, [&](std::size_t c) {
        auto a = cell_coords(c);
        Box block;
        block.dim = n;
        for (int i = 0; i < n; ++i) {
            block.lo[i] = box.lo[i] + std::max(a[i] - 1, 0) * h[i];
            block.hi[i] = box.lo[i] + std::min(a[i] + 2, M) * h[i];
        }
        double acc = 0.0;
        for (std::size_t xi = c * per_cell; xi < (c + 1) * per_cell; ++xi) {
            std::span<const double> fx{tops.data() + xi * K, K};
            double far = 0.0;
            for (std::size_t c2 = 0; c2 < cells; ++c2) {
                auto b = cell_coords(c2);
                bool near = true;
                for (int i = 0; i < n; ++i) {
                    if (std::abs(b[i] - a[i]) > 1) {
                        near = false;
                    }
                }
                if (near) {
                    continue;
                }
                for (std::size_t yi = c2 * per_cell; yi < (c2 + 1) * per_cell; ++yi) {
                    far += wts[yi] * gagliardo_integrand(fx, {tops.data() + yi * K, K}, pts[xi], pts[yi], params);
                }
            }
            acc += wts[xi] * (far + pyramid(pts[xi], fx, block));
        }
        per[c] = acc;
    });
    double s = 0.0;
    for (double v : per) {
        s += v;
    }
    return s;
}

} // namespace

std::vector<SeminormEstimate> plain_mc_split(const TopField& f, const Region& region, const SpaceParams& params,
                                             std::size_t budget, std::uint64_t seed, int buckets,
                                             const std::function<int(const Point&, const Point&)>& bucket) {
    const int n = f.dim();
    const std::size_t K = f.top_count();
    const double V = region.volume();
    std::vector<double> g(budget, 0.0);
    std::vector<int> which(budget, -1);
    parallel_for(budget, [&](std::size_t i) {
        SampleRng rng(seed, i);
        std::array<double, kMaxDim> u{}, v{};
        for (int a = 0; a < n; ++a) {
            u[a] = rng.uniform();
        }
        double pu = rng.uniform();
        for (int a = 0; a < n; ++a) {
            v[a] = rng.uniform();
        }
        double pv = rng.uniform();
        Point x = region.sample({u.data(), static_cast<std::size_t>(n)}, pu);
        Point y = region.sample({v.data(), static_cast<std::size_t>(n)}, pv);
        which[i] = bucket(x, y);
        if (which[i] < 0) {
            return;
        }
        std::vector<double> fx(K), fy(K);
        f.top(x, fx);
        f.top(y, fy);
        g[i] = V * V * gagliardo_integrand(fx, fy, x, y, params);
    });
    std::vector<SeminormEstimate> out(static_cast<std::size_t>(buckets));
    std::vector<double> col(budget);
    for (int b = 0; b < buckets; ++b) {
        for (std::size_t i = 0; i < budget; ++i) {
            col[i] = which[i] == b ? g[i] : 0.0;
        }
        Moments m = moments(col);
        auto& e = out[static_cast<std::size_t>(b)];
        e.value_p = m.mean;
        e.error_bound_p = 2.0 * m.stderr_;
        e.method = Method::PlainMC;
        e.seed = seed;
        e.budget = budget;
        e.region = region;
        finish_estimate(e, params);
    }
    return out;
}

SeminormEstimate gagliardo(const TopField& f, const Region& region, const SpaceParams& params, Method method,
                           std::size_t budget, std::uint64_t seed) {
    if (region.boxes.empty()) {
        throw Error("empty region");
    }
    if (f.dim() != params.n() || f.order() != params.floor_s()) {
        throw Error("field does not match the space parameters");
    }
    if (budget == 0) {
        throw Error("budget must be positive");
    }
    auto [e0, f0] = counters(f);
    SeminormEstimate e;
    switch (method) {
    case Method::PlainMC:
        e = plain_mc(f, region, params, budget, seed);
        break;
    case Method::ImportanceMC:
        e = importance_mc(f, region, params, budget, seed);
        break;
    case Method::TensorQuad: {
        if (region.boxes.size() != 1) {
            throw Error("tensor-quad requires a single box region");
        }
        const int n = params.n();
        const int q = n >= 3 ? 3 : 4;
        int M = static_cast<int>(std::floor(std::pow(static_cast<double>(budget), 1.0 / (2 * n)) / q));
        M = std::max(M, 1);
        double coarse = tensor_quad_once(f, region.boxes.front(), params, M, q);
        double fine = tensor_quad_once(f, region.boxes.front(), params, M, q + 2);
        e.value_p = fine;
        e.error_bound_p = std::abs(fine - coarse);
        break;
    }
    }
    e.method = method;
    e.seed = seed;
    e.budget = budget;
    e.region = region;
    if (params.frac_s() * params.p() <= params.n() && !f.smooth()) {
        e.warnings.push_back("possibly divergent");
    }
    finish_estimate(e, params);
    fallback_fraction(f, e, e0, f0);
    return e;
}

namespace {

int touching_slot(std::span<const std::int64_t> e) {
    int idx = 0, mul = 1;
    for (std::int64_t v : e) {
        idx += static_cast<int>(v + 1) * mul;
        mul *= 3;
    }
    return idx;
}

double box_gap(const Box& a, const Box& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) {
        double g = std::max({0.0, a.lo[i] - b.hi[i], b.lo[i] - a.hi[i]});
        s += g * g;
    }
    return std::sqrt(s);
}

double gauss_boxes(const Box& a, const Box& b, double gamma, int q) {
    const int n = a.dim;
    const GaussRule& G = gauss_legendre(q);
    std::size_t m = 1;
    for (int i = 0; i < n; ++i) {
        m *= static_cast<std::size_t>(q);
    }
    std::vector<Point> pa(m), pb(m);
    std::vector<double> wa(m), wb(m);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t r = k;
        Point x(n), y(n);
        double u = a.volume(), v = b.volume();
        for (int i = 0; i < n; ++i) {
            int j = static_cast<int>(r % static_cast<std::size_t>(q));
            r /= static_cast<std::size_t>(q);
            x[i] = a.lo[i] + G.x[j] * (a.hi[i] - a.lo[i]);
            y[i] = b.lo[i] + G.x[j] * (b.hi[i] - b.lo[i]);
            u *= G.w[j];
            v *= G.w[j];
        }
        pa[k] = x;
        pb[k] = y;
        wa[k] = u;
        wb[k] = v;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            s += wa[i] * wb[j] * std::pow(norm2(pa[i] - pb[j]), -0.5 * gamma);
        }
    }
    return s;
}

} // namespace

KernelIntegrator::KernelIntegrator(int dim, double gamma, int gauss_order) : n_(dim), gamma_(gamma), q_(gauss_order) {
    if (gamma >= dim) {
        // only separated pairs are finite
        return;
    }
    int m = 1;
    for (int i = 0; i < n_; ++i) {
        m *= 3;
    }
    const double c = std::pow(2.0, -(2.0 * n_ - gamma_));
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    std::vector<std::int64_t> e(static_cast<std::size_t>(n_)), e2(static_cast<std::size_t>(n_));
    for (int row = 0; row < m; ++row) {
        int r = row;
        for (int i = 0; i < n_; ++i) {
            e[static_cast<std::size_t>(i)] = r % 3 - 1;
            r /= 3;
        }
        // children i of [0,1]^n and j of e + [0,1]^n sit at offset 2e + j - i in half units
        for (unsigned ci = 0; ci < (1u << n_); ++ci) {
            for (unsigned cj = 0; cj < (1u << n_); ++cj) {
                std::int64_t mx = 0;
                for (int i = 0; i < n_; ++i) {
                    e2[static_cast<std::size_t>(i)] = 2 * e[static_cast<std::size_t>(i)] + ((cj >> i) & 1u) - ((ci >> i) & 1u);
                    mx = std::max(mx, std::abs(e2[static_cast<std::size_t>(i)]));
                }
                if (mx <= 1) {
                    A(row, touching_slot(e2)) -= c;
                } else {
                    b(row) += c * unit_offset(e2);
                }
            }
        }
    }
    Eigen::VectorXd sol = A.fullPivLu().solve(b);
    touching_.assign(sol.data(), sol.data() + m);
}

double KernelIntegrator::gauss_unit(std::span<const std::int64_t> e, int q) const {
    Box a, b;
    a.dim = b.dim = n_;
    for (int i = 0; i < n_; ++i) {
        a.lo[i] = 0.0;
        a.hi[i] = 1.0;
        b.lo[i] = static_cast<double>(e[static_cast<std::size_t>(i)]);
        b.hi[i] = b.lo[i] + 1.0;
    }
    return gauss_boxes(a, b, gamma_, q);
}

double KernelIntegrator::unit_offset(std::span<const std::int64_t> e) const {
    std::int64_t mx = 0;
    for (auto v : e) {
        mx = std::max(mx, std::abs(v));
    }
    if (mx <= 1) {
        if (touching_.empty()) {
            throw Error("touching pair integral needs gamma < n");
        }
        return touching_[static_cast<std::size_t>(touching_slot(e))];
    }
    std::vector<std::int64_t> key(e.begin(), e.end());
    if (auto it = cache_.find(key); it != cache_.end()) {
        return it->second;
    }
    double v;
    if (mx >= 4) {
        v = gauss_unit(e, q_);
    } else {
        // split both cubes until the pair is well separated
        const double c = std::pow(2.0, -(2.0 * n_ - gamma_));
        std::vector<std::int64_t> e2(e.size());
        v = 0.0;
        for (unsigned ci = 0; ci < (1u << n_); ++ci) {
            for (unsigned cj = 0; cj < (1u << n_); ++cj) {
                for (int i = 0; i < n_; ++i) {
                    e2[static_cast<std::size_t>(i)] = 2 * e[static_cast<std::size_t>(i)] + ((cj >> i) & 1u) - ((ci >> i) & 1u);
                }
                v += c * unit_offset(e2);
            }
        }
    }
    cache_.emplace(std::move(key), v);
    return v;
}

double KernelIntegrator::separated(const Box& a, const Box& b) const {
    if (box_gap(a, b) <= 0.0) {
        throw Error("boxes are not separated");
    }
    return separated_rec(a, b, 0);
}

double KernelIntegrator::separated_rec(const Box& a, const Box& b, int depth) const {
    double gap = box_gap(a, b);
    double size = std::max(a.diameter(), b.diameter());
    double rho = gap / size;
    if (rho >= 1.0 || depth > 24) {
        int q = rho >= 16.0 ? 1 : rho >= 4.0 ? 2 : q_;
        return gauss_boxes(a, b, gamma_, q);
    }
    const Box& big = a.diameter() >= b.diameter() ? a : b;
    const Box& other = &big == &a ? b : a;
    double s = 0.0;
    for (unsigned mask = 0; mask < (1u << n_); ++mask) {
        Box c;
        c.dim = n_;
        for (int i = 0; i < n_; ++i) {
            double mid = 0.5 * (big.lo[i] + big.hi[i]);
            c.lo[i] = (mask >> i) & 1u ? mid : big.lo[i];
            c.hi[i] = (mask >> i) & 1u ? big.hi[i] : mid;
        }
        s += separated_rec(c, other, depth + 1);
    }
    return s;
}

double KernelIntegrator::pair(const DyadicCube& a, const DyadicCube& b) const {
    if (!cubes_touch(a, b)) {
        return separated(a.box(), b.box());
    }
    if (touching_.empty()) {
        throw Error("kernel not integrable on the diagonal");
    }
    const DyadicCube& fine = a.level >= b.level ? a : b;
    const DyadicCube& coarse = &fine == &a ? b : a;
    int delta = fine.level - coarse.level;
    if (delta > 6) {
        throw Error("level difference too large for the touching-pair integral");
    }
    // split the coarse cube into cubes of the fine level
    std::int64_t per_axis = std::int64_t{1} << delta;
    std::size_t count = 1;
    for (int i = 0; i < n_; ++i) {
        count *= static_cast<std::size_t>(per_axis);
    }
    const double side = fine.side();
    const double scale = std::pow(side, 2.0 * n_ - gamma_);
    std::vector<std::int64_t> e(static_cast<std::size_t>(n_));
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t r = k;
        for (int i = 0; i < n_; ++i) {
            std::int64_t off = static_cast<std::int64_t>(r % static_cast<std::size_t>(per_axis));
            r /= static_cast<std::size_t>(per_axis);
            e[static_cast<std::size_t>(i)] = fine.a[i] - (coarse.a[i] * per_axis + off);
        }
        s += scale * unit_offset(e);
    }
    return s;
}

Lemma7Touching lemma7_touching(const DyadicCube& q, const DyadicCube& qp, const SpaceParams& params) {
    if (!cubes_touch(q, qp)) {
        throw Error("cubes do not touch");
    }
    const double n = params.n();
    const double sp = params.frac_s() * params.p();
    KernelIntegrator k(params.n(), n + sp - params.p());
    Lemma7Touching out;
    out.integral = k.pair(q, qp);
    out.ratio = out.integral / std::pow(q.diameter(), n + params.p() - sp);
    return out;
}

namespace {

Lemma7Far far_with(const KernelIntegrator& k, const WhitneyDecomposition& w, const DyadicCube& q,
                   const SpaceParams& params) {
    if (q.level > w.max_depth() - 2) {
        throw Error("far-field check needs a cube at least two levels above the fringe");
    }
    const double n = params.n();
    const double sp = params.frac_s() * params.p();
    Lemma7Far out;
    out.comparator = std::pow(n, -0.5 * n) * sphere_area(params.n()) * std::pow(2.0 * std::sqrt(n), sp) / sp;
    std::vector<double> terms;
    const Box qb = q.box();
    for (const auto& c : w.cubes()) {
        if (!cubes_touch(c, q)) {
            terms.push_back(k.separated(qb, c.box()));
        }
    }
    for (const auto& c : w.fringe()) {
        if (cubes_touch(c, q)) {
            throw Error("fringe cell touches " + q.id());
        }
        double v = k.separated(qb, c.box());
        out.fringe_part += v;
        terms.push_back(v);
    }
    std::sort(terms.begin(), terms.end(), std::greater<>());
    double s = 0.0, s90 = 0.0;
    std::size_t cut = terms.size() - terms.size() / 10;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        s += terms[i];
        if (i + 1 == cut) {
            s90 = s;
        }
    }
    out.sum = s;
    out.terms = terms.size();
    out.tail_change = s > 0.0 ? (s - s90) / s : 0.0;
    out.ratio = s / std::pow(q.diameter(), n - sp);
    return out;
}

} // namespace

Lemma7Far lemma7_far(const WhitneyDecomposition& w, const DyadicCube& q, const SpaceParams& params) {
    KernelIntegrator k(params.n(), params.n() + params.frac_s() * params.p());
    return far_with(k, w, q, params);
}

Lemma7ScaleReport lemma7_scale_check(const WhitneyDecomposition& w, const SpaceParams& params,
                                     std::span<const int> levels, std::size_t cubes_per_level, double tolerance) {
    const double n = params.n();
    const double sp = params.frac_s() * params.p();
    KernelIntegrator touch(params.n(), n + sp - params.p());
    KernelIntegrator far(params.n(), n + sp);
    Lemma7ScaleReport rep;
    for (int level : levels) {
        std::vector<DyadicCube> at;
        for (const auto& c : w.cubes()) {
            if (c.level == level) {
                at.push_back(c);
            }
        }
        std::sort(at.begin(), at.end(), cube_less);
        std::size_t stride = 1;
        if (cubes_per_level > 0 && at.size() > cubes_per_level) {
            stride = (at.size() + cubes_per_level - 1) / cubes_per_level;
        }
        Lemma7LevelRow row;
        row.level = level;
        double tsum = 0.0, fsum = 0.0;
        for (std::size_t i = 0; i < at.size(); i += stride) {
            const DyadicCube& q = at[i];
            for (const auto& nb : w.neighbors(q)) {
                double r = touch.pair(q, nb) / std::pow(q.diameter(), n + params.p() - sp);
                tsum += r;
                row.touching_max = std::max(row.touching_max, r);
                ++row.pairs;
            }
            Lemma7Far f = far_with(far, w, q, params);
            rep.comparator = f.comparator;
            fsum += f.ratio;
            row.far_max = std::max(row.far_max, f.ratio);
            ++row.far_cubes;
        }
        row.touching_mean = row.pairs ? tsum / static_cast<double>(row.pairs) : 0.0;
        row.far_mean = row.far_cubes ? fsum / static_cast<double>(row.far_cubes) : 0.0;
        rep.rows.push_back(row);
    }
    auto spread = [&](auto get) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& r : rep.rows) {
            lo = std::min(lo, get(r));
            hi = std::max(hi, get(r));
        }
        return lo > 0.0 ? hi / lo - 1.0 : std::numeric_limits<double>::infinity();
    };
    rep.touching_spread = spread([](const Lemma7LevelRow& r) { return r.touching_mean; });
    rep.far_spread = spread([](const Lemma7LevelRow& r) { return r.far_mean; });
    rep.touching_comparator =
        std::pow(n, -0.5 * n) * sphere_area(params.n()) * std::pow(3.0, params.p() - sp) / (params.p() - sp);
    for (const auto& r : rep.rows) {
        rep.far_below_comparator = rep.far_below_comparator && r.far_max <= rep.comparator;
        rep.touching_below_comparator = rep.touching_below_comparator && r.touching_max <= rep.touching_comparator;
    }
    rep.bounded = rep.far_below_comparator && rep.touching_below_comparator;
    rep.pass = rep.rows.size() >= 3 && rep.touching_spread < tolerance && rep.far_spread < tolerance && rep.bounded;
    return rep;
}

HolderEstimate holder_constant(const TopField& f, const Box& q, const SpaceParams& params, std::size_t samples,
                               std::uint64_t seed, std::size_t seminorm_budget) {
    const int n = f.dim();
    const std::size_t K = f.top_count();
    HolderEstimate out;
    out.samples = samples;
    out.seminorm = gagliardo(f, Region(q), params, Method::TensorQuad, seminorm_budget, seed).value;
    const double expo = params.frac_s() - params.n() / params.p();
    const double diam = q.diameter();
    std::vector<double> ratio(2 * samples, 0.0);
    std::vector<double> numer(2 * samples, 0.0);
    parallel_for(2 * samples, [&](std::size_t i) {
        SampleRng rng(seed, i);
        Point x(n), y(n);
        for (int a = 0; a < n; ++a) {
            x[a] = q.lo[a] + rng.uniform() * (q.hi[a] - q.lo[a]);
        }
        bool placed = false;
        if (i % 2 == 1) {
            // short pairs: log-uniform distance
            for (int t = 0; t < 64 && !placed; ++t) {
                double r = diam * std::pow(1e-6, rng.uniform());
                Point u(n);
                double len = 0.0;
                for (int a = 0; a < n; ++a) {
                    u[a] = rng.normal();
                }
                len = norm(u);
                if (len == 0.0) {
                    continue;
                }
                y = x + (r / len) * u;
                placed = q.contains(y);
            }
        }
        if (!placed) {
            for (int a = 0; a < n; ++a) {
                y[a] = q.lo[a] + rng.uniform() * (q.hi[a] - q.lo[a]);
            }
        }
        double d = norm(x - y);
        if (d == 0.0) {
            return;
        }
        std::vector<double> fx(K), fy(K);
        f.top(x, fx);
        f.top(y, fy);
        double m = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            m = std::max(m, std::abs(fx[k] - fy[k]));
        }
        numer[i] = m;
        ratio[i] = m / std::pow(d, expo);
    });
    double max_num = *std::max_element(numer.begin(), numer.end());
    if (!(out.seminorm > 0.0)) {
        if (max_num > 0.0) {
            throw Error("numerical inconsistency: zero seminorm with nonconstant top derivatives");
        }
        out.zero_seminorm = true;
        out.stable = true;
        return out;
    }
    double c1 = *std::max_element(ratio.begin(), ratio.begin() + static_cast<std::ptrdiff_t>(samples));
    double c2 = *std::max_element(ratio.begin(), ratio.end());
    out.constant = c1 / out.seminorm;
    out.constant_doubled = c2 / out.seminorm;
    out.stable = std::isfinite(out.constant_doubled) && out.constant_doubled <= 1.15 * out.constant;
    return out;
}

} // namespace whitney
