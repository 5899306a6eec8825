#include "whitney/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "whitney/error.hpp"
#include "whitney/quadrature.hpp"
#include "whitney/test_functions.hpp"

namespace whitney {

Point::Point(std::initializer_list<double> xs) : dim(static_cast<int>(xs.size())) {
    if (dim > kMaxDim) {
        throw Error("point dimension out of range");
    }
    std::copy(xs.begin(), xs.end(), c.begin());
}

Point Point::from(std::span<const double> xs) {
    if (xs.empty() || xs.size() > static_cast<std::size_t>(kMaxDim)) {
        throw Error("point dimension out of range");
    }
    Point p(static_cast<int>(xs.size()));
    std::copy(xs.begin(), xs.end(), p.c.begin());
    return p;
}

Point operator+(const Point& a, const Point& b) {
    Point r(a.dim);
    for (int i = 0; i < a.dim; ++i) {
        r[i] = a[i] + b[i];
    }
    return r;
}

Point operator-(const Point& a, const Point& b) {
    Point r(a.dim);
    for (int i = 0; i < a.dim; ++i) {
        r[i] = a[i] - b[i];
    }
    return r;
}

Point operator*(double t, const Point& a) {
    Point r(a.dim);
    for (int i = 0; i < a.dim; ++i) {
        r[i] = t * a[i];
    }
    return r;
}

double norm2(const Point& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) {
        s += a[i] * a[i];
    }
    return s;
}

double norm(const Point& a) { return std::sqrt(norm2(a)); }

bool lex_less(const Point& a, const Point& b) {
    return std::lexicographical_compare(a.c.begin(), a.c.begin() + a.dim, b.c.begin(), b.c.begin() + b.dim);
}

SpaceParams::SpaceParams(int n, double s, double p) : n_(n), s_(s), p_(p) {
    if (n < 1 || n > kMaxDim) {
        throw Error("dimension n must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error("regularity s must be positive");
    }
    if (s == std::floor(s)) {
        throw Error("regularity s must not be an integer");
    }
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw Error("integrability p must be >= 1");
    }
    floor_s_ = static_cast<int>(std::floor(s));
    if (floor_s_ + 1 > 8) {
        throw Error("regularity s too large for truncated Taylor arithmetic");
    }
}

bool SpaceParams::standing_hypothesis() const { return n_ / p_ < frac_s(); }

void SpaceParams::require_standing_hypothesis() const {
    if (!standing_hypothesis()) {
        std::ostringstream os;
        os << "standing hypothesis n/p < {s} violated (n=" << n_ << ", s=" << s_ << ", p=" << p_ << ")";
        throw Error(os.str());
    }
}

Box Box::cube(const Point& center, double half_side) {
    Box b;
    b.dim = center.dim;
    for (int i = 0; i < b.dim; ++i) {
        b.lo[i] = center[i] - half_side;
        b.hi[i] = center[i] + half_side;
    }
    return b;
}

double Box::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) {
        v *= hi[i] - lo[i];
    }
    return v;
}

double Box::diameter() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    }
    return std::sqrt(s);
}

Point Box::center() const {
    Point c(dim);
    for (int i = 0; i < dim; ++i) {
        c[i] = 0.5 * (lo[i] + hi[i]);
    }
    return c;
}

bool Box::contains(const Point& x) const {
    for (int i = 0; i < dim; ++i) {
        if (x[i] < lo[i] || x[i] > hi[i]) {
            return false;
        }
    }
    return true;
}

Box Box::dilate(double c) const {
    Box b = *this;
    for (int i = 0; i < dim; ++i) {
        double mid = 0.5 * (lo[i] + hi[i]);
        double half = 0.5 * (hi[i] - lo[i]);
        b.lo[i] = mid - c * half;
        b.hi[i] = mid + c * half;
    }
    return b;
}

DyadicCube::DyadicCube(int level, std::initializer_list<std::int64_t> coords)
    : level(level), dim(static_cast<int>(coords.size())) {
    if (dim < 1 || dim > kMaxDim) {
        throw Error("cube dimension out of range");
    }
    std::copy(coords.begin(), coords.end(), a.begin());
}

double DyadicCube::side() const { return std::ldexp(1.0, -level); }
double DyadicCube::diameter() const { return std::sqrt(static_cast<double>(dim)) * side(); }
double DyadicCube::lo(int i) const { return std::ldexp(static_cast<double>(a[i]), -level); }
double DyadicCube::hi(int i) const { return std::ldexp(static_cast<double>(a[i] + 1), -level); }

Point DyadicCube::center() const {
    Point c(dim);
    for (int i = 0; i < dim; ++i) {
        c[i] = std::ldexp(static_cast<double>(a[i]) + 0.5, -level);
    }
    return c;
}

Box DyadicCube::box() const {
    Box b;
    b.dim = dim;
    for (int i = 0; i < dim; ++i) {
        b.lo[i] = lo(i);
        b.hi[i] = hi(i);
    }
    return b;
}

DyadicCube DyadicCube::parent() const {
    DyadicCube p = *this;
    p.level = level - 1;
    for (int i = 0; i < dim; ++i) {
        p.a[i] = a[i] >> 1;
    }
    return p;
}

DyadicCube DyadicCube::ancestor(int at_level) const {
    int d = level - at_level;
    if (d < 0 || d > 62) {
        throw Error("invalid ancestor level");
    }
    DyadicCube p = *this;
    p.level = at_level;
    for (int i = 0; i < dim; ++i) {
        p.a[i] = a[i] >> d;
    }
    return p;
}

DyadicCube DyadicCube::child(unsigned mask) const {
    DyadicCube c = *this;
    c.level = level + 1;
    for (int i = 0; i < dim; ++i) {
        c.a[i] = 2 * a[i] + ((mask >> i) & 1u);
    }
    return c;
}

std::string DyadicCube::id() const {
    std::string s = std::to_string(level) + ":";
    for (int i = 0; i < dim; ++i) {
        if (i) {
            s += ',';
        }
        s += std::to_string(a[i]);
    }
    return s;
}

DyadicCube DyadicCube::parse_id(const std::string& id) {
    auto colon = id.find(':');
    if (colon == std::string::npos) {
        throw Error("malformed cube id '" + id + "'");
    }
    DyadicCube q;
    try {
        q.level = std::stoi(id.substr(0, colon));
        std::stringstream ss(id.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (q.dim >= kMaxDim) {
                throw Error("malformed cube id '" + id + "'");
            }
            q.a[q.dim++] = std::stoll(item);
        }
    } catch (const std::logic_error&) {
        throw Error("malformed cube id '" + id + "'");
    }
    if (q.dim == 0) {
        throw Error("malformed cube id '" + id + "'");
    }
    return q;
}

bool cube_less(const DyadicCube& x, const DyadicCube& y) {
    if (x.level != y.level) {
        return x.level < y.level;
    }
    return std::lexicographical_compare(x.a.begin(), x.a.begin() + x.dim, y.a.begin(), y.a.begin() + y.dim);
}

std::size_t DyadicCubeHash::operator()(const DyadicCube& q) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(q.level + 1024);
    for (int i = 0; i < q.dim; ++i) {
        h ^= static_cast<std::uint64_t>(q.a[i]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

CubeGeometry cube_geometry(const DyadicCube& q) { return {q.box(), q.diameter()}; }

bool cubes_touch(const DyadicCube& q, const DyadicCube& r) {
    if (q.dim != r.dim) {
        throw Error("cube dimensions differ");
    }
    const DyadicCube& coarse = q.level <= r.level ? q : r;
    const DyadicCube& fine = q.level <= r.level ? r : q;
    int d = fine.level - coarse.level;
    if (d > 62) {
        throw Error("level difference too large for exact comparison");
    }
    for (int i = 0; i < q.dim; ++i) {
        __int128 lo = static_cast<__int128>(coarse.a[i]) << d;
        __int128 hi = static_cast<__int128>(coarse.a[i] + 1) << d;
        __int128 flo = fine.a[i];
        __int128 fhi = static_cast<__int128>(fine.a[i]) + 1;
        if (fhi < lo || flo > hi) {
            return false;
        }
    }
    return true;
}

bool cube_contains(const DyadicCube& q, const DyadicCube& r) {
    if (r.level < q.level || r.dim != q.dim) {
        return false;
    }
    return r.ancestor(q.level) == q;
}

Rational dist2_box_to_points_exact(const Box& b, std::span<const Point> d) {
    if (d.empty()) {
        throw Error("empty reference set");
    }
    Rational best = -1;
    for (const Point& x : d) {
        Rational s = 0;
        for (int i = 0; i < b.dim; ++i) {
            Rational xi(x[i]);
            Rational lo(b.lo[i]);
            Rational hi(b.hi[i]);
            Rational gap = 0;
            if (xi < lo) {
                gap = lo - xi;
            } else if (xi > hi) {
                gap = xi - hi;
            }
            s += gap * gap;
        }
        if (best < 0 || s < best) {
            best = s;
        }
    }
    return best;
}

double dist_box_to_points(const Box& b, std::span<const Point> d) {
    return std::sqrt(static_cast<double>(dist2_box_to_points_exact(b, d)));
}

Jet::Jet(Point anchor, int order)
    : anchor_(anchor), order_(order), basis_(MultiIndexBasis::get(anchor.dim, order).get()),
      coeffs_(basis_->size(), 0.0) {}

Jet::Jet(Point anchor, int order, std::vector<double> coeffs) : Jet(anchor, order) {
    if (coeffs.size() != coeffs_.size()) {
        throw Error("jet coefficient count does not match order");
    }
    coeffs_ = std::move(coeffs);
}

Jet Jet::from_function(const TestFunction& f, const Point& anchor, int order) {
    Jet j(anchor, order);
    for (std::size_t i = 0; i < j.basis_->size(); ++i) {
        j.coeffs_[i] = f.derivative(anchor, (*j.basis_)[i]);
    }
    return j;
}

double Jet::coeff(const MultiIndex& k) const {
    int i = basis_->index_of(k);
    if (i < 0) {
        throw Error("order exceeded");
    }
    return coeffs_[static_cast<std::size_t>(i)];
}

void Jet::set_coeff(const MultiIndex& k, double v) {
    int i = basis_->index_of(k);
    if (i < 0) {
        throw Error("order exceeded");
    }
    coeffs_[static_cast<std::size_t>(i)] = v;
}

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) {
        r = r * (n - k + j) / j;
    }
    return r;
}

double ipow(double x, int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) {
        r *= x;
    }
    return r;
}

} // namespace

void Jet::expand_at(const Point& x, std::span<double> out) const {
    const auto& B = *basis_;
    const int n = anchor_.dim;
    Point d = x - anchor_;
    for (std::size_t j = 0; j < B.size(); ++j) {
        const MultiIndex& mj = B[j];
        double acc = 0.0;
        for (std::size_t k = j; k < B.size(); ++k) {
            const MultiIndex& mk = B[k];
            if (coeffs_[k] == 0.0 || !mj.dominated_by(mk)) {
                continue;
            }
            double term = coeffs_[k] / mk.factorial();
            for (int i = 0; i < n; ++i) {
                int e = mk[i] - mj[i];
                if (e) {
                    term *= binomial(mk[i], mj[i]) * ipow(d[i], e);
                }
            }
            acc += term;
        }
        out[j] = acc;
    }
}

double jet_eval(const Jet& j, const Point& t) {
    if (t.dim != j.dim()) {
        throw Error("point dimension does not match jet");
    }
    const auto& B = j.basis();
    Point d = t - j.anchor();
    double acc = 0.0;
    for (std::size_t k = 0; k < B.size(); ++k) {
        const MultiIndex& mk = B[k];
        double term = j.coeffs()[k] / mk.factorial();
        for (int i = 0; i < t.dim; ++i) {
            term *= ipow(d[i], mk[i]);
        }
        acc += term;
    }
    return acc;
}

Jet jet_derivative(const Jet& j, const MultiIndex& i) {
    if (i.order() > j.order()) {
        throw Error("order exceeded");
    }
    Jet r(j.anchor(), j.order() - i.order());
    const auto& B = r.basis();
    for (std::size_t k = 0; k < B.size(); ++k) {
        r.set_coeff(B[k], j.coeff(B[k] + i));
    }
    return r;
}

namespace {

double monomial(const Point& h, const MultiIndex& k) {
    double r = 1.0;
    for (int i = 0; i < h.dim; ++i) {
        r *= ipow(h[i], k[i]);
    }
    return r;
}

} // namespace

RemainderWitness taylor_remainder_witness(const TestFunction& f, const Point& x, const Point& x0, int m) {
    if (x == x0) {
        throw Error("witness requires x != x0");
    }
    if (m < 0) {
        throw Error("order must be non-negative");
    }
    int deg = f.polynomial_degree();
    if (deg >= 0 && deg <= m) {
        return {0.5, 0.0};
    }
    const int n = x.dim;
    Point h = x - x0;
    // F(x) - J^{m-1}_{x0}F(x) must equal sum_{|k|=m} d^kF(xi_t) h^k / k!
    double lhs = f.value(x);
    double scale = std::abs(lhs);
    for (const auto& k : multi_indices_up_to(n, m - 1)) {
        double t = f.derivative(x0, k) * monomial(h, k) / k.factorial();
        lhs -= t;
        scale += std::abs(t);
    }
    auto top = multi_indices_of_order(n, m);
    auto residual = [&](double t) {
        Point xi = x0 + t * h;
        double r = lhs;
        for (const auto& k : top) {
            r -= f.derivative(xi, k) * monomial(h, k) / k.factorial();
        }
        return r;
    };
    constexpr int kGrid = 10000;
    double prev_t = 0.0;
    double prev_r = residual(0.0);
    double rmin = prev_r;
    double rmax = prev_r;
    double tol = 1e-10 * std::max(scale, 1e-300);
    for (int i = 1; i <= kGrid; ++i) {
        double t = static_cast<double>(i) / kGrid;
        double r = residual(t);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        if (i < kGrid && std::abs(r) <= tol) {
            return {t, r};
        }
        if ((prev_r < 0.0) != (r < 0.0)) {
            double a = prev_t;
            double b = t;
            double ra = prev_r;
            for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
                double mid = 0.5 * (a + b);
                double rm = residual(mid);
                if ((ra < 0.0) == (rm < 0.0)) {
                    a = mid;
                    ra = rm;
                } else {
                    b = mid;
                }
            }
            double t_star = 0.5 * (a + b);
            return {t_star, residual(t_star)};
        }
        prev_t = t;
        prev_r = r;
    }
    if (std::max(std::abs(rmin), std::abs(rmax)) <= tol) {
        return {0.5, residual(0.5)};
    }
    std::ostringstream os;
    os << "witness not bracketed (residual range [" << rmin << ", " << rmax << "] on " << kGrid << " points)";
    throw Error(os.str());
}

double taylor_remainder_integral(const TestFunction& f, const Point& x, const Point& x0, const MultiIndex& i, int m) {
    if (m < 0) {
        throw Error("order exceeded");
    }
    const int n = x.dim;
    Point h = x - x0;
    const GaussRule& g = gauss_legendre(32);
    double total = 0.0;
    for (const auto& k : multi_indices_of_order(n, m + 1)) {
        double coef = (m + 1) * monomial(h, k) / k.factorial();
        if (coef == 0.0) {
            continue;
        }
        MultiIndex ki = k + i;
        double integral = 0.0;
        for (int q = 0; q < g.size(); ++q) {
            double t = g.x[q];
            integral += g.w[q] * std::pow(1.0 - t, m) * f.derivative(x0 + t * h, ki);
        }
        total += coef * integral;
    }
    return total;
}

} // namespace whitney
