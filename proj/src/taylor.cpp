#include "whitney/taylor.hpp"

#include <cmath>

#include "whitney/error.hpp"

namespace whitney {

Series::Series(int order, double c0) : order_(order) {
    if (order < 0 || order > kMaxOrder) {
        throw Error("order exceeded");
    }
    c_[0] = c0;
}

Series Series::variable(int order, double x0) {
    Series s(order, x0);
    if (order >= 1) {
        s.c_[1] = 1.0;
    }
    return s;
}

Series& Series::operator+=(const Series& o) {
    for (int j = 0; j <= order_; ++j) {
        c_[j] += o.c_[j];
    }
    return *this;
}

Series& Series::operator-=(const Series& o) {
    for (int j = 0; j <= order_; ++j) {
        c_[j] -= o.c_[j];
    }
    return *this;
}

Series& Series::operator*=(double a) {
    for (int j = 0; j <= order_; ++j) {
        c_[j] *= a;
    }
    return *this;
}

Series operator*(const Series& a, const Series& b) {
    Series r(a.order_);
    for (int k = 0; k <= a.order_; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) {
            acc += a.c_[j] * b.c_[k - j];
        }
        r.c_[k] = acc;
    }
    return r;
}

Series Series::reciprocal() const {
    if (c_[0] == 0.0) {
        throw Error("reciprocal of a series with zero constant term");
    }
    Series r(order_);
    r.c_[0] = 1.0 / c_[0];
    for (int k = 1; k <= order_; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) {
            acc += c_[j] * r.c_[k - j];
        }
        r.c_[k] = -acc / c_[0];
    }
    return r;
}

Series operator/(const Series& a, const Series& b) { return a * b.reciprocal(); }

Series Series::scaled_argument(double a) const {
    Series r(*this);
    double f = 1.0;
    for (int j = 1; j <= order_; ++j) {
        f *= a;
        r.c_[j] *= f;
    }
    return r;
}

Series exp(const Series& a) {
    // f' = a' f
    Series f(a.order(), std::exp(a[0]));
    for (int k = 1; k <= a.order(); ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) {
            acc += j * a[j] * f[k - j];
        }
        f[k] = acc / k;
    }
    return f;
}

Series log(const Series& a) {
    if (a[0] <= 0.0) {
        throw Error("log of a non-positive series");
    }
    // a f' = a'
    Series f(a.order(), std::log(a[0]));
    for (int k = 1; k <= a.order(); ++k) {
        double acc = k * a[k];
        for (int j = 1; j < k; ++j) {
            acc -= j * f[j] * a[k - j];
        }
        f[k] = acc / (k * a[0]);
    }
    return f;
}

Series pow(const Series& a, double alpha) {
    if (a[0] <= 0.0) {
        throw Error("pow of a non-positive series");
    }
    // a f' = alpha a' f
    Series f(a.order(), std::pow(a[0], alpha));
    for (int k = 1; k <= a.order(); ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) {
            acc += ((alpha + 1.0) * j - k) * a[j] * f[k - j];
        }
        f[k] = acc / (k * a[0]);
    }
    return f;
}

TaylorValue::TaylorValue(int dim, int order, double c0) {
    if (order > kMaxOrder) {
        throw Error("order exceeded");
    }
    basis_ = MultiIndexBasis::get(dim, order).get();
    c_.assign(basis_->size(), 0.0);
    c_[0] = c0;
}

TaylorValue TaylorValue::variable(int dim, int order, int axis, double x0) {
    TaylorValue t(dim, order, x0);
    if (order >= 1) {
        t.c_[static_cast<std::size_t>(t.basis_->index_of(MultiIndex::unit(dim, axis)))] = 1.0;
    }
    return t;
}

TaylorValue TaylorValue::embed(const Series& s, int axis, int dim) {
    TaylorValue t(dim, s.order());
    MultiIndex k(dim);
    for (int j = 0; j <= s.order(); ++j) {
        k[axis] = j;
        t.c_[static_cast<std::size_t>(t.basis_->index_of(k))] = s[j];
    }
    return t;
}

double TaylorValue::coeff(const MultiIndex& k) const {
    int i = basis_->index_of(k);
    if (i < 0) {
        throw Error("order exceeded");
    }
    return c_[static_cast<std::size_t>(i)];
}

double TaylorValue::partial(const MultiIndex& k) const { return coeff(k) * k.factorial(); }

TaylorValue& TaylorValue::operator+=(const TaylorValue& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) {
        c_[i] += o.c_[i];
    }
    return *this;
}

TaylorValue& TaylorValue::operator-=(const TaylorValue& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) {
        c_[i] -= o.c_[i];
    }
    return *this;
}

TaylorValue& TaylorValue::operator*=(double a) {
    for (double& v : c_) {
        v *= a;
    }
    return *this;
}

TaylorValue operator*(const TaylorValue& a, const TaylorValue& b) {
    TaylorValue r(a);
    std::fill(r.c_.begin(), r.c_.end(), 0.0);
    for (const auto& pr : a.basis_->products()) {
        r.c_[static_cast<std::size_t>(pr.out)] +=
            a.c_[static_cast<std::size_t>(pr.lhs)] * b.c_[static_cast<std::size_t>(pr.rhs)];
    }
    return r;
}

TaylorValue& TaylorValue::operator*=(const TaylorValue& o) { return *this = *this * o; }

void TaylorValue::add_product(const TaylorValue& a, const TaylorValue& b) {
    for (const auto& pr : basis_->products()) {
        c_[static_cast<std::size_t>(pr.out)] +=
            a.c_[static_cast<std::size_t>(pr.lhs)] * b.c_[static_cast<std::size_t>(pr.rhs)];
    }
}

TaylorValue TaylorValue::compose(const Series& outer) const {
    const int k = order();
    TaylorValue z(*this);
    z.c_[0] = 0.0;
    TaylorValue r(dim(), k, outer[k]);
    for (int j = k - 1; j >= 0; --j) {
        r = r * z;
        r.c_[0] += outer[j];
    }
    return r;
}

TaylorValue TaylorValue::reciprocal() const {
    return compose(Series::variable(order(), value()).reciprocal());
}

TaylorValue operator/(const TaylorValue& a, const TaylorValue& b) { return a * b.reciprocal(); }

TaylorValue exp(const TaylorValue& a) { return a.compose(exp(Series::variable(a.order(), a.value()))); }

TaylorValue pow(const TaylorValue& a, double alpha) {
    return a.compose(pow(Series::variable(a.order(), a.value()), alpha));
}

} // namespace whitney
