#pragma once

#include <array>
#include <cstddef>

#include <boost/container/small_vector.hpp>

#include "whitney/multi_index.hpp"

namespace whitney {

/// Highest derivative order carried by truncated Taylor arithmetic.
inline constexpr int kMaxOrder = 8;

/// Univariate truncated power series sum_j c_j h^j, j <= order.
class Series {
public:
    Series() = default;
    explicit Series(int order, double c0 = 0.0);
    /// The series of the identity map around x0: x0 + h.
    static Series variable(int order, double x0);

    int order() const { return order_; }
    double operator[](int j) const { return c_[j]; }
    double& operator[](int j) { return c_[j]; }

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(double a);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(Series a, double b) { return a *= b; }
    friend Series operator*(const Series& a, const Series& b);
    friend Series operator/(const Series& a, const Series& b);
    Series operator-() const { return *this * -1.0; }

    Series reciprocal() const;
    /// Substitutes h -> a*h.
    Series scaled_argument(double a) const;

private:
    std::array<double, kMaxOrder + 1> c_{};
    int order_ = 0;
};

Series exp(const Series& a);
Series log(const Series& a);
Series pow(const Series& a, double alpha);

/// Truncated multivariate Taylor expansion around a point.
/// Stores normalized coefficients c_k = d^k f / k!, indexed by the graded-lex basis.
class TaylorValue {
public:
    TaylorValue() = default;
    TaylorValue(int dim, int order, double c0 = 0.0);

    static TaylorValue variable(int dim, int order, int axis, double x0);
    /// Lifts a univariate series in coordinate `axis` to `dim` variables.
    static TaylorValue embed(const Series& s, int axis, int dim);

    int dim() const { return basis_->dim(); }
    int order() const { return basis_->order(); }
    const MultiIndexBasis& basis() const { return *basis_; }
    std::size_t size() const { return c_.size(); }

    double value() const { return c_[0]; }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    double coeff(const MultiIndex& k) const;
    /// Partial derivative d^k f = k! c_k.
    double partial(const MultiIndex& k) const;

    TaylorValue& operator+=(const TaylorValue& o);
    TaylorValue& operator-=(const TaylorValue& o);
    TaylorValue& operator*=(double a);
    TaylorValue& operator*=(const TaylorValue& o);
    /// this += a * b without a temporary.
    void add_product(const TaylorValue& a, const TaylorValue& b);

    friend TaylorValue operator+(TaylorValue a, const TaylorValue& b) { return a += b; }
    friend TaylorValue operator-(TaylorValue a, const TaylorValue& b) { return a -= b; }
    friend TaylorValue operator*(TaylorValue a, double b) { return a *= b; }
    friend TaylorValue operator*(double b, TaylorValue a) { return a *= b; }
    friend TaylorValue operator*(const TaylorValue& a, const TaylorValue& b);
    friend TaylorValue operator/(const TaylorValue& a, const TaylorValue& b);

    /// f(this) given the series of f at this->value().
    TaylorValue compose(const Series& outer) const;
    TaylorValue reciprocal() const;

private:
    const MultiIndexBasis* basis_ = nullptr;
    boost::container::small_vector<double, 35> c_;
};

TaylorValue exp(const TaylorValue& a);
TaylorValue pow(const TaylorValue& a, double alpha);

} // namespace whitney
