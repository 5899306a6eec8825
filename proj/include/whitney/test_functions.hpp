#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "whitney/core.hpp"

namespace whitney {

/// A named analytic function on R^n with exact partial derivatives.
class TestFunction {
public:
    virtual ~TestFunction() = default;
    virtual int dim() const = 0;
    virtual std::string name() const = 0;
    virtual double derivative(const Point& x, const MultiIndex& k) const = 0;
    /// Largest degree of a polynomial, or -1 when not a polynomial.
    virtual int polynomial_degree() const { return -1; }

    double value(const Point& x) const { return derivative(x, MultiIndex(dim())); }
};

using TestFunctionPtr = std::shared_ptr<const TestFunction>;

class Polynomial final : public TestFunction {
public:
    /// Monomial terms c * x^k.
    Polynomial(int dim, std::vector<std::pair<MultiIndex, double>> terms);
    static Polynomial constant(int dim, double c);

    int dim() const override { return dim_; }
    std::string name() const override { return "polynomial"; }
    double derivative(const Point& x, const MultiIndex& k) const override;
    int polynomial_degree() const override;
    const std::vector<std::pair<MultiIndex, double>>& terms() const { return terms_; }

private:
    int dim_;
    std::vector<std::pair<MultiIndex, double>> terms_;
};

/// A * exp(-|x - c|^2 / w^2)
class Gaussian final : public TestFunction {
public:
    Gaussian(Point center, double width, double amplitude = 1.0);

    int dim() const override { return center_.dim; }
    std::string name() const override { return "gaussian"; }
    double derivative(const Point& x, const MultiIndex& k) const override;

    const Point& center() const { return center_; }
    double width() const { return width_; }
    double amplitude() const { return amplitude_; }

private:
    Point center_;
    double width_;
    double amplitude_;
};

/// prod_i exp(-1 / (1 - t_i^2)) with t = (x - c) / w, zero outside the box.
class BumpProduct final : public TestFunction {
public:
    BumpProduct(Point center, double width, double amplitude = 1.0);

    int dim() const override { return center_.dim; }
    std::string name() const override { return "bump"; }
    double derivative(const Point& x, const MultiIndex& k) const override;

    const Point& center() const { return center_; }
    double width() const { return width_; }
    double amplitude() const { return amplitude_; }

private:
    Point center_;
    double width_;
    double amplitude_;
};

/// |x - c|^beta
class RadialPower final : public TestFunction {
public:
    RadialPower(Point center, double beta);

    int dim() const override { return center_.dim; }
    std::string name() const override { return "radial_power"; }
    double derivative(const Point& x, const MultiIndex& k) const override;

    const Point& center() const { return center_; }
    double beta() const { return beta_; }

private:
    Point center_;
    double beta_;
};

/// Sum of scaled test functions.
class LinearCombination final : public TestFunction {
public:
    explicit LinearCombination(std::vector<std::pair<double, TestFunctionPtr>> parts);

    int dim() const override;
    std::string name() const override { return "sum"; }
    double derivative(const Point& x, const MultiIndex& k) const override;
    int polynomial_degree() const override;

private:
    std::vector<std::pair<double, TestFunctionPtr>> parts_;
};

} // namespace whitney
