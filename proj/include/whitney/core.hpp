#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "whitney/multi_index.hpp"

namespace whitney {

class TestFunction;

/// A point of R^n with n <= kMaxDim, stored inline.
struct Point {
    int dim = 0;
    std::array<double, kMaxDim> c{};

    Point() = default;
    explicit Point(int d) : dim(d) {}
    Point(std::initializer_list<double> xs);
    static Point from(std::span<const double> xs);

    double operator[](int i) const { return c[i]; }
    double& operator[](int i) { return c[i]; }
    std::vector<double> to_vector() const { return {c.begin(), c.begin() + dim}; }

    friend bool operator==(const Point& a, const Point& b) = default;
};

Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double t, const Point& a);
double norm2(const Point& a);
double norm(const Point& a);
/// Lexicographic comparison of coordinates.
bool lex_less(const Point& a, const Point& b);

/// Function-space parameters (n, s, p) of L^{s,p}(R^n).
class SpaceParams {
public:
    SpaceParams(int n, double s, double p);

    int n() const { return n_; }
    double s() const { return s_; }
    double p() const { return p_; }
    int floor_s() const { return floor_s_; }
    double frac_s() const { return s_ - floor_s_; }

    /// n/p < {s}
    bool standing_hypothesis() const;
    void require_standing_hypothesis() const;

private:
    int n_;
    double s_;
    double p_;
    int floor_s_;
};

/// Axis-aligned closed box.
struct Box {
    int dim = 0;
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};

    static Box cube(const Point& center, double half_side);
    double volume() const;
    double diameter() const;
    Point center() const;
    bool contains(const Point& x) const;
    /// Concentric dilation by factor c.
    Box dilate(double c) const;
};

/// Q = prod_i [a_i 2^{-m}, (a_i + 1) 2^{-m}].
struct DyadicCube {
    int level = 0;
    int dim = 0;
    std::array<std::int64_t, kMaxDim> a{};

    DyadicCube() = default;
    DyadicCube(int level, std::initializer_list<std::int64_t> coords);
    DyadicCube(int level, int dim, const std::array<std::int64_t, kMaxDim>& coords)
        : level(level), dim(dim), a(coords) {}

    double side() const;
    double diameter() const;
    double lo(int i) const;
    double hi(int i) const;
    Point center() const;
    Box box() const;

    DyadicCube parent() const;
    DyadicCube ancestor(int at_level) const;
    /// Child selected by the low `dim` bits of `mask`.
    DyadicCube child(unsigned mask) const;

    /// "m:a1,a2"
    std::string id() const;
    static DyadicCube parse_id(const std::string& id);

    friend bool operator==(const DyadicCube& x, const DyadicCube& y) = default;
};

/// Orders by level, then coordinates.
bool cube_less(const DyadicCube& x, const DyadicCube& y);

struct DyadicCubeHash {
    std::size_t operator()(const DyadicCube& q) const;
};

struct CubeGeometry {
    Box box;
    double diameter;
};
CubeGeometry cube_geometry(const DyadicCube& q);

/// True iff the closed cubes intersect, decided in integer arithmetic at the finer level.
bool cubes_touch(const DyadicCube& q, const DyadicCube& r);
/// True iff r lies inside q.
bool cube_contains(const DyadicCube& q, const DyadicCube& r);

using Rational = boost::multiprecision::cpp_rational;

/// Exact squared distance from a box to its nearest point of d.
Rational dist2_box_to_points_exact(const Box& b, std::span<const Point> d);
double dist_box_to_points(const Box& b, std::span<const Point> d);

/// J^m_x F: derivative values d^k F(anchor) for |k| <= order in graded-lex order.
class Jet {
public:
    Jet() = default;
    Jet(Point anchor, int order);
    Jet(Point anchor, int order, std::vector<double> coeffs);
    static Jet from_function(const TestFunction& f, const Point& anchor, int order);

    const Point& anchor() const { return anchor_; }
    int order() const { return order_; }
    int dim() const { return anchor_.dim; }
    const MultiIndexBasis& basis() const { return *basis_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(const MultiIndex& k) const;
    void set_coeff(const MultiIndex& k, double v);

    /// Normalized coefficients b_j of the polynomial re-expanded around x.
    void expand_at(const Point& x, std::span<double> out) const;

private:
    Point anchor_;
    int order_ = 0;
    const MultiIndexBasis* basis_ = nullptr;
    std::vector<double> coeffs_;
};

double jet_eval(const Jet& j, const Point& t);
Jet jet_derivative(const Jet& j, const MultiIndex& i);

struct RemainderWitness {
    double t;
    double residual;
};

/// Finds t in (0,1) realizing the mean-value form of the order-m Taylor remainder.
RemainderWitness taylor_remainder_witness(const TestFunction& f, const Point& x, const Point& x0, int m);

/// d^iF(x) - J^m_{x0}(d^iF)(x) in integral form; exactly zero when d^iF has degree <= m.
double taylor_remainder_integral(const TestFunction& f, const Point& x, const Point& x0, const MultiIndex& i, int m);

} // namespace whitney
