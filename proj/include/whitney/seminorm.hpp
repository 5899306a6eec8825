#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "whitney/decomposition.hpp"
#include "whitney/extension.hpp"
#include "whitney/test_functions.hpp"

namespace whitney {

/// A field seen through its top-order partials d^k f, |k| = floor(s).
class TopField {
public:
    virtual ~TopField() = default;
    virtual int dim() const = 0;
    virtual int order() const = 0;
    /// False for fields with a known interior singularity in their derivatives.
    virtual bool smooth() const = 0;
    virtual std::string name() const = 0;
    /// Writes d^k f(x) for every |k| = order, graded-lex.
    virtual void top(const Point& x, std::span<double> out) const = 0;
    std::size_t top_count() const;
};

class AnalyticField final : public TopField {
public:
    AnalyticField(TestFunctionPtr f, int order);

    int dim() const override { return f_->dim(); }
    int order() const override { return order_; }
    bool smooth() const override;
    std::string name() const override { return "analytic:" + f_->name(); }
    void top(const Point& x, std::span<double> out) const override;
    const TestFunction& function() const { return *f_; }

private:
    TestFunctionPtr f_;
    int order_;
    std::vector<MultiIndex> top_;
};

/// Top partials of Tf. Inside the guard radius 2^{-L_max} of a site the jet polynomial is
/// used directly, which is exact there because nearby cubes all anchor at that site.
class ExtensionTopField final : public TopField {
public:
    explicit ExtensionTopField(std::shared_ptr<const ExtensionField> tf);

    int dim() const override { return tf_->dim(); }
    int order() const override { return order_; }
    bool smooth() const override { return true; }
    std::string name() const override { return "extension"; }
    void top(const Point& x, std::span<double> out) const override;

    const ExtensionField& field() const { return *tf_; }
    std::size_t evaluations() const { return evals_.load(); }
    std::size_t fallbacks() const { return fallbacks_.load(); }

private:
    std::shared_ptr<const ExtensionField> tf_;
    int order_;
    double guard2_;
    std::vector<MultiIndex> top_;
    mutable std::atomic<std::size_t> evals_{0};
    mutable std::atomic<std::size_t> fallbacks_{0};
};

enum class Method { PlainMC, ImportanceMC, TensorQuad };
std::string to_string(Method m);
Method parse_method(const std::string& s);

/// A union of boxes with disjoint interiors.
struct Region {
    std::vector<Box> boxes;

    Region() = default;
    Region(Box b) : boxes{b} {}
    explicit Region(std::vector<Box> bs) : boxes(std::move(bs)) {}
    int dim() const { return boxes.front().dim; }
    double volume() const;
    double diameter() const;
    bool contains(const Point& x) const;
    /// Maps a uniform draw in [0,1)^n plus a box selector in [0,1) to a point of the union.
    Point sample(std::span<const double> u, double pick) const;
};

struct SeminormEstimate {
    /// ||f||_{L^{s,p}(region)}
    double value = 0.0;
    double error_bound = 0.0;
    /// value^p, the double integral itself
    double value_p = 0.0;
    double error_bound_p = 0.0;
    Method method = Method::PlainMC;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    Region region;
    std::vector<std::string> warnings;
    /// Fraction of field evaluations answered from jets inside the guard radius.
    double fallback_fraction = 0.0;
};

/// (sum_{|k|=floor s} |d^k f(x) - d^k f(y)|)^p / |x - y|^{n + {s} p}
double gagliardo_integrand(std::span<const double> fx, std::span<const double> fy, const Point& x, const Point& y,
                           const SpaceParams& params);

SeminormEstimate gagliardo(const TopField& f, const Region& region, const SpaceParams& params, Method method,
                           std::size_t budget, std::uint64_t seed);

/// Plain Monte Carlo over region x region with the pairs split into buckets by `bucket(x, y)`
/// (return -1 to drop a pair). Every bucket reuses the same samples.
std::vector<SeminormEstimate> plain_mc_split(const TopField& f, const Region& region, const SpaceParams& params,
                                             std::size_t budget, std::uint64_t seed, int buckets,
                                             const std::function<int(const Point&, const Point&)>& bucket);

/// Fills value and error_bound from value_p and error_bound_p.
void finish_estimate(SeminormEstimate& e, const SpaceParams& params);

/// |S^{n-1}|
double sphere_area(int n);

/// Exact-to-quadrature double integrals of |x - y|^{-gamma} over pairs of dyadic cubes.
/// Touching equal-size pairs come from a self-similarity linear system; separated pairs
/// are integrated by Gauss rules with subdivision until well separated.
class KernelIntegrator {
public:
    KernelIntegrator(int dim, double gamma, int gauss_order = 4);

    double pair(const DyadicCube& a, const DyadicCube& b) const;
    /// Box pair with positive separation.
    double separated(const Box& a, const Box& b) const;
    /// Unit cubes [0,1]^n and e + [0,1]^n.
    double unit_offset(std::span<const std::int64_t> e) const;

private:
    double gauss_unit(std::span<const std::int64_t> e, int q) const;
    double separated_rec(const Box& a, const Box& b, int depth) const;

    int n_;
    double gamma_;
    int q_;
    std::vector<double> touching_;
    mutable std::map<std::vector<std::int64_t>, double> cache_;
};

struct Lemma7Touching {
    double integral = 0.0;
    double ratio = 0.0;
};

/// int_{Q'} int_Q |x - y|^{-(n + {s}p - p)} and its ratio to delta_Q^{n + p - {s}p}.
Lemma7Touching lemma7_touching(const DyadicCube& q, const DyadicCube& qp, const SpaceParams& params);

struct Lemma7Far {
    double sum = 0.0;
    /// part of sum coming from the unresolved fringe around D
    double fringe_part = 0.0;
    double ratio = 0.0;
    /// the complement-ball constant n^{-n/2} |S^{n-1}| (2 sqrt n)^{{s}p} / ({s}p)
    double comparator = 0.0;
    std::size_t terms = 0;
    /// largest relative change of the partial sums over the last tenth of the terms, sorted descending
    double tail_change = 0.0;
};

/// sum over cubes Q' not touching Q (and fringe cells) of int_Q int_{Q'} |x - y|^{-(n + {s}p)},
/// with its ratio to delta_Q^{n - {s}p}. Requires Q.level <= L_max - 2 so no fringe cell touches Q.
Lemma7Far lemma7_far(const WhitneyDecomposition& w, const DyadicCube& q, const SpaceParams& params);

struct Lemma7LevelRow {
    int level = 0;
    std::size_t pairs = 0;
    double touching_mean = 0.0;
    double touching_max = 0.0;
    std::size_t far_cubes = 0;
    double far_mean = 0.0;
    double far_max = 0.0;
};

struct Lemma7ScaleReport {
    std::vector<Lemma7LevelRow> rows;
    double touching_spread = 0.0;
    double far_spread = 0.0;
    double comparator = 0.0;
    bool far_below_comparator = true;
    /// n^{-n/2} |S^{n-1}| 3^{p - {s}p} / (p - {s}p): the integral over Q x B(x, 3 delta_Q) that holds every touching Q'
    double touching_comparator = 0.0;
    bool touching_below_comparator = true;
    /// both comparators respected at every level
    bool bounded = true;
    bool pass = false;
};

Lemma7ScaleReport lemma7_scale_check(const WhitneyDecomposition& w, const SpaceParams& params,
                                     std::span<const int> levels, std::size_t cubes_per_level = 6,
                                     double tolerance = 0.10);

struct HolderEstimate {
    double constant = 0.0;
    double constant_doubled = 0.0;
    double seminorm = 0.0;
    std::size_t samples = 0;
    bool zero_seminorm = false;
    bool stable = false;
};

/// max over sampled pairs of |d^k F(x) - d^k F(y)| / (||F||_{L^{s,p}(Q)} |x - y|^{{s} - n/p}),
/// at N and 2N samples (the first N shared).
HolderEstimate holder_constant(const TopField& f, const Box& q, const SpaceParams& params, std::size_t samples,
                               std::uint64_t seed, std::size_t seminorm_budget = 200000);

} // namespace whitney
