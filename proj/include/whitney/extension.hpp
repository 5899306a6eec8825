#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "whitney/decomposition.hpp"
#include "whitney/taylor.hpp"
#include "whitney/test_functions.hpp"

namespace whitney {

/// One jet of order floor(s) per site. Jets sampled from a known function are "validated";
/// raw jet data carries no guarantee that any F realizes it.
class JetField {
public:
    JetField(const SpaceParams& params, std::vector<Jet> jets, bool validated = false);
    static JetField from_function(const SpaceParams& params, const TestFunction& f, std::span<const Point> sites);

    const SpaceParams& params() const { return params_; }
    const std::vector<Jet>& jets() const { return jets_; }
    bool validated() const { return validated_; }
    /// "validated" or "unvalidated jets".
    std::string mode() const { return validated_ ? "validated" : "unvalidated jets"; }
    /// Index of the jet anchored at x, or -1.
    int find(const Point& x) const;

    /// a f + b g over identical anchors.
    static JetField combine(double a, const JetField& f, double b, const JetField& g);

private:
    SpaceParams params_;
    std::vector<Jet> jets_;
    bool validated_ = false;
};

/// Tf = sum_P theta_P J_{x_P} on Omega minus D, and the jet data on D.
class ExtensionField {
public:
    ExtensionField(std::shared_ptr<const WhitneyDecomposition> w, JetField jets);

    const WhitneyDecomposition& decomposition() const { return *w_; }
    std::shared_ptr<const WhitneyDecomposition> decomposition_ptr() const { return w_; }
    const JetField& jets() const { return jets_; }
    int dim() const { return w_->dim(); }
    /// Jet attached to site index k of the decomposition.
    const Jet& site_jet(int k) const { return jets_.jets()[static_cast<std::size_t>(by_site_[static_cast<std::size_t>(k)])]; }

    /// Taylor expansion of Tf at x to the given order; x must lie off D.
    TaylorValue expand(const Point& x, int order) const;
    double eval(const Point& x, const MultiIndex& i) const;

private:
    std::shared_ptr<const WhitneyDecomposition> w_;
    JetField jets_;
    std::vector<int> by_site_;
};

/// The jet polynomial re-expanded at x as a truncated Taylor value of the given order.
TaylorValue jet_taylor(const Jet& j, const Point& x, int order);

double extend_eval(const ExtensionField& tf, const Point& x, const MultiIndex& i);

struct JetAgreementRow {
    double radius = 0.0;
    /// max over directions of |d^i Tf - d^i J_{x0}|
    double error_jet = 0.0;
    /// max over directions of |d^i Tf - d^i F|, when F is known
    double error_true = 0.0;
};

struct JetAgreementReport {
    int site = -1;
    MultiIndex index;
    std::vector<JetAgreementRow> rows;
    /// Least-squares slope of log e(r) against log r; +inf when e vanishes identically.
    double order_jet = 0.0;
    double order_true = 0.0;
    bool has_true = false;
    /// floor(s) - |i|
    int expected = 0;
    bool pass = false;
};

/// Convergence of d^i Tf towards the site's jet along fixed directions.
/// Passes when the fitted order (true-F reference when given) reaches expected + margin. Errors at
/// roundoff level relative to the derivative are left out of the fit.
JetAgreementReport jet_agreement_check(const ExtensionField& tf, int site, const MultiIndex& i,
                                       std::span<const double> radii, const TestFunction* f = nullptr,
                                       double margin = 0.5);

/// Slope of the least-squares line through (log r, log e) over entries with e > 0.
double fitted_order(std::span<const double> r, std::span<const double> e);

struct GridSpec {
    Box box;
    std::array<int, kMaxDim> count{};

    std::size_t size() const;
    /// Node with row-major index k; the first axis varies slowest.
    Point node(std::size_t k) const;
};

struct SampleError {
    std::size_t index;
    Point x;
    std::string message;
};

struct FieldSample {
    GridSpec grid;
    MultiIndex deriv;
    std::vector<double> values;
    std::vector<SampleError> errors;
};

FieldSample sample_field(const ExtensionField& tf, const GridSpec& grid, const MultiIndex& i);
void write_csv(const FieldSample& s, std::ostream& out);

} // namespace whitney
