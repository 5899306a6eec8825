#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "whitney/decomposition.hpp"
#include "whitney/taylor.hpp"

namespace whitney {

/// Smooth step h(u) = g(u) / (g(u) + g(1 - u)), g(u) = exp(-1/u), expanded around u0.
/// Flat sides are decided by sign test first, so the seam never divides 0 by 0.
Series smooth_step(double u0, int order);

/// psi(t) = h(11 - 10|t|): 1 on [-1, 1], 0 outside (-1.1, 1.1).
/// Returned as a series in the physical variable x_i, where t = (x_i - c) / r.
Series cutoff(double x, double c, double r, int order);

/// The unnormalized bump phi_Q(x) = prod_i psi((x_i - c_i) / r) with its partials.
TaylorValue phi(const DyadicCube& q, const Point& x, int order);

/// True iff x lies in the open dilation 1.1Q, i.e. where phi_Q can be nonzero.
bool in_support(const DyadicCube& q, const Point& x);

/// All cubes R of the decomposition with x in the open 1.1R, sorted.
std::vector<DyadicCube> covering_cubes(const WhitneyDecomposition& w, const Point& x);

struct PartitionTerm {
    DyadicCube cube;
    TaylorValue phi;
};

/// phi_R for every covering cube together with their sum, the common denominator of theta.
struct PartitionAt {
    std::vector<PartitionTerm> terms;
    TaylorValue total;

    TaylorValue theta(std::size_t i) const { return terms[i].phi / total; }
};

PartitionAt partition_at(const WhitneyDecomposition& w, const Point& x, int order);

/// theta_Q(x) = phi_Q(x) / sum_R phi_R(x); identically zero when x is outside 1.1Q.
TaylorValue theta(const WhitneyDecomposition& w, const DyadicCube& q, const Point& x, int order);

struct DerivativeBoundOptions {
    /// Sample points per axis on each cube's 1.1 box.
    int refinement = 9;
    /// Distinct levels to sample, starting at first_level, or centred in the enumerated range when unset.
    int levels = 4;
    std::optional<int> first_level;
    /// Cap on cubes per level (0 = all).
    std::size_t cubes_per_level = 64;
    /// Largest accepted max/min ratio of normalized sups across levels.
    double tolerance = 1.25;
};

struct DerivativeBoundRow {
    int order = 0;
    std::vector<int> levels;
    /// sup over sampled (Q, x) and |k| = order of |d^k theta_Q(x)| delta_Q^{|k|}, per level.
    std::vector<double> sup;
    double spread = 1.0;
    bool pass = true;
};

struct DerivativeBoundReport {
    std::vector<DerivativeBoundRow> rows;
    std::size_t samples = 0;
    bool pass = true;
};

DerivativeBoundReport verify_derivative_bounds(const WhitneyDecomposition& w, int order,
                                               const DerivativeBoundOptions& opts = {});

struct UnityReport {
    std::size_t samples = 0;
    double max_error = 0.0;
    bool pass = true;
};

/// max |sum_Q theta_Q(x) - 1| over uniform points of Omega.
UnityReport partition_unity_check(const WhitneyDecomposition& w, std::size_t samples, std::uint64_t seed,
                                  double tolerance = 1e-12);

struct FiniteDifferenceReport {
    std::size_t samples = 0;
    /// max over samples and 1 <= |k| <= 2 of |D_k - FD_k| delta^{|k|} / max(1, |D_k| delta^{|k|})
    double max_error = 0.0;
    bool pass = true;
};

/// First and second partials of theta_Q against Richardson-extrapolated central differences,
/// at uniform points x of Omega with Q drawn from the cubes whose 1.1-box holds x.
FiniteDifferenceReport finite_difference_check(const WhitneyDecomposition& w, std::size_t samples,
                                               std::uint64_t seed, double tolerance = 1e-5);

} // namespace whitney
