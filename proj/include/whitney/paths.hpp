#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "whitney/decomposition.hpp"
#include "whitney/test_functions.hpp"

namespace whitney {

/// Exact segment parameter num/den with den > 0.
struct PathParam {
    i128 num = 0;
    i128 den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

bool operator<(const PathParam& a, const PathParam& b);
bool operator==(const PathParam& a, const PathParam& b);

enum class Truncation { DiameterFloor, MaxLength, DepthCap, Reached };
std::string to_string(Truncation t);

/// Chain of cubes covering s(t) = x + t (x_P - x) from t = 0 up to the last exit.
struct CubePath {
    DyadicCube target_cube;
    GridPoint origin;
    GridPoint target;
    int target_site = -1;
    std::vector<DyadicCube> cubes;
    std::vector<PathParam> entries;
    std::vector<PathParam> exits;
    Truncation truncation = Truncation::DiameterFloor;
    std::string detail;

    std::size_t size() const { return cubes.size(); }
};

struct PathOptions {
    /// Stop before appending a cube finer than this level; defaults to L_max.
    std::optional<int> floor_level;
    /// 0 selects 10 * (20 n) * max(L_max, 1).
    std::size_t max_cubes = 0;
};

/// Greedy farthest-exit covering of [x, x_P). x must be a grid point off the site set.
CubePath build_path(const WhitneyDecomposition& w, const DyadicCube& p, const Point& x, const PathOptions& opts = {});

/// Exit parameter of the segment from box q, given that s(t) lies in q; capped at 1.
PathParam exit_parameter(const Grid& grid, const DyadicCube& q, const GridPoint& x, const GridPoint& target);
/// Whether s(t) lies in the closed box of q.
bool segment_point_in(const Grid& grid, const DyadicCube& q, const GridPoint& x, const GridPoint& target,
                      const PathParam& t);

/// Accepted cubes within neighbor-graph distance 2 of p, sorted.
std::vector<DyadicCube> two_ring(const WhitneyDecomposition& w, const DyadicCube& p);

struct APSample {
    GridPoint grid;
    Point x;
    /// draws rejected because they landed on a site
    int redraws = 0;
};

/// t x1 + (1 - t) x2 with x1, x2 uniform grid points of two cubes in the two-ring of p
/// and t uniform on the 2^-16 lattice of [0,1]; the result is rounded down to the grid.
APSample sample_A_P(const WhitneyDecomposition& w, const DyadicCube& p, std::uint64_t seed, std::uint64_t index = 0);

/// |y - x_P| <= 29 delta_P, exactly: 7 delta_P from the two-ring hull plus 22 delta_P from dist(P, D).
bool within_A_P_scale(const WhitneyDecomposition& w, const DyadicCube& p, const GridPoint& y);

struct PathCheck {
    bool adjacency = true;
    bool monotone = true;
    bool coverage = true;
    bool greedy = true;
    bool entry_bound = true;
    std::size_t entry_checked = 0;
    std::size_t entry_violations = 0;
    std::size_t coverage_samples = 0;
    std::string detail;

    bool pass() const { return adjacency && monotone && coverage && greedy && entry_bound; }
};

/// Adjacency, strictly increasing entries, exact coverage on sampled prefix points,
/// greedy optimality against cubes found from the chosen cube's own neighbors, and
/// 100 n side^2 <= |s(a_Q) - x_P|^2 <= 131^2 n side^2 at every entry.
PathCheck check_path(const WhitneyDecomposition& w, const CubePath& path, std::size_t coverage_samples = 1000);

struct PathDecayConstants {
    double A = 1.0;
    int log2_A = 0;
    double a = 0.5;
    int C_n = 1;
    std::size_t paths = 0;
    std::size_t cubes = 0;
};

/// Longest run of equal levels along one path.
int block_length(const CubePath& path);

PathDecayConstants fit_decay(std::span<const CubePath> corpus);

/// Whether delta_j <= A a^{j-i} delta_i holds for all i <= j on the path, decided in integers.
bool decay_holds(const CubePath& path, const PathDecayConstants& c);

struct Lemma12Options {
    /// Second truncation is floor_level + extra_levels.
    int extra_levels = 4;
    std::size_t seminorm_budget = 4096;
    double stability_tolerance = 0.20;
    double tail_tolerance = 1e-6;
};

struct Lemma12Truncation {
    int floor_level = 0;
    std::size_t cubes = 0;
    double rhs = 0.0;
    double ratio = 0.0;
    /// geometric estimate of the omitted part of the sum
    double tail = 0.0;
    bool tail_flag = false;
};

struct Lemma12Report {
    double lhs = 0.0;
    double epsilon = 0.0;
    Lemma12Truncation coarse;
    Lemma12Truncation fine;
    /// |ratio_fine / ratio_coarse - 1|
    double ratio_change = 0.0;
    bool lhs_zero = false;
    bool stable = false;
};

/// LHS = sum_{|i| <= floor s} delta_P^{n - sp + |i|p} |d^i J_{x_P} F(x) - d^i F(x)|^p and
/// RHS = delta_P^{n - {s}p + eps} sum_{j >= 1} ||F||^p_{L^{s,p}(P_j)} delta_{P_j}^{{s}p - n - eps},
/// at two path truncations.
Lemma12Report lemma12_check(const WhitneyDecomposition& w, const DyadicCube& p, const Point& x,
                            const TestFunctionPtr& f, const Lemma12Options& opts = {});

} // namespace whitney
