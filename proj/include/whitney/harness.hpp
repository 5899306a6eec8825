#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "whitney/io.hpp"

namespace whitney {

/// How the site set E is produced.
struct SiteSpec {
    /// "list", "random", "grid" or "cantor"
    std::string kind = "random";
    std::vector<Point> points;
    std::size_t count = 10;
    std::uint64_t seed = 1;
    /// Sampling box for random and grid sites, interval (axis 0) for cantor; defaults to the middle half of Omega.
    std::optional<Box> box;
    int per_axis = 3;
    int stage = 3;
    /// Generated sites are rounded to multiples of 2^-resolution.
    int resolution = 20;
};

struct EstimatorSpec {
    Method method = Method::PlainMC;
    std::size_t budget = 100000;
    std::uint64_t seed = 1;
};

struct CheckSpec {
    std::size_t unity_samples = 10000;
    std::size_t fd_samples = 100;
    std::size_t reproduction_points = 1000;
    int jet_sites = 3;
    std::size_t path_count = 50;
    std::uint64_t path_seed = 11;
    int chain_checks = 3;
    std::size_t pair_cubes = 4;
};

/// A versioned ("schema": 1) scenario file.
struct Scenario {
    std::string name = "scenario";
    SpaceParams params{1, 1.5, 4};
    SiteSpec sites;
    Json function = Json{{"name", "gaussian"}, {"width", 1.0}};
    int domain_exp = 1;
    int max_depth = 10;
    int depth_cap = -1;
    EstimatorSpec estimator;
    CheckSpec checks;
    std::string output = ".";

    static Scenario from_json(const Json& j);
    Json to_json() const;
};

std::vector<Point> generate_sites(const SiteSpec& spec, int n, int domain_exp);

/// Builds the decomposition of a scenario.
std::shared_ptr<const WhitneyDecomposition> build_decomposition(const Scenario& sc);
TestFunctionPtr scenario_function(const Scenario& sc);

struct TermSplit {
    /// both points in the unresolved fringe U (the stand-in for E), F evaluated directly
    SeminormEstimate i_direct;
    /// the same region with Tf
    SeminormEstimate i_extension;
    /// the U x U share of the whole-domain samples
    SeminormEstimate i_filtered;
    /// both points in enumerated cubes that do not touch
    SeminormEstimate ii;
    /// both points in touching (or equal) cubes
    SeminormEstimate iii;
    /// one point in a cube, the other in U
    SeminormEstimate iv;
    SeminormEstimate whole;
    /// ||F||^p over Omega with the same samples
    SeminormEstimate f_whole;
    double sum_p = 0.0;
    double combined_error_p = 0.0;
    bool additive = false;
    bool i_below_f = false;
    bool i_agree = false;
};

struct BoundednessReport {
    std::string scenario;
    std::size_t sites = 0;
    std::size_t cubes = 0;
    std::size_t fringe = 0;
    int min_level = 0;
    int max_level = 0;
    SeminormEstimate tf;
    SeminormEstimate f;
    /// NaN when degenerate
    double rho = 0.0;
    double rho_error = 0.0;
    /// "ok", "degenerate: both vanish" or "unbounded: F vanishes"
    std::string status;
    std::optional<TermSplit> terms;
};

BoundednessReport run_bound_experiment(const Scenario& sc);
TermSplit run_term_split(const Scenario& sc);

struct SuiteEntry {
    std::string module;
    std::string name;
    bool pass = false;
    std::string detail;
    Json metrics;
};

struct SuiteReport {
    std::string scenario;
    std::vector<SuiteEntry> entries;
    bool pass = false;
};

SuiteReport verify_all(const Scenario& sc);

Json to_json(const TermSplit& t);
Json to_json(const BoundednessReport& r);
Json to_json(const SuiteReport& r);
std::string summary(const SuiteReport& r);

/// Polynomial of degree <= `degree` with pseudo-random coefficients in [-1, 1].
TestFunctionPtr random_polynomial(int n, int degree, std::uint64_t seed, std::uint64_t index);

struct ReproductionReport {
    std::size_t points = 0;
    double max_error = 0.0;
    double max_value = 0.0;
    bool pass = false;
};

/// max |Tf - F| over uniform points of Omega for jets sampled from F, against 1e-10 (1 + max |F|).
ReproductionReport polynomial_reproduction(std::shared_ptr<const WhitneyDecomposition> w, const TestFunctionPtr& f,
                                           std::size_t points, std::uint64_t seed);

/// `count` accepted cubes, each drawn by first choosing a level uniformly so coarse cubes are not
/// swamped by the many fine ones.
std::vector<DyadicCube> sample_cubes_by_level(const WhitneyDecomposition& w, std::size_t count, std::uint64_t seed);

/// Radii for jet agreement at a site: 8 halvings from a twentieth of the distance to the nearest
/// other site or the boundary of Omega.
std::vector<double> jet_radii(const WhitneyDecomposition& w, int site);

} // namespace whitney
