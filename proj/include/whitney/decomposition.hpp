#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <absl/numeric/int128.h>

#include "whitney/core.hpp"

namespace whitney {

using i128 = __int128;
using u128 = unsigned __int128;

/// Integer point on the global grid 2^{-R} Z^n.
struct GridPoint {
    int dim = 0;
    std::array<std::int64_t, kMaxDim> c{};
    friend bool operator==(const GridPoint& a, const GridPoint& b) = default;
};

/// Closed box with integer grid endpoints.
struct GridBox {
    int dim = 0;
    std::array<std::int64_t, kMaxDim> lo{};
    std::array<std::int64_t, kMaxDim> hi{};
};

/// The grid shared by sites and cubes: resolution 2^{-R} with R = 56 - L, so |coords| <= 2^56.
class Grid {
public:
    Grid() = default;
    Grid(int dim, int domain_exp);

    int dim() const { return dim_; }
    int domain_exp() const { return L_; }
    int resolution() const { return R_; }

    std::optional<GridPoint> to_grid(const Point& x) const;
    Point to_point(const GridPoint& g) const;
    double to_double(std::int64_t v) const;
    /// Cube box in grid units; requires level <= R.
    GridBox box(const DyadicCube& q) const;
    std::int64_t side(int level) const { return std::int64_t{1} << (R_ - level); }

private:
    int dim_ = 0;
    int L_ = 0;
    int R_ = 0;
};

i128 dist2(const GridBox& b, const GridPoint& p);

/// Static kd-tree over the sites answering exact box queries.
class SiteIndex {
public:
    SiteIndex() = default;
    explicit SiteIndex(std::vector<GridPoint> sites);

    /// True iff some site lies at squared distance < thr2 from the box.
    bool any_within(const GridBox& b, i128 thr2) const;

    struct Hit {
        int index = -1;
        i128 dist2 = 0;
    };
    /// Nearest site; ties go to the lexicographically smallest site.
    Hit nearest(const GridBox& b) const;

    const std::vector<GridPoint>& sites() const { return sites_; }

private:
    struct Node {
        GridBox bbox;
        int begin = 0;
        int end = 0;
        int left = -1;
        int right = -1;
    };
    int build(int begin, int end);
    void nearest_rec(int node, const GridBox& b, Hit& best) const;

    std::vector<GridPoint> sites_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

struct StructureCheck {
    std::string name;
    bool pass = true;
    std::size_t violations = 0;
    std::string detail;
};

struct StructureReport {
    std::vector<StructureCheck> checks;
    std::size_t cube_count = 0;
    std::size_t fringe_count = 0;
    int min_level = 0;
    int max_level = 0;
    int max_neighbors = 0;
    int max_overlap = 0;
    std::size_t overlap_cubes_scanned = 0;

    bool all_pass() const;
    const StructureCheck* find(const std::string& name) const;
};

struct VerifyOptions {
    /// Run the ring scan (neighbor ratio, separation, neighbor count); otherwise a cheaper
    /// same-level scan decides only the touching level difference.
    bool neighbor_scan = true;
    /// Upper bound on cubes scanned for 1.1Q overlap multiplicity (0 = all).
    std::size_t overlap_sample = 4000;
};

/// The Whitney cubes of the complement of a finite site set, enumerated inside the
/// domain Omega = [-2^L, 2^L]^n down to a finest level L_max.
class WhitneyDecomposition {
public:
    static WhitneyDecomposition build(const SpaceParams& params, std::vector<Point> sites, int domain_exp,
                                      int max_depth, int depth_cap = -1);
    /// Reassembles a decomposition from stored cube and fringe lists without re-deriving them.
    static WhitneyDecomposition from_parts(const SpaceParams& params, std::vector<Point> sites, int domain_exp,
                                           int max_depth, int depth_cap, std::vector<DyadicCube> cubes,
                                           std::vector<DyadicCube> fringe);

    const SpaceParams& params() const { return params_; }
    int dim() const { return params_.n(); }
    const Grid& grid() const { return grid_; }
    int domain_exp() const { return grid_.domain_exp(); }
    int max_depth() const { return max_depth_; }
    int depth_cap() const { return depth_cap_; }
    const std::vector<Point>& sites() const { return sites_; }
    const std::vector<GridPoint>& grid_sites() const { return index_.sites(); }
    const std::vector<DyadicCube>& cubes() const { return cubes_; }
    const std::vector<DyadicCube>& fringe() const { return fringe_; }
    /// Site index of the anchor of cubes()[i].
    int anchor_index(std::size_t i) const { return anchors_[i]; }
    Box domain_box() const;

    /// dist(Q, D) >= 10 delta_Q, exactly.
    bool satisfies(const DyadicCube& q) const;
    bool in_domain(const DyadicCube& q) const;
    bool in_domain(const Point& x) const;
    /// Index of the cube among cubes(), or -1 when it is not enumerated.
    long find(const DyadicCube& q) const;
    /// Whether q is a cube of the decomposition, including lazily resolved cubes below L_max.
    bool is_cube(const DyadicCube& q) const;

    /// All cubes whose closed box contains x.
    std::vector<DyadicCube> locate(const Point& x) const;
    std::vector<DyadicCube> locate(const GridPoint& g) const;
    /// Like locate, starting the descent at `start_level` instead of the roots.
    std::vector<DyadicCube> locate_from(const Point& x, int start_level) const;
    /// The enumerated cube containing x, or nothing if x lies in the unresolved fringe.
    std::optional<DyadicCube> enumerated_cube_at(const Point& x) const;

    std::vector<DyadicCube> neighbors(const DyadicCube& q) const;

    Point anchor(const DyadicCube& q) const;
    int anchor_site(const DyadicCube& q) const;
    i128 dist2_to_sites(const DyadicCube& q) const;
    /// Site index equal to x, or -1.
    int site_at(const Point& x) const;

    StructureReport verify_structure(const VerifyOptions& opts = {}) const;

private:
    enum class Status : std::int8_t { Accepted, Internal, Fringe, Absent };
    struct Resolved {
        enum Kind { Cube, Subdivided, Outside } kind = Outside;
        DyadicCube cube;
    };

    WhitneyDecomposition(const SpaceParams& params, std::vector<Point> sites, int domain_exp, int max_depth,
                         int depth_cap);
    void index_cells();
    absl::uint128 key(const DyadicCube& q) const;
    Status status(const DyadicCube& q, long* index = nullptr) const;
    /// The cube containing cell c, if c lies inside a single cube.
    Resolved resolve(const DyadicCube& c) const;
    template <class CellsAt>
    std::vector<DyadicCube> locate_impl(int start_level, CellsAt&& cells_at) const;
    /// Cells of level m+1 that touch q without lying inside it.
    std::vector<DyadicCube> ring(const DyadicCube& q) const;
    void ring_neighbors(const DyadicCube& q, std::vector<DyadicCube>& out, std::size_t* subdivided) const;
    u128 morton(const DyadicCube& q) const;

    SpaceParams params_;
    Grid grid_;
    int max_depth_ = 0;
    int depth_cap_ = 0;
    std::vector<Point> sites_;
    SiteIndex index_;
    std::vector<DyadicCube> cubes_;
    std::vector<int> anchors_;
    std::vector<DyadicCube> fringe_;
    absl::flat_hash_map<absl::uint128, std::int32_t> cells_;
    int coord_bits_ = 0;
};

} // namespace whitney
