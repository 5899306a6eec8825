#pragma once

// Brute-force reference computations used by the unit and acceptance tests. They only
// share the Grid coordinate convention with the library.

#include <algorithm>
#include <cstdint>
#include <set>
#include <tuple>
#include <vector>

#include <absl/container/flat_hash_set.h>

#include "whitney/decomposition.hpp"

namespace oracle {

using whitney::DyadicCube;
using whitney::GridBox;
using whitney::GridPoint;
using whitney::i128;
using whitney::WhitneyDecomposition;

/// Squared distance from a grid box to the nearest site, by scanning every site.
inline i128 dist2_scan(const GridBox& b, const std::vector<GridPoint>& sites) {
    i128 best = -1;
    for (const auto& s : sites) {
        i128 d2 = 0;
        for (int i = 0; i < b.dim; ++i) {
            i128 d = 0;
            if (s.c[i] < b.lo[i]) {
                d = b.lo[i] - s.c[i];
            } else if (s.c[i] > b.hi[i]) {
                d = s.c[i] - b.hi[i];
            }
            d2 += d * d;
        }
        if (best < 0 || d2 < best) {
            best = d2;
        }
    }
    return best;
}

struct BoundCount {
    std::size_t checked = 0;
    std::size_t violations = 0;
};

/// 100 n side^2 <= dist^2 <= 484 n side^2 for every enumerated cube.
inline BoundCount whitney_bounds(const WhitneyDecomposition& w) {
    BoundCount r;
    const i128 n = w.dim();
    for (const auto& q : w.cubes()) {
        GridBox b = w.grid().box(q);
        i128 side = b.hi[0] - b.lo[0];
        i128 d2 = dist2_scan(b, w.grid_sites());
        ++r.checked;
        if (d2 < 100 * n * side * side || d2 > 484 * n * side * side) {
            ++r.violations;
        }
    }
    return r;
}

inline std::int64_t floor_shift(std::int64_t a, int k) { return a >> k; }

/// Zero iff no enumerated cube contains another. Dyadic cubes overlap only by nesting, and in
/// Morton order every cube is followed directly by its descendants, so adjacent pairs suffice.
inline std::size_t nested_pairs(const WhitneyDecomposition& w) {
    const int n = w.dim();
    const int finest = w.max_depth();
    const std::int64_t offset = std::int64_t{1} << (finest + w.domain_exp());
    std::vector<std::pair<unsigned __int128, int>> keys;
    keys.reserve(w.cubes().size());
    for (const auto& q : w.cubes()) {
        unsigned __int128 m = 0;
        for (int bit = 31; bit >= 0; --bit) {
            for (int i = 0; i < n; ++i) {
                auto c = static_cast<std::uint64_t>((q.a[i] << (finest - q.level)) + offset);
                m = (m << 1) | ((c >> bit) & 1u);
            }
        }
        keys.emplace_back(m, q.level);
    }
    std::vector<std::size_t> order(keys.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return keys[x] < keys[y]; });
    auto contains = [&](const DyadicCube& big, const DyadicCube& small) {
        if (big.level > small.level) {
            return false;
        }
        for (int i = 0; i < n; ++i) {
            if (floor_shift(small.a[i], small.level - big.level) != big.a[i]) {
                return false;
            }
        }
        return true;
    };
    std::size_t bad = 0;
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (contains(w.cubes()[order[k - 1]], w.cubes()[order[k]])) {
            ++bad;
        }
    }
    return bad;
}

struct CubeKeyHash {
    std::size_t operator()(const DyadicCube& q) const {
        std::size_t h = static_cast<std::size_t>(q.level) * 0x9E3779B97F4A7C15ull;
        for (int i = 0; i < q.dim; ++i) {
            h = (h ^ static_cast<std::size_t>(q.a[i])) * 0x100000001B3ull;
        }
        return h;
    }
};
struct CubeKeyEq {
    bool operator()(const DyadicCube& x, const DyadicCube& y) const {
        return x.level == y.level && x.dim == y.dim && x.a == y.a;
    }
};
using CubeSet = absl::flat_hash_set<DyadicCube, CubeKeyHash, CubeKeyEq>;

inline CubeSet cube_set(const std::vector<DyadicCube>& cubes) { return CubeSet(cubes.begin(), cubes.end()); }

/// Touching enumerated cubes whose levels differ by 2 or more. For a cube Q of level m, any such
/// coarser cube contains a level m-2 cell that touches Q, and that cell is a neighbor of Q's own
/// level m-2 ancestor. Finer offenders are caught from their own side.
inline std::size_t touching_level_jumps(const WhitneyDecomposition& w) {
    const int n = w.dim();
    CubeSet all = cube_set(w.cubes());
    const int top = -w.domain_exp();
    std::size_t bad = 0;
    int total = 1;
    for (int i = 0; i < n; ++i) {
        total *= 3;
    }
    for (const auto& q : w.cubes()) {
        const int l = q.level - 2;
        if (l < top) {
            continue;
        }
        std::array<std::int64_t, whitney::kMaxDim> anc{}, rel{};
        for (int i = 0; i < n; ++i) {
            anc[i] = floor_shift(q.a[i], 2);
            rel[i] = q.a[i] - 4 * anc[i];
        }
        for (int code = 0; code < total; ++code) {
            int c = code;
            bool touches = true, self = true;
            DyadicCube cell(l, n, anc);
            for (int i = 0; i < n; ++i) {
                int e = c % 3 - 1;
                c /= 3;
                if (e != 0) {
                    self = false;
                }
                if ((e == -1 && rel[i] != 0) || (e == 1 && rel[i] != 3)) {
                    touches = false;
                }
                cell.a[i] += e;
            }
            if (self || !touches) {
                continue;
            }
            for (DyadicCube up = cell; up.level >= top; --up.level) {
                if (all.contains(up)) {
                    ++bad;
                    break;
                }
                for (int i = 0; i < n; ++i) {
                    up.a[i] = floor_shift(up.a[i], 1);
                }
            }
        }
    }
    return bad;
}

/// The 1-D decomposition of the complement of {0} by scanning every dyadic interval of every
/// level in Omega: keep I when dist(I, 0) >= 10 |I| and every ancestor fails that test.
inline std::set<std::tuple<int, std::int64_t>> scan_single_site_1d(int domain_exp, int max_depth) {
    std::set<std::tuple<int, std::int64_t>> out;
    auto ok = [](std::int64_t a) {
        // interval [a, a + 1] in side units
        std::int64_t d = a >= 0 ? a : -(a + 1);
        return d >= 10;
    };
    for (int m = -domain_exp; m <= max_depth; ++m) {
        const std::int64_t half = std::int64_t{1} << (m + domain_exp);
        for (std::int64_t a = -half; a < half; ++a) {
            bool ancestor_ok = false;
            for (int k = 1; k <= m + domain_exp; ++k) {
                ancestor_ok = ancestor_ok || ok(floor_shift(a, k));
            }
            if (ok(a) && !ancestor_ok) {
                out.emplace(m, a);
            }
        }
    }
    return out;
}

/// The closed-form answer: indices 10..19 on both sides at every level inside Omega.
inline std::set<std::tuple<int, std::int64_t>> closed_form_single_site_1d(int domain_exp, int max_depth) {
    std::set<std::tuple<int, std::int64_t>> out;
    for (int m = -domain_exp; m <= max_depth; ++m) {
        const std::int64_t half = std::int64_t{1} << (m + domain_exp);
        for (std::int64_t a = 10; a <= 19 && a < half; ++a) {
            out.emplace(m, a);
            out.emplace(m, -(a + 1));
        }
    }
    return out;
}

} // namespace oracle
