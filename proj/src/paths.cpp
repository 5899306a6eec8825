#include "whitney/paths.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/multiprecision/cpp_int.hpp>

#include "whitney/error.hpp"
#include "whitney/rng.hpp"
#include "whitney/seminorm.hpp"

namespace whitney {

namespace {

using boost::multiprecision::int256_t;

int256_t big(i128 v) {
    // cpp_int has no __int128 constructor on every platform; go through two halves.
    bool neg = v < 0;
    u128 m = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
    int256_t r = static_cast<std::uint64_t>(m >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(m);
    return neg ? int256_t(-r) : r;
}

struct Segment {
    GridPoint x;
    std::array<i128, kMaxDim> d{};
    int n = 0;

    Segment(const GridPoint& from, const GridPoint& to) : x(from), n(from.dim) {
        for (int i = 0; i < n; ++i) {
            d[i] = static_cast<i128>(to.c[i]) - from.c[i];
        }
    }
};

PathParam exit_of(const GridBox& b, const Segment& s) {
    PathParam best{1, 1};
    for (int i = 0; i < s.n; ++i) {
        if (s.d[i] == 0) {
            continue;
        }
        PathParam e = s.d[i] > 0 ? PathParam{static_cast<i128>(b.hi[i]) - s.x.c[i], s.d[i]}
                                 : PathParam{static_cast<i128>(s.x.c[i]) - b.lo[i], -s.d[i]};
        if (e < best) {
            best = e;
        }
    }
    return best;
}

bool point_in(const GridBox& b, const Segment& s, const PathParam& t) {
    int256_t den = big(t.den);
    int256_t num = big(t.num);
    for (int i = 0; i < s.n; ++i) {
        int256_t v = int256_t(s.x.c[i]) * den + num * big(s.d[i]);
        if (v < int256_t(b.lo[i]) * den || v > int256_t(b.hi[i]) * den) {
            return false;
        }
    }
    return true;
}

int256_t seg_norm2(const Segment& s) {
    int256_t r = 0;
    for (int i = 0; i < s.n; ++i) {
        int256_t v = big(s.d[i]);
        r += v * v;
    }
    return r;
}

/// Picks the farthest exit among cubes containing s(t); ties go to the coarser, then smaller cube.
std::optional<std::pair<DyadicCube, PathParam>> greedy_pick(const Grid& grid, const std::vector<DyadicCube>& cand,
                                                            const Segment& s, const PathParam& t) {
    std::optional<std::pair<DyadicCube, PathParam>> best;
    for (const auto& q : cand) {
        GridBox b = grid.box(q);
        if (!point_in(b, s, t)) {
            continue;
        }
        PathParam e = exit_of(b, s);
        if (!(t < e)) {
            continue;
        }
        if (!best || best->second < e ||
            (best->second == e && cube_less(q, best->first))) {
            best = std::make_pair(q, e);
        }
    }
    return best;
}

std::size_t default_cap(const WhitneyDecomposition& w) {
    return static_cast<std::size_t>(10 * 20 * w.dim() * std::max(w.max_depth(), 1));
}

} // namespace

bool operator<(const PathParam& a, const PathParam& b) {
    return big(a.num) * big(b.den) < big(b.num) * big(a.den);
}

bool operator==(const PathParam& a, const PathParam& b) {
    return big(a.num) * big(b.den) == big(b.num) * big(a.den);
}

std::string to_string(Truncation t) {
    switch (t) {
    case Truncation::DiameterFloor:
        return "diameter floor";
    case Truncation::MaxLength:
        return "max length";
    case Truncation::DepthCap:
        return "depth cap";
    case Truncation::Reached:
        return "reached target";
    }
    return "?";
}

PathParam exit_parameter(const Grid& grid, const DyadicCube& q, const GridPoint& x, const GridPoint& target) {
    return exit_of(grid.box(q), Segment(x, target));
}

bool segment_point_in(const Grid& grid, const DyadicCube& q, const GridPoint& x, const GridPoint& target,
                      const PathParam& t) {
    return point_in(grid.box(q), Segment(x, target), t);
}

CubePath build_path(const WhitneyDecomposition& w, const DyadicCube& p, const Point& x, const PathOptions& opts) {
    const Grid& grid = w.grid();
    auto gx = grid.to_grid(x);
    if (!gx) {
        throw DomainError("path origin not on the dyadic grid");
    }
    if (w.site_at(x) >= 0) {
        throw DomainError("path origin lies on a site");
    }
    if (!w.is_cube(p)) {
        throw Error("not a cube of the decomposition: " + p.id());
    }

    CubePath path;
    path.target_cube = p;
    path.origin = *gx;
    path.target_site = w.anchor_site(p);
    path.target = w.grid_sites()[static_cast<std::size_t>(path.target_site)];
    const int floor_level = opts.floor_level.value_or(w.max_depth());
    const std::size_t cap = opts.max_cubes ? opts.max_cubes : default_cap(w);
    Segment seg(path.origin, path.target);

    PathParam t{0, 1};
    std::vector<DyadicCube> cand;
    try {
        cand = w.locate(*gx);
    } catch (const DepthCapError& e) {
        path.truncation = Truncation::DepthCap;
        path.detail = e.what();
        return path;
    }
    while (true) {
        auto pick = greedy_pick(grid, cand, seg, t);
        if (!pick) {
            throw Error("path construction stuck at t = " + std::to_string(t.value()));
        }
        const auto& [q, exit] = *pick;
        if (q.level > floor_level) {
            path.truncation = Truncation::DiameterFloor;
            break;
        }
        if (path.cubes.size() >= cap) {
            path.truncation = Truncation::MaxLength;
            break;
        }
        path.cubes.push_back(q);
        path.entries.push_back(t);
        path.exits.push_back(exit);
        if (exit == PathParam{1, 1}) {
            path.truncation = Truncation::Reached;
            break;
        }
        t = exit;
        try {
            cand = w.neighbors(q);
        } catch (const DepthCapError& e) {
            path.truncation = Truncation::DepthCap;
            path.detail = e.what();
            break;
        }
    }
    return path;
}

std::vector<DyadicCube> two_ring(const WhitneyDecomposition& w, const DyadicCube& p) {
    std::vector<DyadicCube> out{p};
    auto first = w.neighbors(p);
    out.insert(out.end(), first.begin(), first.end());
    for (const auto& q : first) {
        auto second = w.neighbors(q);
        out.insert(out.end(), second.begin(), second.end());
    }
    std::sort(out.begin(), out.end(), cube_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

APSample sample_A_P(const WhitneyDecomposition& w, const DyadicCube& p, std::uint64_t seed, std::uint64_t index) {
    const Grid& grid = w.grid();
    const int n = w.dim();
    auto ring = two_ring(w, p);
    SampleRng rng(seed, index);
    auto uniform_in = [&](const DyadicCube& q) {
        GridBox b = grid.box(q);
        GridPoint g;
        g.dim = n;
        for (int i = 0; i < n; ++i) {
            g.c[i] = b.lo[i] + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(b.hi[i] - b.lo[i]) + 1));
        }
        return g;
    };
    constexpr i128 kSteps = i128{1} << 16;
    APSample out;
    while (true) {
        const auto& q1 = ring[rng.below(ring.size())];
        const auto& q2 = ring[rng.below(ring.size())];
        GridPoint x1 = uniform_in(q1);
        GridPoint x2 = uniform_in(q2);
        i128 k = static_cast<i128>(rng.below(static_cast<std::uint64_t>(kSteps) + 1));
        GridPoint y;
        y.dim = n;
        for (int i = 0; i < n; ++i) {
            i128 num = k * (static_cast<i128>(x1.c[i]) - x2.c[i]);
            i128 q = num / kSteps;
            if (num % kSteps != 0 && num < 0) {
                --q;
            }
            y.c[i] = static_cast<std::int64_t>(x2.c[i] + q);
        }
        Point yp = grid.to_point(y);
        if (w.site_at(yp) >= 0) {
            ++out.redraws;
            continue;
        }
        out.grid = y;
        out.x = yp;
        return out;
    }
}

bool within_A_P_scale(const WhitneyDecomposition& w, const DyadicCube& p, const GridPoint& y) {
    const GridPoint& xp = w.grid_sites()[static_cast<std::size_t>(w.anchor_site(p))];
    Segment s(y, xp);
    int256_t side = w.grid().side(p.level);
    return seg_norm2(s) <= int256_t(29 * 29 * w.dim()) * side * side;
}

PathCheck check_path(const WhitneyDecomposition& w, const CubePath& path, std::size_t coverage_samples) {
    PathCheck c;
    const Grid& grid = w.grid();
    const int n = w.dim();
    Segment seg(path.origin, path.target);
    const int256_t len2 = seg_norm2(seg);
    auto fail = [&](bool& flag, const std::string& what) {
        if (flag) {
            c.detail += (c.detail.empty() ? "" : "; ") + what;
        }
        flag = false;
    };
    if (path.cubes.empty()) {
        return c;
    }

    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
        if (!cubes_touch(path.cubes[j], path.cubes[j + 1])) {
            fail(c.adjacency, "cubes " + std::to_string(j) + "," + std::to_string(j + 1) + " do not touch");
        }
        if (!(path.entries[j] < path.entries[j + 1])) {
            fail(c.monotone, "entry " + std::to_string(j + 1) + " does not increase");
        }
    }
    if (!(path.entries.front() == PathParam{0, 1}) || !(path.entries.back() < PathParam{1, 1})) {
        fail(c.monotone, "entries outside [0,1)");
    }

    for (std::size_t j = 0; j < path.size(); ++j) {
        const auto& q = path.cubes[j];
        const PathParam& t = path.entries[j];
        GridBox b = grid.box(q);
        if (!point_in(b, seg, t) || !(exit_of(b, seg) == path.exits[j])) {
            fail(c.greedy, "cube " + std::to_string(j) + " does not hold its entry or exit");
            continue;
        }
        std::vector<DyadicCube> cand;
        if (j == 0) {
            cand = w.locate(path.origin);
        } else {
            cand = w.neighbors(q);
            cand.push_back(q);
        }
        for (const auto& r : cand) {
            GridBox rb = grid.box(r);
            if (point_in(rb, seg, t) && path.exits[j] < exit_of(rb, seg)) {
                fail(c.greedy, "cube " + r.id() + " exits later than step " + std::to_string(j));
            }
        }

        // |s(t) - x_P| = (1 - t) |x_P - x|
        int256_t side = grid.side(q.level);
        int256_t den = big(t.den);
        int256_t rest = den - big(t.num);
        int256_t lhs = rest * rest * len2;
        int256_t unit = int256_t(n) * side * side * den * den;
        ++c.entry_checked;
        if (lhs < 100 * unit || lhs > 131 * 131 * unit) {
            ++c.entry_violations;
            fail(c.entry_bound, "entry of " + q.id() + " outside [10, 131] delta");
        }
    }

    const PathParam& b_last = path.exits.back();
    for (std::size_t k = 0; k < coverage_samples; ++k) {
        PathParam t{b_last.num * static_cast<i128>(2 * k + 1), b_last.den * static_cast<i128>(2 * coverage_samples)};
        auto it = std::upper_bound(path.entries.begin(), path.entries.end(), t);
        std::size_t j = static_cast<std::size_t>(std::distance(path.entries.begin(), it));
        bool hit = j > 0 && point_in(grid.box(path.cubes[j - 1]), seg, t);
        for (std::size_t m = 0; !hit && m < path.size(); ++m) {
            hit = point_in(grid.box(path.cubes[m]), seg, t);
        }
        ++c.coverage_samples;
        if (!hit) {
            fail(c.coverage, "sample " + std::to_string(k) + " uncovered");
        }
    }
    return c;
}

int block_length(const CubePath& path) {
    int best = 0;
    int run = 0;
    for (std::size_t j = 0; j < path.size(); ++j) {
        run = (j > 0 && path.cubes[j].level == path.cubes[j - 1].level) ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best;
}

PathDecayConstants fit_decay(std::span<const CubePath> corpus) {
    if (corpus.empty()) {
        throw Error("empty path corpus");
    }
    PathDecayConstants c;
    c.paths = corpus.size();
    for (const auto& path : corpus) {
        c.cubes += path.size();
        c.C_n = std::max(c.C_n, block_length(path));
        if (path.size() >= 2 && path.cubes.back().level < path.cubes.front().level) {
            throw Error("decay violated: diameters grow along a path from " + path.cubes.front().id());
        }
    }
    // log2 delta_j <= log2 A - (j - i)/C + log2 delta_i  <=>  g_i - g_j <= C log2 A with g = C level - index
    long long worst = 0;
    for (const auto& path : corpus) {
        long long run_max = 0;
        for (std::size_t j = 0; j < path.size(); ++j) {
            long long g = static_cast<long long>(c.C_n) * path.cubes[j].level - static_cast<long long>(j);
            run_max = j == 0 ? g : std::max(run_max, g);
            worst = std::max(worst, run_max - g);
        }
    }
    c.log2_A = static_cast<int>((worst + c.C_n - 1) / c.C_n);
    c.A = std::ldexp(1.0, c.log2_A);
    c.a = std::pow(2.0, -1.0 / c.C_n);
    return c;
}

bool decay_holds(const CubePath& path, const PathDecayConstants& c) {
    const long long C = c.C_n;
    for (std::size_t i = 0; i < path.size(); ++i) {
        for (std::size_t j = i; j < path.size(); ++j) {
            long long lhs = C * path.cubes[i].level - static_cast<long long>(i) -
                            (C * path.cubes[j].level - static_cast<long long>(j));
            if (lhs > C * c.log2_A) {
                return false;
            }
        }
    }
    return true;
}

Lemma12Report lemma12_check(const WhitneyDecomposition& w, const DyadicCube& p, const Point& x,
                            const TestFunctionPtr& f, const Lemma12Options& opts) {
    const SpaceParams& params = w.params();
    params.require_standing_hypothesis();
    const int n = params.n();
    const int m = params.floor_s();
    const double sp = params.s() * params.p();
    const double fsp = params.frac_s() * params.p();
    const double pp = params.p();
    const double delta_p = p.diameter();

    Lemma12Report r;
    r.epsilon = (fsp - n) / 2.0;
    const Point xp = w.anchor(p);
    for (int order = 0; order <= m; ++order) {
        for (const auto& i : multi_indices_of_order(n, order)) {
            double diff = taylor_remainder_integral(*f, x, xp, i, m - order);
            r.lhs += std::pow(delta_p, n - sp + order * pp) * std::pow(std::abs(diff), pp);
        }
    }
    r.lhs_zero = r.lhs == 0.0;

    AnalyticField field(f, m);
    std::map<std::string, double> terms;
    auto term = [&](const DyadicCube& q) {
        auto [it, fresh] = terms.try_emplace(q.id(), 0.0);
        if (fresh) {
            auto est = gagliardo(field, Region(q.box()), params, Method::TensorQuad, opts.seminorm_budget, 0);
            it->second = est.value_p * std::pow(q.diameter(), fsp - n - r.epsilon);
        }
        return it->second;
    };
    // one level finer multiplies each term by about 2^{-(p - eps)}
    const double shrink = std::pow(2.0, -(pp - r.epsilon));
    auto evaluate = [&](int floor_level) {
        Lemma12Truncation t;
        t.floor_level = floor_level;
        PathOptions po;
        po.floor_level = floor_level;
        CubePath path = build_path(w, p, x, po);
        t.cubes = path.size();
        double sum = 0.0;
        double last_block = 0.0;
        for (std::size_t j = 1; j < path.size(); ++j) {
            double v = term(path.cubes[j]);
            sum += v;
            last_block = (path.cubes[j].level == path.cubes[j - 1].level || j == 1) ? last_block + v : v;
        }
        t.rhs = std::pow(delta_p, n - fsp + r.epsilon) * sum;
        t.tail = std::pow(delta_p, n - fsp + r.epsilon) * last_block * shrink / (1.0 - shrink);
        t.tail_flag = t.tail > opts.tail_tolerance * t.rhs;
        t.ratio = r.lhs == 0.0 ? 0.0 : r.lhs / t.rhs;
        return t;
    };
    r.coarse = evaluate(w.max_depth());
    r.fine = evaluate(w.max_depth() + opts.extra_levels);
    if (r.coarse.ratio == 0.0 && r.fine.ratio == 0.0) {
        r.ratio_change = 0.0;
    } else {
        r.ratio_change = std::abs(r.fine.ratio / r.coarse.ratio - 1.0);
    }
    r.stable = std::isfinite(r.fine.ratio) && r.ratio_change <= opts.stability_tolerance;
    return r;
}

} // namespace whitney
