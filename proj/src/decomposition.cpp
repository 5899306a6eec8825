#include "whitney/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "whitney/error.hpp"
#include "whitney/parallel.hpp"

namespace whitney {

namespace {

constexpr int kGridBits = 56;

std::string to_string(i128 v) {
    if (v == 0) {
        return "0";
    }
    bool neg = v < 0;
    u128 u = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
    std::string s;
    while (u) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) {
        s.push_back('-');
    }
    std::reverse(s.begin(), s.end());
    return s;
}

i128 box_gap2(const GridBox& a, const GridBox& b) {
    i128 s = 0;
    for (int i = 0; i < a.dim; ++i) {
        i128 g = 0;
        if (a.lo[i] > b.hi[i]) {
            g = static_cast<i128>(a.lo[i]) - b.hi[i];
        } else if (b.lo[i] > a.hi[i]) {
            g = static_cast<i128>(b.lo[i]) - a.hi[i];
        }
        s += g * g;
    }
    return s;
}

bool grid_lex_less(const GridPoint& a, const GridPoint& b) {
    return std::lexicographical_compare(a.c.begin(), a.c.begin() + a.dim, b.c.begin(), b.c.begin() + b.dim);
}

} // namespace

Grid::Grid(int dim, int domain_exp) : dim_(dim), L_(domain_exp), R_(kGridBits - domain_exp) {
    if (domain_exp < -40 || domain_exp > 40) {
        throw Error("domain exponent out of range");
    }
}

std::optional<GridPoint> Grid::to_grid(const Point& x) const {
    GridPoint g;
    g.dim = x.dim;
    const double bound = std::ldexp(1.0, kGridBits);
    for (int i = 0; i < x.dim; ++i) {
        double v = std::ldexp(x[i], R_);
        if (!std::isfinite(v) || std::abs(v) > bound || v != std::floor(v)) {
            return std::nullopt;
        }
        g.c[i] = static_cast<std::int64_t>(v);
    }
    return g;
}

Point Grid::to_point(const GridPoint& g) const {
    Point x(g.dim);
    for (int i = 0; i < g.dim; ++i) {
        x[i] = to_double(g.c[i]);
    }
    return x;
}

double Grid::to_double(std::int64_t v) const { return std::ldexp(static_cast<double>(v), -R_); }

GridBox Grid::box(const DyadicCube& q) const {
    if (q.level > R_) {
        throw Error("cube finer than the grid resolution");
    }
    int sh = R_ - q.level;
    GridBox b;
    b.dim = q.dim;
    for (int i = 0; i < q.dim; ++i) {
        b.lo[i] = q.a[i] * (std::int64_t{1} << sh);
        b.hi[i] = (q.a[i] + 1) * (std::int64_t{1} << sh);
    }
    return b;
}

i128 dist2(const GridBox& b, const GridPoint& p) {
    i128 s = 0;
    for (int i = 0; i < b.dim; ++i) {
        i128 g = 0;
        if (p.c[i] < b.lo[i]) {
            g = static_cast<i128>(b.lo[i]) - p.c[i];
        } else if (p.c[i] > b.hi[i]) {
            g = static_cast<i128>(p.c[i]) - b.hi[i];
        }
        s += g * g;
    }
    return s;
}

SiteIndex::SiteIndex(std::vector<GridPoint> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) {
        throw Error("empty reference set");
    }
    order_.resize(sites_.size());
    std::iota(order_.begin(), order_.end(), 0);
    build(0, static_cast<int>(sites_.size()));
}

int SiteIndex::build(int begin, int end) {
    const int dim = sites_[0].dim;
    Node node;
    node.begin = begin;
    node.end = end;
    node.bbox.dim = dim;
    for (int i = 0; i < dim; ++i) {
        node.bbox.lo[i] = sites_[order_[begin]].c[i];
        node.bbox.hi[i] = node.bbox.lo[i];
    }
    for (int k = begin; k < end; ++k) {
        for (int i = 0; i < dim; ++i) {
            node.bbox.lo[i] = std::min(node.bbox.lo[i], sites_[order_[k]].c[i]);
            node.bbox.hi[i] = std::max(node.bbox.hi[i], sites_[order_[k]].c[i]);
        }
    }
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin > 8) {
        int axis = 0;
        for (int i = 1; i < dim; ++i) {
            if (node.bbox.hi[i] - node.bbox.lo[i] > node.bbox.hi[axis] - node.bbox.lo[axis]) {
                axis = i;
            }
        }
        int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int a, int b) { return sites_[a].c[axis] < sites_[b].c[axis]; });
        int l = build(begin, mid);
        int r = build(mid, end);
        nodes_[id].left = l;
        nodes_[id].right = r;
    }
    return id;
}

bool SiteIndex::any_within(const GridBox& b, i128 thr2) const {
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top) {
        const Node& nd = nodes_[stack[--top]];
        if (box_gap2(nd.bbox, b) >= thr2) {
            continue;
        }
        if (nd.left < 0) {
            for (int k = nd.begin; k < nd.end; ++k) {
                if (dist2(b, sites_[order_[k]]) < thr2) {
                    return true;
                }
            }
        } else {
            stack[top++] = nd.left;
            stack[top++] = nd.right;
        }
    }
    return false;
}

void SiteIndex::nearest_rec(int id, const GridBox& b, Hit& best) const {
    const Node& nd = nodes_[id];
    if (best.index >= 0 && box_gap2(nd.bbox, b) > best.dist2) {
        return;
    }
    if (nd.left < 0) {
        for (int k = nd.begin; k < nd.end; ++k) {
            int s = order_[k];
            i128 d = dist2(b, sites_[s]);
            if (best.index < 0 || d < best.dist2 || (d == best.dist2 && grid_lex_less(sites_[s], sites_[best.index]))) {
                best.index = s;
                best.dist2 = d;
            }
        }
        return;
    }
    i128 dl = box_gap2(nodes_[nd.left].bbox, b);
    i128 dr = box_gap2(nodes_[nd.right].bbox, b);
    if (dl <= dr) {
        nearest_rec(nd.left, b, best);
        nearest_rec(nd.right, b, best);
    } else {
        nearest_rec(nd.right, b, best);
        nearest_rec(nd.left, b, best);
    }
}

SiteIndex::Hit SiteIndex::nearest(const GridBox& b) const {
    Hit best;
    nearest_rec(0, b, best);
    return best;
}

bool StructureReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const StructureCheck& c) { return c.pass; });
}

const StructureCheck* StructureReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

WhitneyDecomposition::WhitneyDecomposition(const SpaceParams& params, std::vector<Point> sites, int domain_exp,
                                           int max_depth, int depth_cap)
    : params_(params), grid_(params.n(), domain_exp), max_depth_(max_depth) {
    const int n = params.n();
    const int L = domain_exp;
    if (sites.empty()) {
        throw Error("empty reference set");
    }
    if (max_depth <= -L) {
        throw Error("max depth must exceed the root level");
    }
    if (max_depth > grid_.resolution()) {
        throw Error("max depth finer than the grid resolution");
    }
    depth_cap_ = depth_cap < 0 ? std::min(max_depth + 24, grid_.resolution()) : depth_cap;
    if (depth_cap_ < max_depth || depth_cap_ > grid_.resolution()) {
        throw Error("depth cap must lie between max depth and the grid resolution");
    }
    coord_bits_ = L + max_depth + 1;
    if (8 + n * coord_bits_ > 128 || L + max_depth > 200) {
        throw Error("domain exponent plus max depth too large for the cube index");
    }
    std::vector<GridPoint> grid_sites;
    // the closed set must keep distance 2^L / 4 from the domain boundary
    const std::int64_t limit = 3 * (std::int64_t{1} << (kGridBits - 2));
    for (const Point& x : sites) {
        if (x.dim != n) {
            throw Error("site dimension does not match params");
        }
        auto g = grid_.to_grid(x);
        if (!g) {
            std::ostringstream os;
            os << "site not representable on the dyadic grid 2^-" << grid_.resolution();
            throw Error(os.str());
        }
        for (int i = 0; i < n; ++i) {
            if (g->c[i] > limit || g->c[i] < -limit) {
                throw Error("domain too small");
            }
        }
        grid_sites.push_back(*g);
    }
    std::sort(grid_sites.begin(), grid_sites.end(), grid_lex_less);
    if (std::adjacent_find(grid_sites.begin(), grid_sites.end()) != grid_sites.end()) {
        throw Error("duplicate site");
    }
    for (const auto& g : grid_sites) {
        sites_.push_back(grid_.to_point(g));
    }
    index_ = SiteIndex(std::move(grid_sites));
}

namespace {

struct BuildState {
    const Grid* grid;
    const std::vector<GridPoint>* sites;
    int n;
    int max_depth;
    std::vector<std::vector<int>> scratch;
    std::vector<DyadicCube> cubes;
    std::vector<DyadicCube> fringe;

    void visit(const DyadicCube& cell, const std::vector<int>& candidates, int depth) {
        GridBox b = grid->box(cell);
        i128 s = grid->side(cell.level);
        i128 thr = 100 * n * s * s;
        auto& kept = scratch[static_cast<std::size_t>(depth)];
        kept.clear();
        for (int idx : candidates) {
            if (dist2(b, (*sites)[static_cast<std::size_t>(idx)]) < thr) {
                kept.push_back(idx);
            }
        }
        if (kept.empty()) {
            cubes.push_back(cell);
            return;
        }
        if (cell.level >= max_depth) {
            fringe.push_back(cell);
            return;
        }
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            visit(cell.child(mask), kept, depth + 1);
        }
    }
};

} // namespace

WhitneyDecomposition WhitneyDecomposition::build(const SpaceParams& params, std::vector<Point> sites, int domain_exp,
                                                 int max_depth, int depth_cap) {
    WhitneyDecomposition w(params, std::move(sites), domain_exp, max_depth, depth_cap);
    const int n = params.n();
    const unsigned nroots = 1u << n;
    std::vector<BuildState> parts(nroots);
    std::vector<int> all(w.sites_.size());
    std::iota(all.begin(), all.end(), 0);
    parallel_for(nroots, [&](std::size_t r) {
        DyadicCube root;
        root.level = -domain_exp;
        root.dim = n;
        for (int i = 0; i < n; ++i) {
            root.a[i] = ((r >> i) & 1u) ? 0 : -1;
        }
        BuildState& st = parts[r];
        st.grid = &w.grid_;
        st.sites = &w.index_.sites();
        st.n = n;
        st.max_depth = max_depth;
        st.scratch.resize(static_cast<std::size_t>(max_depth + domain_exp + 2));
        st.visit(root, all, 0);
    });
    for (auto& st : parts) {
        w.cubes_.insert(w.cubes_.end(), st.cubes.begin(), st.cubes.end());
        w.fringe_.insert(w.fringe_.end(), st.fringe.begin(), st.fringe.end());
    }
    w.index_cells();
    return w;
}

WhitneyDecomposition WhitneyDecomposition::from_parts(const SpaceParams& params, std::vector<Point> sites,
                                                      int domain_exp, int max_depth, int depth_cap,
                                                      std::vector<DyadicCube> cubes, std::vector<DyadicCube> fringe) {
    WhitneyDecomposition w(params, std::move(sites), domain_exp, max_depth, depth_cap);
    for (const auto* list : {&cubes, &fringe}) {
        for (const auto& q : *list) {
            if (q.dim != params.n() || q.level > max_depth || q.level < -domain_exp - 1) {
                throw Error("stored cube " + q.id() + " outside the enumeration range");
            }
        }
    }
    w.cubes_ = std::move(cubes);
    w.fringe_ = std::move(fringe);
    w.index_cells();
    return w;
}

void WhitneyDecomposition::index_cells() {
    anchors_.assign(cubes_.size(), -1);
    parallel_for((cubes_.size() + 4095) / 4096, [&](std::size_t chunk) {
        std::size_t end = std::min(cubes_.size(), (chunk + 1) * 4096);
        for (std::size_t i = chunk * 4096; i < end; ++i) {
            anchors_[i] = index_.nearest(grid_.box(cubes_[i])).index;
        }
    });
    cells_.clear();
    cells_.reserve(cubes_.size() + cubes_.size() / 2 + fringe_.size());
    for (std::size_t i = 0; i < cubes_.size(); ++i) {
        if (in_domain(cubes_[i])) {
            cells_.emplace(key(cubes_[i]), static_cast<std::int32_t>(i));
        }
    }
    for (const auto& f : fringe_) {
        if (in_domain(f)) {
            cells_.emplace(key(f), -2);
        }
    }
    auto mark_ancestors = [&](const DyadicCube& q) {
        DyadicCube c = q;
        while (c.level > -domain_exp()) {
            c = c.parent();
            if (!in_domain(c)) {
                break;
            }
            auto [it, inserted] = cells_.emplace(key(c), -1);
            if (!inserted) {
                break;
            }
        }
    };
    for (const auto& q : cubes_) {
        mark_ancestors(q);
    }
    for (const auto& f : fringe_) {
        mark_ancestors(f);
    }
}

absl::uint128 WhitneyDecomposition::key(const DyadicCube& q) const {
    const int L = domain_exp();
    u128 k = static_cast<u128>(q.level + L);
    int shift = 8;
    for (int i = 0; i < q.dim; ++i) {
        std::int64_t biased = q.a[i] + (std::int64_t{1} << (L + q.level));
        k |= static_cast<u128>(static_cast<std::uint64_t>(biased)) << shift;
        shift += coord_bits_;
    }
    return absl::MakeUint128(static_cast<std::uint64_t>(k >> 64), static_cast<std::uint64_t>(k));
}

Box WhitneyDecomposition::domain_box() const {
    Box b;
    b.dim = dim();
    for (int i = 0; i < dim(); ++i) {
        b.lo[i] = -std::ldexp(1.0, domain_exp());
        b.hi[i] = std::ldexp(1.0, domain_exp());
    }
    return b;
}

bool WhitneyDecomposition::satisfies(const DyadicCube& q) const {
    i128 s = grid_.side(q.level);
    return !index_.any_within(grid_.box(q), 100 * dim() * s * s);
}

bool WhitneyDecomposition::in_domain(const DyadicCube& q) const {
    int e = domain_exp() + q.level;
    if (e < 0 || q.level > grid_.resolution()) {
        return false;
    }
    std::int64_t lim = std::int64_t{1} << e;
    for (int i = 0; i < q.dim; ++i) {
        if (q.a[i] < -lim || q.a[i] >= lim) {
            return false;
        }
    }
    return true;
}

bool WhitneyDecomposition::in_domain(const Point& x) const {
    double lim = std::ldexp(1.0, domain_exp());
    for (int i = 0; i < x.dim; ++i) {
        if (!(x[i] >= -lim && x[i] <= lim)) {
            return false;
        }
    }
    return true;
}

WhitneyDecomposition::Status WhitneyDecomposition::status(const DyadicCube& q, long* index) const {
    if (q.level > max_depth_ || !in_domain(q)) {
        return Status::Absent;
    }
    auto it = cells_.find(key(q));
    if (it == cells_.end()) {
        return Status::Absent;
    }
    if (it->second >= 0) {
        if (index) {
            *index = it->second;
        }
        return Status::Accepted;
    }
    return it->second == -1 ? Status::Internal : Status::Fringe;
}

long WhitneyDecomposition::find(const DyadicCube& q) const {
    long idx = -1;
    if (status(q, &idx) == Status::Accepted) {
        return idx;
    }
    return -1;
}

WhitneyDecomposition::Resolved WhitneyDecomposition::resolve(const DyadicCube& c) const {
    Resolved r;
    if (!in_domain(c)) {
        return r;
    }
    DyadicCube probe = c.level > max_depth_ ? c.ancestor(max_depth_) : c;
    Status st = status(probe);
    if (st == Status::Accepted) {
        r.kind = Resolved::Cube;
        r.cube = probe;
        return r;
    }
    if (st == Status::Internal) {
        r.kind = Resolved::Subdivided;
        return r;
    }
    if (st == Status::Fringe) {
        // beyond the enumeration: the coarsest cell on the chain that passes the test
        for (int lv = max_depth_ + 1; lv <= c.level && lv <= depth_cap_; ++lv) {
            DyadicCube a = c.ancestor(lv);
            if (satisfies(a)) {
                r.kind = Resolved::Cube;
                r.cube = a;
                return r;
            }
        }
        r.kind = Resolved::Subdivided;
        return r;
    }
    while (probe.level > -domain_exp()) {
        probe = probe.parent();
        st = status(probe);
        if (st == Status::Accepted) {
            r.kind = Resolved::Cube;
            r.cube = probe;
            return r;
        }
        if (st != Status::Absent) {
            break;
        }
    }
    r.kind = Resolved::Subdivided;
    return r;
}

bool WhitneyDecomposition::is_cube(const DyadicCube& q) const {
    Resolved r = resolve(q);
    return r.kind == Resolved::Cube && r.cube == q;
}

template <class CellsAt>
std::vector<DyadicCube> WhitneyDecomposition::locate_impl(int start_level, CellsAt&& cells_at) const {
    const int n = dim();
    std::vector<DyadicCube> out;
    // per-axis candidate coordinates at a level: one, or two on a dyadic face
    auto product = [&](int level, auto&& fn) {
        std::array<std::array<std::int64_t, 2>, kMaxDim> cand;
        std::array<int, kMaxDim> count{};
        for (int i = 0; i < n; ++i) {
            count[i] = cells_at(level, i, cand[i]);
        }
        std::array<int, kMaxDim> pick{};
        while (true) {
            DyadicCube c;
            c.level = level;
            c.dim = n;
            for (int i = 0; i < n; ++i) {
                c.a[i] = cand[i][pick[i]];
            }
            fn(c);
            int i = 0;
            while (i < n && ++pick[i] == count[i]) {
                pick[i] = 0;
                ++i;
            }
            if (i == n) {
                break;
            }
        }
    };
    auto push = [&](const DyadicCube& q) {
        if (std::find(out.begin(), out.end(), q) == out.end()) {
            out.push_back(q);
        }
    };
    auto descend = [&](auto&& self, const DyadicCube& cell) -> void {
        int lv = cell.level + 1;
        if (lv > depth_cap_) {
            std::ostringstream os;
            os << "unresolvable at depth cap " << depth_cap_ << " (cell " << cell.id() << ")";
            throw DepthCapError(os.str());
        }
        product(lv, [&](const DyadicCube& child) {
            if (child.parent() != cell) {
                return;
            }
            if (lv <= max_depth_) {
                Status st = status(child);
                if (st == Status::Accepted) {
                    push(child);
                } else if (st == Status::Internal || st == Status::Fringe) {
                    self(self, child);
                }
            } else if (satisfies(child)) {
                push(child);
            } else {
                self(self, child);
            }
        });
    };
    product(start_level, [&](const DyadicCube& cell) {
        Resolved r = resolve(cell);
        if (r.kind == Resolved::Cube) {
            push(r.cube);
        } else if (r.kind == Resolved::Subdivided) {
            descend(descend, cell);
        }
    });
    return out;
}

std::vector<DyadicCube> WhitneyDecomposition::locate_from(const Point& x, int start_level) const {
    if (!in_domain(x)) {
        throw DomainError("outside computational domain");
    }
    if (site_at(x) >= 0) {
        throw DomainError("on the closed set");
    }
    start_level = std::clamp(start_level, -domain_exp(), depth_cap_);
    const double lim = std::ldexp(1.0, domain_exp());
    return locate_impl(start_level, [&](int level, int i, std::array<std::int64_t, 2>& cand) {
        double v = std::ldexp(x[i], level);
        double f = std::floor(v);
        auto a = static_cast<std::int64_t>(f);
        int k = 0;
        // cells on the far side of the domain boundary do not exist
        if (x[i] < lim) {
            cand[k++] = a;
        }
        if (v == f && x[i] > -lim) {
            cand[k++] = a - 1;
        }
        return k;
    });
}

std::vector<DyadicCube> WhitneyDecomposition::locate(const Point& x) const {
    return locate_from(x, -domain_exp());
}

std::vector<DyadicCube> WhitneyDecomposition::locate(const GridPoint& g) const {
    Point x = grid_.to_point(g);
    if (!in_domain(x)) {
        throw DomainError("outside computational domain");
    }
    if (index_.nearest(GridBox{g.dim, g.c, g.c}).dist2 == 0) {
        throw DomainError("on the closed set");
    }
    const std::int64_t lim = std::int64_t{1} << kGridBits;
    const int R = grid_.resolution();
    return locate_impl(-domain_exp(), [&](int level, int i, std::array<std::int64_t, 2>& cand) {
        int sh = R - level;
        std::int64_t a = g.c[i] >> sh;
        int k = 0;
        if (g.c[i] < lim) {
            cand[k++] = a;
        }
        if ((g.c[i] & ((std::int64_t{1} << sh) - 1)) == 0 && g.c[i] > -lim) {
            cand[k++] = a - 1;
        }
        return k;
    });
}

std::optional<DyadicCube> WhitneyDecomposition::enumerated_cube_at(const Point& x) const {
    if (!in_domain(x)) {
        throw DomainError("outside computational domain");
    }
    const int n = dim();
    const double lim = std::ldexp(1.0, domain_exp());
    for (int lv = -domain_exp(); lv <= max_depth_; ++lv) {
        DyadicCube c;
        c.level = lv;
        c.dim = n;
        for (int i = 0; i < n; ++i) {
            auto a = static_cast<std::int64_t>(std::floor(std::ldexp(x[i], lv)));
            if (x[i] >= lim) {
                a -= 1;
            }
            c.a[i] = a;
        }
        Status st = status(c);
        if (st == Status::Accepted) {
            return c;
        }
        if (st != Status::Internal) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::vector<DyadicCube> WhitneyDecomposition::ring(const DyadicCube& q) const {
    const int n = dim();
    std::vector<DyadicCube> out;
    int total = 1;
    for (int i = 0; i < n; ++i) {
        total *= 4;
    }
    for (int code = 0; code < total; ++code) {
        DyadicCube c;
        c.level = q.level + 1;
        c.dim = n;
        bool inside = true;
        int rest = code;
        for (int i = 0; i < n; ++i) {
            int off = rest % 4 - 1;
            rest /= 4;
            c.a[i] = 2 * q.a[i] + off;
            if (off != 0 && off != 1) {
                inside = false;
            }
        }
        if (!inside && in_domain(c)) {
            out.push_back(c);
        }
    }
    return out;
}

void WhitneyDecomposition::ring_neighbors(const DyadicCube& q, std::vector<DyadicCube>& out,
                                          std::size_t* subdivided) const {
    auto add = [&](const DyadicCube& c) {
        if (c != q && std::find(out.begin(), out.end(), c) == out.end()) {
            out.push_back(c);
        }
    };
    auto dig = [&](auto&& self, const DyadicCube& cell) -> void {
        if (cell.level >= depth_cap_) {
            return;
        }
        for (unsigned mask = 0; mask < (1u << dim()); ++mask) {
            DyadicCube ch = cell.child(mask);
            if (!cubes_touch(ch, q)) {
                continue;
            }
            Resolved r = resolve(ch);
            if (r.kind == Resolved::Cube) {
                add(r.cube);
            } else if (r.kind == Resolved::Subdivided) {
                self(self, ch);
            }
        }
    };
    for (const auto& c : ring(q)) {
        Resolved r = resolve(c);
        if (r.kind == Resolved::Cube) {
            add(r.cube);
        } else if (r.kind == Resolved::Subdivided) {
            if (subdivided) {
                ++*subdivided;
            }
            dig(dig, c);
        }
    }
}

std::vector<DyadicCube> WhitneyDecomposition::neighbors(const DyadicCube& q) const {
    std::vector<DyadicCube> out;
    ring_neighbors(q, out, nullptr);
    std::sort(out.begin(), out.end(), cube_less);
    return out;
}

int WhitneyDecomposition::anchor_site(const DyadicCube& q) const {
    long idx = find(q);
    if (idx >= 0) {
        return anchors_[static_cast<std::size_t>(idx)];
    }
    return index_.nearest(grid_.box(q)).index;
}

Point WhitneyDecomposition::anchor(const DyadicCube& q) const { return sites_[static_cast<std::size_t>(anchor_site(q))]; }

i128 WhitneyDecomposition::dist2_to_sites(const DyadicCube& q) const { return index_.nearest(grid_.box(q)).dist2; }

int WhitneyDecomposition::site_at(const Point& x) const {
    auto g = grid_.to_grid(x);
    if (!g) {
        return -1;
    }
    auto hit = index_.nearest(GridBox{g->dim, g->c, g->c});
    return hit.dist2 == 0 ? hit.index : -1;
}

u128 WhitneyDecomposition::morton(const DyadicCube& q) const {
    const int n = dim();
    const int L = domain_exp();
    u128 code = 0;
    for (int i = 0; i < n; ++i) {
        // coarser cells than the roots are clamped by the caller
        auto biased = static_cast<std::uint64_t>((q.a[i] << (max_depth_ - q.level)) + (std::int64_t{1} << (L + max_depth_)));
        for (int b = 0; b < coord_bits_; ++b) {
            if ((biased >> b) & 1u) {
                code |= u128{1} << (b * n + i);
            }
        }
    }
    return code;
}

StructureReport WhitneyDecomposition::verify_structure(const VerifyOptions& opts) const {
    const int n = dim();
    StructureReport rep;
    rep.cube_count = cubes_.size();
    rep.fringe_count = fringe_.size();
    rep.min_level = cubes_.empty() ? 0 : cubes_.front().level;
    rep.max_level = rep.min_level;
    for (const auto& q : cubes_) {
        rep.min_level = std::min(rep.min_level, q.level);
        rep.max_level = std::max(rep.max_level, q.level);
    }

    auto note = [](StructureCheck& c, const std::string& what) {
        ++c.violations;
        c.pass = false;
        if (c.detail.empty()) {
            c.detail = what;
        }
    };

    StructureCheck bounds{"whitney_bounds", true, 0, {}};
    StructureCheck maximal{"maximality", true, 0, {}};
    for (std::size_t i = 0; i < cubes_.size(); ++i) {
        const DyadicCube& q = cubes_[i];
        i128 s = grid_.side(q.level);
        i128 d2 = index_.nearest(grid_.box(q)).dist2;
        if (d2 < 100 * n * s * s || d2 > 484 * n * s * s) {
            note(bounds, q.id() + " dist^2=" + to_string(d2) + " side^2=" + to_string(s * s));
        }
        if (q.level > -domain_exp()) {
            DyadicCube p = q.parent();
            if (satisfies(p)) {
                note(maximal, q.id() + " parent " + p.id() + " passes the acceptance test");
            }
        }
    }

    StructureCheck disjoint{"disjoint_interiors", true, 0, {}};
    StructureCheck coverage{"coverage", true, 0, {}};
    {
        struct Interval {
            u128 start;
            u128 length;
            std::size_t index;
        };
        std::vector<Interval> iv;
        iv.reserve(cubes_.size() + fringe_.size());
        bool representable = true;
        std::size_t idx = 0;
        for (const auto* list : {&cubes_, &fringe_}) {
            for (const auto& q : *list) {
                const DyadicCube& c = q;
                if (c.level < -domain_exp()) {
                    representable = false;
                }
                if (c.level >= -domain_exp() && in_domain(c)) {
                    iv.push_back({morton(c), u128{1} << (n * (max_depth_ - c.level)), idx});
                } else if (c.level >= -domain_exp()) {
                    note(coverage, c.id() + " outside the domain");
                }
                ++idx;
            }
        }
        if (!representable) {
            note(disjoint, "cube coarser than the domain roots");
        }
        std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) {
            return a.start < b.start || (a.start == b.start && a.length > b.length);
        });
        auto name = [&](std::size_t k) {
            return k < cubes_.size() ? cubes_[k].id() : fringe_[k - cubes_.size()].id();
        };
        u128 covered = 0;
        u128 reach = 0;
        for (std::size_t k = 0; k < iv.size(); ++k) {
            u128 end = iv[k].start + iv[k].length;
            if (k > 0 && iv[k].start < reach) {
                note(disjoint, name(iv[k].index) + " overlaps an earlier cube");
            }
            if (end > reach) {
                covered += end - std::max(reach, iv[k].start);
                reach = end;
            }
        }
        u128 total = u128{1} << (n * coord_bits_);
        if (covered != total) {
            std::ostringstream os;
            os << "union covers " << static_cast<double>(covered) / static_cast<double>(total) << " of the domain";
            note(coverage, os.str());
        }
    }

    StructureCheck ratio{"neighbor_ratio", true, 0, {}};
    StructureCheck separation{"non_neighbor_separation", true, 0, {}};
    StructureCheck count{"neighbor_count", true, 0, {}};
    StructureCheck overlap{"overlap_multiplicity", true, 0, {}};
    if (opts.neighbor_scan) {
        std::vector<int> counts(cubes_.size(), 0);
        std::vector<std::string> ratio_bad(cubes_.size());
        std::vector<std::uint8_t> sep_bad(cubes_.size(), 0);
        parallel_for((cubes_.size() + 1023) / 1024, [&](std::size_t chunk) {
            std::vector<DyadicCube> nb;
            std::size_t end = std::min(cubes_.size(), (chunk + 1) * 1024);
            for (std::size_t i = chunk * 1024; i < end; ++i) {
                nb.clear();
                std::size_t sub = 0;
                ring_neighbors(cubes_[i], nb, &sub);
                counts[i] = static_cast<int>(nb.size());
                sep_bad[i] = sub > 0;
                for (const auto& r : nb) {
                    if (std::abs(r.level - cubes_[i].level) > 1) {
                        ratio_bad[i] = cubes_[i].id() + " touches " + r.id();
                        break;
                    }
                }
            }
        });
        for (std::size_t i = 0; i < cubes_.size(); ++i) {
            rep.max_neighbors = std::max(rep.max_neighbors, counts[i]);
            if (!ratio_bad[i].empty()) {
                note(ratio, ratio_bad[i]);
            }
            if (sep_bad[i]) {
                note(separation, cubes_[i].id() + " has a finer cube inside (2Q)° that does not touch it");
            }
        }
        count.detail = "max " + std::to_string(rep.max_neighbors);

        // overlap multiplicity of {1.1Q}: exact box-arrangement scan in units of side/20
        std::size_t stride = 1;
        if (opts.overlap_sample > 0 && cubes_.size() > opts.overlap_sample) {
            stride = (cubes_.size() + opts.overlap_sample - 1) / opts.overlap_sample;
        }
        std::vector<int> depth((cubes_.size() + stride - 1) / stride, 0);
        parallel_for(depth.size(), [&](std::size_t slot) {
            const DyadicCube& q = cubes_[slot * stride];
            std::vector<DyadicCube> family = neighbors(q);
            family.push_back(q);
            std::vector<std::array<i128, 2 * kMaxDim>> boxes;
            for (const auto& r : family) {
                std::array<i128, 2 * kMaxDim> b{};
                i128 s = grid_.side(r.level);
                for (int i = 0; i < n; ++i) {
                    b[2 * i] = 20 * r.a[i] * s - s;
                    b[2 * i + 1] = 20 * (r.a[i] + 1) * s + s;
                }
                boxes.push_back(b);
            }
            i128 s = grid_.side(q.level);
            std::array<std::vector<i128>, kMaxDim> axis;
            for (int i = 0; i < n; ++i) {
                i128 lo = 20 * q.a[i] * s;
                i128 hi = 20 * (q.a[i] + 1) * s;
                axis[i].push_back(lo);
                for (const auto& b : boxes) {
                    if (b[2 * i] > lo && b[2 * i] <= hi) {
                        axis[i].push_back(b[2 * i]);
                    }
                }
                std::sort(axis[i].begin(), axis[i].end());
                axis[i].erase(std::unique(axis[i].begin(), axis[i].end()), axis[i].end());
            }
            std::array<std::size_t, kMaxDim> pick{};
            int best = 0;
            while (true) {
                int c = 0;
                for (const auto& b : boxes) {
                    bool in = true;
                    for (int i = 0; i < n && in; ++i) {
                        i128 v = axis[i][pick[i]];
                        in = v >= b[2 * i] && v <= b[2 * i + 1];
                    }
                    c += in;
                }
                best = std::max(best, c);
                int i = 0;
                while (i < n && ++pick[i] == axis[i].size()) {
                    pick[i] = 0;
                    ++i;
                }
                if (i == n) {
                    break;
                }
            }
            depth[slot] = best;
        });
        for (int d : depth) {
            rep.max_overlap = std::max(rep.max_overlap, d);
        }
        rep.overlap_cubes_scanned = depth.size();
        std::ostringstream os;
        os << "max " << rep.max_overlap << " over " << depth.size() << " cubes";
        overlap.detail = os.str();
        if (rep.max_overlap > rep.max_neighbors + 1) {
            note(overlap, "multiplicity exceeds neighbor count + 1");
        }
    } else {
        // a touching cube two or more levels coarser must contain a same-level neighbor cell
        std::vector<std::string> bad(cubes_.size());
        parallel_for((cubes_.size() + 1023) / 1024, [&](std::size_t chunk) {
            std::size_t end = std::min(cubes_.size(), (chunk + 1) * 1024);
            int total = 1;
            for (int i = 0; i < n; ++i) {
                total *= 3;
            }
            for (std::size_t idx = chunk * 1024; idx < end; ++idx) {
                const DyadicCube& q = cubes_[idx];
                for (int code = 0; code < total; ++code) {
                    DyadicCube c = q;
                    int rest = code;
                    bool self = true;
                    for (int i = 0; i < n; ++i) {
                        int off = rest % 3 - 1;
                        rest /= 3;
                        c.a[i] += off;
                        self = self && off == 0;
                    }
                    if (self || !in_domain(c)) {
                        continue;
                    }
                    Status st = status(c);
                    if (st != Status::Absent) {
                        continue;
                    }
                    if (status(c.parent()) == Status::Accepted) {
                        continue;
                    }
                    Resolved r = resolve(c);
                    if (r.kind == Resolved::Cube && q.level - r.cube.level > 1) {
                        bad[idx] = q.id() + " touches " + r.cube.id();
                        break;
                    }
                }
            }
        });
        for (const auto& b : bad) {
            if (!b.empty()) {
                note(ratio, b);
            }
        }
        separation.detail = "skipped";
        count.detail = "skipped";
        overlap.detail = "skipped";
    }

    StructureCheck fringe{"fringe_resolution", true, 0, {}};
    for (const auto& f : fringe_) {
        if (f.level != max_depth_ || satisfies(f)) {
            note(fringe, f.id() + " is not an unresolved cell at the finest level");
        }
    }
    fringe.detail = std::to_string(fringe_.size()) + " fringe cells";

    rep.checks = {bounds, maximal, disjoint, coverage, ratio, separation, count, overlap, fringe};
    return rep;
}

} // namespace whitney
