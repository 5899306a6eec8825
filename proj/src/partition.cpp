#include "whitney/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "whitney/error.hpp"
#include "whitney/parallel.hpp"
#include "whitney/rng.hpp"

namespace whitney {

Series smooth_step(double u0, int order) {
    if (u0 <= 0.0) {
        return Series(order, 0.0);
    }
    if (u0 >= 1.0) {
        return Series(order, 1.0);
    }
    const Series one(order, 1.0);
    const Series u = Series::variable(order, u0);
    // h = 1 / (1 + exp(1/u - 1/(1-u))); the exponent is kept non-positive to avoid overflow
    if (u0 < 0.5) {
        Series w = exp((one - u).reciprocal() - u.reciprocal());
        return w / (one + w);
    }
    Series w = exp(u.reciprocal() - (one - u).reciprocal());
    return (one + w).reciprocal();
}

namespace {

double cutoff_argument(double x, double c, double r) { return 11.0 - 10.0 * std::abs(x - c) / r; }

} // namespace

Series cutoff(double x, double c, double r, int order) {
    double u0 = cutoff_argument(x, c, r);
    if (u0 <= 0.0 || u0 >= 1.0) {
        return smooth_step(u0, order);
    }
    double sign = x >= c ? 1.0 : -1.0;
    return smooth_step(u0, order).scaled_argument(-10.0 * sign / r);
}

bool in_support(const DyadicCube& q, const Point& x) {
    const double r = 0.5 * q.side();
    for (int i = 0; i < q.dim; ++i) {
        double c = 0.5 * (q.lo(i) + q.hi(i));
        if (cutoff_argument(x[i], c, r) <= 0.0) {
            return false;
        }
    }
    return true;
}

TaylorValue phi(const DyadicCube& q, const Point& x, int order) {
    const int n = q.dim;
    const double r = 0.5 * q.side();
    TaylorValue out(n, order, 1.0);
    for (int i = 0; i < n; ++i) {
        double c = 0.5 * (q.lo(i) + q.hi(i));
        double u0 = cutoff_argument(x[i], c, r);
        if (u0 <= 0.0) {
            return TaylorValue(n, order, 0.0);
        }
        if (u0 >= 1.0) {
            continue;
        }
        out *= TaylorValue::embed(cutoff(x[i], c, r, order), i, n);
    }
    return out;
}

std::vector<DyadicCube> covering_cubes(const WhitneyDecomposition& w, const Point& x) {
    const int n = w.dim();
    std::vector<DyadicCube> located = w.locate(x);
    int finest = located.front().level;
    for (const auto& q : located) {
        finest = std::max(finest, q.level);
    }
    // A cube R with x in 1.1R touches every cube containing x, so its side lies within a
    // factor 2 of the finest one; one corner of the box x +- rho then falls inside R.
    const double rho = 0.1 * std::ldexp(1.0, -finest);
    const double lim = std::ldexp(1.0, w.domain_exp());
    std::vector<DyadicCube> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Point y(n);
        for (int i = 0; i < n; ++i) {
            y[i] = std::clamp((mask >> i) & 1u ? x[i] + rho : x[i] - rho, -lim, lim);
        }
        for (const auto& q : w.locate_from(y, finest - 2)) {
            if (in_support(q, x) && std::find(out.begin(), out.end(), q) == out.end()) {
                out.push_back(q);
            }
        }
    }
    std::sort(out.begin(), out.end(), cube_less);
    return out;
}

PartitionAt partition_at(const WhitneyDecomposition& w, const Point& x, int order) {
    PartitionAt at;
    at.total = TaylorValue(w.dim(), order, 0.0);
    for (const auto& q : covering_cubes(w, x)) {
        TaylorValue f = phi(q, x, order);
        at.total += f;
        at.terms.push_back({q, std::move(f)});
    }
    return at;
}

TaylorValue theta(const WhitneyDecomposition& w, const DyadicCube& q, const Point& x, int order) {
    if (!w.in_domain(x)) {
        throw DomainError("outside computational domain");
    }
    if (!w.is_cube(q)) {
        throw Error("not a cube of the decomposition: " + q.id());
    }
    if (!in_support(q, x)) {
        return TaylorValue(w.dim(), order, 0.0);
    }
    PartitionAt at = partition_at(w, x, order);
    for (std::size_t i = 0; i < at.terms.size(); ++i) {
        if (at.terms[i].cube == q) {
            return at.theta(i);
        }
    }
    throw Error("covering set misses " + q.id());
}

DerivativeBoundReport verify_derivative_bounds(const WhitneyDecomposition& w, int order,
                                               const DerivativeBoundOptions& opts) {
    const int n = w.dim();
    std::vector<int> all_levels;
    for (const auto& q : w.cubes()) {
        all_levels.push_back(q.level);
    }
    std::sort(all_levels.begin(), all_levels.end());
    all_levels.erase(std::unique(all_levels.begin(), all_levels.end()), all_levels.end());

    std::vector<int> levels;
    if (opts.first_level) {
        for (int k = 0; k < opts.levels; ++k) {
            levels.push_back(*opts.first_level + k);
        }
    } else {
        int count = std::min<int>(opts.levels, static_cast<int>(all_levels.size()));
        int start = (static_cast<int>(all_levels.size()) - count) / 2;
        levels.assign(all_levels.begin() + start, all_levels.begin() + start + count);
    }

    struct Job {
        int slot;
        DyadicCube cube;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < levels.size(); ++s) {
        std::vector<DyadicCube> at;
        for (const auto& q : w.cubes()) {
            if (q.level == levels[s]) {
                at.push_back(q);
            }
        }
        std::size_t stride = 1;
        if (opts.cubes_per_level > 0 && at.size() > opts.cubes_per_level) {
            stride = (at.size() + opts.cubes_per_level - 1) / opts.cubes_per_level;
        }
        for (std::size_t i = 0; i < at.size(); i += stride) {
            jobs.push_back({static_cast<int>(s), at[i]});
        }
    }

    const int m = std::max(1, opts.refinement);
    std::size_t per_cube = 1;
    for (int i = 0; i < n; ++i) {
        per_cube *= static_cast<std::size_t>(m);
    }
    const auto basis = MultiIndexBasis::get(n, order);
    // per job: sup per order, and sample count
    std::vector<std::vector<double>> sups(jobs.size(), std::vector<double>(order + 1, 0.0));
    std::vector<std::size_t> counts(jobs.size(), 0);
    parallel_for(jobs.size(), [&](std::size_t j) {
        const DyadicCube& q = jobs[j].cube;
        const double r = 0.5 * q.side();
        const double delta = q.diameter();
        const Point c = q.center();
        for (std::size_t s = 0; s < per_cube; ++s) {
            Point x(n);
            std::size_t rest = s;
            for (int i = 0; i < n; ++i) {
                double t = -1.1 + 2.2 * (static_cast<double>(rest % m) + 0.5) / m;
                rest /= m;
                x[i] = c[i] + t * r;
            }
            if (!w.in_domain(x)) {
                continue;
            }
            TaylorValue th = theta(w, q, x, order);
            ++counts[j];
            for (std::size_t b = 0; b < basis->size(); ++b) {
                const MultiIndex& k = (*basis)[b];
                double v = std::abs(th.partial(k)) * std::pow(delta, k.order());
                sups[j][k.order()] = std::max(sups[j][k.order()], v);
            }
        }
    });

    DerivativeBoundReport rep;
    for (auto c : counts) {
        rep.samples += c;
    }
    for (int d = 0; d <= order; ++d) {
        DerivativeBoundRow row;
        row.order = d;
        row.levels = levels;
        row.sup.assign(levels.size(), 0.0);
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            row.sup[jobs[j].slot] = std::max(row.sup[jobs[j].slot], sups[j][d]);
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (double v : row.sup) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi == 0.0) {
            row.spread = 1.0;
        } else {
            row.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        }
        row.pass = row.sup.size() >= 2 && row.spread <= opts.tolerance;
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace whitney

namespace whitney {

namespace {

Point uniform_in(const Box& b, SampleRng& rng) {
    Point x(b.dim);
    for (int i = 0; i < b.dim; ++i) {
        x[i] = b.lo[i] + rng.uniform() * (b.hi[i] - b.lo[i]);
    }
    return x;
}

} // namespace

UnityReport partition_unity_check(const WhitneyDecomposition& w, std::size_t samples, std::uint64_t seed,
                                  double tolerance) {
    const Box omega = w.domain_box();
    std::vector<double> err(samples, 0.0);
    parallel_for(samples, [&](std::size_t i) {
        SampleRng rng(seed, i);
        Point x = uniform_in(omega, rng);
        if (w.site_at(x) >= 0) {
            return;
        }
        PartitionAt pa = partition_at(w, x, 0);
        double sum = 0.0;
        for (std::size_t k = 0; k < pa.terms.size(); ++k) {
            sum += pa.theta(k).value();
        }
        err[i] = std::abs(sum - 1.0);
    });
    UnityReport r;
    r.samples = samples;
    for (double e : err) {
        r.max_error = std::max(r.max_error, e);
    }
    r.pass = r.max_error <= tolerance;
    return r;
}

FiniteDifferenceReport finite_difference_check(const WhitneyDecomposition& w, std::size_t samples,
                                               std::uint64_t seed, double tolerance) {
    const int n = w.dim();
    const Box omega = w.domain_box();
    std::vector<double> err(samples, 0.0);
    parallel_for(samples, [&](std::size_t i) {
        SampleRng rng(seed, i);
        Point x = uniform_in(omega, rng);
        auto cover = covering_cubes(w, x);
        if (cover.empty()) {
            return;
        }
        const DyadicCube q = cover[rng.below(cover.size())];
        const double delta = q.diameter();
        // the cutoff transition is 1/20 of a side wide, so truncation dominates until h is tiny
        const double h = 3e-5 * q.side();
        TaylorValue exact = theta(w, q, x, 2);
        auto val = [&](const Point& y) { return theta(w, q, y, 0).value(); };
        auto shifted = [&](int a, double da, int b, double db) {
            Point y = x;
            y[a] += da;
            y[b] += db;
            return val(y);
        };
        auto richardson = [](const auto& d) { return (4.0 * d(0.5) - d(1.0)) / 3.0; };
        double worst = 0.0;
        auto record = [&](double ex, double fd, int order) {
            double scale = std::pow(delta, order);
            worst = std::max(worst, std::abs(ex - fd) * scale / std::max(1.0, std::abs(ex) * scale));
        };
        const double v0 = val(x);
        for (int a = 0; a < n; ++a) {
            MultiIndex ka = MultiIndex::unit(n, a);
            record(exact.partial(ka), richardson([&](double f) {
                       double hh = f * h;
                       return (shifted(a, hh, a, 0) - shifted(a, -hh, a, 0)) / (2 * hh);
                   }),
                   1);
            for (int b = a; b < n; ++b) {
                MultiIndex kab = ka + MultiIndex::unit(n, b);
                double fd = richardson([&](double f) {
                    double hh = f * h;
                    if (a == b) {
                        return (shifted(a, hh, a, 0) - 2 * v0 + shifted(a, -hh, a, 0)) / (hh * hh);
                    }
                    return (shifted(a, hh, b, hh) - shifted(a, hh, b, -hh) - shifted(a, -hh, b, hh) +
                            shifted(a, -hh, b, -hh)) /
                           (4 * hh * hh);
                });
                record(exact.partial(kab), fd, 2);
            }
        }
        err[i] = worst;
    });
    FiniteDifferenceReport r;
    r.samples = samples;
    for (double e : err) {
        r.max_error = std::max(r.max_error, e);
    }
    r.pass = r.max_error <= tolerance;
    return r;
}

} // namespace whitney
