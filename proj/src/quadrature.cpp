#include "whitney/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

#include "whitney/error.hpp"

namespace whitney {

namespace {

GaussRule make_rule(int q) {
    // boost returns the non-negative zeros of P_q
    auto zeros = boost::math::legendre_p_zeros<double>(q);
    std::vector<std::pair<double, double>> nodes;
    for (double z : zeros) {
        double d = boost::math::legendre_p_prime(q, z);
        double w = 2.0 / ((1.0 - z * z) * d * d);
        nodes.emplace_back(z, w);
        if (z != 0.0) {
            nodes.emplace_back(-z, w);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    GaussRule r;
    for (auto [z, w] : nodes) {
        r.x.push_back(0.5 * (z + 1.0));
        r.w.push_back(0.5 * w);
    }
    return r;
}

} // namespace

const GaussRule& gauss_legendre(int q) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    if (q < 1 || q > 256) {
        throw Error("unsupported quadrature order");
    }
    std::lock_guard lock(mu);
    auto& slot = cache[q];
    if (!slot) {
        slot = std::make_unique<GaussRule>(make_rule(q));
    }
    return *slot;
}

} // namespace whitney
