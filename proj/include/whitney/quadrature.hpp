#pragma once

#include <vector>

namespace whitney {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
    int size() const { return static_cast<int>(x.size()); }
};

/// Cached q-point rule; thread safe.
const GaussRule& gauss_legendre(int q);

} // namespace whitney
