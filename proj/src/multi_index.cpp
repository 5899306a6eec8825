#include "whitney/multi_index.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "whitney/error.hpp"

namespace whitney {

MultiIndex::MultiIndex(int dim) : dim_(dim) {
    if (dim < 0 || dim > kMaxDim) {
        throw Error("multi-index dimension out of range");
    }
}

MultiIndex::MultiIndex(std::initializer_list<int> components)
    : MultiIndex(static_cast<int>(components.size())) {
    int i = 0;
    for (int v : components) {
        if (v < 0) {
            throw Error("multi-index components must be non-negative");
        }
        c_[i++] = v;
    }
}

MultiIndex MultiIndex::from(std::span<const int> components) {
    MultiIndex k(static_cast<int>(components.size()));
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i] < 0) {
            throw Error("multi-index components must be non-negative");
        }
        k.c_[i] = components[i];
    }
    return k;
}

MultiIndex MultiIndex::unit(int dim, int axis) {
    MultiIndex k(dim);
    k.c_[axis] = 1;
    return k;
}

int MultiIndex::order() const {
    int total = 0;
    for (int i = 0; i < dim_; ++i) {
        total += c_[i];
    }
    return total;
}

double MultiIndex::factorial() const {
    double f = 1.0;
    for (int i = 0; i < dim_; ++i) {
        for (int j = 2; j <= c_[i]; ++j) {
            f *= j;
        }
    }
    return f;
}

bool MultiIndex::dominated_by(const MultiIndex& other) const {
    for (int i = 0; i < dim_; ++i) {
        if (c_[i] > other.c_[i]) {
            return false;
        }
    }
    return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    MultiIndex r(dim_);
    for (int i = 0; i < dim_; ++i) {
        r.c_[i] = c_[i] + other.c_[i];
    }
    return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
    MultiIndex r(dim_);
    for (int i = 0; i < dim_; ++i) {
        r.c_[i] = c_[i] - other.c_[i];
    }
    return r;
}

std::string MultiIndex::key() const {
    std::string out;
    for (int i = 0; i < dim_; ++i) {
        if (i) {
            out += ',';
        }
        out += std::to_string(c_[i]);
    }
    return out;
}

MultiIndex MultiIndex::parse_key(const std::string& key) {
    std::vector<int> parts;
    std::stringstream ss(key);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            parts.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw Error("malformed multi-index key '" + key + "'");
        }
    }
    if (parts.empty() || static_cast<int>(parts.size()) > kMaxDim) {
        throw Error("malformed multi-index key '" + key + "'");
    }
    return from(parts);
}

std::strong_ordering graded_compare(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.order() <=> b.order(); c != 0) {
        return c;
    }
    for (int i = 0; i < a.dim_; ++i) {
        if (a.c_[i] != b.c_[i]) {
            // larger leading component comes first
            return b.c_[i] <=> a.c_[i];
        }
    }
    return std::strong_ordering::equal;
}

namespace {

void compositions(int dim, int axis, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (axis == dim - 1) {
        cur[axis] = remaining;
        out.push_back(cur);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        cur[axis] = v;
        compositions(dim, axis + 1, remaining - v, cur, out);
    }
    cur[axis] = 0;
}

} // namespace

std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
    std::vector<MultiIndex> out;
    if (dim == 0) {
        if (order == 0) {
            out.emplace_back(0);
        }
        return out;
    }
    MultiIndex cur(dim);
    compositions(dim, 0, order, cur, out);
    return out;
}

std::vector<MultiIndex> multi_indices_up_to(int dim, int order) {
    std::vector<MultiIndex> out;
    for (int d = 0; d <= order; ++d) {
        auto block = multi_indices_of_order(dim, d);
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

std::size_t multi_index_count(int dim, int order) {
    // C(order + dim, dim)
    std::size_t r = 1;
    for (int i = 1; i <= dim; ++i) {
        r = r * static_cast<std::size_t>(order + i) / static_cast<std::size_t>(i);
    }
    return r;
}

MultiIndexBasis::MultiIndexBasis(int dim, int order)
    : dim_(dim), order_(order), indices_(multi_indices_up_to(dim, order)) {
    degree_offsets_.assign(static_cast<std::size_t>(order) + 2, 0);
    for (const auto& k : indices_) {
        degree_offsets_[static_cast<std::size_t>(k.order()) + 1]++;
    }
    for (std::size_t d = 1; d < degree_offsets_.size(); ++d) {
        degree_offsets_[d] += degree_offsets_[d - 1];
    }
    std::size_t table = 1;
    for (int i = 0; i < dim; ++i) {
        table *= static_cast<std::size_t>(order + 1);
    }
    lookup_.assign(table, -1);
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        lookup_[static_cast<std::size_t>(encode(indices_[i]))] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        for (std::size_t j = 0; j < indices_.size(); ++j) {
            if (indices_[i].order() + indices_[j].order() > order) {
                continue;
            }
            int k = index_of(indices_[i] + indices_[j]);
            products_.push_back({static_cast<int>(i), static_cast<int>(j), k});
        }
    }
}

int MultiIndexBasis::encode(const MultiIndex& k) const {
    int code = 0;
    for (int i = 0; i < dim_; ++i) {
        code = code * (order_ + 1) + k[i];
    }
    return code;
}

int MultiIndexBasis::index_of(const MultiIndex& k) const {
    if (k.dim() != dim_ || k.order() > order_) {
        return -1;
    }
    return lookup_[static_cast<std::size_t>(encode(k))];
}

std::shared_ptr<const MultiIndexBasis> MultiIndexBasis::get(int dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexBasis>> cache;
    if (dim < 1 || dim > kMaxDim || order < 0) {
        throw Error("unsupported multi-index basis shape");
    }
    std::lock_guard lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) {
        slot = std::make_shared<const MultiIndexBasis>(dim, order);
    }
    return slot;
}

} // namespace whitney
