#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace whitney {

/// Largest ambient dimension supported by the fixed-size coordinate storage.
inline constexpr int kMaxDim = 4;

/// A multi-index k = (k_1, ..., k_n) of non-negative integers.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(int dim);
    MultiIndex(std::initializer_list<int> components);
    static MultiIndex from(std::span<const int> components);
    /// Unit multi-index e_axis in `dim` dimensions.
    static MultiIndex unit(int dim, int axis);

    int dim() const { return dim_; }
    int operator[](int i) const { return c_[i]; }
    int& operator[](int i) { return c_[i]; }

    /// |k| = sum of components.
    int order() const;
    /// k! = prod_i k_i!
    double factorial() const;
    /// Componentwise j <= k.
    bool dominated_by(const MultiIndex& other) const;

    MultiIndex operator+(const MultiIndex& other) const;
    /// Componentwise difference; caller guarantees other <= *this.
    MultiIndex operator-(const MultiIndex& other) const;

    /// Comma-joined components, e.g. "1,0".
    std::string key() const;
    static MultiIndex parse_key(const std::string& key);

    std::span<const int> components() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;
    /// Graded lexicographic order: by |k| first, then lexicographically descending components.
    friend std::strong_ordering graded_compare(const MultiIndex& a, const MultiIndex& b);

private:
    std::array<int, kMaxDim> c_{};
    int dim_ = 0;
};

/// All multi-indices of order <= `order` in graded lexicographic order.
std::vector<MultiIndex> multi_indices_up_to(int dim, int order);
/// All multi-indices with |k| == `order`, graded lexicographic.
std::vector<MultiIndex> multi_indices_of_order(int dim, int order);

/// Number of multi-indices of order <= `order` in `dim` variables: C(order + dim, dim).
std::size_t multi_index_count(int dim, int order);

/// Cached graded-lex basis with a precomputed truncated product table.
class MultiIndexBasis {
public:
    static std::shared_ptr<const MultiIndexBasis> get(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }

    /// Position of k in the basis, or -1 if |k| > order.
    int index_of(const MultiIndex& k) const;
    /// First basis position holding an index of the given degree.
    std::size_t degree_begin(int degree) const { return degree_offsets_[degree]; }
    std::size_t degree_end(int degree) const { return degree_offsets_[degree + 1]; }

    struct Product {
        int lhs;
        int rhs;
        int out;
    };
    /// All (i, j, k) with basis[i] + basis[j] == basis[k].
    const std::vector<Product>& products() const { return products_; }

    MultiIndexBasis(int dim, int order);

private:
    int encode(const MultiIndex& k) const;

    int dim_;
    int order_;
    std::vector<MultiIndex> indices_;
    std::vector<std::size_t> degree_offsets_;
    std::vector<int> lookup_;
    std::vector<Product> products_;
};

} // namespace whitney
