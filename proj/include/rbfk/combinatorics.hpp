#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rbfk/errors.hpp"

namespace rbfk {

// Exponent vector alpha in N^d with |alpha| = sum of entries.
struct MultiIndex {
    std::vector<std::uint32_t> exponents;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<std::uint32_t> e) : exponents(std::move(e)) {}

    int dim() const { return static_cast<int>(exponents.size()); }

    std::uint32_t order() const {
        std::uint32_t s = 0;
        for (auto e : exponents) s += e;
        return s;
    }

    std::uint32_t operator[](std::size_t i) const { return exponents[i]; }

    bool operator==(const MultiIndex&) const = default;
};

namespace detail {

using u128 = unsigned __int128;
inline constexpr u128 u128_max = ~static_cast<u128>(0);

inline u128 checked_mul(u128 a, u128 b) {
    if (a != 0 && b > u128_max / a)
        throw overflow_error("integer overflow in combinatorial product");
    return a * b;
}

inline std::uint64_t narrow_u64(u128 v, const char* what) {
    if (v > static_cast<u128>(std::numeric_limits<std::uint64_t>::max()))
        throw overflow_error(std::string(what) + " exceeds 64-bit range");
    return static_cast<std::uint64_t>(v);
}

}  // namespace detail

// n choose k, exact. Throws overflow_error instead of wrapping.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    detail::u128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = detail::checked_mul(r, n - k + i);
        r /= i;  // exact: r equals binomial(n-k+i, i) after this step
    }
    return detail::narrow_u64(r, "binomial coefficient");
}

// m! / (alpha_1! ... alpha_d!). Requires |alpha| = m.
inline std::uint64_t multinomial(std::uint64_t m, const MultiIndex& alpha) {
    if (alpha.order() != m)
        throw constraint_error("multinomial: |alpha| must equal m");
    detail::u128 r = 1;
    std::uint64_t partial = 0;
    for (auto e : alpha.exponents) {
        partial += e;
        r = detail::checked_mul(r, binomial(partial, e));
    }
    return detail::narrow_u64(r, "multinomial coefficient");
}

// Every alpha in N^d with |alpha| = total_degree, ordered with leading
// exponents largest first: (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1),
// (0,0,2). The order is total and deterministic; across degrees this
// extends to the graded order used for term enumeration.
inline std::vector<MultiIndex> enumerate_multi_indices(int d, int total_degree) {
    if (d < 1) throw constraint_error("enumerate_multi_indices: dimension must be >= 1");
    if (total_degree < 0) throw constraint_error("enumerate_multi_indices: degree must be >= 0");
    std::vector<MultiIndex> out;
    out.reserve(binomial(static_cast<std::uint64_t>(total_degree) + d - 1, d - 1));
    std::vector<std::uint32_t> cur(static_cast<std::size_t>(d), 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == d - 1) {
            cur[static_cast<std::size_t>(pos)] = static_cast<std::uint32_t>(remaining);
            out.push_back(MultiIndex{cur});
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            cur[static_cast<std::size_t>(pos)] = static_cast<std::uint32_t>(v);
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, total_degree);
    return out;
}

// Upper bound on the separable-term count of the squared-distance
// polynomial construction of order n in dimension d.
inline std::uint64_t rank_chebyshev(std::uint64_t n, std::uint64_t d) {
    if (d < 1) throw constraint_error("rank_chebyshev: dimension must be >= 1");
    return binomial(n + d + 2, d + 2);
}

// Upper bound on the separable-term count of the trigonometric/Taylor
// construction: 4 * M_f * binomial(M_t + d, d).
inline std::uint64_t rank_fourier_taylor(std::uint64_t m_f, std::uint64_t m_t, std::uint64_t d) {
    if (m_f < 1) throw constraint_error("rank_fourier_taylor: M_f must be positive");
    if (d < 1) throw constraint_error("rank_fourier_taylor: dimension must be >= 1");
    detail::u128 r = detail::checked_mul(4, m_f);
    r = detail::checked_mul(r, binomial(m_t + d, d));
    return detail::narrow_u64(r, "separable rank");
}

// Singular-value indices where significant magnitude drops are expected:
// binomial(k + d, d) for k = 0..k_max. Strictly increasing.
inline std::vector<std::uint64_t> predicted_decay_indices(std::uint64_t d, std::uint64_t k_max) {
    if (d < 1) throw constraint_error("predicted_decay_indices: dimension must be >= 1");
    std::vector<std::uint64_t> out;
    out.reserve(k_max + 1);
    for (std::uint64_t k = 0; k <= k_max; ++k) out.push_back(binomial(k + d, d));
    return out;
}

// Size of the k-th magnitude group: binomial(k + d - 1, d - 1). Cumulative
// sums of these reproduce predicted_decay_indices.
inline std::uint64_t group_cardinality(std::uint64_t d, std::uint64_t k) {
    if (d < 1) throw constraint_error("group_cardinality: dimension must be >= 1");
    return binomial(k + d - 1, d - 1);
}

// Largest k with binomial(k + d, d) <= max_index. Used to default k_max so
// predicted indices stay inside the matrix.
inline std::uint64_t default_k_max(std::uint64_t d, std::uint64_t max_index) {
    std::uint64_t k = 0;
    while (true) {
        std::uint64_t next;
        try {
            next = binomial(k + 1 + d, d);
        } catch (const overflow_error&) {
            return k;
        }
        if (next > max_index) return k;
        ++k;
    }
}

}  // namespace rbfk
