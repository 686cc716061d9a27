#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rbfk/chebyshev.hpp"
#include "rbfk/combinatorics.hpp"
#include "rbfk/errors.hpp"
#include "rbfk/parallel.hpp"

namespace rbfk {

inline constexpr std::size_t default_memory_cap = std::size_t{2} << 30;  // 2 GiB

// One separable product of the squared-distance expansion:
//   g(x) = coeff * ||x||^{2j} x^alpha,   h(y) = ||y||^{2(k-j)} y^alpha
// with j <= k <= l and |alpha| = l - k. The full coefficient sits on the
// g side, so the h factors are profile-independent.
struct ChebTerm {
    int l = 0, k = 0, j = 0;
    MultiIndex alpha;
    double coeff = 0;
};

// Explicit separable representation sum_t g_t(x) h_t(y) of the kernel
// polynomial, with terms in a fixed graded order over (l, k, j, alpha).
struct ChebPlan {
    int d = 0;
    int n = 0;
    double diameter = 1.0;
    std::string profile;
    double bandwidth = 1.0;
    std::vector<ChebTerm> terms;
    std::uint64_t declared_rank = 0;
    double error_bound = 0;
    std::string bound_kind;
    double rho_sq = 0;
    double bound_c = 0;
    int q = 0;
    double v_q = 0;
    double prune_threshold = 0;
    std::uint64_t pruned_count = 0;
};

struct PlanOptions {
    // drop terms whose estimated contribution |coeff| s^{2k + 2|alpha|}
    // falls below this threshold; 0 disables pruning
    double prune_threshold = 0;
    // point-norm bound s used by the pruning estimate; 0 means diameter
    double prune_norm_bound = 0;
};

namespace detail {

template <class Vec>
double norm_sq_of(const Vec& x) {
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(x.size()); ++i) s += x[i] * x[i];
    return s;
}

template <class Vec>
double monomial(const Vec& x, const MultiIndex& alpha) {
    double m = 1.0;
    for (int i = 0; i < alpha.dim(); ++i) {
        std::uint32_t e = alpha[static_cast<std::size_t>(i)];
        for (std::uint32_t r = 0; r < e; ++r) m *= x[i];
    }
    return m;
}

inline double int_pow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace detail

template <class Vec>
double eval_g(const ChebTerm& t, const Vec& x) {
    if (static_cast<int>(x.size()) != t.alpha.dim())
        throw constraint_error("eval_g: point dimension mismatch");
    double nsq = detail::norm_sq_of(x);
    return t.coeff * detail::int_pow(nsq, t.j) * detail::monomial(x, t.alpha);
}

template <class Vec>
double eval_h(const ChebTerm& t, const Vec& y) {
    if (static_cast<int>(y.size()) != t.alpha.dim())
        throw constraint_error("eval_h: point dimension mismatch");
    double nsq = detail::norm_sq_of(y);
    return detail::int_pow(nsq, t.k - t.j) * detail::monomial(y, t.alpha);
}

// Expands the degree-n polynomial in z = ||x-y||^2 into separable terms.
// Distinct tuples give distinct products: the product shape
// (j, k-j, alpha) recovers k = j + (k-j) and l = k + |alpha|, so
// (l, k, j, alpha) <-> (j, k-j, alpha) is a bijection and no two terms
// collapse onto the same factor pair.
inline ChebPlan build_cheb_plan(const RadialProfile& p, int n, int d,
                                const PlanOptions& opts = {}) {
    if (d < 1) throw constraint_error("build_cheb_plan: dimension must be >= 1");
    if (n < 0) throw constraint_error("build_cheb_plan: order must be >= 0");

    ChebPlan plan;
    plan.d = d;
    plan.n = n;
    plan.diameter = p.diameter;
    plan.profile = p.name;
    plan.bandwidth = p.bandwidth;

    auto approx = cheb_fit(p, n);
    auto b = monomialize(approx);

    auto bound = resolve_bound(p, n);
    plan.error_bound = bound.value;
    plan.bound_kind = bound.kind;
    plan.rho_sq = bound.rho_sq;
    plan.bound_c = bound.bound_c;
    plan.q = bound.q;
    plan.v_q = bound.v_q;

    const double s = opts.prune_norm_bound > 0 ? opts.prune_norm_bound : p.diameter;
    plan.prune_threshold = opts.prune_threshold;

    for (int l = 0; l <= n; ++l) {
        double bl = b[static_cast<std::size_t>(l)];
        for (int k = 0; k <= l; ++k) {
            double sign_pow = ((l - k) % 2 ? -1.0 : 1.0) * std::ldexp(1.0, l - k);
            double blk = bl * sign_pow * static_cast<double>(binomial(l, k));
            for (int j = 0; j <= k; ++j) {
                double blkj = blk * static_cast<double>(binomial(k, j));
                for (auto& alpha : enumerate_multi_indices(d, l - k)) {
                    double coeff =
                        blkj * static_cast<double>(multinomial(l - k, alpha));
                    if (!std::isfinite(coeff))
                        throw numerical_error("build_cheb_plan: non-finite coefficient");
                    if (opts.prune_threshold > 0) {
                        double contrib =
                            std::abs(coeff) * detail::int_pow(s, 2 * k + 2 * (l - k));
                        if (contrib < opts.prune_threshold) {
                            ++plan.pruned_count;
                            continue;
                        }
                    }
                    plan.terms.push_back(ChebTerm{l, k, j, std::move(alpha), coeff});
                }
            }
        }
    }
    plan.declared_rank = plan.terms.size();
    return plan;
}

template <class VecX, class VecY>
double eval_separable(const ChebPlan& plan, const VecX& x, const VecY& y) {
    if (static_cast<int>(x.size()) != plan.d || static_cast<int>(y.size()) != plan.d)
        throw constraint_error("eval_separable: point dimension mismatch");
    double nx = detail::norm_sq_of(x);
    double ny = detail::norm_sq_of(y);
    double acc = 0.0;
    for (const auto& t : plan.terms) {
        acc += t.coeff * detail::int_pow(nx, t.j) * detail::monomial(x, t.alpha) *
               detail::int_pow(ny, t.k - t.j) * detail::monomial(y, t.alpha);
    }
    return acc;
}

struct FactorOptions {
    std::size_t memory_cap_bytes = default_memory_cap;
    int threads = 0;  // 0 = hardware concurrency
};

struct FactorMatrices {
    Eigen::MatrixXd g;  // N_x x R
    Eigen::MatrixXd h;  // N_y x R
};

// G H^T approximates the kernel matrix within plan.error_bound entrywise
// (valid when the plan's smoothness data is). Rows are filled in parallel;
// each entry depends only on its own row and term, so the result is
// bitwise identical for any thread count.
inline FactorMatrices factor_matrices(const ChebPlan& plan, const Eigen::MatrixXd& x_points,
                                      const Eigen::MatrixXd& y_points,
                                      const FactorOptions& opts = {}) {
    if (x_points.cols() != plan.d || y_points.cols() != plan.d)
        throw constraint_error("factor_matrices: cloud dimension mismatch");
    const long nx = x_points.rows(), ny = y_points.rows();
    const long r = static_cast<long>(plan.terms.size());
    std::size_t bytes = static_cast<std::size_t>(nx + ny) * static_cast<std::size_t>(r) * 8;
    if (bytes > opts.memory_cap_bytes)
        throw resource_error("factor_matrices: " + std::to_string(bytes) +
                                 " bytes needed, cap is " +
                                 std::to_string(opts.memory_cap_bytes),
                             bytes);

    FactorMatrices fm;
    fm.g.resize(nx, r);
    fm.h.resize(ny, r);
    parallel_for(nx, opts.threads, [&](long first, long last) {
        for (long i = first; i < last; ++i) {
            auto row = x_points.row(i);
            double nsq = detail::norm_sq_of(row);
            for (long t = 0; t < r; ++t) {
                const auto& term = plan.terms[static_cast<std::size_t>(t)];
                fm.g(i, t) = term.coeff * detail::int_pow(nsq, term.j) *
                             detail::monomial(row, term.alpha);
            }
        }
    });
    parallel_for(ny, opts.threads, [&](long first, long last) {
        for (long i = first; i < last; ++i) {
            auto row = y_points.row(i);
            double nsq = detail::norm_sq_of(row);
            for (long t = 0; t < r; ++t) {
                const auto& term = plan.terms[static_cast<std::size_t>(t)];
                fm.h(i, t) = detail::int_pow(nsq, term.k - term.j) *
                             detail::monomial(row, term.alpha);
            }
        }
    });
    return fm;
}

}  // namespace rbfk
