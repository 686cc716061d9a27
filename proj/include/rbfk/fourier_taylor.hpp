#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "rbfk/chebyshev.hpp"
#include "rbfk/combinatorics.hpp"
#include "rbfk/errors.hpp"
#include "rbfk/parallel.hpp"
#include "rbfk/separable.hpp"

namespace rbfk {

// Polynomial smoothstep of order s on [0, 1]: S(0) = 0, S(1) = 1 with the
// first s derivatives vanishing at both ends.
inline double smoothstep(int s, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double acc = 0.0;
    for (int k = 0; k <= s; ++k) {
        double c = static_cast<double>(binomial(s + k, k)) *
                   static_cast<double>(binomial(2 * s + 1, s - k));
        acc += (k % 2 ? -c : c) * std::pow(t, k);
    }
    return std::pow(t, s + 1) * acc;
}

// 4 D^2-periodic windowed extension of the radial profile. Inside
// [-D^2, D^2] the window is exactly 1 and f_p coincides with f bit for
// bit; on +-[D^2, 3D^2] it decays to 0 through the smoothstep. The decay
// band spans half a period, so the shifted windows form a partition of
// unity (smoothstep satisfies S(t) + S(1-t) = 1) and a profile that is
// already periodic, e.g. a constant, periodizes to itself.
struct PeriodizedProfile {
    RadialProfile base;
    int window_order = 7;

    double d_sq() const { return base.diameter * base.diameter; }
    double period() const { return 4.0 * d_sq(); }

    double window(double z) const {
        double a = std::abs(z), dd = d_sq();
        if (a <= dd) return 1.0;
        if (a >= 3.0 * dd) return 0.0;
        return 1.0 - smoothstep(window_order, (a - dd) / (2.0 * dd));
    }

    // range reduction into one period, then the <= 2 overlapping shifts
    double operator()(double z) const {
        double p = period();
        double zr = z - p * std::round(z / p);
        double acc = 0.0;
        for (double shift : {0.0, -p, p}) {
            double zz = zr + shift;
            double w = window(zz);
            if (w != 0.0) acc += w * base.f(zz);
        }
        return acc;
    }
};

inline PeriodizedProfile periodize(const RadialProfile& base, int window_order) {
    if (window_order < 1) throw constraint_error("periodize: window order must be >= 1");
    if (const auto* fs = std::get_if<FiniteSmoothness>(&base.smoothness)) {
        if (window_order < fs->q + 1)
            throw constraint_error(
                "periodize: window order below q+1 would degrade the smoothness class");
    }
    return PeriodizedProfile{base, window_order};
}

// Trapezoidal Fourier coefficients a_{-m_f}..a_{m_f} of a periodic
// function, spectrally accurate for smooth integrands. Hermitian symmetry
// is enforced exactly by averaging a_j with conj(a_{-j}). Index j + m_f.
inline std::vector<std::complex<double>> fourier_coeffs(
    const std::function<double(double)>& f_p, double period, int m_f, int quad_points) {
    if (m_f < 1) throw constraint_error("fourier_coeffs: M_f must be positive");
    if (quad_points < 8 * m_f)
        throw constraint_error("fourier_coeffs: undersampled; need at least 8 M_f nodes");

    const double omega = 2.0 * std::numbers::pi / period;
    const double half = 0.5 * period;
    const std::complex<double> i1(0.0, 1.0);
    std::vector<std::complex<double>> a(static_cast<std::size_t>(2 * m_f) + 1);

    std::vector<double> vals(static_cast<std::size_t>(quad_points));
    std::vector<double> zs(static_cast<std::size_t>(quad_points));
    for (int m = 0; m < quad_points; ++m) {
        zs[static_cast<std::size_t>(m)] = -half + period * m / quad_points;
        double v = f_p(zs[static_cast<std::size_t>(m)]);
        if (!std::isfinite(v)) throw numerical_error("fourier_coeffs: non-finite sample");
        vals[static_cast<std::size_t>(m)] = v;
    }
    for (int j = -m_f; j <= m_f; ++j) {
        std::complex<double> acc(0.0, 0.0);
        for (int m = 0; m < quad_points; ++m)
            acc += vals[static_cast<std::size_t>(m)] *
                   std::exp(-i1 * (omega * j * zs[static_cast<std::size_t>(m)]));
        a[static_cast<std::size_t>(j + m_f)] = acc / static_cast<double>(quad_points);
    }
    a[static_cast<std::size_t>(m_f)] = std::complex<double>(a[static_cast<std::size_t>(m_f)].real(), 0.0);
    for (int j = 1; j <= m_f; ++j) {
        auto sym = 0.5 * (a[static_cast<std::size_t>(m_f + j)] +
                          std::conj(a[static_cast<std::size_t>(m_f - j)]));
        a[static_cast<std::size_t>(m_f + j)] = sym;
        a[static_cast<std::size_t>(m_f - j)] = std::conj(sym);
    }
    return a;
}

inline std::vector<std::complex<double>> fourier_coeffs(const PeriodizedProfile& pp, int m_f,
                                                        int quad_points) {
    return fourier_coeffs([&pp](double z) { return pp(z); }, pp.period(), m_f, quad_points);
}

// Grid estimate of the total variation of the q-th derivative over one
// period. A diagnostic, not a certificate.
inline double estimate_total_variation(const std::function<double(double)>& f_p, double period,
                                       int q, int grid_points = 1 << 15) {
    if (q < 1) throw constraint_error("estimate_total_variation: q must be >= 1");
    if (grid_points < 16 * (q + 1))
        throw constraint_error("estimate_total_variation: grid too coarse");
    const double h = period / grid_points;
    std::vector<double> v(static_cast<std::size_t>(grid_points + q + 1));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f_p(-0.5 * period + h * static_cast<double>(i));
    for (int pass = 0; pass < q; ++pass) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = (v[i + 1] - v[i]) / h;
        v.pop_back();
    }
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) tv += std::abs(v[i + 1] - v[i]);
    return tv;
}

inline double estimate_total_variation(const PeriodizedProfile& pp, int q,
                                       int grid_points = 1 << 15) {
    return estimate_total_variation([&pp](double z) { return pp(z); }, pp.period(), q,
                                    grid_points);
}

struct FtErrorBound {
    double taylor_part = 0;
    double fourier_part = 0;
    double total = 0;
};

// ||f||_inf (D_x D_y / D^2)^{M_t+1} + V_q/(pi q) (2 D^2/(pi M_f))^q.
// Valid under D_x <= D, D_y <= D and 9 M_f <= M_t.
inline FtErrorBound ft_error_bound(double norm_f_inf, double d_x, double d_y, double diameter,
                                   int m_t, double v_q, int q, int m_f) {
    if (!(norm_f_inf > 0.0)) throw constraint_error("ft_error_bound: ||f||_inf must be positive");
    if (!(d_x > 0.0) || !(d_y > 0.0) || d_x > diameter || d_y > diameter)
        throw constraint_error("ft_error_bound: need 0 < D_x, D_y <= D");
    if (m_f < 1 || 9 * m_f > m_t)
        throw constraint_error("ft_error_bound: need M_f >= 1 and 9 M_f <= M_t");
    if (q < 1 || !(v_q >= 0.0)) throw constraint_error("ft_error_bound: need q >= 1, V_q >= 0");
    FtErrorBound b;
    const double dd = diameter * diameter;
    b.taylor_part = norm_f_inf * std::pow(d_x * d_y / dd, m_t + 1);
    b.fourier_part = v_q / (std::numbers::pi * q) *
                     std::pow(2.0 * dd / (std::numbers::pi * m_f), q);
    b.total = b.taylor_part + b.fourier_part;
    return b;
}

// One complex separable term: coefficient a_j (-2 i j w)^{|alpha|}/|alpha|!
// multinomial(|alpha|, alpha), x factor exp(i w j ||rho_x + rho_c||^2)
// rho_x^alpha, y factor exp(i w j (||rho_y||^2 - 2 rho_y . rho_c))
// rho_y^alpha.
struct FtTerm {
    int j = 0;
    MultiIndex alpha;
    std::complex<double> coeff;
};

struct FourierTaylorPlan {
    int d = 0;
    int m_f = 0;
    int m_t = 0;
    double diameter = 1.0;
    double omega = 0;
    std::string profile;
    double bandwidth = 1.0;
    int window_order = 7;
    std::vector<std::complex<double>> coeffs;  // a_{-m_f}..a_{m_f}
    Eigen::VectorXd x_center, y_center;
    // all retained modes, j ordered 0, -1, +1, -2, +2, ...; the j = 0 mode
    // keeps only its constant Taylor term (higher orders vanish exactly)
    std::vector<FtTerm> terms;
    std::uint64_t declared_rank = 0;      // closed-form bound 4 M_f C(M_t+d, d)
    std::uint64_t realified_columns = 0;  // actual factor width after pairing +-j
    double error_bound = 0;
    bool bound_is_heuristic = true;
    double taylor_part = 0;
    double fourier_part = 0;
    double norm_f_inf = 0;
    int q = 0;
    double v_q = 0;
    double d_x = 0, d_y = 0;
};

struct FtPlanOptions {
    int quad_points = 0;   // 0: 16 M_f + 64
    int q = 2;             // smoothness order used by the bound
    double v_q = 0;        // 0: grid estimate over one period
    double d_x = 0;        // 0: diameter
    double d_y = 0;
    int tv_grid = 1 << 15;
};

inline FourierTaylorPlan build_ft_plan(const PeriodizedProfile& pp, int m_f, int m_t,
                                       const Eigen::VectorXd& x_center,
                                       const Eigen::VectorXd& y_center, bool enforce_ratio,
                                       const FtPlanOptions& opts = {}) {
    if (m_f < 1) throw constraint_error("build_ft_plan: M_f must be positive");
    if (m_t < 0) throw constraint_error("build_ft_plan: M_t must be >= 0");
    if (x_center.size() != y_center.size() || x_center.size() < 1)
        throw constraint_error("build_ft_plan: center dimensions must match and be >= 1");
    if (enforce_ratio && 9 * m_f > m_t)
        throw constraint_error("build_ft_plan: 9 M_f <= M_t violated");

    const int d = static_cast<int>(x_center.size());
    FourierTaylorPlan plan;
    plan.d = d;
    plan.m_f = m_f;
    plan.m_t = m_t;
    plan.diameter = pp.base.diameter;
    plan.omega = 2.0 * std::numbers::pi / pp.period();
    plan.profile = pp.base.name;
    plan.bandwidth = pp.base.bandwidth;
    plan.window_order = pp.window_order;
    plan.x_center = x_center;
    plan.y_center = y_center;

    int quad = opts.quad_points > 0 ? opts.quad_points : 16 * m_f + 64;
    plan.coeffs = fourier_coeffs(pp, m_f, quad);

    double sup = 0.0;
    for (int m = 0; m < quad; ++m)
        sup = std::max(sup, std::abs(pp(-0.5 * pp.period() + pp.period() * m / quad)));
    plan.norm_f_inf = sup;

    // modes ordered by |j|, negative sign first inside a magnitude
    std::vector<int> modes{0};
    for (int m = 1; m <= m_f; ++m) {
        modes.push_back(-m);
        modes.push_back(m);
    }
    for (int j : modes) {
        std::complex<double> a_j = plan.coeffs[static_cast<std::size_t>(j + m_f)];
        if (j == 0) {
            plan.terms.push_back(FtTerm{0, enumerate_multi_indices(d, 0)[0], a_j});
            continue;
        }
        const std::complex<double> base(0.0, -2.0 * j * plan.omega);
        std::complex<double> pow_over_fact = 1.0;  // base^k / k!
        for (int k = 0; k <= m_t; ++k) {
            if (k > 0) pow_over_fact *= base / static_cast<double>(k);
            for (auto& alpha : enumerate_multi_indices(d, k)) {
                std::complex<double> c =
                    a_j * pow_over_fact * static_cast<double>(multinomial(k, alpha));
                plan.terms.push_back(FtTerm{j, std::move(alpha), c});
            }
        }
    }

    plan.declared_rank = rank_fourier_taylor(m_f, m_t, d);
    std::uint64_t positive_terms = 0;
    for (const auto& t : plan.terms)
        if (t.j > 0) ++positive_terms;
    plan.realified_columns = 1 + 2 * positive_terms;

    plan.q = opts.q;
    plan.v_q = opts.v_q > 0 ? opts.v_q : estimate_total_variation(pp, opts.q, opts.tv_grid);
    plan.d_x = opts.d_x > 0 ? opts.d_x : pp.base.diameter;
    plan.d_y = opts.d_y > 0 ? opts.d_y : pp.base.diameter;
    const double dd = pp.base.diameter * pp.base.diameter;
    if (enforce_ratio) {
        auto b = ft_error_bound(plan.norm_f_inf, plan.d_x, plan.d_y, pp.base.diameter, m_t,
                                plan.v_q, plan.q, m_f);
        plan.taylor_part = b.taylor_part;
        plan.fourier_part = b.fourier_part;
        plan.error_bound = b.total;
        plan.bound_is_heuristic = false;
    } else {
        // same arithmetic without the validity preconditions
        plan.taylor_part = plan.norm_f_inf * std::pow(plan.d_x * plan.d_y / dd, m_t + 1);
        plan.fourier_part = plan.v_q / (std::numbers::pi * plan.q) *
                            std::pow(2.0 * dd / (std::numbers::pi * m_f), plan.q);
        plan.error_bound = plan.taylor_part + plan.fourier_part;
        plan.bound_is_heuristic = true;
    }
    return plan;
}

namespace detail {

template <class Vec>
std::complex<double> ft_psi(const FourierTaylorPlan& plan, const FtTerm& t, const Vec& x) {
    Eigen::VectorXd rho_x(plan.d);
    for (int i = 0; i < plan.d; ++i) rho_x(i) = x[i] - plan.x_center(i);
    Eigen::VectorXd rho_c = plan.x_center - plan.y_center;
    double phase = plan.omega * t.j * (rho_x + rho_c).squaredNorm();
    return t.coeff * std::exp(std::complex<double>(0.0, phase)) * monomial(rho_x, t.alpha);
}

template <class Vec>
std::complex<double> ft_phi(const FourierTaylorPlan& plan, const FtTerm& t, const Vec& y) {
    Eigen::VectorXd rho_y(plan.d);
    for (int i = 0; i < plan.d; ++i) rho_y(i) = y[i] - plan.y_center(i);
    Eigen::VectorXd rho_c = plan.x_center - plan.y_center;
    double phase = plan.omega * t.j * (rho_y.squaredNorm() - 2.0 * rho_y.dot(rho_c));
    return std::exp(std::complex<double>(0.0, phase)) * monomial(rho_y, t.alpha);
}

}  // namespace detail

// Realified evaluation. Hermitian symmetry of the coefficients makes the
// -j modes the conjugates of the +j ones, so each positive mode
// contributes 2 Re(psi phi) through two real products and the imaginary
// parts cancel without being formed.
template <class VecX, class VecY>
double eval_ft_factors(const FourierTaylorPlan& plan, const VecX& x, const VecY& y) {
    if (static_cast<int>(x.size()) != plan.d || static_cast<int>(y.size()) != plan.d)
        throw constraint_error("eval_ft_factors: point dimension mismatch");
    double acc = 0.0;
    for (const auto& t : plan.terms) {
        if (t.j < 0) continue;
        if (t.j == 0) {
            Eigen::VectorXd rho_x(plan.d), rho_y(plan.d);
            for (int i = 0; i < plan.d; ++i) {
                rho_x(i) = x[i] - plan.x_center(i);
                rho_y(i) = y[i] - plan.y_center(i);
            }
            acc += t.coeff.real() * detail::monomial(rho_x, t.alpha) *
                   detail::monomial(rho_y, t.alpha);
            continue;
        }
        auto psi = detail::ft_psi(plan, t, x);
        auto phi = detail::ft_phi(plan, t, y);
        acc += 2.0 * (psi.real() * phi.real() - psi.imag() * phi.imag());
    }
    return acc;
}

// Factor matrices of the realified representation: the constant column of
// the j = 0 mode, then per positive-mode term the paired columns
// (2 Re psi | Re phi) and (-2 Im psi | Im phi). Row-parallel and
// deterministic for any thread count.
inline FactorMatrices factor_matrices(const FourierTaylorPlan& plan,
                                      const Eigen::MatrixXd& x_points,
                                      const Eigen::MatrixXd& y_points,
                                      const FactorOptions& opts = {}) {
    if (x_points.cols() != plan.d || y_points.cols() != plan.d)
        throw constraint_error("factor_matrices: cloud dimension mismatch");
    const long nx = x_points.rows(), ny = y_points.rows();
    const long cols = static_cast<long>(plan.realified_columns);
    std::size_t bytes = static_cast<std::size_t>(nx + ny) * static_cast<std::size_t>(cols) * 8;
    if (bytes > opts.memory_cap_bytes)
        throw resource_error("factor_matrices: " + std::to_string(bytes) +
                                 " bytes needed, cap is " +
                                 std::to_string(opts.memory_cap_bytes),
                             bytes);

    std::vector<const FtTerm*> positive;
    const FtTerm* constant = nullptr;
    for (const auto& t : plan.terms) {
        if (t.j == 0) constant = &t;
        if (t.j > 0) positive.push_back(&t);
    }

    FactorMatrices fm;
    fm.g.resize(nx, cols);
    fm.h.resize(ny, cols);
    parallel_for(nx, opts.threads, [&](long first, long last) {
        for (long i = first; i < last; ++i) {
            auto row = x_points.row(i);
            fm.g(i, 0) = constant ? constant->coeff.real() : 0.0;
            for (std::size_t t = 0; t < positive.size(); ++t) {
                auto psi = detail::ft_psi(plan, *positive[t], row);
                fm.g(i, 1 + 2 * static_cast<long>(t)) = 2.0 * psi.real();
                fm.g(i, 2 + 2 * static_cast<long>(t)) = -2.0 * psi.imag();
            }
        }
    });
    parallel_for(ny, opts.threads, [&](long first, long last) {
        for (long i = first; i < last; ++i) {
            auto row = y_points.row(i);
            fm.h(i, 0) = 1.0;
            for (std::size_t t = 0; t < positive.size(); ++t) {
                auto phi = detail::ft_phi(plan, *positive[t], row);
                fm.h(i, 1 + 2 * static_cast<long>(t)) = phi.real();
                fm.h(i, 2 + 2 * static_cast<long>(t)) = phi.imag();
            }
        }
    });
    return fm;
}

}  // namespace rbfk
