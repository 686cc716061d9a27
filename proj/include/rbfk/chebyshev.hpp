#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rbfk/errors.hpp"

namespace rbfk {

using real_fn = std::function<double(double)>;
using complex_fn = std::function<std::complex<double>(std::complex<double>)>;

// Geometric-convergence regime: the profile continues analytically to the
// transformed Bernstein ellipse with parameter rho_sq > 1 and |f| <= bound_c
// inside it. rho_sq is the semi-axis-sum parameter of the reference ellipse
// on [-1, 1], i.e. the boundary is ((rho_sq e^{it} + e^{-it}/rho_sq) / 2).
struct AnalyticSmoothness {
    double rho_sq = 0;
    double bound_c = 0;
};

// Algebraic-convergence regime: derivatives through q-1 are absolutely
// continuous and the q-th derivative has total variation <= total_variation.
struct FiniteSmoothness {
    int q = 0;
    double total_variation = 0;
};

// Pick (rho_sq, bound_c) by grid search whenever a bound is requested.
struct AutoAnalytic {};

using Smoothness = std::variant<AutoAnalytic, AnalyticSmoothness, FiniteSmoothness>;

// A radial profile f so that the kernel is K(x, y) = f(||x - y||^2). The
// bandwidth is folded into f; diameter bounds ||x - y|| <= diameter. The
// complex evaluator fc continues f off the real axis and is required only
// for ellipse-based bound estimation.
struct RadialProfile {
    std::string name;
    double bandwidth = 1.0;
    double diameter = 1.0;
    real_fn f;
    complex_fn fc;
    Smoothness smoothness = AutoAnalytic{};
};

// Truncated Chebyshev series of f on [lo, hi]: sum of coeffs[k] * T_k(z)
// with z the affine image of u in [-1, 1]. Immutable after construction.
struct ChebApprox {
    std::vector<double> coeffs;
    double lo = -1.0;
    double hi = 1.0;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Degree-n interpolant at the n+1 Chebyshev points of the second kind,
// coefficients recovered through the cosine-transform relation. Differs
// from the projection truncation by at most the classical aliasing factor
// of two, which all empirical bound checks absorb.
inline ChebApprox cheb_fit(const real_fn& f, double lo, double hi, int n) {
    if (!f) throw constraint_error("cheb_fit: profile function is empty");
    if (n < 0) throw constraint_error("cheb_fit: order must be >= 0");
    if (!(hi > lo)) throw constraint_error("cheb_fit: interval must be non-degenerate");

    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    if (n == 0) {
        double v = f(0.5 * (lo + hi));
        if (!std::isfinite(v)) throw numerical_error("cheb_fit: non-finite value at node");
        c[0] = v;
        return ChebApprox{std::move(c), lo, hi};
    }

    const double pi = std::numbers::pi;
    std::vector<double> fv(static_cast<std::size_t>(n) + 1);
    for (int jj = 0; jj <= n; ++jj) {
        double x = std::cos(pi * jj / n);
        double u = lo + 0.5 * (hi - lo) * (x + 1.0);
        double v = f(u);
        if (!std::isfinite(v)) throw numerical_error("cheb_fit: non-finite value at node");
        fv[static_cast<std::size_t>(jj)] = v;
    }
    for (int k = 0; k <= n; ++k) {
        double s = 0.5 * (fv[0] + (k % 2 == 0 ? fv[static_cast<std::size_t>(n)]
                                              : -fv[static_cast<std::size_t>(n)]));
        for (int jj = 1; jj < n; ++jj)
            s += fv[static_cast<std::size_t>(jj)] * std::cos(pi * k * jj / n);
        double a = 2.0 * s / n;
        if (k == 0 || k == n) a *= 0.5;
        c[static_cast<std::size_t>(k)] = a;
    }
    return ChebApprox{std::move(c), lo, hi};
}

// Fit on [0, D^2], the reachable range of the squared distance.
inline ChebApprox cheb_fit(const RadialProfile& p, int n) {
    return cheb_fit(p.f, 0.0, p.diameter * p.diameter, n);
}

// Clenshaw evaluation. Tolerates a 1e-12 relative overshoot of [lo, hi].
inline double eval_cheb(const ChebApprox& a, double u) {
    double x = (2.0 * u - (a.hi + a.lo)) / (a.hi - a.lo);
    if (std::abs(x) > 1.0 + 1e-12)
        throw constraint_error("eval_cheb: argument outside the fitted interval");
    x = std::clamp(x, -1.0, 1.0);

    const auto& c = a.coeffs;
    int n = a.degree();
    double b1 = 0.0, b2 = 0.0;
    for (int k = n; k >= 1; --k) {
        double b0 = 2.0 * x * b1 - b2 + c[static_cast<std::size_t>(k)];
        b2 = b1;
        b1 = b0;
    }
    return c[0] + x * b1 - b2;
}

// Power-basis coefficients b_0..b_n in the original variable u, so that
// sum b_k u^k equals the series composed with the affine map. Conversion
// conditioning grows like 3^n, hence the hard cap.
inline std::vector<double> monomialize(const ChebApprox& a) {
    int n = a.degree();
    if (n > 30)
        throw numerical_error(
            "monomialize: order above 30 loses digits in the power basis; "
            "use the fourier-taylor construction for high orders");

    const double s = 2.0 / (a.hi - a.lo);
    const double t = -(a.hi + a.lo) / (a.hi - a.lo);

    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> tkm1{1.0};  // T_{k-1}(z(u)) in powers of u
    out[0] += a.coeffs[0];
    if (n >= 1) {
        std::vector<double> tk{t, s};  // T_k
        out[0] += a.coeffs[1] * t;
        out[1] += a.coeffs[1] * s;
        for (int k = 2; k <= n; ++k) {
            // T_{k+...}: next = 2 (s u + t) T_k - T_{k-1}
            std::vector<double> next(static_cast<std::size_t>(k) + 1, 0.0);
            for (std::size_t i = 0; i < tk.size(); ++i) {
                next[i + 1] += 2.0 * s * tk[i];
                next[i] += 2.0 * t * tk[i];
            }
            for (std::size_t i = 0; i < tkm1.size(); ++i) next[i] -= tkm1[i];
            double ck = a.coeffs[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < next.size(); ++i) out[i] += ck * next[i];
            tkm1 = std::move(tk);
            tk = std::move(next);
        }
    }
    return out;
}

// 2 C rho_sq^{-n} / (rho_sq - 1): truncation tail for a profile analytic in
// the ellipse with parameter rho_sq and bounded there by c.
inline double bound_analytic(double rho_sq, double c, int n) {
    if (!(rho_sq > 1.0)) throw constraint_error("bound_analytic: ellipse parameter must exceed 1");
    if (!(c > 0.0)) throw constraint_error("bound_analytic: magnitude bound must be positive");
    if (n < 0) throw constraint_error("bound_analytic: order must be >= 0");
    return 2.0 * c * std::pow(rho_sq, -n) / (rho_sq - 1.0);
}

// 2 V_q D^{2q} / (pi q [2(n-q)]^q): truncation tail under the bounded
// total-variation assumption. Requires n > q.
inline double bound_finite_smooth(double v_q, double diameter, int q, int n) {
    if (q < 1) throw constraint_error("bound_finite_smooth: q must be >= 1");
    if (n <= q) throw constraint_error("bound_finite_smooth: order must exceed q");
    if (!(v_q >= 0.0) || !(diameter > 0.0))
        throw constraint_error("bound_finite_smooth: V_q must be >= 0 and D > 0");
    return 2.0 * v_q * std::pow(diameter, 2 * q) /
           (std::numbers::pi * q * std::pow(2.0 * (n - q), q));
}

// Max of |f| sampled on the boundary of the transformed Bernstein ellipse
// with parameter rho_sq. An interior real-axis sweep exceeding the boundary
// maximum violates the maximum principle and flags a singularity inside the
// ellipse, as does any non-finite sample. This is an estimate of the
// interior sup from below, not a certificate.
inline double estimate_ellipse_bound(const complex_fn& f, double lo, double hi, double rho_sq,
                                     int samples) {
    if (!f) throw constraint_error("estimate_ellipse_bound: no complex evaluator");
    if (!(rho_sq > 1.0))
        throw constraint_error("estimate_ellipse_bound: ellipse parameter must exceed 1");
    if (samples < 1) throw constraint_error("estimate_ellipse_bound: samples must be >= 1");

    const double pi = std::numbers::pi;
    const std::complex<double> i1(0.0, 1.0);
    double boundary_max = 0.0;
    for (int m = 0; m < samples; ++m) {
        double theta = 2.0 * pi * m / samples;
        std::complex<double> w =
            0.5 * (rho_sq * std::exp(i1 * theta) + std::exp(-i1 * theta) / rho_sq);
        std::complex<double> u = lo + 0.5 * (hi - lo) * (w + 1.0);
        double v = std::abs(f(u));
        if (!std::isfinite(v))
            throw numerical_error("estimate_ellipse_bound: singularity inside the ellipse");
        boundary_max = std::max(boundary_max, v);
    }

    const double semi_major = 0.5 * (rho_sq + 1.0 / rho_sq);
    for (int m = 0; m <= samples; ++m) {
        double x = -semi_major + 2.0 * semi_major * m / samples;
        std::complex<double> u = lo + 0.5 * (hi - lo) * (x + 1.0);
        double v = std::abs(f(u));
        if (!std::isfinite(v) || v > boundary_max * (1.0 + 1e-6))
            throw numerical_error("estimate_ellipse_bound: singularity inside the ellipse");
    }
    return boundary_max;
}

struct EllipseChoice {
    double rho_sq = 0;
    double bound_c = 0;
};

// Bounds below a few machine epsilons cannot be certified by any
// double-precision evaluation, so the automatic ellipse search does not
// optimize past this floor.
inline constexpr double certified_bound_floor = 8.0 * std::numeric_limits<double>::epsilon();

// Grid search of rho_sq on a logarithmic grid, minimizing the analytic
// truncation bound at order n with the sampled magnitude estimate for C.
// Grid points whose ellipse hits a singularity are skipped; the objective
// is floored at certified_bound_floor, so among parameters whose formula
// value drops below it the smallest ellipse wins. The returned pair always
// reproduces the raw formula value, never a clamped one.
inline EllipseChoice auto_rho(const complex_fn& f, double lo, double hi, int n,
                              int samples = 256) {
    if (n < 0) throw constraint_error("auto_rho: order must be >= 0");
    constexpr int grid = 240;
    const double lg_lo = std::log(1.02), lg_hi = std::log(1e6);
    std::optional<EllipseChoice> best;
    double best_bound = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= grid; ++m) {
        double rho_sq = std::exp(lg_lo + (lg_hi - lg_lo) * m / grid);
        double c;
        try {
            c = estimate_ellipse_bound(f, lo, hi, rho_sq, samples);
        } catch (const numerical_error&) {
            continue;  // ellipse too large for this profile
        }
        if (!(c > 0.0)) continue;
        double b = std::max(bound_analytic(rho_sq, c, n), certified_bound_floor);
        if (b < best_bound) {
            best_bound = b;
            best = EllipseChoice{rho_sq, c};
        }
    }
    if (!best) throw numerical_error("auto_rho: no admissible ellipse found");
    return *best;
}

// Resolved error-bound data for a profile at a given expansion order.
struct BoundInfo {
    double value = 0;
    std::string kind;  // "analytic" | "finite-smooth"
    double rho_sq = 0;
    double bound_c = 0;
    int q = 0;
    double v_q = 0;
};

inline BoundInfo resolve_bound(const RadialProfile& p, int n) {
    const double z_max = p.diameter * p.diameter;
    BoundInfo info;
    if (const auto* an = std::get_if<AnalyticSmoothness>(&p.smoothness)) {
        info.kind = "analytic";
        info.rho_sq = an->rho_sq;
        info.bound_c = an->bound_c;
        info.value = bound_analytic(an->rho_sq, an->bound_c, n);
    } else if (const auto* fs = std::get_if<FiniteSmoothness>(&p.smoothness)) {
        info.kind = "finite-smooth";
        info.q = fs->q;
        info.v_q = fs->total_variation;
        info.value = bound_finite_smooth(fs->total_variation, p.diameter, fs->q, n);
    } else {
        auto choice = auto_rho(p.fc, 0.0, z_max, n);
        info.kind = "analytic";
        info.rho_sq = choice.rho_sq;
        info.bound_c = choice.bound_c;
        info.value = bound_analytic(choice.rho_sq, choice.bound_c, n);
    }
    return info;
}

}  // namespace rbfk
