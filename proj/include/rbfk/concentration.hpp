#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

#include "rbfk/errors.hpp"

namespace rbfk {

// Distance-concentration statistics of a coordinate distribution:
// e_d_sq = sum_i E[(x_i - y_i)^2] and sigma_d_sq = sum_i Var[(x_i - y_i)^2].
struct ConcentrationParams {
    double diameter = 1.0;
    double e_d_sq = 0;
    double sigma_d_sq = 0;
    int d = 0;
};

// Unbiased sample moments of the squared coordinate gaps of paired rows.
inline ConcentrationParams params_from_samples(const Eigen::MatrixXd& x,
                                               const Eigen::MatrixXd& y, double diameter) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw constraint_error("params_from_samples: sample shapes must match");
    if (x.rows() < 2) throw constraint_error("params_from_samples: need at least 2 pairs");
    if (!(diameter > 0.0)) throw constraint_error("params_from_samples: diameter must be positive");

    const long n = x.rows();
    ConcentrationParams p;
    p.diameter = diameter;
    p.d = static_cast<int>(x.cols());
    for (int c = 0; c < p.d; ++c) {
        double mean = 0.0;
        for (long i = 0; i < n; ++i) {
            double g = x(i, c) - y(i, c);
            mean += g * g;
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (long i = 0; i < n; ++i) {
            double g = x(i, c) - y(i, c);
            double dev = g * g - mean;
            var += dev * dev;
        }
        var /= static_cast<double>(n - 1);
        p.e_d_sq += mean;
        p.sigma_d_sq += var;
    }
    return p;
}

struct BernsteinProbability {
    double value = 0;
    bool vacuous = false;  // value <= 0; returned as-is, never clamped
};

// 1 - 2 exp(-delta^4 d / (2 sigma_d^2 d + 8 D^2 delta^2 / 3)).
inline BernsteinProbability bernstein_probability(double delta, const ConcentrationParams& p) {
    if (!(delta > 0.0) || !(delta < p.diameter))
        throw constraint_error("bernstein_probability: delta must lie in (0, D)");
    double num = std::pow(delta, 4) * p.d;
    double den = 2.0 * p.sigma_d_sq * p.d + 8.0 * p.diameter * p.diameter * delta * delta / 3.0;
    double v = 1.0 - 2.0 * std::exp(-num / den);
    return {v, v <= 0.0};
}

// Unique t > 1 solving t - 1/t = (D^2/delta^2)(rho~^2 - rho~^{-2}); the
// ellipse parameter after rescaling the concentration interval to the
// reference interval. Recovers rho~^2 at delta = D.
inline double rho_delta(double rho_tilde_sq, double diameter, double delta) {
    if (!(rho_tilde_sq > 1.0)) throw constraint_error("rho_delta: ellipse parameter must exceed 1");
    if (!(delta > 0.0) || delta > diameter)
        throw constraint_error("rho_delta: delta must lie in (0, D]");
    double c = (diameter * diameter) / (delta * delta) *
               (rho_tilde_sq - 1.0 / rho_tilde_sq);
    return 0.5 * c + std::sqrt(0.25 * c * c + 1.0);
}

// 2 C delta^2 / (D^2 (rho~^2 - rho~^{-2}) - delta^2) *
// (D^2 (rho~^2 - rho~^{-2}) / delta^2)^{-n}; requires the ellipse scale to
// exceed delta^2.
inline double prob_bound_analytic(double c_d, double diameter, double delta,
                                  double rho_tilde_sq, int n) {
    if (!(c_d > 0.0)) throw constraint_error("prob_bound_analytic: C must be positive");
    if (!(rho_tilde_sq > 1.0))
        throw constraint_error("prob_bound_analytic: ellipse parameter must exceed 1");
    if (n < 0) throw constraint_error("prob_bound_analytic: order must be >= 0");
    double scale = diameter * diameter * (rho_tilde_sq - 1.0 / rho_tilde_sq);
    double dsq = delta * delta;
    if (!(scale > dsq))
        throw constraint_error("prob_bound_analytic: delta too large for this ellipse");
    return 2.0 * c_d * dsq / (scale - dsq) * std::pow(scale / dsq, -n);
}

// 2 V_q delta^{2q} / (pi q [2(n-q)]^q); the finite-smoothness tail with the
// domain size replaced by the concentration radius.
inline double prob_bound_finite(double v_q, double delta, int q, int n) {
    if (q < 1) throw constraint_error("prob_bound_finite: q must be >= 1");
    if (n <= q) throw constraint_error("prob_bound_finite: order must exceed q");
    if (!(v_q >= 0.0) || !(delta > 0.0))
        throw constraint_error("prob_bound_finite: need V_q >= 0 and delta > 0");
    return 2.0 * v_q * std::pow(delta, 2 * q) /
           (std::numbers::pi * q * std::pow(2.0 * (n - q), q));
}

// Fraction of paired rows with | ||x-y||^2 - E_d^2 | <= delta^2.
inline double empirical_concentration(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                      double delta, const ConcentrationParams& p) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw constraint_error("empirical_concentration: sample shapes must match");
    if (x.rows() == 0) return 0.0;
    long hits = 0;
    for (long i = 0; i < x.rows(); ++i) {
        double z = (x.row(i) - y.row(i)).squaredNorm();
        if (std::abs(z - p.e_d_sq) <= delta * delta) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(x.rows());
}

}  // namespace rbfk
