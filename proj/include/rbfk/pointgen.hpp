#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rbfk/errors.hpp"
#include "rbfk/rng.hpp"

namespace rbfk {

enum class SampleScheme { uniform, endpoint, halton };
enum class OverlapScenario { complete, partial, none };

inline const char* to_string(SampleScheme s) {
    switch (s) {
        case SampleScheme::uniform: return "uniform";
        case SampleScheme::endpoint: return "endpoint";
        case SampleScheme::halton: return "halton";
    }
    return "uniform";
}

inline SampleScheme scheme_from_string(const std::string& s) {
    if (s == "uniform") return SampleScheme::uniform;
    if (s == "endpoint") return SampleScheme::endpoint;
    if (s == "halton") return SampleScheme::halton;
    throw constraint_error("unknown sampling scheme: " + s);
}

inline const char* to_string(OverlapScenario s) {
    switch (s) {
        case OverlapScenario::complete: return "complete";
        case OverlapScenario::partial: return "partial";
        case OverlapScenario::none: return "none";
    }
    return "complete";
}

inline OverlapScenario scenario_from_string(const std::string& s) {
    if (s == "complete") return OverlapScenario::complete;
    if (s == "partial") return OverlapScenario::partial;
    if (s == "none") return OverlapScenario::none;
    throw constraint_error("unknown overlap scenario: " + s);
}

struct PointCloud {
    Eigen::MatrixXd points;  // one point per row
    Eigen::VectorXd box_lo, box_hi;
    SampleScheme scheme = SampleScheme::uniform;
    double endpoint_p = 0;
    std::uint64_t seed = 0;
    std::uint64_t halton_offset = 0;

    int dim() const { return static_cast<int>(points.cols()); }
    long size() const { return points.rows(); }
};

// Each coordinate lands on a with probability p, on b with probability p,
// otherwise uniform in (a, b). One uniform draw per coordinate in row-major
// order, so regeneration with the same arguments is bitwise identical.
inline PointCloud sample_endpoint(long n, int d, double a, double b, double p,
                                  std::uint64_t seed) {
    if (n < 0 || d < 1) throw constraint_error("sample_endpoint: need n >= 0, d >= 1");
    if (!(a < b)) throw constraint_error("sample_endpoint: need a < b");
    if (!(p >= 0.0) || p > 0.5)
        throw constraint_error("sample_endpoint: probability must lie in [0, 1/2]");

    PointCloud cloud;
    cloud.points.resize(n, d);
    cloud.box_lo = Eigen::VectorXd::Constant(d, a);
    cloud.box_hi = Eigen::VectorXd::Constant(d, b);
    cloud.scheme = p == 0.0 ? SampleScheme::uniform : SampleScheme::endpoint;
    cloud.endpoint_p = p;
    cloud.seed = seed;

    SplitMix64 rng(seed);
    for (long i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) {
            double u = rng.next_double();
            double v;
            if (p > 0.0 && u < p)
                v = a;
            else if (p > 0.0 && u < 2.0 * p)
                v = b;
            else
                v = a + (b - a) * ((u - 2.0 * p) / (1.0 - 2.0 * p));
            cloud.points(i, c) = v;
        }
    return cloud;
}

inline PointCloud sample_uniform(long n, int d, double a, double b, std::uint64_t seed) {
    return sample_endpoint(n, d, a, b, 0.0, seed);
}

namespace detail {

inline const std::vector<int>& first_primes() {
    static const std::vector<int> primes = [] {
        std::vector<int> out;
        for (int v = 2; out.size() < 100; ++v) {
            bool prime = true;
            for (int q = 2; q * q <= v; ++q)
                if (v % q == 0) {
                    prime = false;
                    break;
                }
            if (prime) out.push_back(v);
        }
        return out;
    }();
    return primes;
}

inline double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i) {
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
        f *= inv;
    }
    return r;
}

}  // namespace detail

// Low-discrepancy sequence: point i uses the radical inverse of
// i + offset + 1 in the first d primes, mapped affinely into the box.
inline PointCloud sample_halton(long n, int d, std::uint64_t offset, double a, double b) {
    if (n < 0 || d < 1) throw constraint_error("sample_halton: need n >= 0, d >= 1");
    if (d > 100) throw constraint_error("sample_halton: dimension exceeds the prime table");
    if (!(a < b)) throw constraint_error("sample_halton: need a < b");

    PointCloud cloud;
    cloud.points.resize(n, d);
    cloud.box_lo = Eigen::VectorXd::Constant(d, a);
    cloud.box_hi = Eigen::VectorXd::Constant(d, b);
    cloud.scheme = SampleScheme::halton;
    cloud.halton_offset = offset;

    const auto& primes = detail::first_primes();
    for (long i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c)
            cloud.points(i, c) =
                a + (b - a) * detail::radical_inverse(static_cast<std::uint64_t>(i) + offset + 1,
                                                      primes[static_cast<std::size_t>(c)]);
    return cloud;
}

// Cubic source/target boxes of the three overlap scenarios.
struct BoxPair {
    double x_lo, x_hi;
    double y_lo, y_hi;
};

inline BoxPair overlap_boxes(OverlapScenario s) {
    switch (s) {
        case OverlapScenario::complete: return {0.0, 1.0, 0.0, 1.0};
        case OverlapScenario::partial: return {0.0, 2.0 / 3.0, 1.0 / 3.0, 1.0};
        case OverlapScenario::none: return {0.0, 0.5, 0.5, 1.0};
    }
    return {0.0, 1.0, 0.0, 1.0};
}

inline double box_diagonal(double lo, double hi, int d) {
    return (hi - lo) * std::sqrt(static_cast<double>(d));
}

// Largest ||x - y|| reachable for points of the two cubic boxes.
inline double pair_diameter(const BoxPair& b, int d) {
    double gap = std::max(b.x_hi - b.y_lo, b.y_hi - b.x_lo);
    return gap * std::sqrt(static_cast<double>(d));
}

inline double max_pair_distance(const PointCloud& x, const PointCloud& y) {
    if (x.dim() != y.dim()) throw constraint_error("max_pair_distance: dimension mismatch");
    double best = 0.0;
    for (long i = 0; i < x.size(); ++i)
        for (long j = 0; j < y.size(); ++j)
            best = std::max(best, (x.points.row(i) - y.points.row(j)).squaredNorm());
    return std::sqrt(best);
}

// max-dist sets h to the largest pairwise distance; max-dist-sq sets h to
// the largest pairwise squared distance, the much flatter normalization
// that reproduces the published deep reconstruction-drop patterns.
enum class BandwidthPolicy { sqrt_d, max_dist, max_dist_sq, fixed };

inline const char* to_string(BandwidthPolicy p) {
    switch (p) {
        case BandwidthPolicy::sqrt_d: return "sqrt-d";
        case BandwidthPolicy::max_dist: return "max-dist";
        case BandwidthPolicy::max_dist_sq: return "max-dist-sq";
        case BandwidthPolicy::fixed: return "fixed";
    }
    return "sqrt-d";
}

inline BandwidthPolicy bandwidth_policy_from_string(const std::string& s) {
    if (s == "sqrt-d") return BandwidthPolicy::sqrt_d;
    if (s == "max-dist") return BandwidthPolicy::max_dist;
    if (s == "max-dist-sq") return BandwidthPolicy::max_dist_sq;
    if (s == "fixed") return BandwidthPolicy::fixed;
    throw constraint_error("unknown bandwidth policy: " + s);
}

inline double resolve_bandwidth(BandwidthPolicy policy, double fixed_h, const PointCloud& x,
                                const PointCloud& y) {
    switch (policy) {
        case BandwidthPolicy::sqrt_d: return std::sqrt(static_cast<double>(x.dim()));
        case BandwidthPolicy::max_dist: return max_pair_distance(x, y);
        case BandwidthPolicy::max_dist_sq: {
            double m = max_pair_distance(x, y);
            return m * m;
        }
        case BandwidthPolicy::fixed: break;
    }
    if (!(fixed_h > 0.0)) throw constraint_error("resolve_bandwidth: fixed bandwidth must be positive");
    return fixed_h;
}

}  // namespace rbfk
