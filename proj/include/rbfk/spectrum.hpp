#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rbfk/chebyshev.hpp"
#include "rbfk/combinatorics.hpp"
#include "rbfk/errors.hpp"
#include "rbfk/parallel.hpp"
#include "rbfk/pointgen.hpp"
#include "rbfk/rng.hpp"

namespace rbfk {

struct KernelMatrix {
    Eigen::MatrixXd entries;
    std::string profile;
    double bandwidth = 1.0;
    std::string bandwidth_policy = "fixed";
};

struct AssembleOptions {
    std::size_t memory_cap_bytes = default_memory_cap;
    int threads = 0;
};

// K(i, j) = f(||x_i - y_j||^2) with the bandwidth folded into f. Rows are
// independent, so parallel assembly is bitwise deterministic.
inline KernelMatrix assemble(const PointCloud& x, const PointCloud& y,
                             const RadialProfile& profile, const AssembleOptions& opts = {}) {
    if (x.dim() != y.dim()) throw constraint_error("assemble: cloud dimension mismatch");
    const long nx = x.size(), ny = y.size();
    std::size_t bytes = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * 8;
    if (bytes > opts.memory_cap_bytes)
        throw resource_error("assemble: " + std::to_string(bytes) + " bytes needed, cap is " +
                                 std::to_string(opts.memory_cap_bytes),
                             bytes);

    KernelMatrix k;
    k.entries.resize(nx, ny);
    k.profile = profile.name;
    k.bandwidth = profile.bandwidth;
    parallel_for(nx, opts.threads, [&](long first, long last) {
        for (long i = first; i < last; ++i)
            for (long j = 0; j < ny; ++j)
                k.entries(i, j) = profile.f((x.points.row(i) - y.points.row(j)).squaredNorm());
    });
    if (!k.entries.allFinite()) throw numerical_error("assemble: non-finite kernel entry");
    return k;
}

struct SingularSpectrum {
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXd u, v;    // thin factors
};

inline SingularSpectrum compute_svd(const Eigen::MatrixXd& k) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw numerical_error("compute_svd: decomposition failed");
    return SingularSpectrum{svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

enum class RankNorm { fro, two, max };

inline const char* to_string(RankNorm n) {
    switch (n) {
        case RankNorm::fro: return "fro";
        case RankNorm::two: return "two";
        case RankNorm::max: return "max";
    }
    return "fro";
}

inline RankNorm rank_norm_from_string(const std::string& s) {
    if (s == "fro") return RankNorm::fro;
    if (s == "two") return RankNorm::two;
    if (s == "max") return RankNorm::max;
    throw constraint_error("unknown norm: " + s);
}

// Smallest r with ||K - K_r|| <= tol ||K|| in the chosen norm. The max-norm
// scan walks the truncations incrementally and takes the first crossing;
// the max error can briefly rise again afterwards, which is reported
// through rerise when a caller asks.
inline long numerical_rank(const Eigen::MatrixXd& k, const SingularSpectrum& s, double tol,
                           RankNorm norm, bool* rerise = nullptr) {
    if (!(tol > 0.0) || tol > 1.0) throw constraint_error("numerical_rank: tol must be in (0, 1]");
    if (rerise) *rerise = false;
    const long count = s.values.size();

    if (norm == RankNorm::two) {
        double cut = tol * s.values(0);
        long r = 0;
        while (r < count && s.values(r) > cut) ++r;
        return r;
    }
    if (norm == RankNorm::fro) {
        // backward suffix sums keep the tiny tails accurate
        std::vector<double> tail(static_cast<std::size_t>(count) + 1, 0.0);
        for (long i = count - 1; i >= 0; --i)
            tail[static_cast<std::size_t>(i)] =
                tail[static_cast<std::size_t>(i) + 1] + s.values(i) * s.values(i);
        double total = tail[0];
        for (long r = 0; r <= count; ++r)
            if (std::sqrt(tail[static_cast<std::size_t>(r)]) <= tol * std::sqrt(total)) return r;
        return count;
    }

    // max norm: incremental reconstruction
    double cut = tol * k.cwiseAbs().maxCoeff();
    Eigen::MatrixXd residual = k;
    long rank = -1;
    long r = 0;
    double err = residual.cwiseAbs().maxCoeff();
    if (err <= cut) rank = 0;
    long extra = 0;
    while (r < count) {
        if (rank >= 0 && (extra >= 50 || err <= 0.1 * cut)) break;
        residual.noalias() -= s.values(r) * s.u.col(r) * s.v.col(r).transpose();
        ++r;
        err = residual.cwiseAbs().maxCoeff();
        if (rank < 0) {
            if (err <= cut) rank = r;
        } else {
            ++extra;
            if (err > cut && rerise) *rerise = true;
        }
    }
    return rank < 0 ? count : rank;
}

inline long numerical_rank(const Eigen::MatrixXd& k, double tol, RankNorm norm) {
    auto s = compute_svd(k);
    return numerical_rank(k, s, tol, norm);
}

struct RatioSpike {
    long index = 0;  // 1-based
    double ratio = 0;
    bool capped = false;  // successor below the machine floor
};

// 1-based indices i with s_i / s_{i+1} above the threshold. Pairs whose
// successor sits below the machine floor are capped at s_i / floor and
// flagged; pairs entirely below the floor are skipped.
inline std::vector<RatioSpike> ratio_spikes(const Eigen::VectorXd& s, double threshold,
                                            double floor = -1.0) {
    if (!(threshold > 1.0)) throw constraint_error("ratio_spikes: threshold must exceed 1");
    std::vector<RatioSpike> out;
    if (s.size() < 2) return out;
    if (floor < 0.0)
        floor = s(0) * std::numeric_limits<double>::epsilon() * static_cast<double>(s.size());
    for (long i = 0; i + 1 < s.size(); ++i) {
        if (s(i) <= floor) break;
        if (s(i + 1) <= floor) {
            double capped_ratio = floor > 0.0 ? s(i) / floor : std::numeric_limits<double>::infinity();
            if (capped_ratio > threshold) out.push_back({i + 1, capped_ratio, true});
            break;
        }
        double ratio = s(i) / s(i + 1);
        if (ratio > threshold) out.push_back({i + 1, ratio, false});
    }
    return out;
}

struct LowRankFactors {
    Eigen::MatrixXd left, right;  // approximation = left * right^T
};

struct NystromResult {
    LowRankFactors factors;
    std::vector<long> columns;  // sampled column subset
    double rel_fro_error = 0;
    double rel_max_error = 0;
};

// Column-sampling reconstruction with exact rank-r leverage scores from the
// matrix's own SVD, pseudo-inverse core with cutoff 1e-12 sigma_max, and a
// final truncation back to rank r.
inline NystromResult nystrom_leverage(const Eigen::MatrixXd& k, const SingularSpectrum& s,
                                      long rank, long oversample, std::uint64_t seed) {
    const long n = k.cols();
    if (rank < 1) throw constraint_error("nystrom_leverage: rank must be >= 1");
    if (rank + oversample > n)
        throw constraint_error("nystrom_leverage: rank + oversample exceeds the column count");

    const long r_lev = std::min(rank, s.values.size());
    Eigen::VectorXd lev = s.v.leftCols(r_lev).rowwise().squaredNorm();
    double total = lev.sum();
    if (!(total > 0.0)) throw numerical_error("nystrom_leverage: zero leverage mass");

    // leverage-weighted sampling without replacement: keep the rank+oversample
    // largest keys u_i^{1/w_i}; sampling all columns recovers the matrix
    SplitMix64 rng(seed);
    std::vector<std::pair<double, long>> keys;
    keys.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        double u = rng.next_double();
        double w = lev(i) / total;
        double key = w > 0.0 ? std::pow(u, 1.0 / (w * n)) : -1.0;
        keys.emplace_back(key, i);
    }
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;  // stable under ties, e.g. zero-leverage columns
    });
    std::vector<long> cols;
    for (long t = 0; t < rank + oversample; ++t)
        cols.push_back(keys[static_cast<std::size_t>(t)].second);
    std::sort(cols.begin(), cols.end());

    const long m = static_cast<long>(cols.size());
    Eigen::MatrixXd c(k.rows(), m), w(m, m);
    for (long j = 0; j < m; ++j) c.col(j) = k.col(cols[static_cast<std::size_t>(j)]);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            w(i, j) = k(cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (w + w.transpose()));
    if (eig.info() != Eigen::Success) throw numerical_error("nystrom_leverage: core eig failed");
    double lam_max = eig.eigenvalues().cwiseAbs().maxCoeff();
    double cutoff = 1e-12 * lam_max;
    std::vector<long> keep;
    for (long i = 0; i < m; ++i)
        if (eig.eigenvalues()(i) > cutoff) keep.push_back(i);

    NystromResult res;
    res.columns = cols;
    if (keep.empty()) {
        res.factors.left = Eigen::MatrixXd::Zero(k.rows(), 1);
        res.factors.right = Eigen::MatrixXd::Zero(k.cols(), 1);
    } else {
        Eigen::MatrixXd b(k.rows(), static_cast<long>(keep.size()));
        for (std::size_t t = 0; t < keep.size(); ++t)
            b.col(static_cast<long>(t)) = c * eig.eigenvectors().col(keep[t]) /
                                          std::sqrt(eig.eigenvalues()(keep[t]));
        Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(b, Eigen::ComputeThinU);
        long rr = std::min<long>(rank, bsvd.singularValues().size());
        Eigen::MatrixXd u_r = bsvd.matrixU().leftCols(rr);
        Eigen::VectorXd s2 = bsvd.singularValues().head(rr).array().square();
        res.factors.left = u_r * s2.asDiagonal();
        res.factors.right = u_r;
    }

    Eigen::MatrixXd err = k - res.factors.left * res.factors.right.transpose();
    res.rel_fro_error = err.norm() / k.norm();
    res.rel_max_error = err.cwiseAbs().maxCoeff() / k.cwiseAbs().maxCoeff();
    return res;
}

struct TruncatedSvd {
    Eigen::MatrixXd u;
    Eigen::VectorXd values;
    Eigen::MatrixXd v;
};

namespace detail {

inline Eigen::MatrixXd thin_q(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace detail

// Range-finder with subspace iterations, re-orthonormalized each pass.
// Deterministic for a fixed seed.
inline TruncatedSvd randomized_svd(const Eigen::MatrixXd& k, long rank, int power_iters,
                                   long oversample, std::uint64_t seed) {
    if (rank < 1) throw constraint_error("randomized_svd: rank must be >= 1");
    const long c = rank + oversample;
    if (c > std::min(k.rows(), k.cols()))
        throw constraint_error("randomized_svd: rank + oversample exceeds the matrix size");

    SplitMix64 rng(seed);
    Eigen::MatrixXd omega(k.cols(), c);
    for (long i = 0; i < omega.rows(); ++i)
        for (long j = 0; j < c; ++j) omega(i, j) = rng.next_normal();

    Eigen::MatrixXd q = detail::thin_q(k * omega);
    for (int it = 0; it < power_iters; ++it) {
        q = detail::thin_q(k.transpose() * q);
        q = detail::thin_q(k * q);
    }
    Eigen::MatrixXd b = q.transpose() * k;
    Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    long rr = std::min<long>(rank, bsvd.singularValues().size());
    out.u = q * bsvd.matrixU().leftCols(rr);
    out.values = bsvd.singularValues().head(rr);
    out.v = bsvd.matrixV().leftCols(rr);
    return out;
}

struct CurveEntry {
    long rank = 0;
    std::string method;
    double rel_fro_error = 0;
};

struct ReconstructOptions {
    long oversample = 30;
    int power_iters = 2;
    int repeats = 1;
    std::uint64_t seed = 42;
};

// Relative Frobenius reconstruction error per rank and method. The svd
// column is the optimal monotone baseline from tail energies; sampling
// methods average over repeats with derived seeds.
inline std::vector<CurveEntry> reconstruction_curve(const Eigen::MatrixXd& k,
                                                    const SingularSpectrum& s,
                                                    const std::vector<long>& ranks,
                                                    const std::vector<std::string>& methods,
                                                    const ReconstructOptions& opts = {}) {
    for (std::size_t i = 1; i < ranks.size(); ++i)
        if (ranks[i] < ranks[i - 1]) throw constraint_error("reconstruction_curve: ranks must ascend");

    const long count = s.values.size();
    std::vector<double> tail(static_cast<std::size_t>(count) + 1, 0.0);
    for (long i = count - 1; i >= 0; --i)
        tail[static_cast<std::size_t>(i)] =
            tail[static_cast<std::size_t>(i) + 1] + s.values(i) * s.values(i);
    double total = tail[0];

    std::vector<CurveEntry> out;
    for (long r : ranks) {
        for (const auto& method : methods) {
            CurveEntry e;
            e.rank = r;
            e.method = method;
            if (method == "svd") {
                e.rel_fro_error = std::sqrt(tail[static_cast<std::size_t>(std::min(r, count))] / total);
            } else if (method == "nystrom") {
                double acc = 0.0;
                for (int rep = 0; rep < opts.repeats; ++rep)
                    acc += nystrom_leverage(k, s, r, opts.oversample,
                                            opts.seed + 977 * static_cast<std::uint64_t>(rep) +
                                                static_cast<std::uint64_t>(r))
                               .rel_fro_error;
                e.rel_fro_error = acc / opts.repeats;
            } else if (method == "randsvd") {
                double acc = 0.0;
                for (int rep = 0; rep < opts.repeats; ++rep) {
                    auto t = randomized_svd(k, r, opts.power_iters, opts.oversample,
                                            opts.seed + 1409 * static_cast<std::uint64_t>(rep) +
                                                static_cast<std::uint64_t>(r));
                    Eigen::MatrixXd approx =
                        t.u * t.values.asDiagonal() * t.v.transpose();
                    acc += (k - approx).norm() / k.norm();
                }
                e.rel_fro_error = acc / opts.repeats;
            } else {
                throw constraint_error("reconstruction_curve: unknown method " + method);
            }
            out.push_back(std::move(e));
        }
    }
    return out;
}

struct SpectrumReport {
    std::vector<double> singular_values;
    struct RankEntry {
        std::string norm;
        double tol = 0;
        long rank = 0;
        bool rerise = false;
    };
    std::vector<RankEntry> ranks;
    double threshold_significant = 4.0;
    double threshold_subtle = 2.0;
    std::vector<RatioSpike> spikes_significant;
    std::vector<RatioSpike> spikes_subtle;
    std::vector<std::uint64_t> predicted_indices;
    std::string grouping;  // greedy gap decomposition, diagnostic only
};

namespace detail {

// Greedy diagnostic: try to write each gap between consecutive spike
// indices as a sum of group cardinalities binomial(k+d-1, d-1), smallest
// term count first. Returns a rendering like "1 | 3 | 6" or an empty
// string when some gap has no decomposition.
inline std::string match_grouping(const std::vector<RatioSpike>& spikes, int d, long max_index) {
    if (spikes.empty()) return "";
    std::vector<std::uint64_t> sizes;
    for (std::uint64_t k = 0;; ++k) {
        std::uint64_t c = group_cardinality(static_cast<std::uint64_t>(d), k);
        if (c > static_cast<std::uint64_t>(max_index)) break;
        sizes.push_back(c);
        if (k > 64) break;
    }
    std::string out;
    long prev = 0;
    for (const auto& sp : spikes) {
        long gap = sp.index - prev;
        prev = sp.index;
        if (gap <= 0) return "";
        // min-coin DP over the group sizes
        std::vector<int> need(static_cast<std::size_t>(gap) + 1, -1);
        std::vector<std::uint64_t> pick(static_cast<std::size_t>(gap) + 1, 0);
        need[0] = 0;
        for (long v = 1; v <= gap; ++v)
            for (auto c : sizes) {
                if (c > static_cast<std::uint64_t>(v)) break;
                long rest = v - static_cast<long>(c);
                if (need[static_cast<std::size_t>(rest)] >= 0 &&
                    (need[static_cast<std::size_t>(v)] < 0 ||
                     need[static_cast<std::size_t>(rest)] + 1 < need[static_cast<std::size_t>(v)])) {
                    need[static_cast<std::size_t>(v)] = need[static_cast<std::size_t>(rest)] + 1;
                    pick[static_cast<std::size_t>(v)] = c;
                }
            }
        if (need[static_cast<std::size_t>(gap)] < 0) return "";
        std::string part;
        long v = gap;
        while (v > 0) {
            if (!part.empty()) part += "+";
            part += std::to_string(pick[static_cast<std::size_t>(v)]);
            v -= static_cast<long>(pick[static_cast<std::size_t>(v)]);
        }
        if (!out.empty()) out += " | ";
        out += part;
    }
    return out;
}

}  // namespace detail

inline SpectrumReport build_spectrum_report(const KernelMatrix& k, int d,
                                            const std::vector<double>& tols,
                                            const std::vector<RankNorm>& norms,
                                            double threshold_significant = 4.0,
                                            double threshold_subtle = 2.0) {
    auto s = compute_svd(k.entries);
    SpectrumReport rep;
    rep.singular_values.assign(s.values.data(), s.values.data() + s.values.size());
    for (auto norm : norms)
        for (double tol : tols) {
            bool rerise = false;
            long r = numerical_rank(k.entries, s, tol, norm, &rerise);
            rep.ranks.push_back({to_string(norm), tol, r, rerise});
        }
    rep.threshold_significant = threshold_significant;
    rep.threshold_subtle = threshold_subtle;
    rep.spikes_significant = ratio_spikes(s.values, threshold_significant);
    rep.spikes_subtle = ratio_spikes(s.values, threshold_subtle);
    std::uint64_t k_max = default_k_max(static_cast<std::uint64_t>(d),
                                        static_cast<std::uint64_t>(s.values.size()));
    rep.predicted_indices = predicted_decay_indices(static_cast<std::uint64_t>(d), k_max);
    rep.grouping = detail::match_grouping(rep.spikes_significant, d, s.values.size());
    return rep;
}

}  // namespace rbfk
