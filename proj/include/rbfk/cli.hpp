#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rbfk/concentration.hpp"
#include "rbfk/fourier_taylor.hpp"
#include "rbfk/profiles.hpp"
#include "rbfk/separable.hpp"
#include "rbfk/serialize.hpp"
#include "rbfk/spectrum.hpp"
#include "rbfk/version.hpp"

namespace rbfk::cli {

namespace fs = std::filesystem;

inline constexpr long default_point_cap = 4000;

struct CommonOpts {
    std::string out = ".";
    std::uint64_t seed = 42;
    int threads = 0;
    std::string format = "csv";
    bool unsafe_n = false;
};

inline void check_point_cap(long n, const CommonOpts& common) {
    if (!common.unsafe_n && n > default_point_cap)
        throw resource_error("point count " + std::to_string(n) + " exceeds the default cap " +
                                 std::to_string(default_point_cap) + "; pass --unsafe-n to lift it",
                             static_cast<std::size_t>(n));
}

inline fs::path ensure_out_dir(const CommonOpts& common) {
    fs::path dir(common.out);
    fs::create_directories(dir);
    return dir;
}

// ---- tabular output -------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

inline void write_table(const fs::path& base, const Table& table, const json& config,
                        const std::string& format) {
    if (format == "json") {
        json rows = json::array();
        for (const auto& row : table.rows) {
            json r;
            for (std::size_t c = 0; c < table.columns.size(); ++c) r[table.columns[c]] = row[c];
            rows.push_back(std::move(r));
        }
        json out;
        out["version"] = version;
        out["generator"] = generator_id;
        out["config"] = config;
        out["rows"] = std::move(rows);
        write_text_file(base.string() + ".json", out.dump(2) + "\n");
        return;
    }
    std::ostringstream os;
    write_csv_preamble(os, config);
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << "\n";
    }
    write_text_file(base.string() + ".csv", os.str());
}

inline json with_envelope(const json& config, json body) {
    body["version"] = version;
    body["generator"] = generator_id;
    body["config"] = config;
    return body;
}

// ---- cloud construction -----------------------------------------------------

struct CloudSpec {
    std::string scheme = "endpoint";
    long n = 1000;
    int d = 3;
    double a = 0.0, b = 1.0;
    double p = 0.3;
    std::uint64_t halton_offset = 0;
    std::string scenario;  // empty: use [a, b] for both clouds
};

inline PointCloud make_cloud(const CloudSpec& spec, double lo, double hi, std::uint64_t seed) {
    auto scheme = scheme_from_string(spec.scheme);
    switch (scheme) {
        case SampleScheme::endpoint: return sample_endpoint(spec.n, spec.d, lo, hi, spec.p, seed);
        case SampleScheme::uniform: return sample_uniform(spec.n, spec.d, lo, hi, seed);
        case SampleScheme::halton: return sample_halton(spec.n, spec.d, spec.halton_offset, lo, hi);
    }
    throw constraint_error("unknown scheme");
}

inline BoxPair boxes_for(const CloudSpec& spec) {
    if (!spec.scenario.empty()) return overlap_boxes(scenario_from_string(spec.scenario));
    return BoxPair{spec.a, spec.b, spec.a, spec.b};
}

// ---- sample ---------------------------------------------------------------

struct SampleConfig {
    CommonOpts common;
    CloudSpec cloud;
    std::string which = "both";         // x | y | both
    std::string matrix_format = "csv";  // csv | bin
};

inline json to_config_json(const SampleConfig& c) {
    return json{{"command", "sample"},     {"scheme", c.cloud.scheme},
                {"n", c.cloud.n},          {"d", c.cloud.d},
                {"a", c.cloud.a},          {"b", c.cloud.b},
                {"p", c.cloud.p},          {"offset", c.cloud.halton_offset},
                {"scenario", c.cloud.scenario}, {"which", c.which},
                {"matrix_format", c.matrix_format},
                {"seed", c.common.seed},   {"threads", c.common.threads}};
}

inline void run_sample(const SampleConfig& cfg) {
    auto dir = ensure_out_dir(cfg.common);
    auto boxes = boxes_for(cfg.cloud);
    auto config = to_config_json(cfg);

    auto emit = [&](const char* tag, double lo, double hi, std::uint64_t seed) {
        auto cloud = make_cloud(cfg.cloud, lo, hi, seed);
        std::string base = (dir / (std::string("points_") + tag)).string();
        if (cfg.matrix_format == "bin") {
            std::ostringstream os(std::ios::out | std::ios::binary);
            write_matrix_binary(os, cloud.points);
            write_text_file(base + ".bin", os.str());
        } else {
            std::ostringstream os;
            write_csv_preamble(os, config);
            write_cloud_csv(os, cloud);
            write_text_file(base + ".csv", os.str());
        }
        auto meta = with_envelope(config, cloud_metadata(cloud));
        write_text_file(base + ".json", meta.dump(2) + "\n");
    };
    if (cfg.which == "x" || cfg.which == "both") emit("x", boxes.x_lo, boxes.x_hi, cfg.common.seed);
    if (cfg.which == "y" || cfg.which == "both")
        emit("y", boxes.y_lo, boxes.y_hi, cfg.common.seed + 1);
}

// ---- factorize -------------------------------------------------------------

struct FactorizeConfig {
    CommonOpts common;
    std::string profile = "gaussian";
    std::string construction = "cheb";  // cheb | ft
    int d = 3;
    int n = 8;
    int m_f = 1;
    int m_t = 9;
    double diameter = 1.0;
    double h = 1.0;
    double prune = 0.0;
    int window_order = 7;
    int quad_points = 0;
    int q = 2;
    double v_q = 0.0;
    double d_x = 0.0, d_y = 0.0;
    bool no_enforce_ratio = false;
    std::string points_x, points_y;
    bool export_factors = false;
    std::string matrix_format = "csv";  // csv | bin
};

inline json to_config_json(const FactorizeConfig& c) {
    return json{{"command", "factorize"},
                {"profile", c.profile},
                {"construction", c.construction},
                {"d", c.d},
                {"n", c.n},
                {"mf", c.m_f},
                {"mt", c.m_t},
                {"D", c.diameter},
                {"h", c.h},
                {"prune", c.prune},
                {"window_order", c.window_order},
                {"quad_points", c.quad_points},
                {"q", c.q},
                {"vq", c.v_q},
                {"dx", c.d_x},
                {"dy", c.d_y},
                {"enforce_ratio", !c.no_enforce_ratio},
                {"points_x", c.points_x},
                {"points_y", c.points_y},
                {"seed", c.common.seed},
                {"threads", c.common.threads},
                {"matrix_format", c.matrix_format}};
}

inline PointCloud load_cloud(const std::string& path) {
    auto text = read_text_file(path);
    json meta;
    const json* meta_ptr = nullptr;
    fs::path sidecar = fs::path(path).replace_extension(".json");
    if (fs::exists(sidecar)) {
        meta = json::parse(read_text_file(sidecar.string()));
        meta_ptr = &meta;
    }
    if (text.size() >= 4 && text.compare(0, 4, "RBFK") == 0) {
        std::istringstream is(text, std::ios::in | std::ios::binary);
        return cloud_from_points(read_matrix_binary(is), meta_ptr);
    }
    std::istringstream is(text);
    return read_cloud_csv(is, meta_ptr);
}

inline void run_factorize(const FactorizeConfig& cfg) {
    auto dir = ensure_out_dir(cfg.common);
    auto config = to_config_json(cfg);

    std::optional<PointCloud> x_cloud, y_cloud;
    if (!cfg.points_x.empty()) x_cloud = load_cloud(cfg.points_x);
    if (!cfg.points_y.empty()) y_cloud = load_cloud(cfg.points_y);
    if (x_cloud && !y_cloud) y_cloud = x_cloud;
    if (x_cloud) {
        check_point_cap(x_cloud->size(), cfg.common);
        check_point_cap(y_cloud->size(), cfg.common);
    }

    double diameter = cfg.diameter;
    if (x_cloud && cfg.diameter <= 0.0) diameter = max_pair_distance(*x_cloud, *y_cloud);
    auto profile = profile_by_name(cfg.profile, cfg.h, diameter);

    FactorOptions fopts;
    fopts.threads = cfg.common.threads;

    json report;
    std::optional<FactorMatrices> factors;
    int d = x_cloud ? x_cloud->dim() : cfg.d;

    if (cfg.construction == "cheb") {
        PlanOptions popts;
        popts.prune_threshold = cfg.prune;
        auto plan = build_cheb_plan(profile, cfg.n, d, popts);
        write_text_file((dir / "plan.json").string(),
                        with_envelope(config, to_json(plan)).dump(2) + "\n");
        report["declared_rank"] = plan.declared_rank;
        report["error_bound"] = plan.error_bound;
        report["bound_kind"] = plan.bound_kind;
        if (x_cloud) factors = factor_matrices(plan, x_cloud->points, y_cloud->points, fopts);
    } else if (cfg.construction == "ft") {
        auto pp = periodize(profile, cfg.window_order);
        Eigen::VectorXd xc = Eigen::VectorXd::Zero(d), yc = Eigen::VectorXd::Zero(d);
        if (x_cloud) {
            xc = 0.5 * (x_cloud->box_lo + x_cloud->box_hi);
            yc = 0.5 * (y_cloud->box_lo + y_cloud->box_hi);
        }
        FtPlanOptions fpo;
        fpo.quad_points = cfg.quad_points;
        fpo.q = cfg.q;
        fpo.v_q = cfg.v_q;
        fpo.d_x = cfg.d_x;
        fpo.d_y = cfg.d_y;
        if (x_cloud && cfg.d_x <= 0.0) fpo.d_x = (x_cloud->box_hi - x_cloud->box_lo).norm();
        if (y_cloud && cfg.d_y <= 0.0) fpo.d_y = (y_cloud->box_hi - y_cloud->box_lo).norm();
        auto plan = build_ft_plan(pp, cfg.m_f, cfg.m_t, xc, yc, !cfg.no_enforce_ratio, fpo);
        write_text_file((dir / "plan.json").string(),
                        with_envelope(config, to_json(plan)).dump(2) + "\n");
        report["declared_rank"] = plan.declared_rank;
        report["realified_columns"] = plan.realified_columns;
        report["error_bound"] = plan.error_bound;
        report["bound_heuristic"] = plan.bound_is_heuristic;
        if (x_cloud) factors = factor_matrices(plan, x_cloud->points, y_cloud->points, fopts);
    } else {
        throw constraint_error("factorize: construction must be cheb or ft");
    }

    if (factors) {
        AssembleOptions aopts;
        aopts.threads = cfg.common.threads;
        auto k = assemble(*x_cloud, *y_cloud, profile, aopts);
        Eigen::MatrixXd approx = factors->g * factors->h.transpose();
        report["empirical_max_error"] = (k.entries - approx).cwiseAbs().maxCoeff();
        if (cfg.export_factors) {
            if (cfg.matrix_format == "bin") {
                std::ostringstream gs(std::ios::out | std::ios::binary);
                write_matrix_binary(gs, factors->g);
                write_text_file((dir / "factors_g.bin").string(), gs.str());
                std::ostringstream hs(std::ios::out | std::ios::binary);
                write_matrix_binary(hs, factors->h);
                write_text_file((dir / "factors_h.bin").string(), hs.str());
            } else {
                std::ostringstream gs;
                write_csv_preamble(gs, config);
                write_matrix_csv(gs, factors->g);
                write_text_file((dir / "factors_g.csv").string(), gs.str());
                std::ostringstream hs;
                write_csv_preamble(hs, config);
                write_matrix_csv(hs, factors->h);
                write_text_file((dir / "factors_h.csv").string(), hs.str());
            }
        }
    }
    write_text_file((dir / "report.json").string(),
                    with_envelope(config, std::move(report)).dump(2) + "\n");
}

// ---- bounds ----------------------------------------------------------------

struct BoundsConfig {
    CommonOpts common;
    std::string profile = "gaussian";
    std::string construction = "cheb";
    double diameter = 1.0;
    double h = 1.0;
    std::vector<int> n_list{2, 4, 8};
    double rho_sq = 0.0;  // 0: auto per order
    double bound_c = 0.0;
    double v_q = 0.0;
    int q = 2;
    std::vector<double> delta_list;
    int d = 100;
    double sigma_d_sq = -1.0;
    std::vector<int> mf_list{1};
    std::vector<int> mt_list{9};
    double norm_f_inf = 0.0;
    double d_x = 0.0, d_y = 0.0;
    int window_order = 7;
};

inline json to_config_json(const BoundsConfig& c) {
    return json{{"command", "bounds"},   {"profile", c.profile},
                {"construction", c.construction}, {"D", c.diameter},
                {"h", c.h},              {"n_list", c.n_list},
                {"rho_sq", c.rho_sq},    {"C", c.bound_c},
                {"vq", c.v_q},           {"q", c.q},
                {"delta_list", c.delta_list}, {"d", c.d},
                {"sigma_d_sq", c.sigma_d_sq}, {"mf_list", c.mf_list},
                {"mt_list", c.mt_list},  {"norm_f_inf", c.norm_f_inf},
                {"dx", c.d_x},           {"dy", c.d_y},
                {"window_order", c.window_order}, {"seed", c.common.seed}};
}

inline void run_bounds(const BoundsConfig& cfg) {
    auto dir = ensure_out_dir(cfg.common);
    auto config = to_config_json(cfg);
    auto profile = profile_by_name(cfg.profile, cfg.h, cfg.diameter);

    Table table;
    table.columns = {"construction", "n",          "mf",          "mt",       "delta",
                     "analytic_bound", "finite_bound", "taylor_part", "fourier_part",
                     "ft_bound",     "prob_analytic", "prob_finite", "probability",
                     "vacuous",      "rho_sq",     "C",           "V_q",      "q"};

    const std::string blank;
    if (cfg.construction == "cheb") {
        for (int n : cfg.n_list) {
            double rho_sq = cfg.rho_sq, c_est = cfg.bound_c;
            if (rho_sq <= 0.0) {
                auto choice = auto_rho(profile.fc, 0.0, cfg.diameter * cfg.diameter, n);
                rho_sq = choice.rho_sq;
                c_est = choice.bound_c;
            } else if (c_est <= 0.0) {
                c_est = estimate_ellipse_bound(profile.fc, 0.0, cfg.diameter * cfg.diameter,
                                               rho_sq, 256);
            }
            double analytic = bound_analytic(rho_sq, c_est, n);
            std::string finite = blank;
            if (cfg.v_q > 0.0 && n > cfg.q)
                finite = format_double(bound_finite_smooth(cfg.v_q, cfg.diameter, cfg.q, n));

            auto emit_row = [&](const std::string& delta_s, const std::string& prob_a,
                                const std::string& prob_f, const std::string& prob,
                                const std::string& vac) {
                table.rows.push_back({"cheb", std::to_string(n), blank, blank, delta_s,
                                      format_double(analytic), finite, blank, blank, blank,
                                      prob_a, prob_f, prob, vac, format_double(rho_sq),
                                      format_double(c_est),
                                      cfg.v_q > 0 ? format_double(cfg.v_q) : blank,
                                      std::to_string(cfg.q)});
            };
            if (cfg.delta_list.empty()) {
                emit_row(blank, blank, blank, blank, blank);
                continue;
            }
            for (double delta : cfg.delta_list) {
                std::string prob_a = blank, prob_f = blank, prob = blank, vac = blank;
                double scale = cfg.diameter * cfg.diameter * (rho_sq - 1.0 / rho_sq);
                if (scale > delta * delta)
                    prob_a = format_double(prob_bound_analytic(c_est, cfg.diameter, delta, rho_sq, n));
                if (cfg.v_q > 0.0 && n > cfg.q)
                    prob_f = format_double(prob_bound_finite(cfg.v_q, delta, cfg.q, n));
                if (cfg.sigma_d_sq >= 0.0) {
                    ConcentrationParams params;
                    params.diameter = cfg.diameter;
                    params.d = cfg.d;
                    params.sigma_d_sq = cfg.sigma_d_sq;
                    auto b = bernstein_probability(delta, params);
                    prob = format_double(b.value);
                    vac = b.vacuous ? "true" : "false";
                }
                emit_row(format_double(delta), prob_a, prob_f, prob, vac);
            }
        }
    } else if (cfg.construction == "ft") {
        auto pp = periodize(profile, cfg.window_order);
        double v_q = cfg.v_q > 0.0 ? cfg.v_q : estimate_total_variation(pp, cfg.q);
        double sup = cfg.norm_f_inf;
        if (sup <= 0.0) {
            for (int m = 0; m < 4096; ++m)
                sup = std::max(sup, std::abs(pp(-0.5 * pp.period() + pp.period() * m / 4096)));
        }
        double d_x = cfg.d_x > 0.0 ? cfg.d_x : cfg.diameter;
        double d_y = cfg.d_y > 0.0 ? cfg.d_y : cfg.diameter;
        if (cfg.mf_list.size() != cfg.mt_list.size())
            throw constraint_error("bounds: --mf-list and --mt-list must pair up");
        for (std::size_t i = 0; i < cfg.mf_list.size(); ++i) {
            auto b = ft_error_bound(sup, d_x, d_y, cfg.diameter, cfg.mt_list[i], v_q, cfg.q,
                                    cfg.mf_list[i]);
            table.rows.push_back({"ft", blank, std::to_string(cfg.mf_list[i]),
                                  std::to_string(cfg.mt_list[i]), blank, blank, blank,
                                  format_double(b.taylor_part), format_double(b.fourier_part),
                                  format_double(b.total), blank, blank, blank, blank, blank,
                                  blank, format_double(v_q), std::to_string(cfg.q)});
        }
    } else {
        throw constraint_error("bounds: construction must be cheb or ft");
    }
    write_table(dir / "bounds", table, config, cfg.common.format);
}

// ---- rank-sweep --------------------------------------------------------------

struct RankSweepConfig {
    CommonOpts common;
    std::string profile = "gaussian";
    std::vector<int> d_list{2, 4};
    std::vector<double> tol_list{1e-1, 1e-2};
    std::vector<std::string> norm_list{"max"};
    std::vector<std::string> scheme_list{"endpoint"};
    std::string scenario = "complete";
    long n = 1000;
    double p = 0.3;
    std::string h_policy = "sqrt-d";
    double h = 1.0;
    int repeats = 5;
};

inline json to_config_json(const RankSweepConfig& c) {
    return json{{"command", "rank-sweep"}, {"profile", c.profile},   {"d_list", c.d_list},
                {"tol_list", c.tol_list},  {"norm_list", c.norm_list},
                {"scheme_list", c.scheme_list},                      {"scenario", c.scenario},
                {"n", c.n},                {"p", c.p},               {"h_policy", c.h_policy},
                {"h", c.h},                {"repeats", c.repeats},   {"seed", c.common.seed},
                {"threads", c.common.threads}};
}

inline void run_rank_sweep(const RankSweepConfig& cfg) {
    auto dir = ensure_out_dir(cfg.common);
    auto config = to_config_json(cfg);
    check_point_cap(cfg.n, cfg.common);
    if (cfg.repeats < 1) throw constraint_error("rank-sweep: repeats must be >= 1");

    Table table;
    table.columns = {"d", "scheme", "tol", "norm", "rank", "mean", "std"};
    CloudSpec scenario_spec;
    scenario_spec.scenario = cfg.scenario;
    auto boxes = boxes_for(scenario_spec);

    for (int d : cfg.d_list) {
        for (const auto& scheme : cfg.scheme_list) {
            std::vector<std::vector<long>> cell(cfg.tol_list.size() * cfg.norm_list.size());
            for (int rep = 0; rep < cfg.repeats; ++rep) {
                CloudSpec spec;
                spec.scheme = scheme;
                spec.n = cfg.n;
                spec.d = d;
                spec.p = cfg.p;
                spec.halton_offset = 2 * static_cast<std::uint64_t>(rep) * static_cast<std::uint64_t>(cfg.n);
                std::uint64_t sx = cfg.common.seed + 1000003ULL * static_cast<std::uint64_t>(rep);
                auto x = make_cloud(spec, boxes.x_lo, boxes.x_hi, sx);
                spec.halton_offset += static_cast<std::uint64_t>(cfg.n);
                auto y = make_cloud(spec, boxes.y_lo, boxes.y_hi, sx + 1);
                double h = resolve_bandwidth(bandwidth_policy_from_string(cfg.h_policy), cfg.h, x, y);
                auto profile = profile_by_name(cfg.profile, h, pair_diameter(boxes, d));
                AssembleOptions aopts;
                aopts.threads = cfg.common.threads;
                auto k = assemble(x, y, profile, aopts);
                auto s = compute_svd(k.entries);
                std::size_t cell_idx = 0;
                for (const auto& norm : cfg.norm_list)
                    for (double tol : cfg.tol_list)
                        cell[cell_idx++].push_back(
                            numerical_rank(k.entries, s, tol, rank_norm_from_string(norm)));
            }
            std::size_t cell_idx = 0;
            for (const auto& norm : cfg.norm_list)
                for (double tol : cfg.tol_list) {
                    const auto& ranks = cell[cell_idx++];
                    double mean = 0.0;
                    for (long r : ranks) mean += static_cast<double>(r);
                    mean /= static_cast<double>(ranks.size());
                    double var = 0.0;
                    for (long r : ranks) var += (static_cast<double>(r) - mean) * (static_cast<double>(r) - mean);
                    double sd = ranks.size() > 1 ? std::sqrt(var / (static_cast<double>(ranks.size()) - 1.0)) : 0.0;
                    table.rows.push_back({std::to_string(d), scheme, format_double(tol), norm,
                                          std::to_string(ranks.front()), format_double(mean),
                                          format_double(sd)});
                }
        }
    }
    write_table(dir / "rank_sweep", table, config, cfg.common.format);
}

// ---- spectrum ------------------------------------------------------------------

struct SpectrumConfig {
    CommonOpts common;
    std::string profile = "gaussian";
    int d = 3;
    long n = 500;
    std::string scheme = "endpoint";
    double p = 0.3;
    double a = 0.0, b = 1.0;
    std::string h_policy = "sqrt-d";
    double h = 1.0;
    std::vector<double> tol_list{1e-1, 1e-2, 1e-3};
    std::vector<std::string> norm_list{"fro", "two", "max"};
    double threshold_significant = 4.0;
    double threshold_subtle = 2.0;
    std::string matrix_in;  // bypass generation, analyze a matrix file
};

inline json to_config_json(const SpectrumConfig& c) {
    return json{{"command", "spectrum"},  {"profile", c.profile}, {"d", c.d},
                {"n", c.n},               {"scheme", c.scheme},   {"p", c.p},
                {"a", c.a},               {"b", c.b},             {"h_policy", c.h_policy},
                {"h", c.h},               {"tol_list", c.tol_list},
                {"norm_list", c.norm_list},
                {"threshold_significant", c.threshold_significant},
                {"threshold_subtle", c.threshold_subtle},         {"matrix_in", c.matrix_in},
                {"seed", c.common.seed},  {"threads", c.common.threads}};
}

inline Eigen::MatrixXd load_matrix(const std::string& path) {
    auto text = read_text_file(path);
    if (text.size() >= 4 && text.compare(0, 4, "RBFK") == 0) {
        std::istringstream is(text, std::ios::in | std::ios::binary);
        return read_matrix_binary(is);
    }
    std::istringstream is(text);
    return read_matrix_csv(is);
}

inline void run_spectrum(const SpectrumConfig& cfg) {
    auto dir = ensure_out_dir(cfg.common);
    auto config = to_config_json(cfg);

    KernelMatrix k;
    if (!cfg.matrix_in.empty()) {
        k.entries = load_matrix(cfg.matrix_in);
        k.profile = "file";
    } else {
        check_point_cap(cfg.n, cfg.common);
        CloudSpec spec;
        spec.scheme = cfg.scheme;
        spec.n = cfg.n;
        spec.d = cfg.d;
        spec.p = cfg.p;
        auto cloud = make_cloud(spec, cfg.a, cfg.b, cfg.common.seed);
        double h = resolve_bandwidth(bandwidth_policy_from_string(cfg.h_policy), cfg.h, cloud, cloud);
        auto profile = profile_by_name(cfg.profile, h, box_diagonal(cfg.a, cfg.b, cfg.d));
        AssembleOptions aopts;
        aopts.threads = cfg.common.threads;
        k = assemble(cloud, cloud, profile, aopts);
        k.bandwidth_policy = cfg.h_policy;
    }

    std::vector<RankNorm> norms;
    for (const auto& n : cfg.norm_list) norms.push_back(rank_norm_from_string(n));
    auto rep = build_spectrum_report(k, cfg.d, cfg.tol_list, norms, cfg.threshold_significant,
                                     cfg.threshold_subtle);

    write_text_file((dir / "spectrum.json").string(),
                    with_envelope(config, to_json(rep)).dump(2) + "\n");

    std::ostringstream os;
    write_csv_preamble(os, config);
    os << "index,sigma,ratio_next\n";
    for (std::size_t i = 0; i < rep.singular_values.size(); ++i) {
        os << (i + 1) << "," << format_double(rep.singular_values[i]) << ",";
        if (i + 1 < rep.singular_values.size() && rep.singular_values[i + 1] > 0.0)
            os << format_double(rep.singular_values[i] / rep.singular_values[i + 1]);
        os << "\n";
    }
    write_text_file((dir / "singular_values.csv").string(), os.str());
}

// ---- reconstruct -----------------------------------------------------------------

struct ReconstructConfig {
    CommonOpts common;
    std::string profile = "gaussian";
    int d = 6;
    long n = 1000;
    std::string scheme = "endpoint";
    double p = 0.3;
    double a = 0.0, b = 1.0;
    std::string h_policy = "max-dist";
    double h = 1.0;
    std::vector<long> ranks;
    long rank_max = 40;
    std::vector<std::string> methods{"svd"};
    long oversample = 30;
    int power_iters = 2;
    int repeats = 1;
    std::string matrix_in;
};

inline json to_config_json(const ReconstructConfig& c) {
    return json{{"command", "reconstruct"}, {"profile", c.profile},  {"d", c.d},
                {"n", c.n},                 {"scheme", c.scheme},    {"p", c.p},
                {"a", c.a},                 {"b", c.b},              {"h_policy", c.h_policy},
                {"h", c.h},                 {"ranks", c.ranks},      {"rank_max", c.rank_max},
                {"methods", c.methods},     {"oversample", c.oversample},
                {"power_iters", c.power_iters},                     {"repeats", c.repeats},
                {"leverage", "exact-leverage"},
                {"matrix_in", c.matrix_in}, {"seed", c.common.seed}, {"threads", c.common.threads}};
}

inline void run_reconstruct(const ReconstructConfig& cfg) {
    auto dir = ensure_out_dir(cfg.common);
    auto config = to_config_json(cfg);

    Eigen::MatrixXd k;
    if (!cfg.matrix_in.empty()) {
        k = load_matrix(cfg.matrix_in);
    } else {
        check_point_cap(cfg.n, cfg.common);
        CloudSpec spec;
        spec.scheme = cfg.scheme;
        spec.n = cfg.n;
        spec.d = cfg.d;
        spec.p = cfg.p;
        auto cloud = make_cloud(spec, cfg.a, cfg.b, cfg.common.seed);
        double h = resolve_bandwidth(bandwidth_policy_from_string(cfg.h_policy), cfg.h, cloud, cloud);
        auto profile = profile_by_name(cfg.profile, h, box_diagonal(cfg.a, cfg.b, cfg.d));
        AssembleOptions aopts;
        aopts.threads = cfg.common.threads;
        k = assemble(cloud, cloud, profile, aopts).entries;
    }

    std::vector<long> ranks = cfg.ranks;
    if (ranks.empty())
        for (long r = 1; r <= std::min<long>(cfg.rank_max, std::min(k.rows(), k.cols())); ++r)
            ranks.push_back(r);

    auto s = compute_svd(k);
    ReconstructOptions opts;
    opts.oversample = cfg.oversample;
    opts.power_iters = cfg.power_iters;
    opts.repeats = cfg.repeats;
    opts.seed = cfg.common.seed;
    auto curve = reconstruction_curve(k, s, ranks, cfg.methods, opts);

    Table table;
    table.columns = {"rank", "method", "rel_fro_error"};
    for (const auto& e : curve)
        table.rows.push_back({std::to_string(e.rank), e.method, format_double(e.rel_fro_error)});
    write_table(dir / "reconstruction", table, config, cfg.common.format);
}

// ---- option wiring ---------------------------------------------------------------

inline void add_common(CLI::App* cmd, CommonOpts& common) {
    cmd->add_option("--out", common.out, "output directory");
    cmd->add_option("--seed", common.seed, "random seed");
    cmd->add_option("--threads", common.threads, "worker thread cap (0: hardware)");
    cmd->add_option("--format", common.format, "table output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--unsafe-n", common.unsafe_n, "lift the point-count cap");
}

inline int cli_main(int argc, char** argv) {
    CLI::App app{"explicit low-rank separable representations of radial kernels"};
    app.require_subcommand(1);

    SampleConfig sample_cfg;
    auto* sample_cmd = app.add_subcommand("sample", "generate reproducible point clouds");
    add_common(sample_cmd, sample_cfg.common);
    sample_cmd->add_option("--scheme", sample_cfg.cloud.scheme, "coordinate sampler")
        ->check(CLI::IsMember({"uniform", "endpoint", "halton"}));
    sample_cmd->add_option("--n", sample_cfg.cloud.n, "points per cloud");
    sample_cmd->add_option("--d", sample_cfg.cloud.d, "dimension");
    sample_cmd->add_option("--a", sample_cfg.cloud.a);
    sample_cmd->add_option("--b", sample_cfg.cloud.b);
    sample_cmd->add_option("--p", sample_cfg.cloud.p, "endpoint mass per side");
    sample_cmd->add_option("--offset", sample_cfg.cloud.halton_offset);
    sample_cmd->add_option("--scenario", sample_cfg.cloud.scenario, "overlap scenario boxes")
        ->check(CLI::IsMember({"complete", "partial", "none"}));
    sample_cmd->add_option("--which", sample_cfg.which)->check(CLI::IsMember({"x", "y", "both"}));
    sample_cmd->add_option("--matrix-format", sample_cfg.matrix_format)
        ->check(CLI::IsMember({"csv", "bin"}));

    FactorizeConfig fac_cfg;
    auto* fac_cmd = app.add_subcommand("factorize", "build a separable plan and factor matrices");
    add_common(fac_cmd, fac_cfg.common);
    fac_cmd->add_option("--profile", fac_cfg.profile);
    fac_cmd->add_option("--construction", fac_cfg.construction, "cheb: polynomial route; ft: trigonometric route")
        ->check(CLI::IsMember({"cheb", "ft"}));
    fac_cmd->add_option("--d", fac_cfg.d);
    fac_cmd->add_option("--n", fac_cfg.n, "polynomial order");
    fac_cmd->add_option("--mf", fac_cfg.m_f, "fourier order M_f");
    fac_cmd->add_option("--mt", fac_cfg.m_t, "taylor order M_t");
    fac_cmd->add_option("--D", fac_cfg.diameter, "domain diameter bound; non-positive derives it from the clouds");
    fac_cmd->add_option("--bandwidth", fac_cfg.h);
    fac_cmd->add_option("--prune", fac_cfg.prune, "drop terms with contribution below this threshold");
    fac_cmd->add_option("--window-order", fac_cfg.window_order);
    fac_cmd->add_option("--quad-points", fac_cfg.quad_points);
    fac_cmd->add_option("--q", fac_cfg.q);
    fac_cmd->add_option("--vq", fac_cfg.v_q);
    fac_cmd->add_option("--dx", fac_cfg.d_x);
    fac_cmd->add_option("--dy", fac_cfg.d_y);
    fac_cmd->add_flag("--no-enforce-ratio", fac_cfg.no_enforce_ratio);
    fac_cmd->add_option("--points-x", fac_cfg.points_x, "cloud file (csv or binary); enables factor export and error reports");
    fac_cmd->add_option("--points-y", fac_cfg.points_y);
    fac_cmd->add_flag("--export-factors", fac_cfg.export_factors);
    fac_cmd->add_option("--matrix-format", fac_cfg.matrix_format)
        ->check(CLI::IsMember({"csv", "bin"}));

    BoundsConfig bounds_cfg;
    auto* bounds_cmd = app.add_subcommand("bounds", "tabulate error bounds across orders");
    add_common(bounds_cmd, bounds_cfg.common);
    bounds_cmd->add_option("--profile", bounds_cfg.profile);
    bounds_cmd->add_option("--construction", bounds_cfg.construction)
        ->check(CLI::IsMember({"cheb", "ft"}));
    bounds_cmd->add_option("--D", bounds_cfg.diameter);
    bounds_cmd->add_option("--bandwidth", bounds_cfg.h);
    bounds_cmd->add_option("--n-list", bounds_cfg.n_list)->delimiter(',');
    bounds_cmd->add_option("--rho-sq", bounds_cfg.rho_sq, "ellipse parameter; 0 searches automatically");
    bounds_cmd->add_option("--C", bounds_cfg.bound_c);
    bounds_cmd->add_option("--vq", bounds_cfg.v_q);
    bounds_cmd->add_option("--q", bounds_cfg.q);
    bounds_cmd->add_option("--delta-list", bounds_cfg.delta_list, "concentration radii for the probabilistic columns")->delimiter(',');
    bounds_cmd->add_option("--d", bounds_cfg.d);
    bounds_cmd->add_option("--sigma-d-sq", bounds_cfg.sigma_d_sq);
    bounds_cmd->add_option("--mf-list", bounds_cfg.mf_list)->delimiter(',');
    bounds_cmd->add_option("--mt-list", bounds_cfg.mt_list)->delimiter(',');
    bounds_cmd->add_option("--norm-f-inf", bounds_cfg.norm_f_inf);
    bounds_cmd->add_option("--dx", bounds_cfg.d_x);
    bounds_cmd->add_option("--dy", bounds_cfg.d_y);
    bounds_cmd->add_option("--window-order", bounds_cfg.window_order);

    RankSweepConfig sweep_cfg;
    auto* sweep_cmd = app.add_subcommand("rank-sweep", "numerical rank vs dimension sweep");
    add_common(sweep_cmd, sweep_cfg.common);
    sweep_cmd->add_option("--profile", sweep_cfg.profile);
    sweep_cmd->add_option("--d-list", sweep_cfg.d_list)->delimiter(',');
    sweep_cmd->add_option("--tol-list", sweep_cfg.tol_list)->delimiter(',');
    sweep_cmd->add_option("--norm-list", sweep_cfg.norm_list)->delimiter(',');
    sweep_cmd->add_option("--scheme-list", sweep_cfg.scheme_list)->delimiter(',');
    sweep_cmd->add_option("--scenario", sweep_cfg.scenario)
        ->check(CLI::IsMember({"complete", "partial", "none"}));
    sweep_cmd->add_option("--n", sweep_cfg.n);
    sweep_cmd->add_option("--p", sweep_cfg.p);
    sweep_cmd->add_option("--h-policy", sweep_cfg.h_policy)
        ->check(CLI::IsMember({"sqrt-d", "max-dist", "max-dist-sq", "fixed"}));
    sweep_cmd->add_option("--bandwidth", sweep_cfg.h);
    sweep_cmd->add_option("--repeats", sweep_cfg.repeats, "independent seeds per cell");

    SpectrumConfig spec_cfg;
    auto* spec_cmd = app.add_subcommand("spectrum", "singular-value spectrum analysis");
    add_common(spec_cmd, spec_cfg.common);
    spec_cmd->add_option("--profile", spec_cfg.profile);
    spec_cmd->add_option("--d", spec_cfg.d);
    spec_cmd->add_option("--n", spec_cfg.n);
    spec_cmd->add_option("--scheme", spec_cfg.scheme)
        ->check(CLI::IsMember({"uniform", "endpoint", "halton"}));
    spec_cmd->add_option("--p", spec_cfg.p);
    spec_cmd->add_option("--a", spec_cfg.a);
    spec_cmd->add_option("--b", spec_cfg.b);
    spec_cmd->add_option("--h-policy", spec_cfg.h_policy)
        ->check(CLI::IsMember({"sqrt-d", "max-dist", "max-dist-sq", "fixed"}));
    spec_cmd->add_option("--bandwidth", spec_cfg.h);
    spec_cmd->add_option("--tol-list", spec_cfg.tol_list)->delimiter(',');
    spec_cmd->add_option("--norm-list", spec_cfg.norm_list)->delimiter(',');
    spec_cmd->add_option("--threshold-significant", spec_cfg.threshold_significant);
    spec_cmd->add_option("--threshold-subtle", spec_cfg.threshold_subtle);
    spec_cmd->add_option("--matrix-in", spec_cfg.matrix_in, "analyze a matrix file instead of generated data");

    ReconstructConfig rec_cfg;
    auto* rec_cmd = app.add_subcommand("reconstruct", "reconstruction error vs rank curves");
    add_common(rec_cmd, rec_cfg.common);
    rec_cmd->add_option("--profile", rec_cfg.profile);
    rec_cmd->add_option("--d", rec_cfg.d);
    rec_cmd->add_option("--n", rec_cfg.n);
    rec_cmd->add_option("--scheme", rec_cfg.scheme)
        ->check(CLI::IsMember({"uniform", "endpoint", "halton"}));
    rec_cmd->add_option("--p", rec_cfg.p);
    rec_cmd->add_option("--a", rec_cfg.a);
    rec_cmd->add_option("--b", rec_cfg.b);
    rec_cmd->add_option("--h-policy", rec_cfg.h_policy, "bandwidth policy (see README)")
        ->check(CLI::IsMember({"sqrt-d", "max-dist", "max-dist-sq", "fixed"}));
    rec_cmd->add_option("--bandwidth", rec_cfg.h);
    rec_cmd->add_option("--ranks", rec_cfg.ranks)->delimiter(',');
    rec_cmd->add_option("--rank-max", rec_cfg.rank_max);
    rec_cmd->add_option("--methods", rec_cfg.methods, "svd, nystrom, randsvd")->delimiter(',');
    rec_cmd->add_option("--oversample", rec_cfg.oversample);
    rec_cmd->add_option("--power-iters", rec_cfg.power_iters);
    rec_cmd->add_option("--repeats", rec_cfg.repeats);
    rec_cmd->add_option("--matrix-in", rec_cfg.matrix_in);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*sample_cmd) run_sample(sample_cfg);
        if (*fac_cmd) run_factorize(fac_cfg);
        if (*bounds_cmd) run_bounds(bounds_cfg);
        if (*sweep_cmd) run_rank_sweep(sweep_cfg);
        if (*spec_cmd) run_spectrum(spec_cfg);
        if (*rec_cmd) run_reconstruct(rec_cfg);
        return 0;
    } catch (const constraint_error& e) {
        std::cerr << "constraint error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace rbfk::cli

namespace rbfk {
using cli::cli_main;
}  // namespace rbfk
