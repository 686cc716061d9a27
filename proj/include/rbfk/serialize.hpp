#pragma once

#include <json.hpp>

#include <Eigen/Core>

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rbfk/errors.hpp"
#include "rbfk/fourier_taylor.hpp"
#include "rbfk/pointgen.hpp"
#include "rbfk/separable.hpp"
#include "rbfk/spectrum.hpp"
#include "rbfk/version.hpp"

namespace rbfk {

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

using json = nlohmann::json;

// shortest decimal that round-trips the exact double
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---- separable plans ----------------------------------------------------

inline json to_json(const ChebPlan& plan) {
    json j;
    j["construction"] = "chebyshev";
    j["profile"] = plan.profile;
    j["bandwidth"] = plan.bandwidth;
    j["d"] = plan.d;
    j["n"] = plan.n;
    j["D"] = plan.diameter;
    j["declared_rank"] = plan.declared_rank;
    j["error_bound"] = plan.error_bound;
    j["bound"] = {{"kind", plan.bound_kind}, {"rho_sq", plan.rho_sq}, {"C", plan.bound_c},
                  {"q", plan.q},             {"V_q", plan.v_q}};
    j["prune"] = {{"threshold", plan.prune_threshold}, {"dropped", plan.pruned_count}};
    json terms = json::array();
    for (const auto& t : plan.terms)
        terms.push_back(json::array({t.l, t.k, t.j, t.alpha.exponents, t.coeff}));
    j["terms"] = std::move(terms);
    return j;
}

inline ChebPlan cheb_plan_from_json(const json& j) {
    if (j.at("construction") != "chebyshev")
        throw constraint_error("cheb_plan_from_json: wrong construction tag");
    ChebPlan plan;
    plan.profile = j.at("profile");
    plan.bandwidth = j.at("bandwidth");
    plan.d = j.at("d");
    plan.n = j.at("n");
    plan.diameter = j.at("D");
    plan.declared_rank = j.at("declared_rank");
    plan.error_bound = j.at("error_bound");
    plan.bound_kind = j.at("bound").at("kind");
    plan.rho_sq = j.at("bound").at("rho_sq");
    plan.bound_c = j.at("bound").at("C");
    plan.q = j.at("bound").at("q");
    plan.v_q = j.at("bound").at("V_q");
    plan.prune_threshold = j.at("prune").at("threshold");
    plan.pruned_count = j.at("prune").at("dropped");
    for (const auto& t : j.at("terms")) {
        ChebTerm term;
        term.l = t.at(0);
        term.k = t.at(1);
        term.j = t.at(2);
        term.alpha = MultiIndex{t.at(3).get<std::vector<std::uint32_t>>()};
        term.coeff = t.at(4);
        plan.terms.push_back(std::move(term));
    }
    return plan;
}

inline json to_json(const FourierTaylorPlan& plan) {
    json j;
    j["construction"] = "fourier_taylor";
    j["profile"] = plan.profile;
    j["bandwidth"] = plan.bandwidth;
    j["d"] = plan.d;
    j["M_f"] = plan.m_f;
    j["M_t"] = plan.m_t;
    j["D"] = plan.diameter;
    j["omega"] = plan.omega;
    j["window_order"] = plan.window_order;
    j["centers"] = {
        {"x", std::vector<double>(plan.x_center.data(), plan.x_center.data() + plan.x_center.size())},
        {"y", std::vector<double>(plan.y_center.data(), plan.y_center.data() + plan.y_center.size())}};
    json coeffs = json::array();
    for (const auto& a : plan.coeffs) coeffs.push_back(json::array({a.real(), a.imag()}));
    j["fourier_coeffs"] = std::move(coeffs);
    j["declared_rank"] = plan.declared_rank;
    j["realified_columns"] = plan.realified_columns;
    j["error_bound"] = plan.error_bound;
    j["bound"] = {{"heuristic", plan.bound_is_heuristic},
                  {"taylor_part", plan.taylor_part},
                  {"fourier_part", plan.fourier_part},
                  {"q", plan.q},
                  {"V_q", plan.v_q},
                  {"D_x", plan.d_x},
                  {"D_y", plan.d_y},
                  {"norm_f_inf", plan.norm_f_inf}};
    json terms = json::array();
    for (const auto& t : plan.terms)
        terms.push_back(
            json::array({t.j, t.alpha.exponents, json::array({t.coeff.real(), t.coeff.imag()})}));
    j["terms"] = std::move(terms);
    return j;
}

inline FourierTaylorPlan ft_plan_from_json(const json& j) {
    if (j.at("construction") != "fourier_taylor")
        throw constraint_error("ft_plan_from_json: wrong construction tag");
    FourierTaylorPlan plan;
    plan.profile = j.at("profile");
    plan.bandwidth = j.at("bandwidth");
    plan.d = j.at("d");
    plan.m_f = j.at("M_f");
    plan.m_t = j.at("M_t");
    plan.diameter = j.at("D");
    plan.omega = j.at("omega");
    plan.window_order = j.at("window_order");
    auto xs = j.at("centers").at("x").get<std::vector<double>>();
    auto ys = j.at("centers").at("y").get<std::vector<double>>();
    plan.x_center = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<long>(xs.size()));
    plan.y_center = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<long>(ys.size()));
    for (const auto& a : j.at("fourier_coeffs"))
        plan.coeffs.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    plan.declared_rank = j.at("declared_rank");
    plan.realified_columns = j.at("realified_columns");
    plan.error_bound = j.at("error_bound");
    plan.bound_is_heuristic = j.at("bound").at("heuristic");
    plan.taylor_part = j.at("bound").at("taylor_part");
    plan.fourier_part = j.at("bound").at("fourier_part");
    plan.q = j.at("bound").at("q");
    plan.v_q = j.at("bound").at("V_q");
    plan.d_x = j.at("bound").at("D_x");
    plan.d_y = j.at("bound").at("D_y");
    plan.norm_f_inf = j.at("bound").at("norm_f_inf");
    for (const auto& t : j.at("terms")) {
        FtTerm term;
        term.j = t.at(0);
        term.alpha = MultiIndex{t.at(1).get<std::vector<std::uint32_t>>()};
        term.coeff = {t.at(2).at(0).get<double>(), t.at(2).at(1).get<double>()};
        plan.terms.push_back(std::move(term));
    }
    return plan;
}

inline json to_json(const SpectrumReport& rep) {
    json j;
    j["singular_values"] = rep.singular_values;
    json ranks = json::array();
    for (const auto& r : rep.ranks)
        ranks.push_back({{"norm", r.norm}, {"tol", r.tol}, {"rank", r.rank}, {"rerise", r.rerise}});
    j["ranks"] = std::move(ranks);
    j["thresholds"] = {{"significant", rep.threshold_significant}, {"subtle", rep.threshold_subtle}};
    auto spikes = [](const std::vector<RatioSpike>& v) {
        json a = json::array();
        for (const auto& s : v)
            a.push_back({{"index", s.index}, {"ratio", s.ratio}, {"capped", s.capped}});
        return a;
    };
    j["spikes_significant"] = spikes(rep.spikes_significant);
    j["spikes_subtle"] = spikes(rep.spikes_subtle);
    j["predicted_indices"] = rep.predicted_indices;
    j["grouping"] = rep.grouping;
    return j;
}

// ---- CSV ----------------------------------------------------------------

// metadata preamble carried by every CSV output; the body below it is
// reproducible byte for byte from the embedded config
inline void write_csv_preamble(std::ostream& os, const json& config) {
    os << "# rbfk " << version << "\n";
    os << "# generator " << generator_id << "\n";
    os << "# config " << config.dump() << "\n";
}

inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m,
                             const std::string& column_prefix = "term_") {
    for (long c = 0; c < m.cols(); ++c) os << (c ? "," : "") << column_prefix << c;
    os << "\n";
    for (long i = 0; i < m.rows(); ++i) {
        for (long c = 0; c < m.cols(); ++c) os << (c ? "," : "") << format_double(m(i, c));
        os << "\n";
    }
}

inline Eigen::MatrixXd read_matrix_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && (std::isalpha(static_cast<unsigned char>(line[0])) != 0)) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd m(static_cast<long>(rows.size()), static_cast<long>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw constraint_error("read_matrix_csv: ragged rows");
        for (std::size_t c = 0; c < rows[i].size(); ++c)
            m(static_cast<long>(i), static_cast<long>(c)) = rows[i][c];
    }
    return m;
}

// ---- raw binary matrices ------------------------------------------------
// 16-byte header: magic "RBFK", u32 version, u32 rows, u32 cols; then
// row-major little-endian doubles.

inline constexpr std::uint32_t matrix_format_version = 1;

inline void write_matrix_binary(std::ostream& os, const Eigen::MatrixXd& m) {
    os.write("RBFK", 4);
    std::uint32_t header[3] = {matrix_format_version, static_cast<std::uint32_t>(m.rows()),
                               static_cast<std::uint32_t>(m.cols())};
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (long i = 0; i < m.rows(); ++i)
        for (long c = 0; c < m.cols(); ++c) {
            double v = m(i, c);
            os.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

inline Eigen::MatrixXd read_matrix_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RBFK", 4) != 0)
        throw constraint_error("read_matrix_binary: bad magic");
    std::uint32_t header[3];
    is.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!is || header[0] != matrix_format_version)
        throw constraint_error("read_matrix_binary: unsupported version");
    Eigen::MatrixXd m(header[1], header[2]);
    for (long i = 0; i < m.rows(); ++i)
        for (long c = 0; c < m.cols(); ++c) {
            double v;
            is.read(reinterpret_cast<char*>(&v), sizeof(v));
            if (!is) throw constraint_error("read_matrix_binary: truncated payload");
            m(i, c) = v;
        }
    return m;
}

// ---- point clouds -------------------------------------------------------

inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
    for (long i = 0; i < cloud.size(); ++i) {
        for (int c = 0; c < cloud.dim(); ++c)
            os << (c ? "," : "") << format_double(cloud.points(i, c));
        os << "\n";
    }
}

inline json cloud_metadata(const PointCloud& cloud) {
    json j;
    j["scheme"] = to_string(cloud.scheme);
    j["seed"] = cloud.seed;
    j["n"] = cloud.size();
    j["d"] = cloud.dim();
    j["endpoint_p"] = cloud.endpoint_p;
    j["halton_offset"] = cloud.halton_offset;
    j["box_lo"] = std::vector<double>(cloud.box_lo.data(), cloud.box_lo.data() + cloud.box_lo.size());
    j["box_hi"] = std::vector<double>(cloud.box_hi.data(), cloud.box_hi.data() + cloud.box_hi.size());
    j["generator"] = generator_id;
    j["version"] = version;
    return j;
}

// Wraps a coordinate matrix into a cloud; without metadata the box falls
// back to the coordinate-wise hull.
inline PointCloud cloud_from_points(Eigen::MatrixXd points, const json* metadata = nullptr) {
    PointCloud cloud;
    cloud.points = std::move(points);
    int d = cloud.dim();
    cloud.box_lo = Eigen::VectorXd::Constant(d, 0.0);
    cloud.box_hi = Eigen::VectorXd::Constant(d, 1.0);
    if (d > 0 && cloud.size() > 0) {
        cloud.box_lo = cloud.points.colwise().minCoeff();
        cloud.box_hi = cloud.points.colwise().maxCoeff();
    }
    if (metadata) {
        cloud.scheme = scheme_from_string(metadata->at("scheme"));
        cloud.seed = metadata->at("seed");
        cloud.endpoint_p = metadata->at("endpoint_p");
        cloud.halton_offset = metadata->at("halton_offset");
        auto lo = metadata->at("box_lo").get<std::vector<double>>();
        auto hi = metadata->at("box_hi").get<std::vector<double>>();
        if (static_cast<int>(lo.size()) == d) {
            cloud.box_lo = Eigen::Map<Eigen::VectorXd>(lo.data(), d);
            cloud.box_hi = Eigen::Map<Eigen::VectorXd>(hi.data(), d);
        }
    }
    return cloud;
}

inline PointCloud read_cloud_csv(std::istream& is, const json* metadata = nullptr) {
    return cloud_from_points(read_matrix_csv(is), metadata);
}

// ---- small file helpers ---------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw resource_error("cannot open " + path + " for writing", 0);
    os << body;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw constraint_error("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace rbfk
