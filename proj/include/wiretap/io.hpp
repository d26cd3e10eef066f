#pragma once

// Serialization: locale-independent numeric formatting, CSV helpers, and
// JSON report emission.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wiretap/solver.hpp"

namespace wiretap {

/// Shortest-round-trip decimal rendering at 12 significant digits, dot
/// decimal separator regardless of locale.
inline std::string fmt_num(double v, int precision = 12) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return static_cast<int>(i);
        throw std::runtime_error("CSV column not found: " + name);
    }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            double v = 0.0;
            auto res = std::from_chars(c.data(), c.data() + c.size(), v);
            if (res.ec != std::errc{})
                throw std::runtime_error("bad numeric cell '" + c + "' in " + path.string());
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (first)
        throw std::runtime_error("empty CSV file: " + path.string());
    return t;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

inline nlohmann::ordered_json input_to_json(const SymmetricInput& in) {
    return {{"amplitude", in.amplitude},
            {"half_points", in.half_points},
            {"half_weights", in.half_weights}};
}

inline SymmetricInput input_from_json(const nlohmann::json& j) {
    SymmetricInput in;
    in.amplitude = j.at("amplitude").get<double>();
    in.half_points = j.at("half_points").get<std::vector<double>>();
    in.half_weights = j.at("half_weights").get<std::vector<double>>();
    return in;
}

inline nlohmann::ordered_json kkt_to_json(const KktReport& k) {
    nlohmann::ordered_json j;
    j["valid"] = k.valid;
    j["capacity_proxy_nats"] = k.capacity_proxy;
    j["max_profile_violation_nats"] = k.max_profile_violation;
    j["candidate_x"] = k.candidate_x;
    auto viol = nlohmann::ordered_json::array();
    for (const auto& [x, dev] : k.support_violations)
        viol.push_back({{"half_point", x}, {"deviation_nats", dev}});
    j["support_violations"] = viol;
    return j;
}

inline nlohmann::ordered_json report_to_json(const SolveReport& r, const ChannelPair& ch) {
    nlohmann::ordered_json j;
    j["sigma1"] = ch.sigma1;
    j["sigma2"] = ch.sigma2;
    j["amplitude"] = r.input.amplitude;
    j["epsilon"] = r.epsilon;
    j["capacity_nats"] = r.capacity;
    j["converged"] = r.converged;
    j["input"] = input_to_json(r.input);
    j["kkt"] = kkt_to_json(r.kkt);
    j["mi_legit_nats"] = r.mi_legit;
    j["mi_eve_nats"] = r.mi_eve;
    j["gaussian_mi_eve_nats"] = r.gaussian_mi_eve;
    j["input_variance"] = r.input_variance;
    j["full_support_size"] = r.full_support_size;
    j["card_lower_bound"] = r.card_lower_bound;
    j["card_upper_cap"] = r.card_upper_cap;
    j["outer_iterations"] = r.outer_iterations;
    j["cluster_events"] = r.cluster_events;
    j["update_events"] = r.update_events;
    j["near_transition"] = r.near_transition;
    return j;
}

/// Full symmetric support expanded to (x, probability) rows, increasing x.
inline std::vector<std::pair<double, double>> full_pmf(const SymmetricInput& in) {
    std::vector<std::pair<double, double>> pmf;
    for (std::size_t i = in.half_size(); i-- > 0;)
        if (in.half_points[i] > 0.0)
            pmf.emplace_back(-in.half_points[i], 0.5 * in.half_weights[i]);
    for (std::size_t i = 0; i < in.half_size(); ++i)
        pmf.emplace_back(in.half_points[i],
                         in.half_points[i] == 0.0 ? in.half_weights[i]
                                                  : 0.5 * in.half_weights[i]);
    return pmf;
}

/// Fold a full symmetric pmf back into half form, checking symmetry and
/// normalization. Throws std::invalid_argument naming the violation.
inline SymmetricInput fold_pmf(const std::vector<std::pair<double, double>>& pmf,
                               double tol = 1e-8) {
    std::vector<std::pair<double, double>> rows = pmf;
    std::sort(rows.begin(), rows.end());
    double total = 0.0;
    for (const auto& [x, p] : rows)
        total += p;
    if (std::abs(total - 1.0) > tol)
        throw std::invalid_argument("pmf probabilities sum to " + fmt_num(total) + ", not 1");
    SymmetricInput in;
    for (const auto& [x, p] : rows) {
        if (x < 0.0)
            continue;
        if (x == 0.0) {
            in.half_points.push_back(0.0);
            in.half_weights.push_back(p);
            continue;
        }
        // locate the mirror point
        bool found = false;
        for (const auto& [xm, pm] : rows) {
            if (std::abs(xm + x) <= 1e-9) {
                if (std::abs(pm - p) > tol)
                    throw std::invalid_argument("pmf not symmetric at x=" + fmt_num(x));
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("pmf missing mirror point for x=" + fmt_num(x));
        in.half_points.push_back(x);
        in.half_weights.push_back(2.0 * p);
    }
    if (in.half_points.empty())
        throw std::invalid_argument("pmf has no nonnegative support points");
    in.amplitude = in.half_points.back();
    return in;
}

}  // namespace wiretap
