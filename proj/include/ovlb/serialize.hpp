#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ovlb/errors.hpp"
#include "ovlb/indicator.hpp"
#include "ovlb/linalg.hpp"
#include "ovlb/moments.hpp"
#include "ovlb/spectrum.hpp"

namespace ovlb {

using nlohmann::json;

/// Shortest decimal string that round-trips to the same double; "nan" for
/// unknown quantities so CSV cells stay greppable.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    return json(x).dump();
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Replace-by-rename write: the target never holds a half-written file.
inline void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw input_error("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw input_error("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw input_error("cannot move '" + tmp + "' onto '" + path + "': " + ec.message());
}

inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw input_error(origin + ": malformed JSON: " + e.what());
    }
}

// --- spectral models --------------------------------------------------------

inline json model_to_json(const SpectralModel& S, const json& metadata = json()) {
    json j;
    j["eigenvalues"] = S.eigenvalues;
    j["overlaps"] = S.overlaps;
    j["complete"] = S.complete;
    if (S.dropped_mass != 0.0) j["dropped_mass"] = S.dropped_mass;
    if (!metadata.is_null()) j["metadata"] = metadata;
    return j;
}

inline SpectralModel model_from_json(const json& j, const std::string& origin = "model") {
    try {
        SpectralModel S;
        S.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        S.overlaps = j.at("overlaps").get<std::vector<double>>();
        S.complete = j.value("complete", true);
        S.dropped_mass = j.value("dropped_mass", 0.0);
        S.validate();
        return S;
    } catch (const json::exception& e) {
        throw input_error(origin + ": bad spectral model: " + e.what());
    }
}

inline SpectralModel load_model(const std::string& path) {
    return model_from_json(parse_json(read_text_file(path), path), path);
}

inline void save_model(const std::string& path, const SpectralModel& S,
                       const json& metadata = json()) {
    atomic_write_text(path, model_to_json(S, metadata).dump(2) + "\n");
}

// --- indicator specs --------------------------------------------------------

inline json indicator_to_json(const IndicatorSpec& spec) {
    json j;
    j["mode"] = spec.mode == IndicatorMode::exact_points ? "exact_points" : "intervals";
    j["regions"] = json::array();
    for (const auto& r : spec.regions) j["regions"].push_back({{"lo", r.lo}, {"hi", r.hi}, {"value", r.value}});
    if (spec.outer) j["outer"] = {(*spec.outer)[0], (*spec.outer)[1]};
    return j;
}

inline IndicatorSpec indicator_from_json(const json& j, const std::string& origin = "indicator") {
    try {
        IndicatorSpec spec;
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "exact_points")
            spec.mode = IndicatorMode::exact_points;
        else if (mode == "intervals")
            spec.mode = IndicatorMode::intervals;
        else
            throw input_error(origin + ": unknown indicator mode '" + mode + "'");
        for (const auto& r : j.at("regions"))
            spec.regions.push_back({r.at("lo").get<double>(), r.at("hi").get<double>(),
                                    r.at("value").get<double>()});
        if (j.contains("outer")) {
            const auto o = j.at("outer").get<std::vector<double>>();
            if (o.size() != 2) throw input_error(origin + ": outer hull needs exactly two numbers");
            spec.outer = std::array<double, 2>{o[0], o[1]};
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw input_error(origin + ": bad indicator spec: " + e.what());
    }
}

inline IndicatorSpec load_indicator(const std::string& path) {
    return indicator_from_json(parse_json(read_text_file(path), path), path);
}

inline void save_indicator(const std::string& path, const IndicatorSpec& spec) {
    atomic_write_text(path, indicator_to_json(spec).dump(2) + "\n");
}

// --- moment vectors ---------------------------------------------------------

inline json moments_to_json(const MomentVector& M) {
    json j;
    j["basis"] = basis_name(M.basis);
    if (M.window) j["window"] = {M.window->lo, M.window->hi};
    j["values"] = M.values;
    return j;
}

inline MomentVector moments_from_json(const json& j, const std::string& origin = "moments") {
    try {
        MomentVector M;
        const std::string b = j.at("basis").get<std::string>();
        if (b == "monomial")
            M.basis = MomentBasis::monomial;
        else if (b == "chebyshev")
            M.basis = MomentBasis::chebyshev;
        else
            throw input_error(origin + ": unknown basis '" + b + "'");
        if (j.contains("window")) {
            const auto w = j.at("window").get<std::vector<double>>();
            if (w.size() != 2) throw input_error(origin + ": window needs exactly two numbers");
            M.window = ScalingWindow{w[0], w[1]};
        }
        M.values = j.at("values").get<std::vector<double>>();
        M.validate();
        return M;
    } catch (const json::exception& e) {
        throw input_error(origin + ": bad moment vector: " + e.what());
    }
}

inline MomentVector load_moments(const std::string& path) {
    return moments_from_json(parse_json(read_text_file(path), path), path);
}

inline void save_moments(const std::string& path, const MomentVector& M) {
    atomic_write_text(path, moments_to_json(M).dump(2) + "\n");
}

// --- plain-text operator and state files ------------------------------------

/// Matrix file: leading dimension n, then n*n row-major entries separated by
/// any whitespace.
inline DenseSymmetricMatrix load_matrix(const std::string& path) {
    std::istringstream in(read_text_file(path));
    long long n = 0;
    if (!(in >> n) || n <= 0) throw input_error(path + ": expected a positive dimension first");
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    double v;
    while (in >> v) e.push_back(v);
    if (e.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw input_error(path + ": expected " + std::to_string(n * n) + " entries, found " +
                          std::to_string(e.size()));
    try {
        return DenseSymmetricMatrix(static_cast<int>(n), std::move(e));
    } catch (const input_error& ex) {
        throw input_error(path + ": " + ex.what());
    }
}

/// State file: one amplitude per line (any whitespace split accepted).
inline StateVector load_state(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<double> a;
    double v;
    while (in >> v) a.push_back(v);
    if (a.empty()) throw input_error(path + ": no amplitudes found");
    std::string trailing;
    if (in.clear(), in >> trailing)
        throw input_error(path + ": trailing non-numeric content '" + trailing + "'");
    try {
        return StateVector(std::move(a));
    } catch (const input_error& ex) {
        throw input_error(path + ": " + ex.what());
    }
}

inline void save_matrix(const std::string& path, const DenseSymmetricMatrix& A) {
    std::ostringstream out;
    out << A.size() << "\n";
    for (int j = 0; j < A.size(); ++j) {
        for (int k = 0; k < A.size(); ++k) out << (k ? " " : "") << format_double(A(j, k));
        out << "\n";
    }
    atomic_write_text(path, out.str());
}

inline void save_state(const std::string& path, const StateVector& phi) {
    std::ostringstream out;
    for (int i = 0; i < phi.size(); ++i) out << format_double(phi[i]) << "\n";
    atomic_write_text(path, out.str());
}

} // namespace ovlb
