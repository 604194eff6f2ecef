/**
 * @file serialization.hpp
 * @brief JSON and CSV formats: offsets, classifier parameters, the tool
 * configuration, corpus manifests (JSON lines), content-map summaries,
 * error curves and bench reports.
 */
#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "classifier.hpp"
#include "sli.hpp"
#include "spectral.hpp"

namespace screenscale {

using nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Offsets: {"text": {"h": .., "v": ..}, "pictorial": {"h": .., "v": ..}}

inline json to_json_value(const OffsetTable& t) {
    json j;
    for (ContentType c : {ContentType::text, ContentType::pictorial})
        j[std::string(to_string(c))] = {{"h", t.get(c, Direction::horizontal)}, {"v", t.get(c, Direction::vertical)}};
    return j;
}

/// Missing entries keep the values already in `base`.
inline OffsetTable offsets_from_json(const json& j, OffsetTable base = {}) {
    if (!j.is_object()) throw FormatError("offsets: expected a JSON object");
    for (ContentType c : {ContentType::text, ContentType::pictorial}) {
        const std::string key(to_string(c));
        if (!j.contains(key)) continue;
        const json& e = j.at(key);
        if (e.contains("h")) base.set(c, Direction::horizontal, e.at("h").get<double>());
        if (e.contains("v")) base.set(c, Direction::vertical, e.at("v").get<double>());
    }
    base.validate();
    return base;
}

// ---------------------------------------------------------------------------
// Classifier parameters

inline json to_json_value(const ClassifierParams& p) {
    return {{"G", p.gradient_threshold}, {"L1", p.l1}, {"L2_low", p.l2_low}, {"L2_high", p.l2_high}};
}

inline ClassifierParams classifier_params_from_json(const json& j, ClassifierParams base = {}) {
    if (!j.is_object()) throw FormatError("classifier: expected a JSON object");
    if (j.contains("G")) base.gradient_threshold = j.at("G").get<double>();
    if (j.contains("L1")) base.l1 = j.at("L1").get<double>();
    if (j.contains("L2_low")) base.l2_low = j.at("L2_low").get<double>();
    if (j.contains("L2_high")) base.l2_high = j.at("L2_high").get<double>();
    base.validate();
    return base;
}

// ---------------------------------------------------------------------------
// Tool configuration

struct Config {
    ClassifierParams classifier{};
    OffsetTable offsets{};
    CoordinateConvention coordinates = CoordinateConvention::origin_aligned;
    BoundaryPolicy boundary = BoundaryPolicy::replicate;
    TrainingParams training{};
    int threads = 1;

    friend bool operator==(const Config&, const Config&) = default;
};

inline json to_json_value(const Config& c) {
    return {{"classifier", to_json_value(c.classifier)},
            {"offsets", to_json_value(c.offsets)},
            {"coordinates", "origin"},
            {"boundary", "replicate"},
            {"training",
             {{"tau_min", c.training.tau_min},
              {"tau_max", c.training.tau_max},
              {"tau_step", c.training.tau_step},
              {"degree", c.training.degree}}},
            {"threads", c.threads}};
}

inline Config config_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("config: expected a JSON object");
    Config c;
    try {
        if (j.contains("classifier")) c.classifier = classifier_params_from_json(j.at("classifier"));
        if (j.contains("offsets")) c.offsets = offsets_from_json(j.at("offsets"));
        if (j.contains("coordinates") && j.at("coordinates").get<std::string>() != "origin")
            throw FormatError("config: only the 'origin' coordinate convention is supported");
        if (j.contains("boundary") && j.at("boundary").get<std::string>() != "replicate")
            throw FormatError("config: only the 'replicate' boundary policy is supported");
        if (j.contains("training")) {
            const json& t = j.at("training");
            if (t.contains("tau_min")) c.training.tau_min = t.at("tau_min").get<double>();
            if (t.contains("tau_max")) c.training.tau_max = t.at("tau_max").get<double>();
            if (t.contains("tau_step")) c.training.tau_step = t.at("tau_step").get<double>();
            if (t.contains("degree")) c.training.degree = t.at("degree").get<int>();
            c.training.validate();
        }
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();
        if (c.threads < 1) throw FormatError("config: threads must be >= 1");
    } catch (const json::exception& e) {
        throw FormatError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    return c;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path + ": write failed");
}

// ---------------------------------------------------------------------------
// Corpus manifest: one {"image", "x", "y", "label"} object per line.

inline CorpusManifest parse_manifest(std::istream& in) {
    CorpusManifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            CorpusEntry e;
            e.image = j.at("image").get<std::string>();
            e.x = j.at("x").get<int>();
            e.y = j.at("y").get<int>();
            e.label = content_type_from_string(j.at("label").get<std::string>());
            m.entries.push_back(std::move(e));
        } catch (const std::exception& ex) {
            throw FormatError("manifest line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return m;
}

inline CorpusManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open manifest");
    return parse_manifest(in);
}

inline std::string format_manifest(const CorpusManifest& m) {
    std::ostringstream os;
    for (const CorpusEntry& e : m.entries)
        os << json{{"image", e.image}, {"x", e.x}, {"y", e.y}, {"label", std::string(to_string(e.label))}}.dump()
           << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Content map summary

inline json content_map_summary(const ContentMap& map, const ClassifierParams& params) {
    std::vector<std::string> labels;
    for (ContentType t : map.labels()) labels.emplace_back(to_string(t));
    return {{"blocks_x", map.blocks_x()},
            {"blocks_y", map.blocks_y()},
            {"labels", labels},
            {"major_type", std::string(to_string(map.major_type()))},
            {"params", to_json_value(params)}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_curve_csv(const ErrorCurve& c) {
    std::ostringstream os;
    os << std::setprecision(10) << "tau,eta,fitted_eta\n";
    for (std::size_t i = 0; i < c.tau_grid.size(); ++i)
        os << c.tau_grid[i] << ',' << c.eta[i] << ',' << c.fitted_eta[i] << '\n';
    return os.str();
}

struct BenchRow {
    std::string method;
    double factor = 0.0;
    int width = 0;   // input
    int height = 0;  // input
    double wall_ms = 0.0;
    std::uint64_t adds = 0;
    std::uint64_t muls = 0;
    double psnr_vs_reference = 0.0;  // infinity when identical
    std::string error;               // non-empty when the row failed
};

inline constexpr const char* kBenchHeader = "method,factor,width,height,wall_ms,adds,muls,psnr_vs_reference";

inline std::string format_bench_row(const BenchRow& r) {
    std::ostringstream os;
    os << std::setprecision(6) << r.method << ',' << r.factor << ',' << r.width << ',' << r.height << ',';
    if (!r.error.empty()) {
        os << "error,,,\"" << r.error << '"';
        return os.str();
    }
    os << std::fixed << std::setprecision(3) << r.wall_ms << ',' << r.adds << ',' << r.muls << ',';
    if (std::isinf(r.psnr_vs_reference)) os << "inf";
    else os << std::setprecision(4) << r.psnr_vs_reference;
    return os.str();
}

}  // namespace screenscale
