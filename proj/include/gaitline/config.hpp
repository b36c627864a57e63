#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "gaitline/preprocess.hpp"

namespace gaitline::config {

/// Every knob of the pipeline. Defaults mirror the standard run:
/// w=3 smoothing, 128-sample slices at 50% overlap, PCA to 95% variance,
/// linear SVM, 10-fold cross-validation.
struct PipelineConfig {
    int filter_w = 3;
    int window_len = 128;
    double overlap = 0.5;
    double pca_threshold = 0.95;
    std::string classifier = "svm";  // svm | tree | rtree | forest
    double svm_c = 1.0;
    int n_trees = 100;
    int mtry = 0;  // 0 = floor(sqrt(d))
    int folds = 10;
    std::uint64_t seed = 0;
    bool seed_set = false;  // train/eval refuse to run without an explicit seed
    bool include_dc = false;
    bool group_by_subject = false;
    bool leaky_preproc = false;

    void validate() const {
        if (filter_w < 1) throw DataError("config: filter_w must be >= 1");
        if (window_len < 64 || window_len % 2 != 0) {
            throw DataError("config: window_len must be an even value >= 64");
        }
        if (!(overlap >= 0.0) || overlap >= 1.0) {
            throw DataError("config: overlap must lie in [0, 1)");
        }
        preprocess::SliceConfig{window_len, overlap}.step();  // integrality check
        if (!(pca_threshold > 0.0) || pca_threshold > 1.0) {
            throw DataError("config: pca_threshold must lie in (0, 1]");
        }
        if (classifier != "svm" && classifier != "tree" && classifier != "rtree" &&
            classifier != "forest") {
            throw DataError("config: unknown classifier '" + classifier + "'");
        }
        if (!(svm_c > 0.0)) throw DataError("config: svm_c must be positive");
        if (n_trees < 1) throw DataError("config: n_trees must be >= 1");
        if (mtry < 0) throw DataError("config: mtry must be >= 0");
        if (folds < 2) throw DataError("config: folds must be >= 2");
    }

    /// Ordered key/value view, embedded in every report and reloadable as a
    /// config file.
    std::vector<std::pair<std::string, std::string>> echo() const {
        return {
            {"filter_w", std::to_string(filter_w)},
            {"window_len", std::to_string(window_len)},
            {"overlap", fmt_double(overlap)},
            {"pca_threshold", fmt_double(pca_threshold)},
            {"classifier", classifier},
            {"svm_c", fmt_double(svm_c)},
            {"n_trees", std::to_string(n_trees)},
            {"mtry", std::to_string(mtry)},
            {"folds", std::to_string(folds)},
            {"seed", std::to_string(seed)},
            {"include_dc", include_dc ? "true" : "false"},
            {"group_by_subject", group_by_subject ? "true" : "false"},
            {"leaky_preproc", leaky_preproc ? "true" : "false"},
        };
    }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw DataError("config: bad boolean for " + key + ": '" + v + "'");
}

inline double parse_num(const std::string& v, const std::string& key) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end == v.c_str() || *end != '\0') {
        throw DataError("config: bad numeric value for " + key + ": '" + v + "'");
    }
    return d;
}

inline int parse_int(const std::string& v, const std::string& key) {
    double d = parse_num(v, key);
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) {
        throw DataError("config: " + key + " must be an integer, got '" + v + "'");
    }
    return i;
}

}  // namespace detail

/// Apply one key=value assignment. Unknown keys are rejected.
inline void set_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "filter_w") {
        cfg.filter_w = detail::parse_int(value, key);
    } else if (key == "window_len") {
        cfg.window_len = detail::parse_int(value, key);
    } else if (key == "overlap") {
        cfg.overlap = detail::parse_num(value, key);
    } else if (key == "pca_threshold") {
        cfg.pca_threshold = detail::parse_num(value, key);
    } else if (key == "classifier") {
        cfg.classifier = value;
    } else if (key == "svm_c") {
        cfg.svm_c = detail::parse_num(value, key);
    } else if (key == "n_trees") {
        cfg.n_trees = detail::parse_int(value, key);
    } else if (key == "mtry") {
        cfg.mtry = detail::parse_int(value, key);
    } else if (key == "folds") {
        cfg.folds = detail::parse_int(value, key);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(std::strtoull(value.c_str(), nullptr, 10));
        cfg.seed_set = true;
    } else if (key == "include_dc") {
        cfg.include_dc = detail::parse_bool(value, key);
    } else if (key == "group_by_subject") {
        cfg.group_by_subject = detail::parse_bool(value, key);
    } else if (key == "leaky_preproc") {
        cfg.leaky_preproc = detail::parse_bool(value, key);
    } else {
        throw DataError("config: unknown key '" + key + "'");
    }
}

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
/// Values loaded here can still be overridden by CLI flags.
inline PipelineConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto strip = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            std::size_t e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        try {
            set_key(cfg, key, value);
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

inline void write_config(const PipelineConfig& cfg, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    for (const auto& [k, v] : cfg.echo()) os << k << " = " << v << "\n";
}

}  // namespace gaitline::config
