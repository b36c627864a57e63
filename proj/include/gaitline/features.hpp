#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitline/dft.hpp"
#include "gaitline/types.hpp"

namespace gaitline::features {

constexpr double kDefaultSampleRateHz = 5.0;
constexpr int kFftBins = 32;  // bins 0..31 of the length-128 transform

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    double kurtosis = 0.0;
    double skewness = 0.0;
};

/// Population moments (divide by N). Zero-variance input yields skewness 0
/// and kurtosis 0 so degenerate slices cannot leak NaN into a classifier.
/// Kurtosis is the non-excess Pearson form m4/m2^2.
inline Moments axis_moments(std::span<const double> axis) {
    const std::size_t n = axis.size();
    if (n == 0) throw DataError("axis_moments: empty axis");
    bool constant = true;
    for (double v : axis) constant = constant && v == axis[0];
    if (constant) return {axis[0], 0.0, 0.0, 0.0};

    double mean = 0.0;
    for (double v : axis) mean += v;
    mean /= static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : axis) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    Moments out;
    out.mean = mean;
    out.stddev = std::sqrt(m2);
    if (m2 > 0.0) {
        out.skewness = m3 / (m2 * out.stddev);
        out.kurtosis = m4 / (m2 * m2);
    }
    return out;
}

/// First kFftBins amplitude coefficients of the DFT.
/// amplitude[0] = X_0/N: X_0 is real for a real signal, and the signed value
/// is exactly the axis mean (the DC identity the rest of the pipeline leans
/// on). amplitude[k] = 2|X_k|/N for k >= 1, recovering the amplitude of a
/// pure sinusoid at an exact bin frequency.
inline std::vector<double> fft_amplitudes(std::span<const double> axis) {
    const std::size_t n = axis.size();
    if (n < 2 * kFftBins || n % 2 != 0) {
        throw DataError("fft_amplitudes: axis length " + std::to_string(n) +
                        " unsupported (need even length >= " + std::to_string(2 * kFftBins) + ")");
    }
    auto spec = dft::spectrum(axis);
    std::vector<double> amp(kFftBins);
    amp[0] = spec[0].real() / static_cast<double>(n);
    for (int k = 1; k < kFftBins; ++k) {
        amp[static_cast<std::size_t>(k)] =
            2.0 * std::abs(spec[static_cast<std::size_t>(k)]) / static_cast<double>(n);
    }
    return amp;
}

struct PsdStats {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Raw periodogram P_k = |X_k|^2 / (N*fs) over the one-sided bins k = 0..N/2,
/// reduced to its population mean and standard deviation. No taper.
inline PsdStats psd_stats(std::span<const double> axis, double fs = kDefaultSampleRateHz) {
    const std::size_t n = axis.size();
    if (n < 2 || n % 2 != 0) {
        throw DataError("psd_stats: axis length " + std::to_string(n) +
                        " unsupported (need even length >= 2)");
    }
    if (!(fs > 0.0)) throw DataError("psd_stats: fs must be positive");
    auto spec = dft::spectrum(axis);
    const std::size_t bins = n / 2 + 1;
    double mean = 0.0;
    std::vector<double> p(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        p[k] = std::norm(spec[k]) / (static_cast<double>(n) * fs);
        mean += p[k];
    }
    mean /= static_cast<double>(bins);
    double var = 0.0;
    for (double v : p) var += (v - mean) * (v - mean);
    var /= static_cast<double>(bins);
    return {mean, std::sqrt(var)};
}

struct AxisCorrelations {
    double xy = 0.0;
    double xz = 0.0;
    double yz = 0.0;
};

namespace detail {

inline double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    bool a_const = true, b_const = true;
    for (std::size_t i = 0; i < n; ++i) {
        a_const = a_const && a[i] == a[0];
        b_const = b_const && b[i] == b[0];
    }
    if (a_const || b_const) return 0.0;  // zero-variance convention

    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;  // zero-variance convention
    double r = sab / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace detail

/// Pearson correlation per axis pair; a constant axis correlates 0 with
/// everything by convention.
inline AxisCorrelations axis_correlations(const WindowSlice& slice) {
    AxisCorrelations c;
    c.xy = detail::pearson(slice.axes[0], slice.axes[1]);
    c.xz = detail::pearson(slice.axes[0], slice.axes[2]);
    c.yz = detail::pearson(slice.axes[1], slice.axes[2]);
    return c;
}

/// Column layout of the feature vector. The default drops the FFT DC bin
/// (it duplicates the mean), giving 37 values per axis plus the 3 pairwise
/// correlations = 114. include_dc keeps bin 0 for sensitivity checks (117).
struct FeatureLayout {
    bool include_dc = false;

    int per_axis() const { return 4 + (include_dc ? kFftBins : kFftBins - 1) + 2; }
    int dim() const { return 3 * per_axis() + 3; }

    std::string version() const {
        return std::string("gaitline-features-v1 include_dc=") + (include_dc ? "1" : "0");
    }

    std::vector<std::string> names() const {
        static const char* axes[3] = {"x", "y", "z"};
        std::vector<std::string> out;
        out.reserve(static_cast<std::size_t>(dim()));
        char buf[32];
        for (const char* a : axes) {
            std::string p(a);
            out.push_back(p + "_mean");
            out.push_back(p + "_std");
            out.push_back(p + "_kurt");
            out.push_back(p + "_skew");
            for (int k = include_dc ? 0 : 1; k < kFftBins; ++k) {
                std::snprintf(buf, sizeof(buf), "%s_fft_%02d", a, k);
                out.emplace_back(buf);
            }
            out.push_back(p + "_psd_mean");
            out.push_back(p + "_psd_std");
        }
        out.emplace_back("corr_xy");
        out.emplace_back("corr_xz");
        out.emplace_back("corr_yz");
        return out;
    }
};

struct FeatureVector {
    std::vector<double> values;
    Emotion label = Emotion::neutral;
    std::string subject_id;
    Joint joint = Joint::ankle;
};

inline FeatureVector extract_features(const WindowSlice& slice,
                                      double fs = kDefaultSampleRateHz,
                                      FeatureLayout layout = {}) {
    FeatureVector fv;
    fv.label = slice.label;
    fv.subject_id = slice.subject_id;
    fv.joint = slice.joint;
    fv.values.reserve(static_cast<std::size_t>(layout.dim()));
    for (const auto& axis : slice.axes) {
        Moments m = axis_moments(axis);
        fv.values.push_back(m.mean);
        fv.values.push_back(m.stddev);
        fv.values.push_back(m.kurtosis);
        fv.values.push_back(m.skewness);
        auto amps = fft_amplitudes(axis);
        for (int k = layout.include_dc ? 0 : 1; k < kFftBins; ++k) {
            fv.values.push_back(amps[static_cast<std::size_t>(k)]);
        }
        PsdStats p = psd_stats(axis, fs);
        fv.values.push_back(p.mean);
        fv.values.push_back(p.stddev);
    }
    AxisCorrelations c = axis_correlations(slice);
    fv.values.push_back(c.xy);
    fv.values.push_back(c.xz);
    fv.values.push_back(c.yz);
    return fv;
}

/// Per-column mean and population standard deviation, captured when a matrix
/// is normalized so the same transform can be applied to unseen rows.
struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

struct FeatureMatrix {
    FeatureLayout layout;
    std::vector<FeatureVector> rows;
    std::optional<ColumnStats> column_stats;  // set by zscore_fit_transform
};

inline ColumnStats zscore_fit(const Matrix& rows) {
    if (rows.size() < 2) throw DataError("zscore_fit: need at least 2 rows");
    const std::size_t d = rows[0].size();
    ColumnStats st;
    st.mean.assign(d, 0.0);
    st.stddev.assign(d, 0.0);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) st.mean[j] += r[j];
    }
    for (std::size_t j = 0; j < d; ++j) st.mean[j] /= static_cast<double>(rows.size());
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dlt = r[j] - st.mean[j];
            st.stddev[j] += dlt * dlt;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        st.stddev[j] = std::sqrt(st.stddev[j] / static_cast<double>(rows.size()));
        bool constant = true;
        for (const auto& r : rows) constant = constant && r[j] == rows[0][j];
        if (constant) st.stddev[j] = 0.0;  // exact-constant column, despite FP noise
    }
    return st;
}

/// (value - mean) / std per column; zero-std columns map to all zeros.
inline void zscore_apply(const ColumnStats& st, Matrix& rows) {
    for (auto& r : rows) {
        if (r.size() != st.mean.size()) {
            throw DataError("zscore_apply: row width " + std::to_string(r.size()) +
                            " != stats width " + std::to_string(st.mean.size()));
        }
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] = st.stddev[j] > 0.0 ? (r[j] - st.mean[j]) / st.stddev[j] : 0.0;
        }
    }
}

inline Matrix values_matrix(const FeatureMatrix& fm) {
    Matrix m;
    m.reserve(fm.rows.size());
    for (const auto& r : fm.rows) m.push_back(r.values);
    return m;
}

inline FeatureMatrix& zscore_fit_transform(FeatureMatrix& fm) {
    Matrix m = values_matrix(fm);
    ColumnStats st = zscore_fit(m);
    zscore_apply(st, m);
    for (std::size_t i = 0; i < fm.rows.size(); ++i) fm.rows[i].values = std::move(m[i]);
    fm.column_stats = std::move(st);
    return fm;
}

// --- feature CSV ------------------------------------------------------------

inline void write_feature_csv(const FeatureMatrix& fm, std::ostream& os) {
    os << "# layout=" << fm.layout.version() << "\n";
    for (const auto& name : fm.layout.names()) os << name << ",";
    os << "label,subject_id,joint\n";
    for (const auto& row : fm.rows) {
        for (double v : row.values) os << fmt_double(v) << ",";
        os << to_string(row.label) << "," << row.subject_id << "," << to_string(row.joint)
           << "\n";
    }
}

inline void write_feature_csv(const FeatureMatrix& fm, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    write_feature_csv(fm, os);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

inline FeatureMatrix read_feature_csv(std::istream& is, const std::string& origin = "<stream>") {
    std::string line;
    if (!std::getline(is, line)) throw DataError(origin + ": empty feature file");
    FeatureMatrix fm;
    if (line.rfind("# layout=", 0) != 0) {
        throw DataError(origin + ": missing layout comment line");
    }
    fm.layout.include_dc = line.find("include_dc=1") != std::string::npos;
    if (!std::getline(is, line)) throw DataError(origin + ": missing header line");
    auto header = split_csv_line(line);
    const std::size_t dim = static_cast<std::size_t>(fm.layout.dim());
    if (header.size() != dim + 3) {
        throw DataError(origin + ": header has " + std::to_string(header.size()) +
                        " columns, expected " + std::to_string(dim + 3));
    }
    std::size_t lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != dim + 3) {
            throw DataError(origin + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(dim + 3) + " cells, got " +
                            std::to_string(cells.size()));
        }
        FeatureVector fv;
        fv.values.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            char* end = nullptr;
            fv.values[j] = std::strtod(cells[j].c_str(), &end);
            if (end == cells[j].c_str() || *end != '\0' || !std::isfinite(fv.values[j])) {
                throw DataError(origin + ":" + std::to_string(lineno) +
                                ": bad numeric cell '" + cells[j] + "'");
            }
        }
        fv.label = parse_emotion(cells[dim]);
        fv.subject_id = cells[dim + 1];
        fv.joint = parse_joint(cells[dim + 2]);
        fm.rows.push_back(std::move(fv));
    }
    return fm;
}

inline FeatureMatrix read_feature_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open feature file: " + path);
    return read_feature_csv(is, path);
}

}  // namespace gaitline::features
