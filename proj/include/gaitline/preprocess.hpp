#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaitline/types.hpp"

namespace gaitline::preprocess {

/// Moving-average window size. Both 3 and 5 are exercised by the standard
/// parameter sweep.
struct FilterConfig {
    int w = 3;
};

struct SliceConfig {
    int window_len = 128;
    double overlap = 0.5;

    /// Hop between slice starts. window_len*(1-overlap) must land on an
    /// integer >= 1.
    int step() const {
        double raw = static_cast<double>(window_len) * (1.0 - overlap);
        double rounded = std::round(raw);
        if (std::abs(raw - rounded) > 1e-9 || rounded < 1.0) {
            throw DataError("slice step window_len*(1-overlap) = " + std::to_string(raw) +
                            " is not a positive integer");
        }
        return static_cast<int>(rounded);
    }
};

/// output[i] = (1/w) * sum_{j=0..w-1} input[i+j], length n-w+1.
/// The sums are taken term by term per window, exactly as written.
inline std::vector<double> moving_average(std::span<const double> input, int w) {
    const std::size_t n = input.size();
    if (w < 1) throw DataError("moving_average: w must be >= 1, got " + std::to_string(w));
    if (static_cast<std::size_t>(w) > n) {
        throw DataError("moving_average: w = " + std::to_string(w) +
                        " exceeds input length " + std::to_string(n));
    }
    std::vector<double> out(n - static_cast<std::size_t>(w) + 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < w; ++j) acc += input[i + static_cast<std::size_t>(j)];
        out[i] = acc / static_cast<double>(w);
    }
    return out;
}

/// Filter each axis independently. The output sample i keeps the timestamp of
/// the first raw sample in its window.
inline PureStream smooth_stream(const PureStream& stream, FilterConfig cfg) {
    const std::size_t n = stream.samples.size();
    if (cfg.w < 1 || static_cast<std::size_t>(cfg.w) > n) {
        throw DataError("smooth_stream: stream of " + std::to_string(n) +
                        " samples too short for w = " + std::to_string(cfg.w));
    }
    std::vector<double> ax(n), ay(n), az(n);
    for (std::size_t i = 0; i < n; ++i) {
        ax[i] = stream.samples[i].x;
        ay[i] = stream.samples[i].y;
        az[i] = stream.samples[i].z;
    }
    auto fx = moving_average(ax, cfg.w);
    auto fy = moving_average(ay, cfg.w);
    auto fz = moving_average(az, cfg.w);

    PureStream out;
    out.joint = stream.joint;
    out.samples.resize(fx.size());
    for (std::size_t i = 0; i < fx.size(); ++i) {
        out.samples[i] = {stream.samples[i].timestamp_ms, fx[i], fy[i], fz[i]};
    }
    return out;
}

/// Cut a stream into fixed-length slices at offsets 0, step, 2*step, ...
/// Trailing samples that cannot fill a whole window are discarded.
inline std::vector<WindowSlice> slice_windows(const PureStream& stream, SliceConfig cfg,
                                              Emotion label, const std::string& subject_id,
                                              Joint joint) {
    const int step = cfg.step();
    const std::size_t len = static_cast<std::size_t>(cfg.window_len);
    const std::size_t n = stream.samples.size();
    std::vector<WindowSlice> slices;
    if (n < len) return slices;

    for (std::size_t start = 0; start + len <= n; start += static_cast<std::size_t>(step)) {
        WindowSlice s;
        s.label = label;
        s.subject_id = subject_id;
        s.joint = joint;
        for (auto& axis : s.axes) axis.resize(len);
        for (std::size_t i = 0; i < len; ++i) {
            const SensorSample& smp = stream.samples[start + i];
            s.axes[0][i] = smp.x;
            s.axes[1][i] = smp.y;
            s.axes[2][i] = smp.z;
        }
        slices.push_back(std::move(s));
    }
    return slices;
}

}  // namespace gaitline::preprocess
