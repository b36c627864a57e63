#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "gaitline/types.hpp"

namespace gaitline::synth {

/// Class-conditional gait signature: sinusoids at multiples of the stride
/// frequency, per-stride phase jitter, additive Gaussian noise.
struct GaitProfile {
    Emotion label = Emotion::neutral;
    double stride_hz = 1.0;
    // per axis: (harmonic index, amplitude m/s^2)
    std::array<std::vector<std::pair<int, double>>, 3> harmonic_amps;
    double noise_std = 0.0;
    double phase_jitter = 0.0;  // radians (std of per-stride phase wander)
};

/// Built-in profiles with stride rates sitting on exact 128-point FFT bins
/// (k * 5/128 Hz), so the classes place energy in disjoint feature bins.
inline GaitProfile default_profile(Emotion label) {
    GaitProfile p;
    p.label = label;
    p.noise_std = 0.15;
    p.phase_jitter = 0.2;
    switch (label) {
        case Emotion::neutral:
            p.stride_hz = 20.0 * 5.0 / 128.0;  // 0.78125 Hz, bin 20
            p.harmonic_amps[0] = {{1, 1.2}};
            p.harmonic_amps[1] = {{1, 0.8}};
            p.harmonic_amps[2] = {{1, 0.5}, {2, 0.3}};
            break;
        case Emotion::anger:
            p.stride_hz = 28.0 * 5.0 / 128.0;  // 1.09375 Hz, bin 28
            p.harmonic_amps[0] = {{1, 1.8}};
            p.harmonic_amps[1] = {{1, 1.1}, {2, 0.4}};
            p.harmonic_amps[2] = {{1, 0.7}};
            break;
        case Emotion::happy:
            p.stride_hz = 24.0 * 5.0 / 128.0;  // 0.9375 Hz, bin 24
            p.harmonic_amps[0] = {{1, 1.5}, {2, 0.4}};
            p.harmonic_amps[1] = {{1, 0.6}};
            p.harmonic_amps[2] = {{1, 0.9}};
            break;
    }
    return p;
}

inline void check_nyquist(const GaitProfile& p, double fs) {
    for (const auto& axis : p.harmonic_amps) {
        for (const auto& [h, amp] : axis) {
            if (h < 1) throw DataError("generate_session: harmonic index must be >= 1");
            if (amp < 0.0) throw DataError("generate_session: negative harmonic amplitude");
            if (static_cast<double>(h) * p.stride_hz >= fs / 2.0) {
                throw DataError("generate_session: harmonic " + std::to_string(h) + " at " +
                                std::to_string(static_cast<double>(h) * p.stride_hz) +
                                " Hz violates Nyquist for fs = " + std::to_string(fs));
            }
        }
    }
}

/// Deterministic synthetic walking session sampled at fs, starting at
/// start_ms. Base phases, per-stride jitter and noise all come from streams
/// derived from `seed`.
inline std::pair<PureStream, SessionMarker> generate_session(const GaitProfile& profile,
                                                             double duration_s, double fs,
                                                             std::uint64_t seed,
                                                             std::int64_t start_ms = 0,
                                                             const std::string& subject_id = "",
                                                             Joint joint = Joint::ankle) {
    if (!(fs > 0.0) || fs > 1000.0) throw DataError("generate_session: fs out of range");
    check_nyquist(profile, fs);
    const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * fs));
    if (n < 128) {
        throw DataError("generate_session: " + std::to_string(n) +
                        " samples cannot fill one 128-sample slice");
    }

    Rng phase_rng(mix_seed(seed, 1));
    Rng noise_rng(mix_seed(seed, 2));

    std::array<std::vector<double>, 3> base_phase;
    for (std::size_t a = 0; a < 3; ++a) {
        base_phase[a].resize(profile.harmonic_amps[a].size());
        for (double& ph : base_phase[a]) ph = phase_rng.uniform(0.0, 2.0 * M_PI);
    }
    const std::size_t strides =
        static_cast<std::size_t>(std::ceil(duration_s * profile.stride_hz)) + 1;
    // jitter[stride][axis][harmonic]
    std::vector<std::array<std::vector<double>, 3>> jitter(strides);
    for (auto& per_stride : jitter) {
        for (std::size_t a = 0; a < 3; ++a) {
            per_stride[a].resize(profile.harmonic_amps[a].size());
            for (double& j : per_stride[a]) j = phase_rng.normal(0.0, profile.phase_jitter);
        }
    }

    PureStream stream;
    stream.joint = joint;
    stream.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        const std::size_t stride =
            std::min(static_cast<std::size_t>(t * profile.stride_hz), strides - 1);
        SensorSample& s = stream.samples[i];
        s.timestamp_ms = start_ms + std::llround(static_cast<double>(i) * 1000.0 / fs);
        double v[3];
        for (std::size_t a = 0; a < 3; ++a) {
            double acc = 0.0;
            for (std::size_t h = 0; h < profile.harmonic_amps[a].size(); ++h) {
                const auto& [k, amp] = profile.harmonic_amps[a][h];
                acc += amp * std::cos(2.0 * M_PI * static_cast<double>(k) * profile.stride_hz * t +
                                      base_phase[a][h] + jitter[stride][a][h]);
            }
            if (profile.noise_std > 0.0) acc += noise_rng.normal(0.0, profile.noise_std);
            v[a] = acc;
        }
        s.x = v[0];
        s.y = v[1];
        s.z = v[2];
    }

    SessionMarker marker;
    marker.subject_id = subject_id;
    marker.label = profile.label;
    marker.start_ms = start_ms;
    marker.end_ms = stream.samples.back().timestamp_ms + 1;
    return {std::move(stream), std::move(marker)};
}

struct BenchmarkSpec {
    std::vector<GaitProfile> profiles;
    int sessions_per_class = 10;
    double duration_s = 120.0;
    double fs = 5.0;
    std::uint64_t seed = 0;
    Joint joint = Joint::ankle;
};

namespace detail {

inline void write_stream_csv(const std::string& path, const std::vector<SensorSample>& samples) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << "timestamp_ms,x,y,z\n";
    for (const SensorSample& s : samples) {
        os << s.timestamp_ms << "," << fmt_double(s.x) << "," << fmt_double(s.y) << ","
           << fmt_double(s.z) << "\n";
    }
}

/// Slowly tilting gravity vector; written identically to both files of a
/// pair so the ingest subtraction recovers the pure signal exactly.
inline SensorSample gravity_at(std::int64_t ts_ms) {
    const double t = static_cast<double>(ts_ms) / 1000.0;
    SensorSample g;
    g.timestamp_ms = ts_ms;
    g.x = 0.25 * std::sin(2.0 * M_PI * 0.002 * t);
    g.y = -0.18 * std::sin(2.0 * M_PI * 0.0013 * t + 1.0);
    g.z = 9.81 - 0.02 * std::cos(2.0 * M_PI * 0.0017 * t);
    return g;
}

}  // namespace detail

/// Write a full ingest-ready dataset: one stream pair per synthetic subject,
/// one session per profile inside each pair, plus markers.csv. Classes come
/// out balanced: sessions_per_class subjects x one session per profile.
inline void make_benchmark(const BenchmarkSpec& spec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    if (spec.profiles.size() < 2) throw DataError("make_benchmark: need >= 2 profiles");
    {
        bool seen[3] = {false, false, false};
        int distinct = 0;
        for (const auto& p : spec.profiles) {
            if (!seen[static_cast<int>(p.label)]) {
                seen[static_cast<int>(p.label)] = true;
                ++distinct;
            }
        }
        if (distinct < 2) throw DataError("make_benchmark: need >= 2 distinct labels");
    }
    if (spec.sessions_per_class < 1) throw DataError("make_benchmark: sessions_per_class < 1");
    fs::create_directories(out_dir);

    const std::int64_t session_ms =
        std::llround(spec.duration_s * 1000.0) + std::llround(1000.0 / spec.fs);
    const std::int64_t gap_ms = 10000;

    std::ofstream markers((fs::path(out_dir) / "markers.csv").string());
    if (!markers) throw DataError("cannot open markers.csv in " + out_dir);
    markers << "subject_id,label,start_ms,end_ms\n";

    for (int s = 0; s < spec.sessions_per_class; ++s) {
        char subject[16];
        std::snprintf(subject, sizeof(subject), "s%03d", s);
        std::vector<SensorSample> pure;
        std::int64_t at_ms = 0;
        for (std::size_t p = 0; p < spec.profiles.size(); ++p) {
            const std::uint64_t session_seed = mix_seed(
                spec.seed, static_cast<std::uint64_t>(s) * spec.profiles.size() + p + 17);
            auto [stream, marker] = generate_session(spec.profiles[p], spec.duration_s, spec.fs,
                                                     session_seed, at_ms, subject, spec.joint);
            markers << marker.subject_id << "," << to_string(marker.label) << ","
                    << marker.start_ms << "," << marker.end_ms << "\n";
            pure.insert(pure.end(), stream.samples.begin(), stream.samples.end());
            at_ms += session_ms + gap_ms;
        }
        std::vector<SensorSample> la(pure.size()), gra(pure.size());
        for (std::size_t i = 0; i < pure.size(); ++i) {
            const SensorSample g = detail::gravity_at(pure[i].timestamp_ms);
            gra[i] = g;
            la[i] = {pure[i].timestamp_ms, pure[i].x + g.x, pure[i].y + g.y, pure[i].z + g.z};
        }
        const std::string stem = std::string(subject) + "_" + to_string(spec.joint);
        detail::write_stream_csv((fs::path(out_dir) / (stem + "_la.csv")).string(), la);
        detail::write_stream_csv((fs::path(out_dir) / (stem + "_gra.csv")).string(), gra);
    }
}

}  // namespace gaitline::synth
