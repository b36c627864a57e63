#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gaitline/common.hpp"

namespace gaitline {

enum class Emotion : int { neutral = 0, anger = 1, happy = 2 };
enum class Joint : int { wrist = 0, ankle = 1 };
enum class SensorKind : int { linear_with_gravity = 0, gravity = 1 };

inline const char* to_string(Emotion e) {
    switch (e) {
        case Emotion::neutral: return "neutral";
        case Emotion::anger: return "anger";
        case Emotion::happy: return "happy";
    }
    return "?";
}

inline const char* to_string(Joint j) {
    return j == Joint::wrist ? "wrist" : "ankle";
}

inline const char* to_string(SensorKind k) {
    return k == SensorKind::linear_with_gravity ? "la" : "gra";
}

inline Emotion parse_emotion(const std::string& s) {
    if (s == "neutral") return Emotion::neutral;
    if (s == "anger") return Emotion::anger;
    if (s == "happy") return Emotion::happy;
    throw DataError("unknown emotion label '" + s + "' (expected neutral|anger|happy)");
}

inline Joint parse_joint(const std::string& s) {
    if (s == "wrist") return Joint::wrist;
    if (s == "ankle") return Joint::ankle;
    throw DataError("unknown joint '" + s + "' (expected wrist|ankle)");
}

/// One 3-axis accelerometer reading. The recording hardware samples at 5 Hz
/// (one reading per 200 ms).
struct SensorSample {
    std::int64_t timestamp_ms = 0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// A raw log: either linear-acceleration-with-gravity ("la") or the
/// co-recorded gravity vector ("gra"), from one joint.
struct SensorStream {
    SensorKind kind = SensorKind::linear_with_gravity;
    Joint joint = Joint::ankle;
    std::vector<SensorSample> samples;
};

/// Gravity-removed acceleration. Produced only by subtract_gravity.
struct PureStream {
    Joint joint = Joint::ankle;
    std::vector<SensorSample> samples;
};

/// [start_ms, end_ms) interval of one labeled walking session.
struct SessionMarker {
    std::string subject_id;
    Emotion label = Emotion::neutral;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

/// 3 x window_len matrix cut from a smoothed stream; the unit of
/// classification.
struct WindowSlice {
    std::array<std::vector<double>, 3> axes;  // x, y, z
    Emotion label = Emotion::neutral;
    std::string subject_id;
    Joint joint = Joint::ankle;

    std::size_t length() const { return axes[0].size(); }
};

}  // namespace gaitline
