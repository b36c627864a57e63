#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gaitline/types.hpp"

namespace gaitline::ingest {

/// Half the 200 ms sampling period: la/gra pairs recorded "at the same time"
/// must land within one half-sample of each other.
constexpr std::int64_t kDefaultToleranceMs = 100;

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double_cell(const std::string& cell, const std::string& origin,
                                std::size_t lineno, const char* column) {
    char* end = nullptr;
    const std::string t = trim(cell);
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end == t.c_str() || *end != '\0') {
        throw DataError(origin + ":" + std::to_string(lineno) + ": malformed " + column +
                        " value '" + cell + "'");
    }
    if (!std::isfinite(v)) {
        throw DataError(origin + ":" + std::to_string(lineno) + ": non-finite " + column +
                        " value '" + cell + "'");
    }
    return v;
}

inline std::int64_t parse_int_cell(const std::string& cell, const std::string& origin,
                                   std::size_t lineno, const char* column) {
    char* end = nullptr;
    const std::string t = trim(cell);
    long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end == t.c_str() || *end != '\0') {
        throw DataError(origin + ":" + std::to_string(lineno) + ": malformed " + column +
                        " value '" + cell + "'");
    }
    return static_cast<std::int64_t>(v);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t c = line.find(sep, pos);
        if (c == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, c - pos));
        pos = c + 1;
    }
    return out;
}

}  // namespace detail

/// Parse one sensor log. Expected shape: header `timestamp_ms,x,y,z`, one
/// sample per line, strictly increasing timestamps, finite values.
/// Line numbers in errors are 1-based and count the header.
inline SensorStream parse_stream(std::istream& is, SensorKind kind, Joint joint,
                                 const std::string& origin = "<stream>") {
    SensorStream stream;
    stream.kind = kind;
    stream.joint = joint;

    std::string line;
    if (!std::getline(is, line)) throw DataError(origin + ": empty file");
    if (detail::trim(line) != "timestamp_ms,x,y,z") {
        throw DataError(origin + ":1: bad header '" + line +
                        "' (expected 'timestamp_ms,x,y,z')");
    }
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split(line, ',');
        if (cells.size() != 4) {
            throw DataError(origin + ":" + std::to_string(lineno) + ": expected 4 cells, got " +
                            std::to_string(cells.size()));
        }
        SensorSample s;
        s.timestamp_ms = detail::parse_int_cell(cells[0], origin, lineno, "timestamp_ms");
        s.x = detail::parse_double_cell(cells[1], origin, lineno, "x");
        s.y = detail::parse_double_cell(cells[2], origin, lineno, "y");
        s.z = detail::parse_double_cell(cells[3], origin, lineno, "z");
        if (!stream.samples.empty() && s.timestamp_ms <= stream.samples.back().timestamp_ms) {
            throw DataError(origin + ":" + std::to_string(lineno) +
                            ": timestamp not strictly increasing (" +
                            std::to_string(s.timestamp_ms) + " after " +
                            std::to_string(stream.samples.back().timestamp_ms) + ")");
        }
        stream.samples.push_back(s);
    }
    return stream;
}

inline SensorStream parse_stream_file(const std::string& path, SensorKind kind, Joint joint) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open sensor log: " + path);
    return parse_stream(is, kind, joint, path);
}

/// Marker file: header `subject_id,label,start_ms,end_ms`, labels are
/// case-sensitive neutral|anger|happy.
inline std::vector<SessionMarker> parse_markers(std::istream& is,
                                                const std::string& origin = "<markers>") {
    std::string line;
    if (!std::getline(is, line)) throw DataError(origin + ": empty marker file");
    if (detail::trim(line) != "subject_id,label,start_ms,end_ms") {
        throw DataError(origin + ":1: bad header '" + line +
                        "' (expected 'subject_id,label,start_ms,end_ms')");
    }
    std::vector<SessionMarker> markers;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split(line, ',');
        if (cells.size() != 4) {
            throw DataError(origin + ":" + std::to_string(lineno) + ": expected 4 cells, got " +
                            std::to_string(cells.size()));
        }
        SessionMarker m;
        m.subject_id = detail::trim(cells[0]);
        try {
            m.label = parse_emotion(detail::trim(cells[1]));
        } catch (const DataError& e) {
            throw DataError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
        m.start_ms = detail::parse_int_cell(cells[2], origin, lineno, "start_ms");
        m.end_ms = detail::parse_int_cell(cells[3], origin, lineno, "end_ms");
        if (m.start_ms >= m.end_ms) {
            throw DataError(origin + ":" + std::to_string(lineno) + ": start_ms " +
                            std::to_string(m.start_ms) + " must precede end_ms " +
                            std::to_string(m.end_ms));
        }
        markers.push_back(std::move(m));
    }
    return markers;
}

inline std::vector<SessionMarker> parse_markers_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open marker file: " + path);
    return parse_markers(is, path);
}

struct SubtractResult {
    PureStream stream;
    std::size_t dropped = 0;  // la samples without a gra partner within tolerance
};

/// la - gra componentwise, pairing each la sample with the nearest gra sample
/// within tol_ms (earlier timestamp wins ties). Unmatched la samples are
/// dropped and counted, not fatal; a completely unmatched stream is.
inline SubtractResult subtract_gravity(const SensorStream& la, const SensorStream& gra,
                                       std::int64_t tol_ms = kDefaultToleranceMs) {
    if (la.kind != SensorKind::linear_with_gravity) {
        throw DataError("subtract_gravity: first stream must have kind 'la'");
    }
    if (gra.kind != SensorKind::gravity) {
        throw DataError("subtract_gravity: second stream must have kind 'gra'");
    }
    if (la.joint != gra.joint) {
        throw DataError(std::string("subtract_gravity: joint mismatch (") + to_string(la.joint) +
                        " vs " + to_string(gra.joint) + ")");
    }

    SubtractResult out;
    out.stream.joint = la.joint;
    const auto& g = gra.samples;
    std::size_t j = 0;
    for (const SensorSample& s : la.samples) {
        // advance j to the first gra sample at or after s; candidates are j-1 and j
        while (j < g.size() && g[j].timestamp_ms < s.timestamp_ms) ++j;
        std::size_t best = g.size();
        std::int64_t best_dist = tol_ms + 1;
        // check the earlier candidate first so it wins exact ties
        if (j > 0) {
            std::int64_t d = s.timestamp_ms - g[j - 1].timestamp_ms;
            if (d < best_dist) {
                best = j - 1;
                best_dist = d;
            }
        }
        if (j < g.size()) {
            std::int64_t d = g[j].timestamp_ms - s.timestamp_ms;
            if (d < best_dist) {
                best = j;
                best_dist = d;
            }
        }
        if (best == g.size()) {
            ++out.dropped;
            continue;
        }
        out.stream.samples.push_back({s.timestamp_ms, s.x - g[best].x, s.y - g[best].y,
                                      s.z - g[best].z});
        j = best;  // rewind so the next la sample reconsiders this neighborhood
    }
    if (out.stream.samples.empty()) {
        throw DataError("subtract_gravity: zero matched samples within tolerance");
    }
    return out;
}

struct CutResult {
    std::vector<std::pair<SessionMarker, PureStream>> segments;
    std::size_t empty_markers = 0;  // markers covering no samples, omitted
};

/// Cut a stream into per-marker segments over half-open [start_ms, end_ms)
/// intervals. Markers must be pairwise non-overlapping.
inline CutResult cut_sessions(const PureStream& stream,
                              const std::vector<SessionMarker>& markers) {
    std::vector<SessionMarker> sorted = markers;
    std::sort(sorted.begin(), sorted.end(),
              [](const SessionMarker& a, const SessionMarker& b) {
                  return a.start_ms < b.start_ms;
              });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].start_ms < sorted[i - 1].end_ms) {
            throw DataError("cut_sessions: overlapping markers [" +
                            std::to_string(sorted[i - 1].start_ms) + "," +
                            std::to_string(sorted[i - 1].end_ms) + ") and [" +
                            std::to_string(sorted[i].start_ms) + "," +
                            std::to_string(sorted[i].end_ms) + ")");
        }
    }

    CutResult out;
    for (const SessionMarker& m : markers) {
        PureStream seg;
        seg.joint = stream.joint;
        for (const SensorSample& s : stream.samples) {
            if (s.timestamp_ms >= m.start_ms && s.timestamp_ms < m.end_ms) {
                seg.samples.push_back(s);
            }
        }
        if (seg.samples.empty()) {
            ++out.empty_markers;
            continue;
        }
        out.segments.emplace_back(m, std::move(seg));
    }
    return out;
}

// --- directory ingest ---------------------------------------------------------

/// One labeled walking session after gravity removal and marker cutting.
struct Session {
    std::string subject_id;
    Joint joint = Joint::ankle;
    Emotion label = Emotion::neutral;
    PureStream stream;
};

struct IngestReport {
    std::size_t stream_pairs = 0;
    std::size_t samples_in = 0;
    std::size_t samples_matched = 0;
    std::size_t dropped_unmatched = 0;
    std::size_t empty_markers = 0;
    std::size_t sessions = 0;
};

struct IngestResult {
    std::vector<Session> sessions;
    IngestReport report;
};

/// Load a dataset directory: `markers.csv` plus `<subject>_<joint>_la.csv` /
/// `<subject>_<joint>_gra.csv` stream pairs. Markers are matched to pairs by
/// subject id; both joints of a subject reuse the same markers.
inline IngestResult load_directory(const std::string& dir,
                                   std::int64_t tol_ms = kDefaultToleranceMs) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir);

    const fs::path marker_path = fs::path(dir) / "markers.csv";
    if (!fs::exists(marker_path)) throw DataError("missing marker file: " + marker_path.string());
    auto markers = parse_markers_file(marker_path.string());

    std::map<std::string, std::vector<SessionMarker>> markers_by_subject;
    for (const auto& m : markers) markers_by_subject[m.subject_id].push_back(m);

    // collect *_la.csv files, sorted for a deterministic session order
    std::vector<std::string> la_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() > 7 && name.ends_with("_la.csv")) la_files.push_back(name);
    }
    std::sort(la_files.begin(), la_files.end());
    if (la_files.empty()) throw DataError("no *_la.csv stream files in " + dir);

    IngestResult out;
    for (const std::string& la_name : la_files) {
        const std::string stem = la_name.substr(0, la_name.size() - 7);  // <subject>_<joint>
        const std::size_t us = stem.rfind('_');
        if (us == std::string::npos) {
            throw DataError("stream file name '" + la_name +
                            "' does not match <subject>_<joint>_la.csv");
        }
        const std::string subject = stem.substr(0, us);
        const Joint joint = parse_joint(stem.substr(us + 1));
        const std::string gra_name = stem + "_gra.csv";
        const fs::path gra_path = fs::path(dir) / gra_name;
        if (!fs::exists(gra_path)) {
            throw DataError("missing gravity file " + gra_name + " for " + la_name);
        }

        auto la = parse_stream_file((fs::path(dir) / la_name).string(),
                                    SensorKind::linear_with_gravity, joint);
        auto gra = parse_stream_file(gra_path.string(), SensorKind::gravity, joint);
        out.report.stream_pairs += 1;
        out.report.samples_in += la.samples.size();

        auto sub = subtract_gravity(la, gra, tol_ms);
        out.report.samples_matched += sub.stream.samples.size();
        out.report.dropped_unmatched += sub.dropped;

        auto it = markers_by_subject.find(subject);
        if (it == markers_by_subject.end()) continue;  // stream without markers: nothing to cut
        auto cut = cut_sessions(sub.stream, it->second);
        out.report.empty_markers += cut.empty_markers;
        for (auto& [marker, seg] : cut.segments) {
            out.sessions.push_back({subject, joint, marker.label, std::move(seg)});
        }
    }
    out.report.sessions = out.sessions.size();
    if (out.sessions.empty()) throw DataError("no labeled sessions found in " + dir);
    return out;
}

inline std::string render_report(const IngestReport& r) {
    std::ostringstream os;
    os << "stream_pairs=" << r.stream_pairs << "\n"
       << "samples_in=" << r.samples_in << "\n"
       << "samples_matched=" << r.samples_matched << "\n"
       << "dropped_unmatched=" << r.dropped_unmatched << "\n"
       << "empty_markers=" << r.empty_markers << "\n"
       << "sessions=" << r.sessions << "\n";
    return os.str();
}

}  // namespace gaitline::ingest
