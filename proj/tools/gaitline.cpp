// gaitline: accelerometer gait -> emotion classification pipeline.
// Subcommands: synth, ingest, extract, train, eval, report.
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitline/config.hpp"
#include "gaitline/eval.hpp"
#include "gaitline/features.hpp"
#include "gaitline/ingest.hpp"
#include "gaitline/model_io.hpp"
#include "gaitline/pipeline.hpp"
#include "gaitline/synth.hpp"

namespace fs = std::filesystem;
using namespace gaitline;

namespace {

struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> overrides;  // key -> value, flags only
};

// Shared --config + per-key flags. Precedence: defaults < file < flags.
void add_config_options(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("--config", flags.config_path, "flat key=value config file");
    auto track = [&flags, cmd](const std::string& flag, const std::string& key,
                               const std::string& help) {
        auto opt = cmd->add_option(flag, help);
        opt->each([&flags, key](const std::string& v) { flags.overrides[key] = v; });
    };
    track("--filter-w", "filter_w", "moving-average window size (default 3)");
    track("--window-len", "window_len", "slice length in samples (default 128)");
    track("--overlap", "overlap", "slice overlap fraction in [0,1) (default 0.5)");
    track("--pca-threshold", "pca_threshold", "retained cumulative variance (default 0.95)");
    track("--model,--classifier", "classifier", "svm|tree|rtree|forest (default svm)");
    track("--svm-c", "svm_c", "SVM soft-margin C (default 1)");
    track("--n-trees", "n_trees", "forest size (default 100)");
    track("--mtry", "mtry", "features per split, 0 = sqrt(d) (default 0)");
    track("--folds", "folds", "cross-validation folds (default 10)");
    track("--seed", "seed", "RNG seed (required for train/eval/report)");
    cmd->add_flag_callback(
        "--include-dc", [&flags] { flags.overrides["include_dc"] = "true"; },
        "keep the FFT DC bin (117 features instead of 114)");
    cmd->add_flag_callback(
        "--group-by-subject", [&flags] { flags.overrides["group_by_subject"] = "true"; },
        "assign whole subjects to folds instead of slices");
    cmd->add_flag_callback(
        "--leaky-preproc", [&flags] { flags.overrides["leaky_preproc"] = "true"; },
        "fit z-score/PCA on all data before folding (paper-style)");
}

config::PipelineConfig resolve_config(const ConfigFlags& flags) {
    config::PipelineConfig cfg;
    if (!flags.config_path.empty()) cfg = config::load_config(flags.config_path);
    for (const auto& [key, value] : flags.overrides) config::set_key(cfg, key, value);
    cfg.validate();
    return cfg;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << text;
}

features::FeatureMatrix load_features_or_extract(const std::string& features_path,
                                                 const std::string& input_dir,
                                                 const config::PipelineConfig& cfg,
                                                 ingest::IngestReport* report = nullptr) {
    if (!features_path.empty()) return features::read_feature_csv_file(features_path);
    if (input_dir.empty()) throw DataError("pass --features FILE or --in DIR");
    return pipeline::extract_from_dir(input_dir, cfg, report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaitline: emotion identification from wrist/ankle gait accelerometry"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled benchmark");
    std::string synth_out;
    int synth_classes = 2;
    int synth_sessions = 10;
    double synth_duration = 120.0;
    std::string synth_joint = "ankle";
    std::uint64_t synth_seed = 0;
    bool synth_identical = false;
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--classes", synth_classes, "number of emotion classes (2 or 3)")
        ->check(CLI::Range(2, 3));
    synth_cmd->add_option("--sessions", synth_sessions, "sessions per class")->required();
    synth_cmd->add_option("--duration", synth_duration, "session length in seconds");
    synth_cmd->add_option("--joint", synth_joint, "wrist|ankle")
        ->check(CLI::IsMember({"wrist", "ankle"}));
    synth_cmd->add_option("--seed", synth_seed, "RNG seed")->required();
    synth_cmd->add_flag("--identical-profiles", synth_identical,
                        "give every class the same gait profile (null benchmark)");

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "parse raw logs and report sessions");
    std::string ingest_in, ingest_out;
    std::int64_t ingest_tol = ingest::kDefaultToleranceMs;
    ingest_cmd->add_option("--in", ingest_in, "raw dataset directory")->required();
    ingest_cmd->add_option("--out", ingest_out, "output directory")->required();
    ingest_cmd->add_option("--tol-ms", ingest_tol, "la/gra timestamp match tolerance (ms)");

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "compute feature vectors from raw logs");
    std::string extract_in, extract_out;
    ConfigFlags extract_flags;
    extract_cmd->add_option("--in", extract_in, "raw dataset directory")->required();
    extract_cmd->add_option("--out", extract_out, "output directory")->required();
    add_config_options(extract_cmd, extract_flags);

    // train
    auto* train_cmd = app.add_subcommand("train", "fit a classifier on all rows");
    std::string train_features, train_in, train_out;
    ConfigFlags train_flags;
    train_cmd->add_option("--features", train_features, "feature CSV from `extract`");
    train_cmd->add_option("--in", train_in, "raw dataset directory (alternative to --features)");
    train_cmd->add_option("--out", train_out, "model file to write")->required();
    add_config_options(train_cmd, train_flags);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "stratified cross-validated evaluation");
    std::string eval_features, eval_in, eval_out;
    int eval_threads = 1;
    ConfigFlags eval_flags;
    eval_cmd->add_option("--features", eval_features, "feature CSV from `extract`");
    eval_cmd->add_option("--in", eval_in, "raw dataset directory (alternative to --features)");
    eval_cmd->add_option("--out", eval_out, "output directory")->required();
    eval_cmd->add_option("--threads", eval_threads, "worker threads for folds");
    add_config_options(eval_cmd, eval_flags);

    // report
    auto* report_cmd =
        app.add_subcommand("report", "w x classifier sensitivity grid over a dataset");
    std::string report_in, report_out;
    int report_threads = 1;
    ConfigFlags report_flags;
    report_cmd->add_option("--in", report_in, "raw dataset directory")->required();
    report_cmd->add_option("--out", report_out, "output directory")->required();
    report_cmd->add_option("--threads", report_threads, "worker threads for folds");
    add_config_options(report_cmd, report_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(synth_cmd)) {
            synth::BenchmarkSpec spec;
            static const Emotion kOrder[3] = {Emotion::neutral, Emotion::anger, Emotion::happy};
            for (int c = 0; c < synth_classes; ++c) {
                synth::GaitProfile p = synth::default_profile(kOrder[synth_identical ? 0 : c]);
                p.label = kOrder[c];
                spec.profiles.push_back(std::move(p));
            }
            spec.sessions_per_class = synth_sessions;
            spec.duration_s = synth_duration;
            spec.seed = synth_seed;
            spec.joint = parse_joint(synth_joint);
            synth::make_benchmark(spec, synth_out);
            std::cout << "wrote " << synth_sessions << " subjects x " << synth_classes
                      << " sessions to " << synth_out << "\n";
        } else if (app.got_subcommand(ingest_cmd)) {
            auto loaded = ingest::load_directory(ingest_in, ingest_tol);
            fs::create_directories(ingest_out);
            write_text_file((fs::path(ingest_out) / "ingest_report.txt").string(),
                            ingest::render_report(loaded.report));
            std::ostringstream sessions;
            sessions << "subject_id,joint,label,samples,start_ms,end_ms\n";
            for (const auto& s : loaded.sessions) {
                sessions << s.subject_id << "," << to_string(s.joint) << ","
                         << to_string(s.label) << "," << s.stream.samples.size() << ","
                         << s.stream.samples.front().timestamp_ms << ","
                         << s.stream.samples.back().timestamp_ms + 1 << "\n";
            }
            write_text_file((fs::path(ingest_out) / "sessions.csv").string(), sessions.str());
            std::cout << ingest::render_report(loaded.report);
        } else if (app.got_subcommand(extract_cmd)) {
            auto cfg = resolve_config(extract_flags);
            ingest::IngestReport report;
            auto fm = pipeline::extract_from_dir(extract_in, cfg, &report);
            fs::create_directories(extract_out);
            features::write_feature_csv(fm, (fs::path(extract_out) / "features.csv").string());
            write_text_file((fs::path(extract_out) / "ingest_report.txt").string(),
                            ingest::render_report(report));
            std::cout << "extracted " << fm.rows.size() << " feature rows x "
                      << fm.layout.dim() << " columns\n";
        } else if (app.got_subcommand(train_cmd)) {
            auto cfg = resolve_config(train_flags);
            auto fm = load_features_or_extract(train_features, train_in, cfg);
            auto model = pipeline::train_full(fm, cfg);
            if (auto dir = fs::path(train_out).parent_path(); !dir.empty()) {
                fs::create_directories(dir);
            }
            model_io::save_model(model, train_out);
            std::cout << "trained " << model.kind << " on " << fm.rows.size()
                      << " rows; model written to " << train_out << "\n";
        } else if (app.got_subcommand(eval_cmd)) {
            auto cfg = resolve_config(eval_flags);
            ingest::IngestReport ingest_report;
            auto fm = load_features_or_extract(eval_features, eval_in, cfg,
                                               eval_in.empty() ? nullptr : &ingest_report);
            fs::create_directories(eval_out);
            if (!eval_in.empty()) {
                features::write_feature_csv(fm, (fs::path(eval_out) / "features.csv").string());
                write_text_file((fs::path(eval_out) / "ingest_report.txt").string(),
                                ingest::render_report(ingest_report));
            }
            auto report = pipeline::run_eval(fm, cfg, eval_threads);
            write_text_file((fs::path(eval_out) / "report.txt").string(), report.render_text());
            write_text_file((fs::path(eval_out) / "report.kv").string(), report.render_kv());
            config::write_config(cfg, (fs::path(eval_out) / "config.effective").string());
            auto model = pipeline::train_full(fm, cfg);
            model_io::save_model(model, (fs::path(eval_out) / "model.json").string());
            std::cout << report.render_text();
        } else if (app.got_subcommand(report_cmd)) {
            auto cfg = resolve_config(report_flags);
            auto cells = pipeline::run_grid(report_in, cfg, report_threads);
            fs::create_directories(report_out);
            write_text_file((fs::path(report_out) / "grid.txt").string(),
                            pipeline::render_grid_text(cells));
            write_text_file((fs::path(report_out) / "grid.csv").string(),
                            pipeline::render_grid_csv(cells));
            std::cout << pipeline::render_grid_text(cells);
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
