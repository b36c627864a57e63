#pragma once

#include <span>
#include <string>
#include <vector>

#include "gaitline/config.hpp"
#include "gaitline/eval.hpp"
#include "gaitline/features.hpp"
#include "gaitline/ingest.hpp"
#include "gaitline/model_io.hpp"
#include "gaitline/preprocess.hpp"

namespace gaitline::pipeline {

/// ingest -> smooth -> slice -> extract for every labeled session.
inline features::FeatureMatrix extract_from_sessions(const std::vector<ingest::Session>& sessions,
                                                     const config::PipelineConfig& cfg) {
    features::FeatureMatrix fm;
    fm.layout.include_dc = cfg.include_dc;
    const preprocess::FilterConfig filter{cfg.filter_w};
    const preprocess::SliceConfig slicing{cfg.window_len, cfg.overlap};
    for (const auto& session : sessions) {
        if (session.stream.samples.size() < static_cast<std::size_t>(cfg.filter_w)) continue;
        PureStream smoothed = preprocess::smooth_stream(session.stream, filter);
        auto slices = preprocess::slice_windows(smoothed, slicing, session.label,
                                                session.subject_id, session.joint);
        for (const auto& slice : slices) {
            fm.rows.push_back(
                features::extract_features(slice, features::kDefaultSampleRateHz, fm.layout));
        }
    }
    if (fm.rows.empty()) {
        throw DataError("extract: no session long enough for a single " +
                        std::to_string(cfg.window_len) + "-sample window");
    }
    return fm;
}

inline features::FeatureMatrix extract_from_dir(const std::string& dir,
                                                const config::PipelineConfig& cfg,
                                                ingest::IngestReport* report = nullptr) {
    auto loaded = ingest::load_directory(dir);
    if (report) *report = loaded.report;
    return extract_from_sessions(loaded.sessions, cfg);
}

/// Classifier factory for cross_validate; the fold seed feeds the forest
/// bootstrap so every fold trains a distinct but reproducible ensemble.
inline eval::Trainer make_trainer(const config::PipelineConfig& cfg, int threads = 1) {
    if (cfg.classifier == "svm") {
        classify::SvmConfig svm_cfg;
        svm_cfg.C = cfg.svm_c;
        return [svm_cfg](const classify::Dataset& ds, std::uint64_t) -> eval::Predictor {
            auto model = classify::svm_train(ds, svm_cfg);
            return [model = std::move(model)](std::span<const double> row) {
                return classify::svm_predict(model, row);
            };
        };
    }
    if (cfg.classifier == "tree") {
        return [](const classify::Dataset& ds, std::uint64_t) -> eval::Predictor {
            auto model = classify::tree_train(ds);
            return [model = std::move(model)](std::span<const double> row) {
                return classify::tree_predict(model, row);
            };
        };
    }
    classify::ForestConfig fc;
    fc.n_trees = cfg.classifier == "rtree" ? 1 : cfg.n_trees;
    fc.mtry = cfg.mtry;
    return [fc, threads](const classify::Dataset& ds, std::uint64_t seed) -> eval::Predictor {
        classify::ForestConfig cfg_t = fc;
        cfg_t.seed = seed;
        auto model = classify::forest_train(ds, cfg_t, threads);
        return [model = std::move(model)](std::span<const double> row) {
            return classify::forest_predict(model, row);
        };
    };
}

inline eval::FoldPlan make_fold_plan(const features::FeatureMatrix& fm,
                                     const config::PipelineConfig& cfg) {
    if (cfg.group_by_subject) {
        std::vector<std::string> subjects;
        subjects.reserve(fm.rows.size());
        for (const auto& r : fm.rows) subjects.push_back(r.subject_id);
        return eval::group_kfold(subjects, cfg.folds, cfg.seed);
    }
    const auto table = eval::class_table(fm);
    const auto y = eval::class_ids(fm, table);
    return eval::stratified_kfold(y, static_cast<int>(table.size()), cfg.folds, cfg.seed);
}

/// Cross-validated evaluation with the full effective config echoed into the
/// report. Thread count deliberately stays out of the echo: it must not
/// change any reported byte.
inline eval::EvalReport run_eval(const features::FeatureMatrix& fm,
                                 const config::PipelineConfig& cfg, int threads = 1) {
    cfg.validate();
    if (!cfg.seed_set) throw DataError("eval: seed is required (pass --seed)");
    eval::FoldPlan plan = make_fold_plan(fm, cfg);
    eval::CvOptions opts;
    opts.pca_threshold = cfg.pca_threshold;
    opts.leaky_preproc = cfg.leaky_preproc;
    opts.threads = threads;
    eval::EvalReport report = eval::cross_validate(fm, make_trainer(cfg, 1), plan, opts);
    report.config_echo = cfg.echo();
    report.config_echo.emplace_back("fold_mode", plan.grouped ? "subject" : "slice");
    return report;
}

/// Fit normalization + PCA + classifier on the whole matrix (the `train`
/// command; evaluation numbers come from run_eval, never from this).
inline model_io::PipelineModel train_full(const features::FeatureMatrix& fm,
                                          const config::PipelineConfig& cfg) {
    cfg.validate();
    if (!cfg.seed_set) throw DataError("train: seed is required (pass --seed)");
    const auto table = eval::class_table(fm);
    if (table.size() < 2) throw DataError("train: need at least 2 classes");

    model_io::PipelineModel model;
    model.kind = cfg.classifier;
    model.layout = fm.layout;
    for (Emotion e : table) model.class_names.emplace_back(to_string(e));

    Matrix x = features::values_matrix(fm);
    model.stats = features::zscore_fit(x);
    features::zscore_apply(model.stats, x);
    model.pca = pca::pca_fit(x, cfg.pca_threshold);
    x = pca::pca_transform(model.pca, x);

    classify::Dataset ds{std::move(x), eval::class_ids(fm, table),
                         static_cast<int>(table.size())};
    if (cfg.classifier == "svm") {
        classify::SvmConfig svm_cfg;
        svm_cfg.C = cfg.svm_c;
        model.svm = classify::svm_train(ds, svm_cfg);
    } else if (cfg.classifier == "tree") {
        model.tree = classify::tree_train(ds);
    } else {
        classify::ForestConfig fc;
        fc.n_trees = cfg.classifier == "rtree" ? 1 : cfg.n_trees;
        fc.mtry = cfg.mtry;
        fc.seed = mix_seed(cfg.seed, 0x7261696eULL);
        model.forest = classify::forest_train(ds, fc);
    }
    return model;
}

/// One cell of the w x classifier sensitivity grid.
struct GridCell {
    int filter_w = 0;
    Joint joint = Joint::ankle;
    std::string classifier;
    double accuracy = 0.0;
    std::size_t rows = 0;
};

/// Run the w in {3,5} x {svm,tree,forest} grid per joint present in the
/// data, re-extracting features for each w. Cell order is deterministic.
inline std::vector<GridCell> run_grid(const std::string& input_dir,
                                      const config::PipelineConfig& base, int threads = 1) {
    if (!base.seed_set) throw DataError("report: seed is required (pass --seed)");
    std::vector<GridCell> cells;
    static const int ws[] = {3, 5};
    static const char* classifiers[] = {"svm", "tree", "forest"};
    for (int w : ws) {
        config::PipelineConfig cfg = base;
        cfg.filter_w = w;
        auto fm = extract_from_dir(input_dir, cfg);
        for (Joint joint : {Joint::wrist, Joint::ankle}) {
            features::FeatureMatrix sub;
            sub.layout = fm.layout;
            for (const auto& r : fm.rows) {
                if (r.joint == joint) sub.rows.push_back(r);
            }
            if (sub.rows.empty()) continue;
            for (const char* clf : classifiers) {
                cfg.classifier = clf;
                eval::EvalReport report = run_eval(sub, cfg, threads);
                cells.push_back({w, joint, clf, report.overall_accuracy, sub.rows.size()});
            }
        }
    }
    if (cells.empty()) throw DataError("report: no joint had any feature rows");
    return cells;
}

inline std::string render_grid_text(const std::vector<GridCell>& cells) {
    std::ostringstream os;
    char buf[64];
    int current_w = -1;
    for (const auto& c : cells) {
        if (c.filter_w != current_w) {
            if (current_w != -1) os << "\n";
            current_w = c.filter_w;
            os << "classification accuracy, w=" << current_w << "\n";
            std::snprintf(buf, sizeof(buf), "%-8s", "joint");
            os << buf;
            for (const char* clf : {"svm", "tree", "forest"}) {
                std::snprintf(buf, sizeof(buf), "%10s", clf);
                os << buf;
            }
            os << "\n";
        }
        if (c.classifier == "svm") {
            std::snprintf(buf, sizeof(buf), "%-8s", to_string(c.joint));
            os << buf;
        }
        std::snprintf(buf, sizeof(buf), "%9.2f%%", 100.0 * c.accuracy);
        os << buf;
        if (c.classifier == "forest") os << "\n";
    }
    return os.str();
}

inline std::string render_grid_csv(const std::vector<GridCell>& cells) {
    std::ostringstream os;
    os << "filter_w,joint,classifier,accuracy,rows\n";
    for (const auto& c : cells) {
        os << c.filter_w << "," << to_string(c.joint) << "," << c.classifier << ","
           << fmt_double(c.accuracy) << "," << c.rows << "\n";
    }
    return os.str();
}

}  // namespace gaitline::pipeline
