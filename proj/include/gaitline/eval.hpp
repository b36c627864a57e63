#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gaitline/dataset.hpp"
#include "gaitline/features.hpp"
#include "gaitline/pca.hpp"

namespace gaitline::eval {

struct FoldPlan {
    int k = 10;
    std::uint64_t seed = 0;
    std::vector<int> assignments;  // per-row fold index in [0, k)
    bool grouped = false;          // true when folds were dealt by subject
};

/// Within each class, shuffle rows by seed and deal them round-robin, so per
/// fold the class counts differ by at most one.
inline FoldPlan stratified_kfold(const std::vector<int>& labels, int n_classes, int k,
                                 std::uint64_t seed) {
    if (k < 2) throw DataError("stratified_kfold: k must be >= 2");
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(labels.size(), -1);
    for (int c = 0; c < n_classes; ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) rows.push_back(i);
        }
        if (rows.empty()) continue;
        if (rows.size() < static_cast<std::size_t>(k)) {
            throw DataError("stratified_kfold: class " + std::to_string(c) + " has only " +
                            std::to_string(rows.size()) + " rows for k = " + std::to_string(k));
        }
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
        rng.shuffle(rows);
        for (std::size_t p = 0; p < rows.size(); ++p) {
            plan.assignments[rows[p]] = static_cast<int>(p % static_cast<std::size_t>(k));
        }
    }
    return plan;
}

/// All rows of a subject share one fold; subjects are shuffled and dealt
/// round-robin. Guards against the subject-overlap inflation of slice-level
/// folding.
inline FoldPlan group_kfold(const std::vector<std::string>& subjects, int k,
                            std::uint64_t seed) {
    if (k < 2) throw DataError("group_kfold: k must be >= 2");
    std::vector<std::string> uniq;
    std::map<std::string, std::size_t> pos;
    for (const auto& s : subjects) {
        if (pos.emplace(s, uniq.size()).second) uniq.push_back(s);
    }
    if (uniq.size() < static_cast<std::size_t>(k)) {
        throw DataError("group_kfold: only " + std::to_string(uniq.size()) +
                        " subjects for k = " + std::to_string(k));
    }
    std::vector<std::size_t> order(uniq.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(mix_seed(seed, 0x67726f7570ULL));
    rng.shuffle(order);
    std::vector<int> fold_of(uniq.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
        fold_of[order[p]] = static_cast<int>(p % static_cast<std::size_t>(k));
    }
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.grouped = true;
    plan.assignments.reserve(subjects.size());
    for (const auto& s : subjects) plan.assignments.push_back(fold_of[pos[s]]);
    return plan;
}

struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::int64_t>> counts;  // [true][predicted]

    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& row : counts) {
            for (std::int64_t c : row) t += c;
        }
        return t;
    }
};

inline double accuracy(const ConfusionMatrix& cm) {
    const std::int64_t t = cm.total();
    if (t == 0) throw DataError("accuracy: empty confusion matrix");
    std::int64_t diag = 0;
    for (std::size_t i = 0; i < cm.counts.size(); ++i) diag += cm.counts[i][i];
    return static_cast<double>(diag) / static_cast<double>(t);
}

/// diagonal / row sum per class; a class with no true rows scores 0.
inline std::vector<double> per_class_accuracy(const ConfusionMatrix& cm) {
    std::vector<double> out(cm.counts.size(), 0.0);
    for (std::size_t i = 0; i < cm.counts.size(); ++i) {
        std::int64_t row = 0;
        for (std::int64_t c : cm.counts[i]) row += c;
        if (row > 0) out[i] = static_cast<double>(cm.counts[i][i]) / static_cast<double>(row);
    }
    return out;
}

struct EvalReport {
    ConfusionMatrix confusion;
    double overall_accuracy = 0.0;
    std::vector<double> per_class;
    std::vector<std::pair<std::string, std::string>> config_echo;  // ordered key/value

    std::string render_text() const;
    std::string render_kv() const;
};

/// Emotions present in the matrix, in enum order; class id = position.
inline std::vector<Emotion> class_table(const features::FeatureMatrix& fm) {
    bool present[3] = {false, false, false};
    for (const auto& r : fm.rows) present[static_cast<int>(r.label)] = true;
    std::vector<Emotion> table;
    for (int e = 0; e < 3; ++e) {
        if (present[e]) table.push_back(static_cast<Emotion>(e));
    }
    return table;
}

inline std::vector<int> class_ids(const features::FeatureMatrix& fm,
                                  const std::vector<Emotion>& table) {
    std::vector<int> y;
    y.reserve(fm.rows.size());
    for (const auto& r : fm.rows) {
        auto it = std::find(table.begin(), table.end(), r.label);
        if (it == table.end()) throw DataError("class_ids: label outside class table");
        y.push_back(static_cast<int>(it - table.begin()));
    }
    return y;
}

/// A trainer maps a (preprocessed) training set and a fold seed to a
/// predictor. Classifier choice, constant-predictor test hooks and the like
/// all plug in here.
using Predictor = std::function<int(std::span<const double>)>;
using Trainer = std::function<Predictor(const classify::Dataset&, std::uint64_t)>;

struct CvOptions {
    double pca_threshold = 0.95;
    bool leaky_preproc = false;  // fit z-score/PCA once on all rows (paper-style)
    int threads = 1;
};

/// Stratified cross-validation with per-fold z-score and PCA fitting on the
/// training portion only (unless leaky_preproc). Per-fold confusion counts
/// are merged by addition in fold order, so the result is independent of the
/// thread count.
inline EvalReport cross_validate(const features::FeatureMatrix& raw, const Trainer& trainer,
                                 const FoldPlan& plan, CvOptions opts = {}) {
    if (plan.assignments.size() != raw.rows.size()) {
        throw DataError("cross_validate: fold plan covers " +
                        std::to_string(plan.assignments.size()) + " rows, matrix has " +
                        std::to_string(raw.rows.size()));
    }
    const auto table = class_table(raw);
    if (table.size() < 2) throw DataError("cross_validate: need at least 2 classes");
    const auto y = class_ids(raw, table);
    const Matrix values = features::values_matrix(raw);

    features::ColumnStats shared_stats;
    pca::PcaModel shared_pca;
    if (opts.leaky_preproc) {
        Matrix all = values;
        shared_stats = features::zscore_fit(all);
        features::zscore_apply(shared_stats, all);
        shared_pca = pca::pca_fit(all, opts.pca_threshold);
    }

    std::vector<ConfusionMatrix> fold_cms(static_cast<std::size_t>(plan.k));
    parallel_for(static_cast<std::size_t>(plan.k), opts.threads, [&](std::size_t f) {
        try {
            std::vector<std::size_t> train_idx, test_idx;
            for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
                (plan.assignments[i] == static_cast<int>(f) ? test_idx : train_idx).push_back(i);
            }
            ConfusionMatrix& cm = fold_cms[f];
            cm.counts.assign(table.size(), std::vector<std::int64_t>(table.size(), 0));
            for (Emotion e : table) cm.classes.emplace_back(to_string(e));
            if (test_idx.empty()) return;
            if (train_idx.empty()) throw DataError("empty training portion");

            Matrix train_x, test_x;
            std::vector<int> train_y;
            train_x.reserve(train_idx.size());
            for (std::size_t i : train_idx) {
                train_x.push_back(values[i]);
                train_y.push_back(y[i]);
            }
            test_x.reserve(test_idx.size());
            for (std::size_t i : test_idx) test_x.push_back(values[i]);

            if (opts.leaky_preproc) {
                features::zscore_apply(shared_stats, train_x);
                features::zscore_apply(shared_stats, test_x);
                train_x = pca::pca_transform(shared_pca, train_x);
                test_x = pca::pca_transform(shared_pca, test_x);
            } else {
                auto stats = features::zscore_fit(train_x);
                features::zscore_apply(stats, train_x);
                features::zscore_apply(stats, test_x);
                auto fold_pca = pca::pca_fit(train_x, opts.pca_threshold);
                train_x = pca::pca_transform(fold_pca, train_x);
                test_x = pca::pca_transform(fold_pca, test_x);
            }

            classify::Dataset ds{std::move(train_x), std::move(train_y),
                                 static_cast<int>(table.size())};
            Predictor predict = trainer(ds, mix_seed(plan.seed, 0xf01d0000ULL + f));
            for (std::size_t t = 0; t < test_idx.size(); ++t) {
                const int pred = predict(test_x[t]);
                cm.counts[static_cast<std::size_t>(y[test_idx[t]])]
                         [static_cast<std::size_t>(pred)]++;
            }
        } catch (const NumericError& e) {
            throw NumericError("fold " + std::to_string(f) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("fold " + std::to_string(f) + ": " + e.what());
        }
    });

    EvalReport report;
    report.confusion.counts.assign(table.size(), std::vector<std::int64_t>(table.size(), 0));
    for (Emotion e : table) report.confusion.classes.emplace_back(to_string(e));
    for (const auto& cm : fold_cms) {
        for (std::size_t i = 0; i < table.size(); ++i) {
            for (std::size_t j = 0; j < table.size(); ++j) {
                report.confusion.counts[i][j] += cm.counts[i][j];
            }
        }
    }
    report.overall_accuracy = accuracy(report.confusion);
    report.per_class = per_class_accuracy(report.confusion);
    return report;
}

inline std::string EvalReport::render_text() const {
    std::ostringstream os;
    char buf[64];
    os << "gaitline evaluation report\n";
    os << "--------------------------\n";
    for (const auto& [k, v] : config_echo) os << k << " = " << v << "\n";
    os << "\nconfusion matrix (rows = true, cols = predicted):\n";
    os << "          ";
    for (const auto& c : confusion.classes) {
        std::snprintf(buf, sizeof(buf), "%9s", c.c_str());
        os << buf;
    }
    os << "      acc\n";
    for (std::size_t i = 0; i < confusion.classes.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%-10s", confusion.classes[i].c_str());
        os << buf;
        for (std::size_t j = 0; j < confusion.classes.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%9lld",
                          static_cast<long long>(confusion.counts[i][j]));
            os << buf;
        }
        std::snprintf(buf, sizeof(buf), "%8.2f%%", 100.0 * per_class[i]);
        os << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * overall_accuracy);
    os << "\noverall accuracy: " << buf << "% (n = " << confusion.total() << ")\n";
    return os.str();
}

inline std::string EvalReport::render_kv() const {
    std::ostringstream os;
    char buf[64];
    for (const auto& [k, v] : config_echo) os << "config." << k << "=" << v << "\n";
    os << "result.classes=" << confusion.classes.size() << "\n";
    for (std::size_t i = 0; i < confusion.classes.size(); ++i) {
        os << "result.class." << i << ".name=" << confusion.classes[i] << "\n";
    }
    for (std::size_t i = 0; i < confusion.counts.size(); ++i) {
        for (std::size_t j = 0; j < confusion.counts[i].size(); ++j) {
            os << "result.confusion." << i << "." << j << "=" << confusion.counts[i][j] << "\n";
        }
    }
    std::snprintf(buf, sizeof(buf), "%.17g", overall_accuracy);
    os << "result.overall_accuracy=" << buf << "\n";
    for (std::size_t i = 0; i < per_class.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", per_class[i]);
        os << "result.per_class_accuracy." << i << "=" << buf << "\n";
    }
    os << "result.rows=" << confusion.total() << "\n";
    return os.str();
}

}  // namespace gaitline::eval
