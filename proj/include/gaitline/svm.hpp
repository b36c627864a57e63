#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gaitline/dataset.hpp"

namespace gaitline::classify {

struct SvmConfig {
    double C = 1.0;       // soft-margin penalty (the Weka-style default)
    double tol = 1e-3;    // maximal KKT violation allowed at convergence
    int max_passes = 1000;  // sweep budget; one sweep = n pairwise updates
};

/// One binary one-vs-one submodel. decision(x) = w.x + b, >= 0 votes
/// class_pos (the lower class id of the pair).
struct BinarySvm {
    int class_pos = 0;
    int class_neg = 1;
    std::vector<double> w;
    double b = 0.0;
};

struct SvmModel {
    int n_classes = 0;
    double C = 1.0;
    std::vector<BinarySvm> pairs;

    std::size_t dim() const { return pairs.empty() ? 0 : pairs[0].w.size(); }
};

/// Optimizer trace for one pair, kept for diagnostics and contract tests:
/// dual feasibility and sweep-monotone objective are asserted on it.
struct SvmPairStats {
    int class_pos = 0;
    int class_neg = 1;
    std::size_t sweeps = 0;
    bool converged = false;
    double final_violation = 0.0;
    std::vector<double> dual_objective_per_sweep;
    std::vector<double> alpha;
    std::vector<double> labels;  // +1/-1, aligned with alpha
};

struct SvmTrainInfo {
    std::vector<SvmPairStats> pairs;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

/// SMO on the soft-margin linear dual with maximal-violating-pair selection.
/// The equality constraint sum(alpha*y) = 0 is preserved exactly by the
/// pairwise updates, so the bias can be recovered from the KKT conditions.
inline BinarySvm smo_train_pair(const Matrix& X, const std::vector<int>& cls, int pos, int neg,
                                const SvmConfig& cfg, SvmPairStats* stats) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (cls[i] == pos || cls[i] == neg) rows.push_back(i);
    }
    const std::size_t n = rows.size();
    const std::size_t d = X.empty() ? 0 : X[0].size();

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = cls[rows[i]] == pos ? 1.0 : -1.0;

    std::vector<double> alpha(n, 0.0);
    std::vector<double> g(n, -1.0);  // gradient of the dual at alpha = 0
    std::vector<double> kdiag(n);
    for (std::size_t i = 0; i < n; ++i) kdiag[i] = dot(X[rows[i]], X[rows[i]]);
    std::vector<double> ki(n), kj(n);

    const double C = cfg.C;
    auto in_up = [&](std::size_t k) {
        return (y[k] > 0.0 && alpha[k] < C) || (y[k] < 0.0 && alpha[k] > 0.0);
    };
    auto in_low = [&](std::size_t k) {
        return (y[k] > 0.0 && alpha[k] > 0.0) || (y[k] < 0.0 && alpha[k] < C);
    };
    auto dual_objective = [&]() {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += alpha[k] * (1.0 - g[k]);
        return 0.5 * acc;
    };

    bool converged = false;
    double g_max = 0.0, g_min = 0.0;
    std::size_t sweeps = 0;
    if (stats) stats->dual_objective_per_sweep.push_back(dual_objective());

    for (; sweeps < static_cast<std::size_t>(cfg.max_passes) && !converged; ++sweeps) {
        for (std::size_t step = 0; step < n; ++step) {
            // first-order choice of i, second-order choice of j (the pair
            // with the largest guaranteed objective increase)
            std::size_t i = n;
            g_max = -std::numeric_limits<double>::infinity();
            g_min = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k) {
                const double v = -y[k] * g[k];
                if (in_up(k) && v > g_max) {
                    g_max = v;
                    i = k;
                }
                if (in_low(k) && v < g_min) g_min = v;
            }
            if (i == n || g_min == std::numeric_limits<double>::infinity() ||
                g_max - g_min < cfg.tol) {
                converged = true;
                break;
            }

            for (std::size_t k = 0; k < n; ++k) ki[k] = dot(X[rows[i]], X[rows[k]]);

            std::size_t j = n;
            double best_score = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k) {
                if (!in_low(k)) continue;
                const double diff = g_max - (-y[k] * g[k]);
                if (diff <= 0.0) continue;
                const double lam = std::max(kdiag[i] + kdiag[k] - 2.0 * ki[k], 1e-12);
                const double score = -(diff * diff) / lam;
                if (score < best_score) {
                    best_score = score;
                    j = k;
                }
            }
            if (j == n) {
                converged = true;
                break;
            }
            for (std::size_t k = 0; k < n; ++k) kj[k] = dot(X[rows[j]], X[rows[k]]);

            const double eta = std::max(kdiag[i] + kdiag[j] - 2.0 * ki[j], 1e-12);
            const double step_len = (g_max - (-y[j] * g[j])) / eta;

            const double old_ai = alpha[i];
            const double old_aj = alpha[j];
            const double sum = y[i] * old_ai + y[j] * old_aj;
            alpha[i] = std::clamp(alpha[i] + y[i] * step_len, 0.0, C);
            alpha[j] = std::clamp(y[j] * (sum - y[i] * alpha[i]), 0.0, C);
            alpha[i] = y[i] * (sum - y[j] * alpha[j]);

            const double dai = (alpha[i] - old_ai) * y[i];
            const double daj = (alpha[j] - old_aj) * y[j];
            for (std::size_t k = 0; k < n; ++k) {
                g[k] += y[k] * (ki[k] * dai + kj[k] * daj);
            }
        }
        if (stats) stats->dual_objective_per_sweep.push_back(dual_objective());
    }

    if (stats) {
        stats->class_pos = pos;
        stats->class_neg = neg;
        stats->sweeps = sweeps;
        stats->converged = converged;
        stats->final_violation = converged ? std::max(0.0, g_max - g_min) : g_max - g_min;
        stats->alpha = alpha;
        stats->labels = y;
    }
    if (!converged) {
        throw NumericError("svm_train: pair (" + std::to_string(pos) + "," +
                           std::to_string(neg) + ") did not converge within " +
                           std::to_string(cfg.max_passes) + " sweeps");
    }

    BinarySvm model;
    model.class_pos = pos;
    model.class_neg = neg;
    model.w.assign(d, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (alpha[k] == 0.0) continue;
        const double coeff = alpha[k] * y[k];
        const auto& x = X[rows[k]];
        for (std::size_t c = 0; c < d; ++c) model.w[c] += coeff * x[c];
    }
    // KKT bias: free support vectors pin it exactly; otherwise take the
    // midpoint of the feasible interval.
    double acc = 0.0;
    std::size_t free_svs = 0;
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double v = -y[k] * g[k];
        if (alpha[k] > 0.0 && alpha[k] < C) {
            acc += v;
            ++free_svs;
        }
        if (in_up(k)) up = std::max(up, v);
        if (in_low(k)) low = std::min(low, v);
    }
    model.b = free_svs > 0 ? acc / static_cast<double>(free_svs) : 0.5 * (up + low);
    return model;
}

}  // namespace detail

/// Train one linear soft-margin SVM per unordered class pair (one-vs-one).
inline SvmModel svm_train(const Dataset& data, SvmConfig cfg = {},
                          SvmTrainInfo* info = nullptr) {
    data.validate();
    if (!(cfg.C > 0.0)) throw DataError("svm_train: C must be positive");
    auto counts = data.class_counts();
    int present = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) ++present;
    }
    if (present < 2) throw DataError("svm_train: need at least 2 classes with rows");

    SvmModel model;
    model.n_classes = data.n_classes;
    model.C = cfg.C;
    for (int a = 0; a < data.n_classes; ++a) {
        for (int b = a + 1; b < data.n_classes; ++b) {
            if (counts[static_cast<std::size_t>(a)] == 0 ||
                counts[static_cast<std::size_t>(b)] == 0) {
                continue;
            }
            SvmPairStats stats;
            model.pairs.push_back(
                detail::smo_train_pair(data.X, data.y, a, b, cfg, info ? &stats : nullptr));
            if (info) info->pairs.push_back(std::move(stats));
        }
    }
    return model;
}

/// One-vs-one majority vote; a pair with decision exactly 0 votes its
/// positive class, and overall ties resolve to the lowest class id.
inline int svm_predict(const SvmModel& model, std::span<const double> row) {
    if (model.pairs.empty()) throw DataError("svm_predict: empty model");
    if (row.size() != model.dim()) {
        throw DataError("svm_predict: row width " + std::to_string(row.size()) +
                        " != model dim " + std::to_string(model.dim()));
    }
    std::vector<int> votes(static_cast<std::size_t>(model.n_classes), 0);
    for (const auto& p : model.pairs) {
        const double decision = detail::dot(p.w, row) + p.b;
        votes[static_cast<std::size_t>(decision >= 0.0 ? p.class_pos : p.class_neg)]++;
    }
    int best = 0;
    for (int c = 1; c < model.n_classes; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

}  // namespace gaitline::classify
