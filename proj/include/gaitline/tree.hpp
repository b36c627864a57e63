#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gaitline/dataset.hpp"

namespace gaitline::classify {

struct TreeConfig {
    int max_depth = 20;
    int min_leaf = 2;
};

/// Flat node storage. Internal nodes route `x[feature] < threshold` to the
/// left child; leaves carry the class distribution of their training rows.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<std::int64_t> counts;  // leaves only
};

struct TreeModel {
    int n_classes = 0;
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

namespace detail {

inline double gini(std::span<const std::int64_t> counts, std::int64_t total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (std::int64_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = -std::numeric_limits<double>::infinity();
};

/// Best Gini-gain split over the given features, scanning midpoint
/// thresholds between consecutive distinct values. Deterministic tie-break:
/// first feature in `features` order, then lowest threshold.
inline Split best_split(const Dataset& data, std::span<const std::size_t> idx,
                        std::span<const int> features, int min_leaf) {
    const std::int64_t n = static_cast<std::int64_t>(idx.size());
    std::vector<std::int64_t> total(static_cast<std::size_t>(data.n_classes), 0);
    for (std::size_t r : idx) total[static_cast<std::size_t>(data.y[r])]++;
    const double parent_gini = gini(total, n);

    Split best;
    std::vector<std::pair<double, int>> vals(idx.size());
    std::vector<std::int64_t> left(static_cast<std::size_t>(data.n_classes));
    for (int f : features) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            vals[k] = {data.X[idx[k]][static_cast<std::size_t>(f)], data.y[idx[k]]};
        }
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::fill(left.begin(), left.end(), 0);
        std::int64_t nl = 0;
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
            left[static_cast<std::size_t>(vals[k].second)]++;
            ++nl;
            if (vals[k].first == vals[k + 1].first) continue;  // not a boundary
            const std::int64_t nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            double left_gini = 1.0, right_gini = 1.0;
            for (std::size_t c = 0; c < left.size(); ++c) {
                const double pl = static_cast<double>(left[c]) / static_cast<double>(nl);
                const double pr =
                    static_cast<double>(total[c] - left[c]) / static_cast<double>(nr);
                left_gini -= pl * pl;
                right_gini -= pr * pr;
            }
            const double child =
                (static_cast<double>(nl) * left_gini + static_cast<double>(nr) * right_gini) /
                static_cast<double>(n);
            const double gain = parent_gini - child;
            if (gain > best.gain + 1e-15) {
                best.feature = f;
                best.threshold = 0.5 * (vals[k].first + vals[k + 1].first);
                best.gain = gain;
            }
        }
    }
    return best;
}

inline int build_node(const Dataset& data, std::vector<std::size_t>& idx, std::size_t begin,
                      std::size_t end, int depth, const TreeConfig& cfg, TreeModel& model,
                      int mtry, Rng* rng) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(data.n_classes), 0);
    for (std::size_t k = begin; k < end; ++k) counts[static_cast<std::size_t>(data.y[idx[k]])]++;
    const std::int64_t n = static_cast<std::int64_t>(end - begin);

    auto make_leaf = [&]() {
        TreeNode leaf;
        leaf.counts = counts;
        model.nodes.push_back(std::move(leaf));
        return static_cast<int>(model.nodes.size() - 1);
    };

    bool pure = false;
    for (std::int64_t c : counts) {
        if (c == n) pure = true;
    }
    if (pure || depth >= cfg.max_depth || n < 2 * cfg.min_leaf) return make_leaf();

    std::vector<int> features;
    const int d = static_cast<int>(data.dim());
    if (rng != nullptr && mtry < d) {
        std::vector<int> all(static_cast<std::size_t>(d));
        std::iota(all.begin(), all.end(), 0);
        for (int k = 0; k < mtry; ++k) {
            std::size_t pick = static_cast<std::size_t>(k) +
                               rng->index(static_cast<std::size_t>(d - k));
            std::swap(all[static_cast<std::size_t>(k)], all[pick]);
        }
        features.assign(all.begin(), all.begin() + mtry);
        std::sort(features.begin(), features.end());
    } else {
        features.resize(static_cast<std::size_t>(d));
        std::iota(features.begin(), features.end(), 0);
    }

    // split on the best candidate even at zero gain (XOR-style data needs
    // two zero-gain levels); only a node with no admissible split stays a leaf
    Split split = best_split(data, std::span<const std::size_t>(idx).subspan(begin, end - begin),
                             features, cfg.min_leaf);
    if (split.feature < 0) return make_leaf();

    auto mid_it = std::partition(idx.begin() + static_cast<long>(begin),
                                 idx.begin() + static_cast<long>(end), [&](std::size_t r) {
                                     return data.X[r][static_cast<std::size_t>(split.feature)] <
                                            split.threshold;
                                 });
    const std::size_t mid = static_cast<std::size_t>(mid_it - idx.begin());

    TreeNode node;
    node.feature = split.feature;
    node.threshold = split.threshold;
    model.nodes.push_back(std::move(node));
    const int self = static_cast<int>(model.nodes.size() - 1);
    const int left = build_node(data, idx, begin, mid, depth + 1, cfg, model, mtry, rng);
    const int right = build_node(data, idx, mid, end, depth + 1, cfg, model, mtry, rng);
    model.nodes[static_cast<std::size_t>(self)].left = left;
    model.nodes[static_cast<std::size_t>(self)].right = right;
    return self;
}

inline TreeModel tree_train_impl(const Dataset& data, std::vector<std::size_t> idx,
                                 const TreeConfig& cfg, int mtry, Rng* rng) {
    data.validate();
    if (idx.empty()) throw DataError("tree_train: empty dataset");
    if (cfg.min_leaf < 1) throw DataError("tree_train: min_leaf must be >= 1");
    if (cfg.max_depth < 1) throw DataError("tree_train: max_depth must be >= 1");
    TreeModel model;
    model.n_classes = data.n_classes;
    build_node(data, idx, 0, idx.size(), 0, cfg, model, mtry, rng);
    return model;
}

}  // namespace detail

/// Greedy CART with Gini impurity over all features.
inline TreeModel tree_train(const Dataset& data, TreeConfig cfg = {}) {
    std::vector<std::size_t> idx(data.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return detail::tree_train_impl(data, std::move(idx), cfg, static_cast<int>(data.dim()),
                                   nullptr);
}

inline int tree_predict(const TreeModel& model, std::span<const double> row) {
    if (model.nodes.empty()) throw DataError("tree_predict: empty model");
    std::size_t at = 0;
    while (model.nodes[at].feature >= 0) {
        const TreeNode& nd = model.nodes[at];
        if (static_cast<std::size_t>(nd.feature) >= row.size()) {
            throw DataError("tree_predict: row width " + std::to_string(row.size()) +
                            " too small for feature " + std::to_string(nd.feature));
        }
        at = static_cast<std::size_t>(row[static_cast<std::size_t>(nd.feature)] < nd.threshold
                                          ? nd.left
                                          : nd.right);
    }
    const auto& counts = model.nodes[at].counts;
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = c;  // ties keep the lowest class id
    }
    return static_cast<int>(best);
}

}  // namespace gaitline::classify
