#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gaitline/tree.hpp"

namespace gaitline::classify {

struct ForestConfig {
    int n_trees = 100;
    int mtry = 0;  // features sampled per split; 0 = floor(sqrt(d))
    std::uint64_t seed = 0;
    bool bootstrap = true;  // test hook: off + mtry = d reproduces the plain tree
    TreeConfig tree;
};

struct ForestModel {
    int n_classes = 0;
    int mtry = 0;
    std::vector<TreeModel> trees;
    std::vector<std::uint64_t> tree_seeds;  // per-tree bootstrap/split-sampling seed
};

/// The bootstrap resample drawn by the tree seeded with `seed`: n draws with
/// replacement, in draw order. Exposed so out-of-bag evaluation can rebuild
/// the same sets.
inline std::vector<std::size_t> bootstrap_indices(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = rng.index(n);
    return idx;
}

/// Bagged CART ensemble. n_trees = 1 gives the random-tree baseline. Tree t
/// is fully determined by mix_seed(seed, t), so parallel and serial training
/// build identical forests.
inline ForestModel forest_train(const Dataset& data, ForestConfig cfg = {}, int threads = 1) {
    data.validate();
    if (data.rows() == 0) throw DataError("forest_train: empty dataset");
    if (cfg.n_trees < 1) throw DataError("forest_train: n_trees must be >= 1");
    const int d = static_cast<int>(data.dim());
    int mtry = cfg.mtry;
    if (mtry == 0) mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(d))));
    if (mtry < 1 || mtry > d) {
        throw DataError("forest_train: mtry " + std::to_string(mtry) + " outside [1, " +
                        std::to_string(d) + "]");
    }

    ForestModel model;
    model.n_classes = data.n_classes;
    model.mtry = mtry;
    model.trees.resize(static_cast<std::size_t>(cfg.n_trees));
    model.tree_seeds.resize(static_cast<std::size_t>(cfg.n_trees));
    for (int t = 0; t < cfg.n_trees; ++t) {
        model.tree_seeds[static_cast<std::size_t>(t)] =
            mix_seed(cfg.seed, static_cast<std::uint64_t>(t));
    }

    parallel_for(static_cast<std::size_t>(cfg.n_trees), threads, [&](std::size_t t) {
        Rng rng(model.tree_seeds[t]);
        std::vector<std::size_t> idx;
        if (cfg.bootstrap) {
            idx.resize(data.rows());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = rng.index(data.rows());
        } else {
            idx.resize(data.rows());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
        }
        model.trees[t] = detail::tree_train_impl(data, std::move(idx), cfg.tree, mtry,
                                                 mtry < d ? &rng : nullptr);
    });
    return model;
}

/// Majority vote over trees; ties resolve to the lowest class id.
inline int forest_predict(const ForestModel& model, std::span<const double> row) {
    if (model.trees.empty()) throw DataError("forest_predict: empty model");
    std::vector<int> votes(static_cast<std::size_t>(model.n_classes), 0);
    for (const auto& tree : model.trees) {
        votes[static_cast<std::size_t>(tree_predict(tree, row))]++;
    }
    int best = 0;
    for (int c = 1; c < model.n_classes; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

}  // namespace gaitline::classify
