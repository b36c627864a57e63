#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitline/features.hpp"
#include "gaitline/forest.hpp"
#include "gaitline/pca.hpp"
#include "gaitline/svm.hpp"
#include "gaitline/tree.hpp"

namespace gaitline::model_io {

constexpr const char* kFormatVersion = "gaitline-model-v1";

/// Everything needed to score a raw feature row: the normalization stats and
/// PCA basis fitted at train time plus one classifier. kind selects which of
/// the classifier members is active.
struct PipelineModel {
    std::string kind;  // svm | tree | rtree | forest
    std::vector<std::string> class_names;
    features::FeatureLayout layout;
    features::ColumnStats stats;
    pca::PcaModel pca;
    classify::SvmModel svm;
    classify::TreeModel tree;
    classify::ForestModel forest;

    int predict_raw(const std::vector<double>& row) const {
        Matrix m{row};
        features::zscore_apply(stats, m);
        m = pca::pca_transform(pca, m);
        std::span<const double> x(m[0]);
        if (kind == "svm") return classify::svm_predict(svm, x);
        if (kind == "tree") return classify::tree_predict(tree, x);
        return classify::forest_predict(forest, x);
    }
};

namespace detail {

using nlohmann::json;

inline json tree_to_json(const classify::TreeModel& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        nodes.push_back({{"f", n.feature},
                         {"t", n.threshold},
                         {"l", n.left},
                         {"r", n.right},
                         {"c", n.counts}});
    }
    return {{"n_classes", t.n_classes}, {"nodes", nodes}};
}

inline classify::TreeModel tree_from_json(const json& j) {
    classify::TreeModel t;
    t.n_classes = j.at("n_classes").get<int>();
    for (const auto& n : j.at("nodes")) {
        classify::TreeNode node;
        node.feature = n.at("f").get<int>();
        node.threshold = n.at("t").get<double>();
        node.left = n.at("l").get<int>();
        node.right = n.at("r").get<int>();
        node.counts = n.at("c").get<std::vector<std::int64_t>>();
        t.nodes.push_back(std::move(node));
    }
    return t;
}

}  // namespace detail

inline std::string to_json_string(const PipelineModel& m) {
    using nlohmann::json;
    json j;
    j["format"] = kFormatVersion;
    j["kind"] = m.kind;
    j["class_names"] = m.class_names;
    j["layout"] = {{"include_dc", m.layout.include_dc}};
    j["zscore"] = {{"mean", m.stats.mean}, {"stddev", m.stats.stddev}};
    j["pca"] = {{"mean", m.pca.mean},
                {"components", m.pca.components},
                {"eigenvalues", m.pca.eigenvalues},
                {"explained_variance_ratio", m.pca.explained_variance_ratio},
                {"degenerate", m.pca.degenerate}};
    if (m.kind == "svm") {
        json pairs = json::array();
        for (const auto& p : m.svm.pairs) {
            pairs.push_back(
                {{"pos", p.class_pos}, {"neg", p.class_neg}, {"b", p.b}, {"w", p.w}});
        }
        j["svm"] = {{"n_classes", m.svm.n_classes}, {"C", m.svm.C}, {"pairs", pairs}};
    } else if (m.kind == "tree") {
        j["tree"] = detail::tree_to_json(m.tree);
    } else {  // rtree | forest
        json trees = json::array();
        for (const auto& t : m.forest.trees) trees.push_back(detail::tree_to_json(t));
        j["forest"] = {{"n_classes", m.forest.n_classes},
                       {"mtry", m.forest.mtry},
                       {"tree_seeds", m.forest.tree_seeds},
                       {"trees", trees}};
    }
    return j.dump(2) + "\n";
}

inline PipelineModel from_json_string(const std::string& text, const std::string& origin) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(origin + ": not a valid model file: " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormatVersion) {
            throw DataError(origin + ": unsupported model format '" +
                            j.at("format").get<std::string>() + "'");
        }
        PipelineModel m;
        m.kind = j.at("kind").get<std::string>();
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        m.layout.include_dc = j.at("layout").at("include_dc").get<bool>();
        m.stats.mean = j.at("zscore").at("mean").get<std::vector<double>>();
        m.stats.stddev = j.at("zscore").at("stddev").get<std::vector<double>>();
        const auto& p = j.at("pca");
        m.pca.mean = p.at("mean").get<std::vector<double>>();
        m.pca.components = p.at("components").get<Matrix>();
        m.pca.eigenvalues = p.at("eigenvalues").get<std::vector<double>>();
        m.pca.explained_variance_ratio =
            p.at("explained_variance_ratio").get<std::vector<double>>();
        m.pca.degenerate = p.at("degenerate").get<bool>();
        if (m.kind == "svm") {
            const auto& s = j.at("svm");
            m.svm.n_classes = s.at("n_classes").get<int>();
            m.svm.C = s.at("C").get<double>();
            for (const auto& q : s.at("pairs")) {
                classify::BinarySvm pair;
                pair.class_pos = q.at("pos").get<int>();
                pair.class_neg = q.at("neg").get<int>();
                pair.b = q.at("b").get<double>();
                pair.w = q.at("w").get<std::vector<double>>();
                m.svm.pairs.push_back(std::move(pair));
            }
        } else if (m.kind == "tree") {
            m.tree = detail::tree_from_json(j.at("tree"));
        } else if (m.kind == "rtree" || m.kind == "forest") {
            const auto& f = j.at("forest");
            m.forest.n_classes = f.at("n_classes").get<int>();
            m.forest.mtry = f.at("mtry").get<int>();
            m.forest.tree_seeds = f.at("tree_seeds").get<std::vector<std::uint64_t>>();
            for (const auto& t : f.at("trees")) {
                m.forest.trees.push_back(detail::tree_from_json(t));
            }
        } else {
            throw DataError(origin + ": unknown classifier kind '" + m.kind + "'");
        }
        return m;
    } catch (const json::exception& e) {
        throw DataError(origin + ": malformed model file: " + e.what());
    }
}

inline void save_model(const PipelineModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << to_json_string(m);
}

inline PipelineModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open model file: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return from_json_string(text, path);
}

}  // namespace gaitline::model_io
