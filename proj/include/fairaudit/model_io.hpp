#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fairaudit/classifiers.hpp"
#include "fairaudit/errors.hpp"

// Model serialization: trees as nested nodes, naive Bayes as probability
// tables, constants as a bare label. Probabilities round-trip at full
// precision.

namespace fairaudit {

namespace detail {

inline nlohmann::json tree_node_json(const DecisionTree& tree, int at) {
    const TreeNode& n = tree.nodes[at];
    nlohmann::json j;
    if (n.is_leaf()) {
        j["label"] = int(n.label);
    } else {
        j["split"] = n.attribute;
        j["zero"] = tree_node_json(tree, n.child0);
        j["one"] = tree_node_json(tree, n.child1);
    }
    return j;
}

inline int parse_tree_node(const nlohmann::json& j, DecisionTree& tree) {
    if (j.contains("label")) {
        TreeNode leaf;
        leaf.label = j["label"].get<int>() ? 1 : 0;
        tree.nodes.push_back(leaf);
        return static_cast<int>(tree.nodes.size() - 1);
    }
    if (!j.contains("split") || !j.contains("zero") || !j.contains("one"))
        throw config_error("model JSON: tree node needs 'label' or 'split'/'zero'/'one'");
    const int c0 = parse_tree_node(j["zero"], tree);
    const int c1 = parse_tree_node(j["one"], tree);
    TreeNode node;
    node.attribute = j["split"].get<std::string>();
    node.child0 = c0;
    node.child1 = c1;
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size() - 1);
}

} // namespace detail

inline std::string model_to_json(const Model& model) {
    nlohmann::json j;
    if (const auto* tree = std::get_if<DecisionTree>(&model)) {
        j["kind"] = "decision_tree";
        j["pool"] = tree->pool;
        j["max_depth"] = tree->max_depth;
        j["min_leaf"] = tree->min_leaf;
        j["root"] = detail::tree_node_json(*tree, tree->root);
    } else if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
        j["kind"] = "naive_bayes";
        j["pool"] = nb->pool;
        j["smoothing"] = nb->smoothing;
        j["prior_pos"] = nb->prior_pos;
        auto& conds = j["conditionals"] = nlohmann::json::array();
        for (const auto& c : nb->conditionals)
            conds.push_back({{"attribute", c.attribute},
                             {"p1_given_pos", c.p1_given_pos},
                             {"p1_given_neg", c.p1_given_neg}});
    } else {
        j["kind"] = "constant";
        j["label"] = int(std::get<ConstantModel>(model).label);
    }
    return j.dump(2) + "\n";
}

inline Model model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("model file is not valid JSON: ") + e.what());
    }
    const std::string kind = j.value("kind", "");
    if (kind == "decision_tree") {
        DecisionTree tree;
        tree.pool = j.value("pool", std::vector<std::string>{});
        tree.max_depth = j.value("max_depth", std::size_t{0});
        tree.min_leaf = j.value("min_leaf", std::size_t{1});
        if (!j.contains("root")) throw config_error("model JSON: decision tree needs 'root'");
        tree.root = detail::parse_tree_node(j["root"], tree);
        return tree;
    }
    if (kind == "naive_bayes") {
        NaiveBayesModel nb;
        nb.pool = j.value("pool", std::vector<std::string>{});
        nb.smoothing = j.value("smoothing", 1.0);
        nb.prior_pos = j.value("prior_pos", 0.5);
        for (const auto& c : j.value("conditionals", nlohmann::json::array())) {
            NaiveBayesModel::Conditional cond;
            cond.attribute = c.at("attribute").get<std::string>();
            cond.p1_given_pos = c.at("p1_given_pos").get<double>();
            cond.p1_given_neg = c.at("p1_given_neg").get<double>();
            nb.conditionals.push_back(cond);
        }
        return nb;
    }
    if (kind == "constant") {
        ConstantModel m;
        m.label = j.value("label", 0) ? 1 : 0;
        return m;
    }
    throw config_error("model JSON: unknown kind '" + kind + "'");
}

inline Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace fairaudit
