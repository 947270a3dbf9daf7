#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fairaudit/data_model.hpp"
#include "fairaudit/errors.hpp"

// Baseline classifiers over binary data: a majority-leaf decision tree with
// information-gain splits, naive Bayes with additive smoothing, and a
// constant-majority predictor. Pools exclude the outcome always and
// protected attributes unless explicitly allowed.

namespace fairaudit {

struct TreeNode {
    std::string attribute;  // empty for leaves
    std::uint8_t label = 0; // leaves only
    int child0 = -1;
    int child1 = -1;

    bool is_leaf() const { return attribute.empty(); }
};

struct DecisionTree {
    std::vector<std::string> pool;
    std::size_t max_depth = 0;
    std::size_t min_leaf = 1;
    std::vector<TreeNode> nodes;
    int root = -1;
};

struct NaiveBayesModel {
    struct Conditional {
        std::string attribute;
        double p1_given_pos = 0.5;
        double p1_given_neg = 0.5;
    };
    std::vector<std::string> pool;
    double smoothing = 1.0;
    double prior_pos = 0.5;
    std::vector<Conditional> conditionals;
};

struct ConstantModel {
    std::uint8_t label = 0;
};

namespace detail {

/// Pool names resolved to schema columns in schema order, roles enforced.
inline std::vector<std::size_t> pool_indices(const Schema& schema,
                                             const std::vector<std::string>& pool,
                                             bool allow_protected) {
    if (pool.empty()) throw parameter_error("attribute pool is empty");
    std::vector<std::size_t> idx;
    for (const auto& name : pool) {
        std::size_t i = schema.require(name);
        Role r = schema.attribute(i).role;
        if (r == Role::Outcome)
            throw role_error("the outcome attribute '" + name + "' cannot be a model input");
        if (r == Role::Protected && !allow_protected)
            throw role_error("protected attribute '" + name +
                             "' cannot be a model input (pass allow_protected to override)");
        idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

inline double entropy(std::int64_t pos, std::int64_t n) {
    if (n == 0 || pos == 0 || pos == n) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(n);
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

struct TreeBuilder {
    const Dataset& data;
    std::vector<TreeNode>& nodes;
    std::size_t max_depth;
    std::size_t min_leaf;

    int build(const std::vector<std::uint32_t>& rows, std::vector<std::size_t> available,
              std::size_t depth) {
        const std::size_t oc = data.schema().outcome_index();
        std::int64_t pos = 0;
        for (auto r : rows) pos += data.value(r, oc);
        const std::int64_t n = static_cast<std::int64_t>(rows.size());
        const std::uint8_t majority = pos * 2 > n ? 1 : 0;

        if (pos == 0 || pos == n || depth >= max_depth || available.empty())
            return make_leaf(majority);

        // Best information gain; ties keep the earliest schema position.
        // Splits leaving a child below min_leaf (or empty) are skipped.
        const double parent_h = entropy(pos, n);
        double best_gain = -1.0;
        std::size_t best_col = 0;
        for (std::size_t col : available) {
            std::int64_t n1 = 0, pos1 = 0;
            for (auto r : rows) {
                if (data.value(r, col)) {
                    ++n1;
                    pos1 += data.value(r, oc);
                }
            }
            const std::int64_t n0 = n - n1;
            const std::int64_t pos0 = pos - pos1;
            if (n0 < static_cast<std::int64_t>(min_leaf) ||
                n1 < static_cast<std::int64_t>(min_leaf))
                continue;
            const double gain = parent_h -
                                (static_cast<double>(n0) / n) * entropy(pos0, n0) -
                                (static_cast<double>(n1) / n) * entropy(pos1, n1);
            if (gain > best_gain) {
                best_gain = gain;
                best_col = col;
            }
        }
        if (best_gain < 0.0) return make_leaf(majority);

        std::vector<std::uint32_t> rows0, rows1;
        for (auto r : rows) (data.value(r, best_col) ? rows1 : rows0).push_back(r);

        std::vector<std::size_t> rest;
        for (std::size_t c : available)
            if (c != best_col) rest.push_back(c);

        const int c0 = build(rows0, rest, depth + 1);
        const int c1 = build(rows1, rest, depth + 1);
        TreeNode node;
        node.attribute = data.schema().attribute(best_col).name;
        node.child0 = c0;
        node.child1 = c1;
        nodes.push_back(node);
        return static_cast<int>(nodes.size() - 1);
    }

    int make_leaf(std::uint8_t label) {
        TreeNode leaf;
        leaf.label = label;
        nodes.push_back(leaf);
        return static_cast<int>(nodes.size() - 1);
    }
};

} // namespace detail

/// Greedy information-gain tree with majority-vote leaves. max_depth 0 means
/// "as deep as the pool allows". Label ties in a leaf go to 0.
inline DecisionTree train_tree(const Dataset& data, const std::vector<std::string>& pool,
                               std::size_t max_depth = 0, std::size_t min_leaf = 1,
                               bool allow_protected = false) {
    if (data.row_count() == 0) throw empty_input_error("training data has no rows");
    if (min_leaf < 1) throw parameter_error("min_leaf must be at least 1");
    auto cols = detail::pool_indices(data.schema(), pool, allow_protected);

    DecisionTree tree;
    for (std::size_t c : cols) tree.pool.push_back(data.schema().attribute(c).name);
    tree.max_depth = max_depth == 0 ? cols.size() : max_depth;
    tree.min_leaf = min_leaf;

    std::vector<std::uint32_t> all(data.row_count());
    for (std::size_t r = 0; r < all.size(); ++r) all[r] = static_cast<std::uint32_t>(r);
    detail::TreeBuilder builder{data, tree.nodes, tree.max_depth, tree.min_leaf};
    tree.root = builder.build(all, cols, 0);
    return tree;
}

/// Class prior and per-attribute conditionals, all with additive smoothing
/// over the two values, so every stored probability sits strictly inside
/// (0, 1).
inline NaiveBayesModel train_naive_bayes(const Dataset& data,
                                         const std::vector<std::string>& pool,
                                         double smoothing = 1.0,
                                         bool allow_protected = false) {
    if (data.row_count() == 0) throw empty_input_error("training data has no rows");
    if (!(smoothing > 0.0)) throw parameter_error("smoothing must be > 0");
    auto cols = detail::pool_indices(data.schema(), pool, allow_protected);

    const std::size_t oc = data.schema().outcome_index();
    const double n = static_cast<double>(data.row_count());
    std::int64_t pos = 0;
    for (std::size_t r = 0; r < data.row_count(); ++r) pos += data.value(r, oc);
    const std::int64_t neg = static_cast<std::int64_t>(data.row_count()) - pos;

    NaiveBayesModel model;
    model.smoothing = smoothing;
    model.prior_pos = (static_cast<double>(pos) + smoothing) / (n + 2.0 * smoothing);
    for (std::size_t c : cols) {
        std::int64_t ones_pos = 0, ones_neg = 0;
        for (std::size_t r = 0; r < data.row_count(); ++r) {
            if (data.value(r, c)) (data.value(r, oc) ? ones_pos : ones_neg)++;
        }
        NaiveBayesModel::Conditional cond;
        cond.attribute = data.schema().attribute(c).name;
        cond.p1_given_pos = (static_cast<double>(ones_pos) + smoothing) /
                            (static_cast<double>(pos) + 2.0 * smoothing);
        cond.p1_given_neg = (static_cast<double>(ones_neg) + smoothing) /
                            (static_cast<double>(neg) + 2.0 * smoothing);
        model.conditionals.push_back(cond);
        model.pool.push_back(cond.attribute);
    }
    return model;
}

/// Majority label of the training outcomes; ties go to 0.
inline ConstantModel train_constant_majority(const Dataset& data) {
    if (data.row_count() == 0) throw empty_input_error("training data has no rows");
    const std::size_t oc = data.schema().outcome_index();
    std::int64_t pos = 0;
    for (std::size_t r = 0; r < data.row_count(); ++r) pos += data.value(r, oc);
    return {pos * 2 > static_cast<std::int64_t>(data.row_count()) ? std::uint8_t{1}
                                                                  : std::uint8_t{0}};
}

inline Dataset predict(const DecisionTree& tree, const Dataset& data) {
    if (tree.root < 0) throw parameter_error("decision tree is empty");
    // Resolve split attribute names once per call.
    std::vector<std::size_t> node_col(tree.nodes.size(), 0);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
        if (!tree.nodes[i].is_leaf()) node_col[i] = data.schema().require(tree.nodes[i].attribute);

    std::vector<std::uint8_t> outcomes(data.row_count());
    for (std::size_t r = 0; r < data.row_count(); ++r) {
        int at = tree.root;
        while (!tree.nodes[at].is_leaf())
            at = data.value(r, node_col[at]) ? tree.nodes[at].child1 : tree.nodes[at].child0;
        outcomes[r] = tree.nodes[at].label;
    }
    return data.with_outcome(outcomes, OutcomeKind::Predicted);
}

inline Dataset predict(const NaiveBayesModel& model, const Dataset& data) {
    std::vector<std::size_t> cols;
    for (const auto& c : model.conditionals) cols.push_back(data.schema().require(c.attribute));

    std::vector<std::uint8_t> outcomes(data.row_count());
    const double log_prior_pos = std::log(model.prior_pos);
    const double log_prior_neg = std::log(1.0 - model.prior_pos);
    for (std::size_t r = 0; r < data.row_count(); ++r) {
        double lp = log_prior_pos, ln = log_prior_neg;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const auto& c = model.conditionals[i];
            if (data.value(r, cols[i])) {
                lp += std::log(c.p1_given_pos);
                ln += std::log(c.p1_given_neg);
            } else {
                lp += std::log(1.0 - c.p1_given_pos);
                ln += std::log(1.0 - c.p1_given_neg);
            }
        }
        outcomes[r] = lp > ln ? 1 : 0;
    }
    return data.with_outcome(outcomes, OutcomeKind::Predicted);
}

inline Dataset predict(const ConstantModel& model, const Dataset& data) {
    std::vector<std::uint8_t> outcomes(data.row_count(), model.label);
    return data.with_outcome(outcomes, OutcomeKind::Predicted);
}

using Model = std::variant<DecisionTree, NaiveBayesModel, ConstantModel>;

inline Dataset predict(const Model& model, const Dataset& data) {
    return std::visit([&](const auto& m) { return predict(m, data); }, model);
}

} // namespace fairaudit
