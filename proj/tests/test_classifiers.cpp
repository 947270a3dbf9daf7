#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "fairaudit/audit.hpp"
#include "fairaudit/classifiers.hpp"
#include "fairaudit/model_io.hpp"
#include "support/fixtures.hpp"

using namespace fairaudit;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kTol = 1e-12;

std::size_t count_errors(const Dataset& observed, const Dataset& predicted) {
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < observed.row_count(); ++r)
        if (observed.outcome(r) != predicted.outcome(r)) ++wrong;
    return wrong;
}

/// Exhaustive depth-2 tree search: minimal training error achievable by any
/// tree of depth <= 2 over the pool.
std::size_t best_depth2_error(const Dataset& data, const std::vector<std::string>& pool) {
    const std::size_t n = data.row_count();
    std::size_t best = n;
    auto leaf_error = [&](const std::vector<std::uint32_t>& rows, int label) {
        std::size_t wrong = 0;
        for (auto r : rows)
            if (data.outcome(r) != label) ++wrong;
        return wrong;
    };
    auto best_leaf = [&](const std::vector<std::uint32_t>& rows) {
        return std::min(leaf_error(rows, 0), leaf_error(rows, 1));
    };
    auto partition = [&](const std::vector<std::uint32_t>& rows, std::size_t col) {
        std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> out;
        for (auto r : rows) (data.value(r, col) ? out.second : out.first).push_back(r);
        return out;
    };

    std::vector<std::uint32_t> all(n);
    for (std::size_t r = 0; r < n; ++r) all[r] = std::uint32_t(r);
    best = best_leaf(all); // depth 0

    for (const auto& a : pool) {
        auto [zero, one] = partition(all, data.schema().require(a));
        if (zero.empty() || one.empty()) continue;
        // Depth-1 and every depth-2 refinement per side.
        auto side_best = [&](const std::vector<std::uint32_t>& rows) {
            std::size_t s = best_leaf(rows);
            for (const auto& b : pool) {
                if (b == a) continue;
                auto [bz, bo] = partition(rows, data.schema().require(b));
                if (bz.empty() || bo.empty()) continue;
                s = std::min(s, best_leaf(bz) + best_leaf(bo));
            }
            return s;
        };
        best = std::min(best, side_best(zero) + side_best(one));
    }
    return best;
}

} // namespace

TEST_CASE("tree on the four-row example learns the performance rule", "[classifiers]") {
    Dataset data = fixtures::performance_example();
    DecisionTree tree = train_tree(data, {"M"});
    Dataset predicted = predict(tree, data);
    // Predictions equal the M column exactly.
    for (std::size_t r = 0; r < data.row_count(); ++r)
        CHECK(predicted.outcome(r) == data.value(r, data.schema().require("M")));
    CHECK(predicted.outcome_kind() == OutcomeKind::Predicted);
}

TEST_CASE("tree on a pure outcome is a single leaf", "[classifiers]") {
    Dataset data(Schema({{"D", Role::Outcome}, {"X", Role::Other}}));
    for (int i = 0; i < 6; ++i) data.append_row({1, std::uint8_t(i % 2)});
    DecisionTree tree = train_tree(data, {"X"});
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[tree.root].is_leaf());
    CHECK(tree.nodes[tree.root].label == 1);
}

TEST_CASE("tree solves xor at depth two", "[classifiers]") {
    Dataset data(Schema({{"D", Role::Outcome},
                         {"A", Role::Other},
                         {"B", Role::Other},
                         {"C", Role::Other}}));
    // All eight (A,B,C) combinations, three times each; C is noise.
    for (int rep = 0; rep < 3; ++rep)
        for (int v = 0; v < 8; ++v) {
            std::uint8_t a = v & 1, b = (v >> 1) & 1, c = (v >> 2) & 1;
            data.append_row({std::uint8_t(a ^ b), a, b, c});
        }
    DecisionTree tree = train_tree(data, {"A", "B", "C"}, 2);
    Dataset predicted = predict(tree, data);
    CHECK(count_errors(data, predicted) == 0);
    CHECK(best_depth2_error(data, {"A", "B", "C"}) == 0);
}

TEST_CASE("tree structural invariants hold on random data", "[classifiers][property]") {
    fixtures::Rng rng(32);
    for (int iter = 0; iter < 50; ++iter) {
        Dataset data = fixtures::random_dataset(rng, 5 + rng.below(200), 1, 3);
        DecisionTree tree = train_tree(data, {"E0", "E1", "E2"});
        std::set<std::string> pool(tree.pool.begin(), tree.pool.end());

        // Walk every root-to-leaf path: no repeats, splits within the pool.
        struct Frame { int node; std::set<std::string> seen; };
        std::vector<Frame> stack{{tree.root, {}}};
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            const TreeNode& n = tree.nodes[f.node];
            if (n.is_leaf()) {
                CHECK(f.seen.size() <= tree.max_depth);
                continue;
            }
            CHECK(pool.count(n.attribute) == 1);
            CHECK(f.seen.count(n.attribute) == 0);
            auto seen = f.seen;
            seen.insert(n.attribute);
            stack.push_back({n.child0, seen});
            stack.push_back({n.child1, seen});
        }
    }
}

TEST_CASE("tree training is deterministic", "[classifiers]") {
    fixtures::Rng rng(33);
    Dataset data = fixtures::random_dataset(rng, 150, 1, 3);
    DecisionTree a = train_tree(data, {"E0", "E1", "E2"});
    DecisionTree b = train_tree(data, {"E0", "E1", "E2"});
    CHECK(model_to_json(Model{a}) == model_to_json(Model{b}));
}

TEST_CASE("pools reject the outcome and protected attributes", "[classifiers]") {
    Dataset data = fixtures::income_example();
    CHECK_THROWS_AS(train_tree(data, {"D"}), role_error);
    CHECK_THROWS_AS(train_tree(data, {"G"}), role_error);
    CHECK_THROWS_AS(train_tree(data, {"S", "G"}), role_error);
    CHECK_THROWS_AS(train_tree(data, {}), parameter_error);
    CHECK_THROWS_AS(train_naive_bayes(data, {"G"}), role_error);
    // The explicit unsafe override admits protected attributes.
    DecisionTree t = train_tree(data, {"G"}, 0, 1, true);
    CHECK(t.pool == std::vector<std::string>{"G"});
}

TEST_CASE("naive Bayes priors and conditionals follow the smoothed counts", "[classifiers]") {
    // Balanced independent fixture.
    Dataset data(Schema({{"D", Role::Outcome}, {"X", Role::Other}}));
    for (int i = 0; i < 40; ++i) data.append_row({std::uint8_t(i % 2), std::uint8_t((i / 2) % 2)});
    NaiveBayesModel nb = train_naive_bayes(data, {"X"}, 1.0);
    CHECK_THAT(nb.prior_pos, WithinAbs(0.5, 0.02));
    CHECK(nb.prior_pos > 0.0);
    CHECK(nb.prior_pos < 1.0);

    // Fully predictive single attribute: conditionals pushed to the extremes
    // but bounded away by smoothing.
    Dataset pred(Schema({{"D", Role::Outcome}, {"X", Role::Other}}));
    for (int i = 0; i < 10; ++i) pred.append_row({1, 1});
    for (int i = 0; i < 10; ++i) pred.append_row({0, 0});
    NaiveBayesModel nb2 = train_naive_bayes(pred, {"X"}, 1.0);
    CHECK_THAT(nb2.conditionals[0].p1_given_pos, WithinAbs(11.0 / 12.0, kTol));
    CHECK_THAT(nb2.conditionals[0].p1_given_neg, WithinAbs(1.0 / 12.0, kTol));

    // Laplace formula on zero counts: 0 positives among 10 with add-1 over
    // two values gives 1/12.
    Dataset zeros(Schema({{"D", Role::Outcome}, {"X", Role::Other}}));
    for (int i = 0; i < 10; ++i) zeros.append_row({1, 0});
    for (int i = 0; i < 5; ++i) zeros.append_row({0, 1});
    NaiveBayesModel nb3 = train_naive_bayes(zeros, {"X"}, 1.0);
    CHECK_THAT(nb3.conditionals[0].p1_given_pos, WithinAbs(1.0 / 12.0, kTol));

    CHECK_THROWS_AS(train_naive_bayes(data, {"X"}, 0.0), parameter_error);
}

TEST_CASE("naive Bayes predictions match a per-row posterior oracle", "[classifiers]") {
    fixtures::Rng rng(34);
    Dataset data = fixtures::random_dataset(rng, 20, 1, 2);
    NaiveBayesModel nb = train_naive_bayes(data, {"E0", "E1"}, 1.0);
    Dataset predicted = predict(nb, data);

    for (std::size_t r = 0; r < data.row_count(); ++r) {
        // Plain-product posterior comparison.
        double pos = nb.prior_pos, neg = 1.0 - nb.prior_pos;
        for (const auto& c : nb.conditionals) {
            const bool v = data.value(r, data.schema().require(c.attribute));
            pos *= v ? c.p1_given_pos : 1.0 - c.p1_given_pos;
            neg *= v ? c.p1_given_neg : 1.0 - c.p1_given_neg;
        }
        CHECK(predicted.outcome(r) == (pos > neg ? 1 : 0));
    }
}

TEST_CASE("constant-majority predictions are single class", "[classifiers]") {
    Dataset data(Schema({{"D", Role::Outcome}, {"P", Role::Protected}}));
    for (int i = 0; i < 10; ++i) data.append_row({std::uint8_t(i < 7 ? 1 : 0), std::uint8_t(i % 2)});
    ConstantModel m = train_constant_majority(data);
    CHECK(m.label == 1);
    Dataset predicted = predict(m, data);
    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    CHECK(audit_predictions(data, predicted, cfg).glbds.score.value == 0.0);
}

TEST_CASE("explanatory-only models are never discriminatory", "[classifiers][property]") {
    fixtures::Rng rng(35);
    for (int iter = 0; iter < 60; ++iter) {
        Dataset data =
            fixtures::ensure_both_classes(fixtures::random_dataset(rng, 10 + rng.below(150), 1, 3));
        // Random sub-pool of the explanatory attributes.
        std::vector<std::string> pool;
        for (const char* e : {"E0", "E1", "E2"})
            if (rng.chance(0.6)) pool.push_back(e);
        if (pool.empty()) pool.push_back("E0");

        DecisionTree tree = train_tree(data, pool);
        Dataset predicted = predict(tree, data);

        AuditConfig cfg;
        cfg.protected_attrs = {"P0"};
        cfg.explanatory = {"E0", "E1", "E2"};
        AuditReport rep = audit_predictions(data, predicted, cfg);
        CHECK(rep.glbds.score.value == 0.0);
        for (const auto& g : rep.groups)
            for (const auto& pa : g.per_attribute) CHECK(pa.score.value == 0.0);
    }
}

TEST_CASE("perfect models audit exactly like their training data", "[classifiers][property]") {
    fixtures::Rng rng(36);
    for (int iter = 0; iter < 40; ++iter) {
        Dataset data =
            fixtures::ensure_both_classes(fixtures::random_dataset(rng, 10 + rng.below(100), 1, 2));
        AuditConfig cfg;
        cfg.protected_attrs = {"P0"};
        cfg.explanatory = {"E0"};
        AuditReport direct = audit_dataset(data, cfg);
        AuditReport via = audit_predictions(data, data.as_predicted(), cfg);
        CHECK(via.glbds == direct.glbds);
        CHECK(via.wgds == direct.wgds);
        CHECK(via.quality->err == 0.0);
    }
}

TEST_CASE("a fair dataset can train an unfair model", "[classifiers]") {
    // The four-row example: training data scores 0, the learned model 0.5.
    Dataset data = fixtures::performance_example();
    AuditConfig cfg;
    cfg.protected_attrs = {"G"};
    CHECK(audit_dataset(data, cfg).glbds.score.value == 0.0);

    DecisionTree tree = train_tree(data, {"M"});
    Dataset predicted = predict(tree, data);
    AuditReport rep = audit_predictions(data, predicted, cfg);
    CHECK(rep.glbds.score.value == 0.5);
}

TEST_CASE("model serialization round-trips", "[classifiers]") {
    fixtures::Rng rng(37);
    Dataset data = fixtures::random_dataset(rng, 100, 1, 3);

    Model tree = train_tree(data, {"E0", "E1", "E2"});
    Model tree2 = model_from_json(model_to_json(tree));
    CHECK(model_to_json(tree) == model_to_json(tree2));
    for (std::size_t r = 0; r < data.row_count(); ++r)
        CHECK(predict(tree, data).outcome(r) == predict(tree2, data).outcome(r));

    Model nb = train_naive_bayes(data, {"E0", "E1"}, 0.5);
    Model nb2 = model_from_json(model_to_json(nb));
    CHECK(model_to_json(nb) == model_to_json(nb2));
    for (std::size_t r = 0; r < data.row_count(); ++r)
        CHECK(predict(nb, data).outcome(r) == predict(nb2, data).outcome(r));

    Model constant = ConstantModel{1};
    CHECK(model_to_json(constant) == model_to_json(model_from_json(model_to_json(constant))));

    CHECK_THROWS_AS(model_from_json("{\"kind\":\"mystery\"}"), config_error);
    CHECK_THROWS_AS(model_from_json("not json at all"), config_error);
    CHECK_THROWS_AS(model_from_json(R"({"kind":"decision_tree","root":{"bad":1}})"),
                    config_error);
    CHECK_THROWS_AS(model_from_json(R"({"kind":"decision_tree"})"), config_error);
}

TEST_CASE("predict validates the schema", "[classifiers]") {
    Dataset data = fixtures::performance_example();
    DecisionTree tree = train_tree(data, {"M"});
    Dataset other(Schema({{"D", Role::Outcome}, {"Z", Role::Other}}));
    other.append_row({1, 0});
    CHECK_THROWS_AS(predict(tree, other), schema_error);
}
