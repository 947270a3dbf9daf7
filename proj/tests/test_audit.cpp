#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "fairaudit/audit.hpp"
#include "fairaudit/report_io.hpp"
#include "fairaudit/synthesis.hpp"
#include "support/fixtures.hpp"

using namespace fairaudit;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kTol = 1e-12;

/// Field-for-field equality on everything a dataset audit reports.
void check_reports_match(const AuditReport& a, const AuditReport& b) {
    CHECK(a.alpha == b.alpha);
    CHECK(a.total_rows == b.total_rows);
    CHECK(a.glbds == b.glbds);
    CHECK(a.attribute_scores == b.attribute_scores);
    CHECK(a.wgds == b.wgds);
    CHECK(a.wg_pct == b.wg_pct);
    CHECK(a.ogds == b.ogds);
    CHECK(a.og_pct == b.og_pct);
    CHECK(a.top_attributes == b.top_attributes);
    REQUIRE(a.groups.size() == b.groups.size());
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
        CHECK(a.groups[g].signature == b.groups[g].signature);
        CHECK(a.groups[g].size == b.groups[g].size);
        REQUIRE(a.groups[g].per_attribute.size() == b.groups[g].per_attribute.size());
        for (std::size_t p = 0; p < a.groups[g].per_attribute.size(); ++p) {
            const auto& pa = a.groups[g].per_attribute[p];
            const auto& pb = b.groups[g].per_attribute[p];
            CHECK(pa.attribute == pb.attribute);
            CHECK(pa.counts == pb.counts);
            CHECK(pa.score == pb.score);
            CHECK(pa.over_limit == pb.over_limit);
        }
    }
}

} // namespace

TEST_CASE("audit of a single balanced group", "[audit]") {
    Dataset data = make_dataset({10, 15, 40, 60});
    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    AuditReport rep = audit_dataset(data, cfg);
    CHECK(rep.glbds.attribute == "P");
    CHECK(rep.glbds.score.value == 0.0);
    CHECK(rep.wgds.score.value == 0.0);
    CHECK_FALSE(rep.ogds.has_value());
    CHECK(rep.og_pct == 0.0);
    CHECK(rep.wg_pct == 1.0);
    REQUIRE(rep.groups.size() == 1);
    CHECK(rep.groups[0].per_attribute[0].counts == CountsTable{10, 15, 40, 60});
}

TEST_CASE("audit surfaces a small extreme group", "[audit]") {
    // A 5-row group with counts (3,0,0,2) among balanced groups.
    Dataset data(Schema({{"D", Role::Outcome}, {"P", Role::Protected}, {"E", Role::Explanatory}}));
    // Balanced group, E=0: (20,20,20,20).
    for (int i = 0; i < 20; ++i) {
        data.append_row({1, 1, 0});
        data.append_row({1, 0, 0});
        data.append_row({0, 1, 0});
        data.append_row({0, 0, 0});
    }
    // Extreme group, E=1.
    for (int i = 0; i < 3; ++i) data.append_row({1, 1, 1});
    for (int i = 0; i < 2; ++i) data.append_row({0, 0, 1});

    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    cfg.explanatory = {"E"};
    AuditReport rep = audit_dataset(data, cfg);
    CHECK(rep.wgds.score.value == 1.0);
    CHECK(rep.wgds.counts == CountsTable{3, 0, 0, 2});
    CHECK(rep.wgds.signature == Signature{{"E", 1}});
    CHECK(rep.wgds.size == 5);
    CHECK_THAT(rep.wg_pct, WithinAbs(5.0 / 85.0, kTol));
    CHECK(rep.wgds.score.value >= std::abs(rep.glbds.score.value));
}

TEST_CASE("audit of two opposite extreme groups", "[audit]") {
    // Split construction: +1 and -1 groups of equal size.
    Dataset data = materialize(gen_simpson_split(10));
    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    cfg.explanatory = {"E"};
    AuditReport rep = audit_dataset(data, cfg);
    CHECK(rep.glbds.score.value == 0.0);
    CHECK(std::abs(rep.wgds.score.value) == 1.0);
    REQUIRE(rep.ogds.has_value());
    CHECK(*rep.ogds == 0.0); // size-weighted mean of +1 and -1
    CHECK(rep.og_pct == 1.0);
}

TEST_CASE("audit wgds dominates |glbds| on random data", "[audit][property]") {
    fixtures::Rng rng(21);
    for (int iter = 0; iter < 100; ++iter) {
        Dataset data = fixtures::random_dataset(rng, 1 + rng.below(300), 2, 2);
        AuditConfig cfg;
        cfg.protected_attrs = {"P0", "P1"};
        cfg.explanatory = {"E0", "E1"};
        AuditReport rep = audit_dataset(data, cfg);
        CHECK(std::abs(rep.wgds.score.value) >= std::abs(rep.glbds.score.value) - kTol);
        CHECK((rep.og_pct == 0.0) == !rep.ogds.has_value());
        // top_attributes sorted by |score| descending, names break ties.
        for (std::size_t i = 1; i < rep.top_attributes.size(); ++i) {
            const double prev = std::abs(rep.top_attributes[i - 1].score.value);
            const double cur = std::abs(rep.top_attributes[i].score.value);
            CHECK(prev >= cur);
            if (prev == cur)
                CHECK(rep.top_attributes[i - 1].attribute < rep.top_attributes[i].attribute);
        }
    }
}

TEST_CASE("worst-group ties prefer the larger group", "[audit]") {
    // Two groups both scoring +1; the larger one wins the tie.
    Dataset data(Schema({{"D", Role::Outcome}, {"P", Role::Protected}, {"E", Role::Explanatory}}));
    for (int i = 0; i < 2; ++i) { data.append_row({1, 1, 0}); data.append_row({0, 0, 0}); }
    for (int i = 0; i < 5; ++i) { data.append_row({1, 1, 1}); data.append_row({0, 0, 1}); }
    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    cfg.explanatory = {"E"};
    AuditReport rep = audit_dataset(data, cfg);
    CHECK(rep.wgds.score.value == 1.0);
    CHECK(rep.wgds.size == 10);
    CHECK(rep.wgds.signature == Signature{{"E", 1}});
}

TEST_CASE("groups below min_group_size are flagged, never dropped", "[audit]") {
    Dataset data = materialize(gen_simpson_split(3)); // two groups of 6
    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    cfg.explanatory = {"E"};
    cfg.min_group_size = 10;
    AuditReport rep = audit_dataset(data, cfg);
    REQUIRE(rep.groups.size() == 2);
    for (const auto& g : rep.groups) CHECK(g.small);
    cfg.min_group_size = 1;
    for (const auto& g : audit_dataset(data, cfg).groups) CHECK_FALSE(g.small);
}

TEST_CASE("stratification caps the explanatory set at 64", "[audit]") {
    std::vector<Attribute> attrs{{"D", Role::Outcome}};
    std::vector<std::string> names;
    for (int i = 0; i < 65; ++i) {
        names.push_back("E" + std::to_string(i));
        attrs.push_back({names.back(), Role::Explanatory});
    }
    Dataset data{Schema(attrs)};
    data.append_row(std::vector<std::uint8_t>(66, 0));
    CHECK_THROWS_AS(stratify(data, names), config_error);
}

TEST_CASE("audit config validation", "[audit]") {
    Dataset data = fixtures::income_example();
    AuditConfig cfg;
    cfg.protected_attrs = {};
    CHECK_THROWS_AS(audit_dataset(data, cfg), config_error);
    cfg.protected_attrs = {"G"};
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(audit_dataset(data, cfg), config_error);
    cfg.alpha = 0.05;
    Dataset empty(data.schema());
    CHECK_THROWS_AS(audit_dataset(empty, cfg), empty_input_error);
}

TEST_CASE("prediction audit of a perfect model equals the dataset audit", "[audit]") {
    Dataset data = fixtures::income_example();
    AuditConfig cfg;
    cfg.protected_attrs = {"G"};
    cfg.explanatory = {"S"};
    AuditReport direct = audit_dataset(data, cfg);
    AuditReport via_predictions = audit_predictions(data, data.as_predicted(), cfg);
    check_reports_match(direct, via_predictions);
    REQUIRE(via_predictions.quality.has_value());
    CHECK(via_predictions.quality->err == 0.0);
    CHECK(via_predictions.quality->bcr == 1.0);
}

TEST_CASE("prediction audit of the four-row example", "[audit]") {
    Dataset data = fixtures::performance_example();
    Dataset predicted = data.with_outcome({1, 0, 0, 0}, OutcomeKind::Predicted);
    AuditConfig cfg;
    cfg.protected_attrs = {"G"};
    AuditReport rep = audit_predictions(data, predicted, cfg);
    CHECK(rep.glbds.score.value == 0.5);
    CHECK(rep.outcome_kind == OutcomeKind::Predicted);
    REQUIRE(rep.quality.has_value());
    CHECK_THAT(rep.quality->err, WithinAbs(0.25, kTol));
    CHECK_THAT(rep.quality->bcr, WithinAbs(0.75, kTol));
}

TEST_CASE("prediction audit of a single-class predictor scores zero", "[audit]") {
    // 30% minority observed data, constant majority predictions.
    Dataset data(Schema({{"D", Role::Outcome}, {"P", Role::Protected}}));
    for (int i = 0; i < 100; ++i)
        data.append_row({std::uint8_t(i < 70 ? 1 : 0), std::uint8_t(i % 3 == 0 ? 1 : 0)});
    Dataset predicted = data.with_outcome(std::vector<std::uint8_t>(100, 1), OutcomeKind::Predicted);
    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    AuditReport rep = audit_predictions(data, predicted, cfg);
    CHECK(rep.glbds.score.value == 0.0);
    CHECK_THAT(rep.quality->err, WithinAbs(0.30, kTol));
}

TEST_CASE("prediction audit rejects misaligned inputs", "[audit]") {
    Dataset data = fixtures::income_example();
    AuditConfig cfg;
    cfg.protected_attrs = {"G"};
    Dataset shorter(data.schema(), OutcomeKind::Predicted);
    shorter.append_row({1, 1, 1});
    CHECK_THROWS_AS(audit_predictions(data, shorter, cfg), alignment_error);
}

TEST_CASE("sweep runs every subset size", "[audit]") {
    fixtures::Rng rng(22);
    Dataset data = fixtures::random_dataset(rng, 200, 1, 4);
    AuditConfig cfg;
    cfg.protected_attrs = {"P0"};
    cfg.explanatory = {"E0", "E1", "E2", "E3"};
    SweepResult sweep = sweep_explanatory(data, cfg);
    REQUIRE(sweep.entries.size() == 5);
    CHECK(sweep.entries[0].k == 0);
    CHECK(sweep.entries[0].n_subsets == 1);
    CHECK(sweep.entries[1].n_subsets == 4);
    CHECK(sweep.entries[2].n_subsets == 6);
    CHECK(sweep.entries[3].n_subsets == 4);
    CHECK(sweep.entries[4].n_subsets == 1);

    // k=0 equals the single-group global score magnitude.
    AuditConfig whole = cfg;
    whole.explanatory = {};
    CHECK(sweep.entries[0].avg_abs_score ==
          std::abs(audit_dataset(data, whole).glbds.score.value));

    // k=1 is the mean over the four single-attribute runs.
    double sum = 0.0;
    for (const char* e : {"E0", "E1", "E2", "E3"}) {
        AuditConfig one = cfg;
        one.explanatory = {e};
        sum += std::abs(audit_dataset(data, one).glbds.score.value);
    }
    CHECK_THAT(sweep.entries[1].avg_abs_score, WithinAbs(sum / 4.0, kTol));

    // Fragmentation stats: strata shrink as k grows.
    for (const auto& e : sweep.entries) {
        CHECK(e.mean_group_count >= 1.0);
        CHECK(e.min_group_size >= 1);
        CHECK(double(e.min_group_size) <= e.median_group_size);
    }
    CHECK(sweep.entries[0].min_group_size == 200);
    CHECK(sweep.entries[4].min_group_size <= sweep.entries[1].min_group_size);
    CHECK(sweep.entries[4].mean_group_count >= sweep.entries[1].mean_group_count);
}

TEST_CASE("top_k truncates the attribute ranking", "[audit]") {
    fixtures::Rng rng(24);
    Dataset data = fixtures::random_dataset(rng, 150, 3, 1);
    AuditConfig cfg;
    cfg.protected_attrs = {"P0", "P1", "P2"};
    cfg.explanatory = {"E0"};
    cfg.top_k = 1;
    AuditReport rep = audit_dataset(data, cfg);
    REQUIRE(rep.top_attributes.size() == 1);
    CHECK(rep.top_attributes[0] == rep.glbds);
    CHECK(rep.attribute_scores.size() == 3);
}

TEST_CASE("sweep drops when one attribute explains the disparity", "[audit]") {
    // Two strata in the style of the split construction: overall score is 0
    // at k=1 (E explains everything) but large at k=0.
    Dataset data = materialize(gen_simpson_split(25));
    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    cfg.explanatory = {"E"};
    SweepResult sweep = sweep_explanatory(data, cfg);
    REQUIRE(sweep.entries.size() == 2);
    // k=0: one merged group scoring 0 here; use the merge recipe for a
    // nonzero drop instead.
    Dataset merged = materialize(gen_simpson_merge(100, 10, {1, 50}, 0.05));
    SweepResult sweep2 = sweep_explanatory(merged, cfg);
    REQUIRE(sweep2.entries.size() == 2);
    CHECK(sweep2.entries[1].avg_abs_score < sweep2.entries[0].avg_abs_score);
    CHECK(sweep2.entries[0].avg_abs_score > 0.05);
    CHECK(sweep2.entries[1].avg_abs_score < 0.05);
}

TEST_CASE("sweep needs a declared explanatory list", "[audit]") {
    Dataset data = make_dataset({1, 1, 1, 1});
    AuditConfig cfg;
    cfg.protected_attrs = {"P"};
    CHECK_THROWS_AS(sweep_explanatory(data, cfg), config_error);
}

TEST_CASE("report serialization is deterministic", "[audit]") {
    Dataset data = fixtures::income_example();
    AuditConfig cfg;
    cfg.protected_attrs = {"G"};
    cfg.explanatory = {"S"};
    AuditReport rep = audit_dataset(data, cfg);
    CHECK(to_json(rep) == to_json(rep));
    CHECK(to_csv(rep) == to_csv(rep));
    CHECK(to_json(rep).find("\"glbds\"") != std::string::npos);
    CHECK(to_json(rep).find("-0.011160") != std::string::npos);

    AuditReport again = audit_dataset(data, cfg);
    CHECK(to_json(rep) == to_json(again));

    // Prediction reports carry the right/wrong detail.
    AuditReport pred = audit_predictions(data, data.as_predicted(), cfg);
    CHECK(to_json(pred).find("\"prediction_counts\"") != std::string::npos);
    CHECK(to_json(pred).find("\"model_quality\"") != std::string::npos);
    CHECK(to_csv(pred).find(",wrong,") != std::string::npos);
}

TEST_CASE("write_report fails cleanly on impossible paths", "[audit]") {
    Dataset data = fixtures::income_example();
    AuditConfig cfg;
    cfg.protected_attrs = {"G"};
    AuditReport rep = audit_dataset(data, cfg);
    CHECK_THROWS_AS(write_report(rep, ReportFormat::Json, "/nonexistent_dir/report.json"),
                    io_error);
    CHECK_THROWS_AS(write_report(rep, ReportFormat::PlotData, "/tmp/x.dat"), config_error);
}

TEST_CASE("sweep serialization shapes", "[audit]") {
    fixtures::Rng rng(23);
    Dataset data = fixtures::random_dataset(rng, 80, 1, 2);
    AuditConfig cfg;
    cfg.protected_attrs = {"P0"};
    cfg.explanatory = {"E0", "E1"};
    SweepResult sweep = sweep_explanatory(data, cfg);
    std::string csv = to_csv(sweep);
    CHECK(csv.rfind("k,avg_abs_score,n_subsets\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4); // header + k=0,1,2
    std::string plot = to_plot_data(sweep);
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 3);
    CHECK(to_json(sweep).find("\"entries\"") != std::string::npos);
}
