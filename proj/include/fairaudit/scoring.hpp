#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fairaudit/data_model.hpp"
#include "fairaudit/errors.hpp"

// Discrimination and correlation measures over division counts: the group
// risk difference, its size-weighted dataset average, the max-over-protected
// global score, the prediction-side variant, odds ratio, and BCR/Err model
// quality.

namespace fairaudit {

/// A discrimination score in [-1, 1]. defined_by_convention marks values
/// forced to 0 because one contrast division was empty.
struct Score {
    double value = 0.0;
    bool defined_by_convention = false;

    bool operator==(const Score&) const = default;
};

/// Group risk difference: P(D=1 | P=1) - P(D=1 | P=0) from division counts.
/// If either protected column is empty the score is 0 by convention.
inline Score group_score(const CountsTable& c) {
    const std::int64_t in_group = c.f11 + c.f01;
    const std::int64_t out_group = c.f10 + c.f00;
    if (in_group == 0 || out_group == 0) return {0.0, true};
    return {static_cast<double>(c.f11) / static_cast<double>(in_group) -
                static_cast<double>(c.f10) / static_cast<double>(out_group),
            false};
}

/// Risk difference of the predicted outcomes: predicted positives per
/// protected column over the same column totals. Same degenerate rule as
/// group_score.
inline Score model_group_score(const PredictionCountsTable& t) {
    const std::int64_t in_group = t.fr11 + t.fw11 + t.fr01 + t.fw01;
    const std::int64_t out_group = t.fr10 + t.fw10 + t.fr00 + t.fw00;
    if (in_group == 0 || out_group == 0) return {0.0, true};
    return {static_cast<double>(t.fr11 + t.fw01) / static_cast<double>(in_group) -
                static_cast<double>(t.fr10 + t.fw00) / static_cast<double>(out_group),
            false};
}

/// Size-weighted average of per-group scores over pre-computed groups.
/// Convention-zero groups contribute 0 but keep their weight in the
/// denominator; the result is convention-flagged only when every group was.
inline Score dataset_score(const std::vector<EGroup>& groups, const Dataset& data,
                           const std::string& protected_attr) {
    if (data.row_count() == 0) throw empty_input_error("dataset has no rows");
    double sum = 0.0;
    bool all_convention = true;
    const double n = static_cast<double>(data.row_count());
    for (const auto& g : groups) {
        Score s = group_score(dp_counts(g, data, protected_attr));
        sum += s.value * (static_cast<double>(g.size()) / n);
        all_convention = all_convention && s.defined_by_convention;
    }
    return {sum, all_convention};
}

/// Stratify-then-average in one call.
inline Score dataset_score(const Dataset& data, const std::string& protected_attr,
                           const std::vector<std::string>& explanatory) {
    if (data.row_count() == 0) throw empty_input_error("dataset has no rows");
    return dataset_score(stratify(data, explanatory), data, protected_attr);
}

struct GlobalScore {
    std::string attribute;
    Score score;

    bool operator==(const GlobalScore&) const = default;
};

/// The protected attribute with the largest |dataset score| and its signed
/// score. Ties break to the lexicographically smaller name.
inline GlobalScore global_score(const Dataset& data,
                                const std::vector<std::string>& protected_set,
                                const std::vector<std::string>& explanatory) {
    if (protected_set.empty()) throw config_error("protected attribute set is empty");
    if (data.row_count() == 0) throw empty_input_error("dataset has no rows");
    auto groups = stratify(data, explanatory);
    GlobalScore best;
    bool have = false;
    for (const auto& name : protected_set) {
        Score s = dataset_score(groups, data, name);
        if (!have || std::abs(s.value) > std::abs(best.score.value) ||
            (std::abs(s.value) == std::abs(best.score.value) && name < best.attribute)) {
            best = {name, s};
            have = true;
        }
    }
    return best;
}

/// Odds ratio f11*f00 / (f10*f01). 0/0 and the no-population /
/// single-outcome margins collapse to 1 with the convention flag; a zero
/// denominator with a nonzero numerator is +infinity.
struct OddsRatio {
    double value = 1.0;
    bool convention_case = false;

    bool operator==(const OddsRatio&) const = default;
};

inline OddsRatio odds_ratio(const CountsTable& c) {
    const std::int64_t num = c.f11 * c.f00;
    const std::int64_t den = c.f10 * c.f01;
    if (den == 0) {
        if (num == 0) return {1.0, true};
        return {std::numeric_limits<double>::infinity(), false};
    }
    return {static_cast<double>(num) / static_cast<double>(den), false};
}

/// Balanced classification rate and misclassification rate of a prediction
/// table aggregated over all rows.
struct ModelQuality {
    double bcr = 0.0;
    double err = 0.0;

    bool operator==(const ModelQuality&) const = default;
};

inline ModelQuality model_quality(const PredictionCountsTable& t) {
    const std::int64_t positives = t.fr11 + t.fw11 + t.fr10 + t.fw10;
    const std::int64_t negatives = t.fr01 + t.fw01 + t.fr00 + t.fw00;
    if (positives == 0 || negatives == 0)
        throw bcr_undefined_error("BCR needs both observed classes present");
    const double tpr = static_cast<double>(t.fr11 + t.fr10) / static_cast<double>(positives);
    const double tnr = static_cast<double>(t.fr01 + t.fr00) / static_cast<double>(negatives);
    const double err =
        static_cast<double>(t.wrong()) / static_cast<double>(positives + negatives);
    return {(tpr + tnr) / 2.0, err};
}

/// Aggregate prediction counts over every row of an aligned pair.
inline PredictionCountsTable aggregate_prediction_counts(const Dataset& observed,
                                                         const Dataset& predicted) {
    require_aligned_shape(observed, predicted);
    const std::size_t d = observed.schema().outcome_index();
    PredictionCountsTable t;
    // The protected dimension is irrelevant here; counts land in the P=1
    // slots and quality metrics read only class totals.
    for (std::size_t r = 0; r < observed.row_count(); ++r) {
        const bool dv = observed.value(r, d) != 0;
        const bool right = predicted.value(r, d) == observed.value(r, d);
        if (dv) (right ? t.fr11 : t.fw11)++;
        else (right ? t.fr01 : t.fw01)++;
    }
    return t;
}

inline ModelQuality model_quality(const Dataset& observed, const Dataset& predicted) {
    return model_quality(aggregate_prediction_counts(observed, predicted));
}

} // namespace fairaudit
