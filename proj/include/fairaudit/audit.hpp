#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairaudit/data_model.hpp"
#include "fairaudit/errors.hpp"
#include "fairaudit/scoring.hpp"

// End-to-end dataset and prediction audits: global score, worst-group and
// over-limit statistics, plus the explanatory-attribute sweep.

namespace fairaudit {

struct AuditConfig {
    double alpha = 0.05;
    std::vector<std::string> explanatory;
    std::vector<std::string> protected_attrs;
    std::size_t top_k = 3;
    std::size_t min_group_size = 1; // groups below this are flagged, never excluded

    /// Pull role-tagged attribute sets from a schema.
    static AuditConfig from_schema(const Schema& schema) {
        AuditConfig cfg;
        cfg.protected_attrs = schema.protected_attributes();
        cfg.explanatory = schema.explanatory_attributes();
        return cfg;
    }
};

struct AttributeScore {
    std::string attribute;
    Score score;

    bool operator==(const AttributeScore&) const = default;
};

struct GroupAttributeAudit {
    std::string attribute;
    CountsTable counts;
    std::optional<PredictionCountsTable> prediction_counts; // prediction audits only
    Score score;
    bool over_limit = false; // |score| > alpha

    bool operator==(const GroupAttributeAudit&) const = default;
};

struct GroupAudit {
    Signature signature;
    std::size_t size = 0;
    bool small = false; // size < min_group_size
    std::vector<GroupAttributeAudit> per_attribute;

    bool operator==(const GroupAudit&) const = default;
};

struct WorstGroup {
    std::string attribute;
    Score score;
    Signature signature;
    std::size_t size = 0;
    CountsTable counts;

    bool operator==(const WorstGroup&) const = default;
};

struct AuditReport {
    OutcomeKind outcome_kind = OutcomeKind::Observed;
    double alpha = 0.05;
    std::size_t total_rows = 0;
    AttributeScore glbds;                       // signed global score + attaining attribute
    std::vector<AttributeScore> attribute_scores; // schema order
    WorstGroup wgds;
    double wg_pct = 0.0;
    std::optional<double> ogds; // absent when no group is over the limit
    double og_pct = 0.0;
    std::vector<AttributeScore> top_attributes;
    std::vector<GroupAudit> groups;
    std::optional<ModelQuality> quality; // prediction audits only
};

namespace detail {

/// Protected names deduped and ordered by schema position; roles validated.
inline std::vector<std::string> canonical_protected(const Schema& schema,
                                                    const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    for (const auto& n : names) idx.push_back(protected_index(schema, n));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(schema.attribute(i).name);
    return out;
}

inline void check_config(const Dataset& data, const AuditConfig& cfg) {
    if (data.row_count() == 0) throw empty_input_error("dataset has no rows");
    if (!(cfg.alpha > 0.0)) throw config_error("alpha must be > 0");
    if (cfg.protected_attrs.empty()) throw config_error("protected attribute set is empty");
}

inline bool signature_less(const Signature& a, const Signature& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i].value != b[i].value) return a[i].value < b[i].value;
    }
    return a.size() < b.size();
}

/// Shared assembly for dataset and prediction audits. scores[g][p] pairs with
/// counts[g][p]; pred_counts may be empty.
inline AuditReport assemble_report(const Dataset& data, const AuditConfig& cfg,
                                   const std::vector<std::string>& prot,
                                   const std::vector<EGroup>& groups,
                                   const std::vector<std::vector<CountsTable>>& counts,
                                   const std::vector<std::vector<Score>>& scores,
                                   const std::vector<std::vector<PredictionCountsTable>>& pred,
                                   OutcomeKind kind) {
    AuditReport rep;
    rep.outcome_kind = kind;
    rep.alpha = cfg.alpha;
    rep.total_rows = data.row_count();
    const double n = static_cast<double>(data.row_count());

    // Per-attribute dataset scores (Eq. 2 per attribute).
    for (std::size_t p = 0; p < prot.size(); ++p) {
        double sum = 0.0;
        bool all_convention = true;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            sum += scores[g][p].value * (static_cast<double>(groups[g].size()) / n);
            all_convention = all_convention && scores[g][p].defined_by_convention;
        }
        rep.attribute_scores.push_back({prot[p], {sum, all_convention}});
    }

    // Global score: argmax |dataset score|, ties to the smaller name.
    std::size_t best_attr = 0;
    for (std::size_t p = 1; p < prot.size(); ++p) {
        const double cur = std::abs(rep.attribute_scores[p].score.value);
        const double best = std::abs(rep.attribute_scores[best_attr].score.value);
        if (cur > best || (cur == best && prot[p] < prot[best_attr])) best_attr = p;
    }
    rep.glbds = rep.attribute_scores[best_attr];

    // Worst group over every (group, attribute) pair. Ties: larger group,
    // then signature order, then attribute order.
    bool have_worst = false;
    std::size_t wg = 0, wp = 0;
    for (std::size_t p = 0; p < prot.size(); ++p) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (!have_worst) {
                wg = g; wp = p; have_worst = true;
                continue;
            }
            const double cur = std::abs(scores[g][p].value);
            const double best = std::abs(scores[wg][wp].value);
            if (cur > best ||
                (cur == best && groups[g].size() > groups[wg].size()) ||
                (cur == best && groups[g].size() == groups[wg].size() &&
                 signature_less(groups[g].signature, groups[wg].signature))) {
                wg = g; wp = p;
            }
        }
    }
    rep.wgds = {prot[wp], scores[wg][wp], groups[wg].signature, groups[wg].size(),
                counts[wg][wp]};
    rep.wg_pct = static_cast<double>(groups[wg].size()) / n;

    // Over-limit statistics for the attribute attaining the global score.
    std::int64_t over_rows = 0;
    double over_weighted = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (std::abs(scores[g][best_attr].value) > cfg.alpha) {
            over_rows += static_cast<std::int64_t>(groups[g].size());
            over_weighted += scores[g][best_attr].value * static_cast<double>(groups[g].size());
        }
    }
    if (over_rows > 0) {
        rep.ogds = over_weighted / static_cast<double>(over_rows);
        rep.og_pct = static_cast<double>(over_rows) / n;
    }

    // Top attributes by |dataset score|, name-lexicographic tie-break.
    rep.top_attributes = rep.attribute_scores;
    std::sort(rep.top_attributes.begin(), rep.top_attributes.end(),
              [](const AttributeScore& a, const AttributeScore& b) {
                  const double av = std::abs(a.score.value);
                  const double bv = std::abs(b.score.value);
                  if (av != bv) return av > bv;
                  return a.attribute < b.attribute;
              });
    if (rep.top_attributes.size() > cfg.top_k) rep.top_attributes.resize(cfg.top_k);

    // Group detail.
    rep.groups.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        GroupAudit ga;
        ga.signature = groups[g].signature;
        ga.size = groups[g].size();
        ga.small = ga.size < cfg.min_group_size;
        for (std::size_t p = 0; p < prot.size(); ++p) {
            GroupAttributeAudit a;
            a.attribute = prot[p];
            a.counts = counts[g][p];
            if (!pred.empty()) a.prediction_counts = pred[g][p];
            a.score = scores[g][p];
            a.over_limit = std::abs(scores[g][p].value) > cfg.alpha;
            ga.per_attribute.push_back(std::move(a));
        }
        rep.groups.push_back(std::move(ga));
    }
    return rep;
}

} // namespace detail

/// Audit observed outcomes: stratify, score every (group, protected
/// attribute) pair, aggregate.
inline AuditReport audit_dataset(const Dataset& data, const AuditConfig& cfg) {
    detail::check_config(data, cfg);
    const auto prot = detail::canonical_protected(data.schema(), cfg.protected_attrs);
    const auto groups = stratify(data, cfg.explanatory);

    std::vector<std::vector<CountsTable>> counts(groups.size());
    std::vector<std::vector<Score>> scores(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        counts[g].reserve(prot.size());
        scores[g].reserve(prot.size());
        for (const auto& name : prot) {
            counts[g].push_back(dp_counts(groups[g], data, name));
            scores[g].push_back(group_score(counts[g].back()));
        }
    }
    return detail::assemble_report(data, cfg, prot, groups, counts, scores, {},
                                   data.outcome_kind());
}

/// Audit a model's predictions against the observed data. Stratification and
/// protected values come from the observed dataset; scores use the predicted
/// outcome per group. BCR/Err are attached.
inline AuditReport audit_predictions(const Dataset& observed, const Dataset& predicted,
                                     const AuditConfig& cfg) {
    detail::check_config(observed, cfg);
    require_aligned(observed, predicted);
    const auto prot = detail::canonical_protected(observed.schema(), cfg.protected_attrs);
    const auto groups = stratify(observed, cfg.explanatory);

    std::vector<std::vector<CountsTable>> counts(groups.size());
    std::vector<std::vector<Score>> scores(groups.size());
    std::vector<std::vector<PredictionCountsTable>> pred(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (const auto& name : prot) {
            PredictionCountsTable t = prediction_counts(groups[g], observed, predicted, name);
            pred[g].push_back(t);
            counts[g].push_back(t.counts());
            scores[g].push_back(model_group_score(t));
        }
    }
    AuditReport rep = detail::assemble_report(observed, cfg, prot, groups, counts, scores,
                                              pred, OutcomeKind::Predicted);
    rep.quality = model_quality(observed, predicted);
    return rep;
}

struct SweepEntry {
    std::size_t k = 0;
    double avg_abs_score = 0.0;
    std::size_t n_subsets = 0;
    double mean_group_count = 0.0;
    std::size_t min_group_size = 0;
    double median_group_size = 0.0;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
};

/// For every subset size k of the declared explanatory attributes, audit the
/// dataset once per size-k subset and average the |global score| values.
/// Fragmentation stats record how thin the strata get.
inline SweepResult sweep_explanatory(const Dataset& data, const AuditConfig& cfg) {
    if (cfg.explanatory.empty())
        throw config_error("sweep needs a nonempty declared explanatory list");
    detail::check_config(data, cfg);
    const auto all = detail::explanatory_indices(data.schema(), cfg.explanatory);
    const std::size_t n = all.size();

    SweepResult result;
    for (std::size_t k = 0; k <= n; ++k) {
        SweepEntry entry;
        entry.k = k;
        double score_sum = 0.0;
        std::size_t group_count_sum = 0;
        std::vector<std::size_t> all_sizes;

        // Lexicographic combination enumeration over attribute positions.
        std::vector<std::size_t> comb(k);
        for (std::size_t i = 0; i < k; ++i) comb[i] = i;
        while (true) {
            AuditConfig sub = cfg;
            sub.explanatory.clear();
            for (std::size_t i : comb) sub.explanatory.push_back(data.schema().attribute(all[i]).name);
            AuditReport rep = audit_dataset(data, sub);
            score_sum += std::abs(rep.glbds.score.value);
            group_count_sum += rep.groups.size();
            for (const auto& g : rep.groups) all_sizes.push_back(g.size);
            ++entry.n_subsets;

            // Advance to the next combination.
            std::size_t i = k;
            while (i > 0 && comb[i - 1] == n - k + (i - 1)) --i;
            if (i == 0) break;
            ++comb[i - 1];
            for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
        }

        entry.avg_abs_score = score_sum / static_cast<double>(entry.n_subsets);
        entry.mean_group_count =
            static_cast<double>(group_count_sum) / static_cast<double>(entry.n_subsets);
        std::sort(all_sizes.begin(), all_sizes.end());
        entry.min_group_size = all_sizes.front();
        entry.median_group_size = static_cast<double>(all_sizes[(all_sizes.size() - 1) / 2]);
        result.entries.push_back(entry);
    }
    return result;
}

} // namespace fairaudit
