#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairaudit/errors.hpp"

// Core types for binary tabular data: role-tagged schemas, 0/1 datasets,
// stratification into explanatory groups and the four-cell division counts
// that every score is computed from.

namespace fairaudit {

enum class Role { Outcome, Protected, Explanatory, Other };

inline const char* role_name(Role r) {
    switch (r) {
    case Role::Outcome: return "outcome";
    case Role::Protected: return "protected";
    case Role::Explanatory: return "explanatory";
    case Role::Other: return "other";
    }
    return "other";
}

inline std::optional<Role> role_from_name(const std::string& s) {
    if (s == "outcome") return Role::Outcome;
    if (s == "protected") return Role::Protected;
    if (s == "explanatory") return Role::Explanatory;
    if (s == "other") return Role::Other;
    return std::nullopt;
}

struct Attribute {
    std::string name;
    Role role = Role::Other;

    bool operator==(const Attribute&) const = default;
};

/// Ordered attribute list with role tags. Exactly one attribute carries the
/// outcome role; names are unique. Attribute order is the canonical order
/// for signatures and reports.
class Schema {
public:
    Schema() = default;

    explicit Schema(std::vector<Attribute> attributes)
        : attributes_(std::move(attributes)) {
        std::size_t outcomes = 0;
        for (std::size_t i = 0; i < attributes_.size(); ++i) {
            const auto& a = attributes_[i];
            if (a.name.empty())
                throw schema_error("attribute names must not be empty");
            if (!index_.emplace(a.name, i).second)
                throw schema_error("duplicate attribute name '" + a.name + "'");
            if (a.role == Role::Outcome) {
                outcome_index_ = i;
                ++outcomes;
            }
        }
        if (outcomes != 1)
            throw schema_error("schema must have exactly one outcome attribute, got " +
                               std::to_string(outcomes));
    }

    std::size_t size() const { return attributes_.size(); }
    const std::vector<Attribute>& attributes() const { return attributes_; }
    const Attribute& attribute(std::size_t i) const { return attributes_[i]; }
    std::size_t outcome_index() const { return outcome_index_; }

    std::optional<std::size_t> index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Index of a named attribute; throws schema_error if absent.
    std::size_t require(const std::string& name) const {
        auto idx = index_of(name);
        if (!idx) throw schema_error("unknown attribute '" + name + "'");
        return *idx;
    }

    Role role_of(const std::string& name) const { return attributes_[require(name)].role; }

    std::vector<std::string> names_with_role(Role r) const {
        std::vector<std::string> out;
        for (const auto& a : attributes_)
            if (a.role == r) out.push_back(a.name);
        return out;
    }

    std::vector<std::string> protected_attributes() const { return names_with_role(Role::Protected); }
    std::vector<std::string> explanatory_attributes() const { return names_with_role(Role::Explanatory); }

    /// Copy of this schema with protected/explanatory roles reassigned to the
    /// given name sets. The outcome keeps its role; everything else becomes
    /// Other. Names must exist and must not include the outcome.
    Schema with_roles(const std::vector<std::string>& protected_names,
                      const std::vector<std::string>& explanatory_names) const {
        std::vector<Attribute> attrs = attributes_;
        for (auto& a : attrs)
            if (a.role != Role::Outcome) a.role = Role::Other;
        auto assign = [&](const std::vector<std::string>& names, Role role) {
            for (const auto& n : names) {
                std::size_t i = require(n);
                if (attrs[i].role == Role::Outcome)
                    throw role_error("attribute '" + n + "' is the outcome and cannot be re-tagged");
                if (attrs[i].role != Role::Other)
                    throw role_error("attribute '" + n + "' assigned to two roles");
                attrs[i].role = role;
            }
        };
        assign(protected_names, Role::Protected);
        assign(explanatory_names, Role::Explanatory);
        return Schema(std::move(attrs));
    }

    bool operator==(const Schema& other) const { return attributes_ == other.attributes_; }

private:
    std::vector<Attribute> attributes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t outcome_index_ = 0;
};

enum class OutcomeKind { Observed, Predicted };

/// Immutable-after-construction table of 0/1 values under a Schema. Rows are
/// stored positionally against the schema order. The outcome column holds
/// either observed outcomes or model predictions, marked by outcome_kind.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(Schema schema, OutcomeKind kind = OutcomeKind::Observed)
        : schema_(std::move(schema)), kind_(kind) {}

    const Schema& schema() const { return schema_; }
    OutcomeKind outcome_kind() const { return kind_; }
    std::size_t row_count() const { return rows_; }

    void reserve(std::size_t rows) { values_.reserve(rows * schema_.size()); }

    void append_row(const std::vector<std::uint8_t>& row) {
        if (row.size() != schema_.size())
            throw data_error("row has " + std::to_string(row.size()) + " values, schema has " +
                             std::to_string(schema_.size()));
        for (auto v : row)
            if (v > 1) throw data_error("dataset values must be 0 or 1");
        values_.insert(values_.end(), row.begin(), row.end());
        ++rows_;
    }

    std::uint8_t value(std::size_t row, std::size_t col) const {
        return values_[row * schema_.size() + col];
    }

    std::uint8_t outcome(std::size_t row) const { return value(row, schema_.outcome_index()); }

    /// Same rows with the outcome column replaced; used by classifiers to
    /// build predicted datasets.
    Dataset with_outcome(const std::vector<std::uint8_t>& outcomes, OutcomeKind kind) const {
        if (outcomes.size() != rows_)
            throw alignment_error("outcome column has " + std::to_string(outcomes.size()) +
                                  " values for " + std::to_string(rows_) + " rows");
        Dataset out(schema_, kind);
        out.values_ = values_;
        out.rows_ = rows_;
        const std::size_t w = schema_.size();
        const std::size_t oc = schema_.outcome_index();
        for (std::size_t r = 0; r < rows_; ++r) {
            if (outcomes[r] > 1) throw data_error("dataset values must be 0 or 1");
            out.values_[r * w + oc] = outcomes[r];
        }
        return out;
    }

    /// Same data relabelled as a predicted dataset (perfect-model view).
    Dataset as_predicted() const {
        Dataset out = *this;
        out.kind_ = OutcomeKind::Predicted;
        return out;
    }

    /// Same data under a schema with protected/explanatory roles reassigned.
    Dataset with_roles(const std::vector<std::string>& protected_names,
                       const std::vector<std::string>& explanatory_names) const {
        Dataset out = *this;
        out.schema_ = schema_.with_roles(protected_names, explanatory_names);
        return out;
    }

private:
    Schema schema_;
    OutcomeKind kind_ = OutcomeKind::Observed;
    std::vector<std::uint8_t> values_;
    std::size_t rows_ = 0;
};

struct SignatureEntry {
    std::string attribute;
    std::uint8_t value = 0;

    bool operator==(const SignatureEntry&) const = default;
};

using Signature = std::vector<SignatureEntry>;

/// One stratum of the explanatory attributes: the rows of the parent dataset
/// sharing a signature. Holds row indices, not row copies.
struct EGroup {
    Signature signature;
    std::vector<std::uint32_t> row_indices;

    std::size_t size() const { return row_indices.size(); }
};

/// Tuple counts of the four divisions within a group: first index is the
/// outcome value, second the protected value.
struct CountsTable {
    std::int64_t f11 = 0;
    std::int64_t f10 = 0;
    std::int64_t f01 = 0;
    std::int64_t f00 = 0;

    std::int64_t total() const { return f11 + f10 + f01 + f00; }

    CountsTable operator+(const CountsTable& o) const {
        return {f11 + o.f11, f10 + o.f10, f01 + o.f01, f00 + o.f00};
    }

    bool operator==(const CountsTable&) const = default;
};

/// Division counts split into right (prediction == outcome) and wrong parts;
/// fr_ij + fw_ij recovers the plain counts.
struct PredictionCountsTable {
    std::int64_t fr11 = 0, fw11 = 0;
    std::int64_t fr10 = 0, fw10 = 0;
    std::int64_t fr01 = 0, fw01 = 0;
    std::int64_t fr00 = 0, fw00 = 0;

    CountsTable counts() const {
        return {fr11 + fw11, fr10 + fw10, fr01 + fw01, fr00 + fw00};
    }

    std::int64_t total() const { return counts().total(); }
    std::int64_t wrong() const { return fw11 + fw10 + fw01 + fw00; }

    bool operator==(const PredictionCountsTable&) const = default;
};

namespace detail {

/// Explanatory column indices in schema order, validated. Duplicates collapse.
inline std::vector<std::size_t> explanatory_indices(const Schema& schema,
                                                    const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
        std::size_t i = schema.require(n);
        if (schema.attribute(i).role != Role::Explanatory)
            throw role_error("attribute '" + n + "' has role " +
                             role_name(schema.attribute(i).role) + ", expected explanatory");
        idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

inline std::size_t protected_index(const Schema& schema, const std::string& name) {
    std::size_t i = schema.require(name);
    if (schema.attribute(i).role != Role::Protected)
        throw role_error("attribute '" + name + "' has role " +
                         role_name(schema.attribute(i).role) + ", expected protected");
    return i;
}

} // namespace detail

/// Partition the dataset into E-groups over the given explanatory attributes.
/// An empty set yields one group holding every row. Groups come back in
/// signature-lexicographic order (attribute positions in schema order); row
/// indices within a group are ascending.
inline std::vector<EGroup> stratify(const Dataset& data,
                                    const std::vector<std::string>& explanatory) {
    const Schema& schema = data.schema();
    auto cols = detail::explanatory_indices(schema, explanatory);
    if (cols.size() > 64)
        throw config_error("at most 64 explanatory attributes per stratification, got " +
                           std::to_string(cols.size()));

    std::unordered_map<std::uint64_t, std::size_t> by_key;
    std::vector<EGroup> groups;
    std::vector<std::uint64_t> keys;
    for (std::size_t r = 0; r < data.row_count(); ++r) {
        std::uint64_t key = 0;
        for (std::size_t b = 0; b < cols.size(); ++b)
            key |= static_cast<std::uint64_t>(data.value(r, cols[b])) << b;
        auto [it, fresh] = by_key.emplace(key, groups.size());
        if (fresh) {
            EGroup g;
            g.signature.reserve(cols.size());
            for (std::size_t b = 0; b < cols.size(); ++b)
                g.signature.push_back({schema.attribute(cols[b]).name,
                                       static_cast<std::uint8_t>((key >> b) & 1)});
            groups.push_back(std::move(g));
            keys.push_back(key);
        }
        groups[it->second].row_indices.push_back(static_cast<std::uint32_t>(r));
    }

    std::vector<std::size_t> order(groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            std::uint8_t va = (keys[a] >> c) & 1;
            std::uint8_t vb = (keys[b] >> c) & 1;
            if (va != vb) return va < vb;
        }
        return false;
    });
    std::vector<EGroup> out;
    out.reserve(groups.size());
    for (std::size_t i : order) out.push_back(std::move(groups[i]));
    return out;
}

/// Division counts of one group against a protected attribute.
inline CountsTable dp_counts(const EGroup& group, const Dataset& data,
                             const std::string& protected_attr) {
    const std::size_t p = detail::protected_index(data.schema(), protected_attr);
    const std::size_t d = data.schema().outcome_index();
    CountsTable c;
    for (std::uint32_t r : group.row_indices) {
        const bool dv = data.value(r, d) != 0;
        const bool pv = data.value(r, p) != 0;
        if (dv && pv) ++c.f11;
        else if (dv) ++c.f10;
        else if (pv) ++c.f01;
        else ++c.f00;
    }
    return c;
}

/// Cheap alignment checks: outcome kinds, schema equality, row counts.
inline void require_aligned_shape(const Dataset& observed, const Dataset& predicted) {
    if (observed.outcome_kind() != OutcomeKind::Observed)
        throw alignment_error("first dataset must hold observed outcomes");
    if (predicted.outcome_kind() != OutcomeKind::Predicted)
        throw alignment_error("second dataset must hold predicted outcomes");
    if (!(observed.schema() == predicted.schema()))
        throw alignment_error("observed and predicted datasets have different schemas");
    if (observed.row_count() != predicted.row_count())
        throw alignment_error("row count mismatch: observed has " +
                              std::to_string(observed.row_count()) + ", predicted has " +
                              std::to_string(predicted.row_count()));
}

/// Observed and predicted datasets must pair row for row: same schema, same
/// row count, same values everywhere except the outcome column.
inline void require_aligned(const Dataset& observed, const Dataset& predicted) {
    require_aligned_shape(observed, predicted);
    const std::size_t w = observed.schema().size();
    const std::size_t oc = observed.schema().outcome_index();
    for (std::size_t r = 0; r < observed.row_count(); ++r)
        for (std::size_t c = 0; c < w; ++c)
            if (c != oc && observed.value(r, c) != predicted.value(r, c))
                throw alignment_error("non-outcome values differ at row " + std::to_string(r));
}

/// Right/wrong prediction counts of one group. The group indexes into the
/// observed dataset; the predicted dataset supplies the outcome column.
inline PredictionCountsTable prediction_counts(const EGroup& group, const Dataset& observed,
                                               const Dataset& predicted,
                                               const std::string& protected_attr) {
    require_aligned_shape(observed, predicted);
    const std::size_t p = detail::protected_index(observed.schema(), protected_attr);
    const std::size_t d = observed.schema().outcome_index();
    PredictionCountsTable t;
    for (std::uint32_t r : group.row_indices) {
        const bool dv = observed.value(r, d) != 0;
        const bool pv = observed.value(r, p) != 0;
        const bool right = predicted.value(r, d) == observed.value(r, d);
        if (dv && pv) (right ? t.fr11 : t.fw11)++;
        else if (dv) (right ? t.fr10 : t.fw10)++;
        else if (pv) (right ? t.fr01 : t.fw01)++;
        else (right ? t.fr00 : t.fw00)++;
    }
    return t;
}

} // namespace fairaudit
