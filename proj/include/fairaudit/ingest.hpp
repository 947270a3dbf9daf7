#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "fairaudit/data_model.hpp"
#include "fairaudit/errors.hpp"

// Delimited-text ingestion: load a raw table, apply per-attribute
// binarization rules from a JSON schema configuration, and report basic
// balance statistics of the result.

namespace fairaudit {

enum class ColumnKind { Numeric, Categorical, Binary };

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<ColumnKind> column_kinds;
    std::vector<std::size_t> line_numbers; // original 1-based file lines, per row
};

struct BinRule {
    enum class Kind { Median, Majority, Threshold, Identity };
    Kind kind = Kind::Identity;
    std::string category; // majority rule: the category that maps to 1
    double value = 0.0;   // threshold rule: raw value >= value maps to 1
};

struct AttributeConfig {
    std::string name;
    Role role = Role::Other;
    BinRule rule;
};

struct SchemaConfig {
    std::vector<AttributeConfig> attributes;
};

struct BinarizeResult {
    Dataset data;
    std::size_t rows_dropped = 0; // rows removed for missing values
};

struct ValidationReport {
    double minority_class_rate = 0.0;
    std::vector<std::pair<std::string, double>> ones_fraction; // per attribute
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool is_missing(const std::string& v) { return v.empty() || v == "?" || v == "NA"; }

inline bool parse_numeric(const std::string& v, double& out) {
    if (v.empty()) return false;
    const char* begin = v.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + v.size();
}

/// One delimited line, honoring double-quoted fields with "" escapes.
/// Unquoted fields are whitespace-trimmed.
inline std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && trim(cur).empty()) {
            quoted = true;
            was_quoted = true;
            cur.clear();
        } else if (c == delimiter) {
            fields.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(was_quoted ? cur : trim(cur));
    return fields;
}

inline ColumnKind infer_kind(const std::vector<std::vector<std::string>>& rows, std::size_t col) {
    bool all_binary = true;
    bool all_numeric = true;
    bool any = false;
    double tmp;
    for (const auto& row : rows) {
        const std::string& v = row[col];
        if (is_missing(v)) continue;
        any = true;
        if (v != "0" && v != "1") all_binary = false;
        if (!parse_numeric(v, tmp)) all_numeric = false;
        if (!all_binary && !all_numeric) break;
    }
    if (!any) return ColumnKind::Categorical;
    if (all_binary) return ColumnKind::Binary;
    if (all_numeric) return ColumnKind::Numeric;
    return ColumnKind::Categorical;
}

} // namespace detail

/// Load a delimited text file with a header row. Ragged rows are parse
/// errors naming the offending line; a file without a header row is an
/// empty-input error.
inline RawTable load_raw(const std::filesystem::path& path, char delimiter = ',') {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path.string() + "'");

    RawTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            table.header = detail::split_fields(line, delimiter);
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        auto fields = detail::split_fields(line, delimiter);
        if (fields.size() != table.header.size())
            throw parse_error("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(table.header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (!have_header) throw empty_input_error("'" + path.string() + "' is empty");

    table.column_kinds.resize(table.header.size());
    for (std::size_t c = 0; c < table.header.size(); ++c)
        table.column_kinds[c] = detail::infer_kind(table.rows, c);
    return table;
}

/// Parse a schema configuration:
/// {"attributes":[{"name":..., "role":"outcome|protected|explanatory|other",
///                 "rule":{"kind":"median|majority|threshold|identity", ...}}]}
/// Majority rules carry "category", threshold rules carry "value".
inline SchemaConfig parse_schema_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("schema config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("attributes") || !doc["attributes"].is_array())
        throw config_error("schema config must be an object with an 'attributes' array");

    SchemaConfig cfg;
    std::unordered_set<std::string> seen;
    std::size_t outcomes = 0;
    for (const auto& entry : doc["attributes"]) {
        AttributeConfig ac;
        if (!entry.contains("name") || !entry["name"].is_string())
            throw config_error("every attribute entry needs a string 'name'");
        ac.name = entry["name"].get<std::string>();
        if (!seen.insert(ac.name).second)
            throw config_error("attribute '" + ac.name + "' configured twice");

        if (!entry.contains("role") || !entry["role"].is_string())
            throw config_error("attribute '" + ac.name + "' needs a string 'role'");
        auto role = role_from_name(entry["role"].get<std::string>());
        if (!role)
            throw config_error("attribute '" + ac.name + "': unknown role '" +
                               entry["role"].get<std::string>() + "'");
        ac.role = *role;
        if (ac.role == Role::Outcome) ++outcomes;

        if (entry.contains("rule")) {
            const auto& rule = entry["rule"];
            if (!rule.is_object() || !rule.contains("kind") || !rule["kind"].is_string())
                throw config_error("attribute '" + ac.name + "': rule needs a string 'kind'");
            const std::string kind = rule["kind"].get<std::string>();
            if (kind == "median") {
                ac.rule.kind = BinRule::Kind::Median;
            } else if (kind == "majority") {
                ac.rule.kind = BinRule::Kind::Majority;
                if (!rule.contains("category") || !rule["category"].is_string())
                    throw config_error("attribute '" + ac.name +
                                       "': majority rule needs a string 'category'");
                ac.rule.category = rule["category"].get<std::string>();
            } else if (kind == "threshold") {
                ac.rule.kind = BinRule::Kind::Threshold;
                if (!rule.contains("value") || !rule["value"].is_number())
                    throw config_error("attribute '" + ac.name +
                                       "': threshold rule needs a numeric 'value'");
                ac.rule.value = rule["value"].get<double>();
            } else if (kind == "identity") {
                ac.rule.kind = BinRule::Kind::Identity;
            } else {
                throw config_error("attribute '" + ac.name + "': unknown rule kind '" + kind +
                                   "'");
            }
        }
        cfg.attributes.push_back(std::move(ac));
    }
    if (outcomes != 1)
        throw config_error("schema config must mark exactly one outcome attribute, got " +
                           std::to_string(outcomes));
    return cfg;
}

inline SchemaConfig load_schema_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_schema_config(buf.str());
}

/// Binarize configured columns into a 0/1 dataset. Unconfigured columns are
/// dropped; rows with a missing value in any configured column are dropped
/// and counted. Median uses the lower median with value >= median mapping
/// to 1; majority maps the designated category to 1; threshold maps raw
/// value >= value to 1; identity requires 0/1 input.
inline BinarizeResult binarize(const RawTable& raw, const SchemaConfig& config,
                               OutcomeKind kind = OutcomeKind::Observed) {
    std::vector<std::size_t> col_of;
    std::vector<Attribute> attrs;
    for (const auto& ac : config.attributes) {
        auto it = std::find(raw.header.begin(), raw.header.end(), ac.name);
        if (it == raw.header.end())
            throw config_error("configured attribute '" + ac.name + "' is not in the header");
        col_of.push_back(static_cast<std::size_t>(it - raw.header.begin()));
        attrs.push_back({ac.name, ac.role});
    }

    // Missing-value pass: keep the surviving row indices.
    std::vector<std::size_t> kept;
    kept.reserve(raw.rows.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        bool missing = false;
        for (std::size_t c : col_of)
            if (detail::is_missing(raw.rows[r][c])) { missing = true; break; }
        if (!missing) kept.push_back(r);
    }

    BinarizeResult out{Dataset(Schema(attrs), kind), raw.rows.size() - kept.size()};
    if (kept.empty()) return out;

    // Column-wise transforms.
    std::vector<std::vector<std::uint8_t>> columns(config.attributes.size());
    for (std::size_t a = 0; a < config.attributes.size(); ++a) {
        const auto& ac = config.attributes[a];
        const std::size_t c = col_of[a];
        auto& bits = columns[a];
        bits.reserve(kept.size());
        auto bad_value = [&](std::size_t r, const std::string& why) -> conversion_error {
            return conversion_error("attribute '" + ac.name + "': " + why + " '" +
                                    raw.rows[r][c] + "' (line " +
                                    std::to_string(raw.line_numbers[r]) + ")");
        };
        switch (ac.rule.kind) {
        case BinRule::Kind::Identity:
            for (std::size_t r : kept) {
                const std::string& v = raw.rows[r][c];
                if (v != "0" && v != "1") throw bad_value(r, "non-binary value under identity rule");
                bits.push_back(v == "1" ? 1 : 0);
            }
            break;
        case BinRule::Kind::Threshold:
            for (std::size_t r : kept) {
                double x;
                if (!detail::parse_numeric(raw.rows[r][c], x))
                    throw bad_value(r, "non-numeric value under threshold rule");
                bits.push_back(x >= ac.rule.value ? 1 : 0);
            }
            break;
        case BinRule::Kind::Median: {
            std::vector<double> values;
            values.reserve(kept.size());
            for (std::size_t r : kept) {
                double x;
                if (!detail::parse_numeric(raw.rows[r][c], x))
                    throw bad_value(r, "non-numeric value under median rule");
                values.push_back(x);
            }
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            // Lower median: the smaller of the two middle elements for even
            // counts.
            const double median = sorted[(sorted.size() - 1) / 2];
            for (double x : values) bits.push_back(x >= median ? 1 : 0);
            break;
        }
        case BinRule::Kind::Majority: {
            bool present = false;
            for (std::size_t r : kept)
                if (raw.rows[r][c] == ac.rule.category) { present = true; break; }
            if (!present)
                throw config_error("attribute '" + ac.name + "': designated category '" +
                                   ac.rule.category + "' does not occur in the data");
            for (std::size_t r : kept)
                bits.push_back(raw.rows[r][c] == ac.rule.category ? 1 : 0);
            break;
        }
        }
    }

    out.data.reserve(kept.size());
    std::vector<std::uint8_t> row(config.attributes.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (std::size_t a = 0; a < columns.size(); ++a) row[a] = columns[a][i];
        out.data.append_row(row);
    }
    return out;
}

/// Balance report: outcome minority class rate, per-attribute fraction of
/// ones, and warnings for degenerate outcome or contrast-free protected
/// attributes.
inline ValidationReport validate(const Dataset& data) {
    ValidationReport rep;
    if (data.row_count() == 0) {
        rep.warnings.push_back("dataset has no rows");
        return rep;
    }
    const double n = static_cast<double>(data.row_count());
    for (std::size_t c = 0; c < data.schema().size(); ++c) {
        std::int64_t ones = 0;
        for (std::size_t r = 0; r < data.row_count(); ++r) ones += data.value(r, c);
        const double frac = static_cast<double>(ones) / n;
        const Attribute& a = data.schema().attribute(c);
        rep.ones_fraction.push_back({a.name, frac});
        if (a.role == Role::Outcome) {
            rep.minority_class_rate = std::min(frac, 1.0 - frac);
            if (frac == 0.0 || frac == 1.0)
                rep.warnings.push_back("outcome '" + a.name +
                                       "' has a single class; minority rate is 0");
        } else if (a.role == Role::Protected && (frac == 0.0 || frac == 1.0)) {
            rep.warnings.push_back("protected attribute '" + a.name + "' has no contrast (all " +
                                   (frac == 1.0 ? "1" : "0") + ")");
        }
    }
    return rep;
}

} // namespace fairaudit
