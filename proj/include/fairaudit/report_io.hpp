#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "fairaudit/audit.hpp"
#include "fairaudit/errors.hpp"
#include "fairaudit/ingest.hpp"

// Report serialization. Reports are written with a fixed field order and all
// floats at six decimal places, so the same report always serializes to the
// same bytes. Files are written whole (temp + rename), never partially.

namespace fairaudit {

enum class ReportFormat { Json, Csv, PlotData };

inline ReportFormat report_format_from_name(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "plot-data") return ReportFormat::PlotData;
    throw config_error("unknown report format '" + s + "'");
}

namespace detail {

inline std::string f6(double v) {
    if (v == 0.0) v = 0.0; // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                out += buf;
            } else {
                out.push_back(c);
            }
        }
    }
    return out;
}

inline std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

inline std::string signature_json(const Signature& sig) {
    std::string out = "[";
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (i) out += ",";
        out += "{\"attribute\":" + quoted(sig[i].attribute) +
               ",\"value\":" + std::to_string(int(sig[i].value)) + "}";
    }
    return out + "]";
}

inline std::string signature_text(const Signature& sig) {
    if (sig.empty()) return "(all)";
    std::string out;
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (i) out += " ";
        out += sig[i].attribute + "=" + std::to_string(int(sig[i].value));
    }
    return out;
}

inline std::string counts_json(const CountsTable& c) {
    return "{\"f11\":" + std::to_string(c.f11) + ",\"f10\":" + std::to_string(c.f10) +
           ",\"f01\":" + std::to_string(c.f01) + ",\"f00\":" + std::to_string(c.f00) + "}";
}

inline std::string prediction_counts_json(const PredictionCountsTable& t) {
    return "{\"fr11\":" + std::to_string(t.fr11) + ",\"fw11\":" + std::to_string(t.fw11) +
           ",\"fr10\":" + std::to_string(t.fr10) + ",\"fw10\":" + std::to_string(t.fw10) +
           ",\"fr01\":" + std::to_string(t.fr01) + ",\"fw01\":" + std::to_string(t.fw01) +
           ",\"fr00\":" + std::to_string(t.fr00) + ",\"fw00\":" + std::to_string(t.fw00) + "}";
}

inline std::string attribute_score_json(const AttributeScore& a) {
    return "{\"attribute\":" + quoted(a.attribute) + ",\"score\":" + f6(a.score.value) +
           ",\"convention\":" + (a.score.defined_by_convention ? "true" : "false") + "}";
}

inline void write_whole_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw io_error("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("cannot move report into place at '" + path.string() + "'");
}

} // namespace detail

inline std::string to_json(const AuditReport& rep) {
    std::string out = "{";
    out += "\"alpha\":" + detail::f6(rep.alpha);
    out += ",\"outcome_kind\":" +
           detail::quoted(rep.outcome_kind == OutcomeKind::Predicted ? "predicted" : "observed");
    out += ",\"total_rows\":" + std::to_string(rep.total_rows);
    out += ",\"glbds\":" + detail::attribute_score_json(rep.glbds);
    out += ",\"attribute_scores\":[";
    for (std::size_t i = 0; i < rep.attribute_scores.size(); ++i) {
        if (i) out += ",";
        out += detail::attribute_score_json(rep.attribute_scores[i]);
    }
    out += "]";
    out += ",\"wgds\":{\"attribute\":" + detail::quoted(rep.wgds.attribute) +
           ",\"score\":" + detail::f6(rep.wgds.score.value) +
           ",\"convention\":" + (rep.wgds.score.defined_by_convention ? "true" : "false") +
           ",\"signature\":" + detail::signature_json(rep.wgds.signature) +
           ",\"size\":" + std::to_string(rep.wgds.size) +
           ",\"counts\":" + detail::counts_json(rep.wgds.counts) + "}";
    out += ",\"wg_pct\":" + detail::f6(rep.wg_pct);
    out += ",\"ogds\":" + (rep.ogds ? detail::f6(*rep.ogds) : std::string("null"));
    out += ",\"og_pct\":" + detail::f6(rep.og_pct);
    out += ",\"top_attributes\":[";
    for (std::size_t i = 0; i < rep.top_attributes.size(); ++i) {
        if (i) out += ",";
        out += detail::attribute_score_json(rep.top_attributes[i]);
    }
    out += "]";
    if (rep.quality) {
        out += ",\"model_quality\":{\"bcr\":" + detail::f6(rep.quality->bcr) +
               ",\"err\":" + detail::f6(rep.quality->err) + "}";
    }
    out += ",\"groups\":[";
    for (std::size_t g = 0; g < rep.groups.size(); ++g) {
        if (g) out += ",";
        const auto& grp = rep.groups[g];
        out += "{\"signature\":" + detail::signature_json(grp.signature);
        out += ",\"size\":" + std::to_string(grp.size);
        out += ",\"small\":" + std::string(grp.small ? "true" : "false");
        out += ",\"scores\":[";
        for (std::size_t a = 0; a < grp.per_attribute.size(); ++a) {
            if (a) out += ",";
            const auto& pa = grp.per_attribute[a];
            out += "{\"attribute\":" + detail::quoted(pa.attribute);
            out += ",\"counts\":" + detail::counts_json(pa.counts);
            if (pa.prediction_counts)
                out += ",\"prediction_counts\":" +
                       detail::prediction_counts_json(*pa.prediction_counts);
            out += ",\"score\":" + detail::f6(pa.score.value);
            out += ",\"convention\":" + std::string(pa.score.defined_by_convention ? "true" : "false");
            out += ",\"over_limit\":" + std::string(pa.over_limit ? "true" : "false");
            out += "}";
        }
        out += "]}";
    }
    out += "]}";
    return out;
}

/// Group detail table, one row per (group, protected attribute).
inline std::string to_csv(const AuditReport& rep) {
    const bool pred = rep.outcome_kind == OutcomeKind::Predicted;
    std::string out = "signature,size,small,attribute,f11,f10,f01,f00";
    if (pred) out += ",wrong";
    out += ",score,convention,over_limit\n";
    for (const auto& grp : rep.groups) {
        for (const auto& pa : grp.per_attribute) {
            out += "\"" + detail::signature_text(grp.signature) + "\"";
            out += "," + std::to_string(grp.size);
            out += std::string(",") + (grp.small ? "1" : "0");
            out += "," + pa.attribute;
            out += "," + std::to_string(pa.counts.f11) + "," + std::to_string(pa.counts.f10) +
                   "," + std::to_string(pa.counts.f01) + "," + std::to_string(pa.counts.f00);
            if (pred)
                out += "," + std::to_string(pa.prediction_counts ? pa.prediction_counts->wrong()
                                                                 : 0);
            out += "," + detail::f6(pa.score.value);
            out += std::string(",") + (pa.score.defined_by_convention ? "1" : "0");
            out += std::string(",") + (pa.over_limit ? "1" : "0") + "\n";
        }
    }
    return out;
}

inline std::string to_json(const SweepResult& sweep) {
    std::string out = "{\"entries\":[";
    for (std::size_t i = 0; i < sweep.entries.size(); ++i) {
        if (i) out += ",";
        const auto& e = sweep.entries[i];
        out += "{\"k\":" + std::to_string(e.k);
        out += ",\"avg_abs_score\":" + detail::f6(e.avg_abs_score);
        out += ",\"n_subsets\":" + std::to_string(e.n_subsets);
        out += ",\"mean_group_count\":" + detail::f6(e.mean_group_count);
        out += ",\"min_group_size\":" + std::to_string(e.min_group_size);
        out += ",\"median_group_size\":" + detail::f6(e.median_group_size);
        out += "}";
    }
    return out + "]}";
}

inline std::string to_csv(const SweepResult& sweep) {
    std::string out = "k,avg_abs_score,n_subsets\n";
    for (const auto& e : sweep.entries)
        out += std::to_string(e.k) + "," + detail::f6(e.avg_abs_score) + "," +
               std::to_string(e.n_subsets) + "\n";
    return out;
}

/// (k, average |global score|) pairs, one per line, for plotting.
inline std::string to_plot_data(const SweepResult& sweep) {
    std::string out;
    for (const auto& e : sweep.entries)
        out += std::to_string(e.k) + " " + detail::f6(e.avg_abs_score) + "\n";
    return out;
}

inline std::string to_json(const ValidationReport& rep) {
    std::string out = "{\"minority_class_rate\":" + detail::f6(rep.minority_class_rate);
    out += ",\"ones_fraction\":[";
    for (std::size_t i = 0; i < rep.ones_fraction.size(); ++i) {
        if (i) out += ",";
        out += "{\"attribute\":" + detail::quoted(rep.ones_fraction[i].first) +
               ",\"fraction\":" + detail::f6(rep.ones_fraction[i].second) + "}";
    }
    out += "],\"warnings\":[";
    for (std::size_t i = 0; i < rep.warnings.size(); ++i) {
        if (i) out += ",";
        out += detail::quoted(rep.warnings[i]);
    }
    return out + "]}";
}

/// Binary dataset as CSV: schema names as header, one 0/1 row per record.
inline std::string dataset_to_csv(const Dataset& data) {
    std::string out;
    for (std::size_t c = 0; c < data.schema().size(); ++c) {
        if (c) out += ",";
        out += data.schema().attribute(c).name;
    }
    out += "\n";
    for (std::size_t r = 0; r < data.row_count(); ++r) {
        for (std::size_t c = 0; c < data.schema().size(); ++c) {
            if (c) out += ",";
            out += data.value(r, c) ? '1' : '0';
        }
        out += "\n";
    }
    return out;
}

inline void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
    detail::write_whole_file(path, dataset_to_csv(data));
}

inline void write_report(const AuditReport& rep, ReportFormat format,
                         const std::filesystem::path& path) {
    switch (format) {
    case ReportFormat::Json: detail::write_whole_file(path, to_json(rep) + "\n"); return;
    case ReportFormat::Csv: detail::write_whole_file(path, to_csv(rep)); return;
    case ReportFormat::PlotData:
        throw config_error("plot-data output applies to sweep results only");
    }
}

inline void write_report(const SweepResult& sweep, ReportFormat format,
                         const std::filesystem::path& path) {
    switch (format) {
    case ReportFormat::Json: detail::write_whole_file(path, to_json(sweep) + "\n"); return;
    case ReportFormat::Csv: detail::write_whole_file(path, to_csv(sweep)); return;
    case ReportFormat::PlotData: detail::write_whole_file(path, to_plot_data(sweep)); return;
    }
}

} // namespace fairaudit
