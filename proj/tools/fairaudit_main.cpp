// Command-line front end: audit datasets and predictions, train and apply
// baseline classifiers, sweep explanatory-attribute subsets, and emit the
// synthetic verification datasets. Every run writes a manifest next to its
// outputs. Exit codes: 0 ok, 1 configuration error, 2 data error, 3 internal.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairaudit/fairaudit.hpp"

namespace fs = std::filesystem;
using namespace fairaudit;

namespace {

struct CommonOptions {
    std::string data_path;
    std::string schema_path;
    double alpha = 0.05;
    std::string explanatory_csv;
    std::string protected_csv;
    std::string out_dir = ".";
    std::string format = "json";
    char delimiter = ',';
    std::size_t top_k = 3;
    std::size_t min_group_size = 1;
    std::optional<long long> seed;
};

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return {std::stoll(text), 1};
        return {std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1))};
    } catch (const std::exception&) {
        throw parameter_error("cannot parse rational '" + text + "' (use p or p/q)");
    }
}

std::string json_list(const std::vector<std::string>& names) {
    std::string out = "[";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ",";
        out += detail::quoted(names[i]);
    }
    return out + "]";
}

struct LoadedData {
    Dataset data;
    std::string schema_text;
    SchemaConfig config;
    std::size_t rows_dropped = 0;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

LoadedData load_dataset(const CommonOptions& opt, OutcomeKind kind = OutcomeKind::Observed) {
    LoadedData out{Dataset{}, read_file(opt.schema_path), {}, 0};
    out.config = parse_schema_config(out.schema_text);
    RawTable raw = load_raw(opt.data_path, opt.delimiter);
    BinarizeResult bin = binarize(raw, out.config, kind);
    out.data = std::move(bin.data);
    out.rows_dropped = bin.rows_dropped;
    if (out.rows_dropped > 0)
        std::cerr << "note: dropped " << out.rows_dropped << " row(s) with missing values\n";
    if (!opt.explanatory_csv.empty() || !opt.protected_csv.empty()) {
        auto protected_names = !opt.protected_csv.empty()
                                   ? split_names(opt.protected_csv)
                                   : out.data.schema().protected_attributes();
        auto explanatory_names = !opt.explanatory_csv.empty()
                                     ? split_names(opt.explanatory_csv)
                                     : out.data.schema().explanatory_attributes();
        out.data = out.data.with_roles(protected_names, explanatory_names);
    }
    return out;
}

AuditConfig make_audit_config(const CommonOptions& opt, const Dataset& data) {
    AuditConfig cfg = AuditConfig::from_schema(data.schema());
    cfg.alpha = opt.alpha;
    cfg.top_k = opt.top_k;
    cfg.min_group_size = opt.min_group_size;
    return cfg;
}

RunManifest base_manifest(const std::string& command, const CommonOptions& opt,
                          const std::string& schema_text, const AuditConfig& cfg) {
    RunManifest m;
    m.command = command;
    m.add_input("data", opt.data_path);
    m.add_input("schema", opt.schema_path);
    m.schema_digest = content_digest(schema_text);
    m.add_parameter("alpha", detail::f6(cfg.alpha));
    m.add_parameter("explanatory", json_list(cfg.explanatory));
    m.add_parameter("protected", json_list(cfg.protected_attrs));
    m.add_parameter("seed", opt.seed ? std::to_string(*opt.seed) : "null");
    return m;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool needs_data = true) {
    if (needs_data) {
        cmd->add_option("--data", opt.data_path, "input delimited text file")->required();
        cmd->add_option("--schema", opt.schema_path, "schema configuration JSON")->required();
        cmd->add_option("--delimiter", opt.delimiter, "field delimiter (default ',')");
        cmd->add_option("--explanatory", opt.explanatory_csv,
                        "comma-separated explanatory attributes (overrides schema roles)");
        cmd->add_option("--protected", opt.protected_csv,
                        "comma-separated protected attributes (overrides schema roles)");
    }
    cmd->add_option("--alpha", opt.alpha, "discrimination threshold (default 0.05)");
    cmd->add_option("--out-dir", opt.out_dir, "output directory (default '.')");
    cmd->add_option("--format", opt.format, "report format: json|csv (sweep also plot-data)");
    cmd->add_option("--top-k", opt.top_k, "protected attributes to rank (default 3)");
    cmd->add_option("--min-group-size", opt.min_group_size,
                    "flag groups smaller than this (default 1 = off)");
    cmd->add_option("--seed", opt.seed, "seed recorded in the manifest");
}

fs::path ensure_out_dir(const CommonOptions& opt) {
    fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory '" + dir.string() + "'");
    return dir;
}

const char* report_file_name(ReportFormat f) {
    return f == ReportFormat::Csv ? "report.csv" : "report.json";
}

int run_audit(const CommonOptions& opt) {
    LoadedData loaded = load_dataset(opt);
    AuditConfig cfg = make_audit_config(opt, loaded.data);
    AuditReport report = audit_dataset(loaded.data, cfg);
    ReportFormat format = report_format_from_name(opt.format);

    fs::path dir = ensure_out_dir(opt);
    fs::path report_path = dir / report_file_name(format);
    write_report(report, format, report_path);

    RunManifest m = base_manifest("audit", opt, loaded.schema_text, cfg);
    m.add_output(report_path);
    write_manifest(m, dir / "manifest.json");

    std::cout << "glbds " << detail::f6(report.glbds.score.value) << " ("
              << report.glbds.attribute << "), wgds " << detail::f6(report.wgds.score.value)
              << ", over-limit rows " << detail::f6(report.og_pct * 100.0) << "%\n";
    return 0;
}

/// Predicted datasets that are already binary artifacts (header equals the
/// configured attribute names) load as-is; anything else goes through the
/// schema rules like the observed file.
Dataset load_predicted(const std::string& path, const SchemaConfig& config, char delimiter) {
    RawTable raw = load_raw(path, delimiter);
    bool header_matches = raw.header.size() == config.attributes.size();
    for (std::size_t i = 0; header_matches && i < raw.header.size(); ++i)
        header_matches = raw.header[i] == config.attributes[i].name;
    if (!header_matches) return binarize(raw, config, OutcomeKind::Predicted).data;

    std::vector<Attribute> attrs;
    for (const auto& ac : config.attributes) attrs.push_back({ac.name, ac.role});
    Dataset data(Schema(attrs), OutcomeKind::Predicted);
    data.reserve(raw.rows.size());
    std::vector<std::uint8_t> row(attrs.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        for (std::size_t c = 0; c < attrs.size(); ++c) {
            const std::string& v = raw.rows[r][c];
            if (v != "0" && v != "1")
                throw conversion_error("predicted file: non-binary value '" + v + "' (line " +
                                       std::to_string(raw.line_numbers[r]) + ")");
            row[c] = v == "1" ? 1 : 0;
        }
        data.append_row(row);
    }
    return data;
}

int run_audit_predictions(const CommonOptions& opt, const std::string& predicted_path,
                          const std::string& model_path) {
    LoadedData loaded = load_dataset(opt);
    Dataset predicted;
    if (!model_path.empty()) {
        Model model = load_model(model_path);
        predicted = predict(model, loaded.data);
    } else {
        predicted = load_predicted(predicted_path, loaded.config, opt.delimiter);
        if (!opt.explanatory_csv.empty() || !opt.protected_csv.empty())
            predicted = predicted.with_roles(loaded.data.schema().protected_attributes(),
                                             loaded.data.schema().explanatory_attributes());
    }

    AuditConfig cfg = make_audit_config(opt, loaded.data);
    AuditReport report = audit_predictions(loaded.data, predicted, cfg);
    ReportFormat format = report_format_from_name(opt.format);

    fs::path dir = ensure_out_dir(opt);
    fs::path report_path = dir / report_file_name(format);
    write_report(report, format, report_path);

    RunManifest m = base_manifest("audit-predictions", opt, loaded.schema_text, cfg);
    if (!model_path.empty()) m.add_input("model", model_path);
    else m.add_input("predicted", predicted_path);
    m.add_output(report_path);
    write_manifest(m, dir / "manifest.json");

    std::cout << "glbds " << detail::f6(report.glbds.score.value) << " ("
              << report.glbds.attribute << "), bcr " << detail::f6(report.quality->bcr)
              << ", err " << detail::f6(report.quality->err) << "\n";
    return 0;
}

std::vector<std::string> resolve_pool(const std::string& pool_spec, const Schema& schema) {
    if (pool_spec == "explanatory") return schema.explanatory_attributes();
    if (pool_spec == "all") {
        std::vector<std::string> out;
        for (const auto& a : schema.attributes())
            if (a.role == Role::Explanatory || a.role == Role::Other) out.push_back(a.name);
        return out;
    }
    return split_names(pool_spec);
}

int run_train(const CommonOptions& opt, const std::string& kind, const std::string& pool_spec,
              std::size_t max_depth, std::size_t min_leaf, double smoothing,
              bool allow_protected) {
    LoadedData loaded = load_dataset(opt);
    auto pool = resolve_pool(pool_spec, loaded.data.schema());

    Model model;
    if (kind == "tree")
        model = train_tree(loaded.data, pool, max_depth, min_leaf, allow_protected);
    else if (kind == "naive-bayes")
        model = train_naive_bayes(loaded.data, pool, smoothing, allow_protected);
    else if (kind == "constant")
        model = train_constant_majority(loaded.data);
    else
        throw config_error("unknown model kind '" + kind + "'");

    fs::path dir = ensure_out_dir(opt);
    fs::path model_path = dir / "model.json";
    detail::write_whole_file(model_path, model_to_json(model));

    AuditConfig cfg = make_audit_config(opt, loaded.data);
    RunManifest m = base_manifest("train", opt, loaded.schema_text, cfg);
    m.add_parameter("model_kind", detail::quoted(kind));
    m.add_parameter("pool", json_list(pool));
    m.add_parameter("max_depth", std::to_string(max_depth));
    m.add_parameter("min_leaf", std::to_string(min_leaf));
    m.add_parameter("smoothing", detail::f6(smoothing));
    m.add_parameter("allow_protected", allow_protected ? "true" : "false");
    m.add_output(model_path);
    write_manifest(m, dir / "manifest.json");

    std::cout << "model written to " << model_path.string() << "\n";
    return 0;
}

int run_predict(const CommonOptions& opt, const std::string& model_path) {
    LoadedData loaded = load_dataset(opt);
    Model model = load_model(model_path);
    Dataset predicted = predict(model, loaded.data);

    fs::path dir = ensure_out_dir(opt);
    fs::path out_path = dir / "predicted.csv";
    write_dataset_csv(predicted, out_path);

    AuditConfig cfg = make_audit_config(opt, loaded.data);
    RunManifest m = base_manifest("predict", opt, loaded.schema_text, cfg);
    m.add_input("model", model_path);
    m.add_output(out_path);
    write_manifest(m, dir / "manifest.json");

    std::cout << "predictions written to " << out_path.string() << "\n";
    return 0;
}

int run_sweep(const CommonOptions& opt) {
    LoadedData loaded = load_dataset(opt);
    AuditConfig cfg = make_audit_config(opt, loaded.data);
    SweepResult sweep = sweep_explanatory(loaded.data, cfg);
    ReportFormat format = report_format_from_name(opt.format);

    fs::path dir = ensure_out_dir(opt);
    const char* name = format == ReportFormat::Json ? "sweep.json"
                       : format == ReportFormat::Csv ? "sweep.csv"
                                                     : "sweep.dat";
    fs::path out_path = dir / name;
    write_report(sweep, format, out_path);

    RunManifest m = base_manifest("sweep", opt, loaded.schema_text, cfg);
    m.add_output(out_path);
    write_manifest(m, dir / "manifest.json");

    for (const auto& e : sweep.entries)
        std::cout << "k=" << e.k << " avg|score|=" << detail::f6(e.avg_abs_score) << " ("
                  << e.n_subsets << " subset(s))\n";
    return 0;
}

std::string rational_text(const Rational& r) {
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

int write_synth_outputs(const CommonOptions& opt, const std::string& recipe,
                        const Dataset& data, const std::string& scores_json,
                        RunManifest manifest) {
    fs::path dir = ensure_out_dir(opt);
    fs::path data_path = dir / "dataset.csv";
    fs::path scores_path = dir / "scores.json";
    write_dataset_csv(data, data_path);
    detail::write_whole_file(scores_path, scores_json + "\n");
    manifest.add_output(data_path);
    manifest.add_output(scores_path);
    write_manifest(manifest, dir / "manifest.json");
    std::cout << recipe << " dataset written to " << data_path.string() << "\n";
    return 0;
}

RunManifest synth_manifest(const std::string& recipe, const CommonOptions& opt) {
    RunManifest m;
    m.command = "synth " + recipe;
    m.add_parameter("seed", opt.seed ? std::to_string(*opt.seed) : "null");
    return m;
}

int run_synth_split(const CommonOptions& opt, long long K) {
    ParadoxInstance inst = gen_simpson_split(K);
    std::string scores = "{\"recipe\":\"simpson-split\",\"K\":" + std::to_string(K) +
                         ",\"expected\":{\"combined\":" + detail::f6(inst.combined_score) +
                         ",\"part_a\":" + detail::f6(inst.part_a_score) +
                         ",\"part_b\":" + detail::f6(inst.part_b_score) + "}}";
    RunManifest m = synth_manifest("simpson-split", opt);
    m.add_parameter("K", std::to_string(K));
    return write_synth_outputs(opt, "simpson-split", materialize(inst), scores, std::move(m));
}

int run_synth_merge(const CommonOptions& opt, long long K, long long mm,
                    const std::string& alpha_prime_text) {
    Rational ap = parse_rational(alpha_prime_text);
    ParadoxInstance inst = gen_simpson_merge(K, mm, ap, opt.alpha);
    std::string scores = "{\"recipe\":\"simpson-merge\",\"K\":" + std::to_string(K) +
                         ",\"m\":" + std::to_string(mm) +
                         ",\"alpha_prime\":" + detail::quoted(rational_text(ap)) +
                         ",\"alpha\":" + detail::f6(opt.alpha) +
                         ",\"expected\":{\"combined\":" + detail::f6(inst.combined_score) +
                         ",\"part_a\":" + detail::f6(inst.part_a_score) +
                         ",\"part_b\":" + detail::f6(inst.part_b_score) +
                         "},\"over_limit\":" + (*inst.over_limit ? "true" : "false") + "}";
    RunManifest m = synth_manifest("simpson-merge", opt);
    m.add_parameter("K", std::to_string(K));
    m.add_parameter("m", std::to_string(mm));
    m.add_parameter("alpha_prime", detail::quoted(rational_text(ap)));
    m.add_parameter("alpha", detail::f6(opt.alpha));
    return write_synth_outputs(opt, "simpson-merge", materialize(inst), scores, std::move(m));
}

int run_synth_corr(const CommonOptions& opt, long long mm, const std::string& w_text,
                   long long K) {
    Rational w = parse_rational(w_text);
    CorrelationInstance inst = gen_corr_counterexample(mm, w, K);
    std::string scores = "{\"recipe\":\"corr\",\"m\":" + std::to_string(mm) +
                         ",\"w\":" + detail::quoted(rational_text(w)) +
                         ",\"K\":" + std::to_string(K) +
                         ",\"oz_first\":" + detail::f6(inst.oz_first) +
                         ",\"oz_second\":" + detail::f6(inst.oz_second) +
                         ",\"dz\":" + detail::f6(inst.dz) +
                         ",\"ddelta\":" + detail::f6(inst.ddelta) +
                         ",\"delta_first\":" + detail::f6(inst.delta_first) +
                         ",\"delta_second\":" + detail::f6(inst.delta_second) +
                         ",\"counterexample_regime\":" +
                         (inst.counterexample_regime ? "true" : "false") + "}";
    RunManifest m = synth_manifest("corr", opt);
    m.add_parameter("m", std::to_string(mm));
    m.add_parameter("w", detail::quoted(rational_text(w)));
    m.add_parameter("K", std::to_string(K));
    return write_synth_outputs(opt, "corr", materialize(inst), scores, std::move(m));
}

int run_synth_figures(const CommonOptions& opt) {
    FigureFixtures fixtures = gen_figure_fixtures();
    fs::path dir = ensure_out_dir(opt);
    RunManifest m = synth_manifest("figures", opt);

    auto emit = [&](const char* name, const Dataset& d) {
        fs::path p = dir / name;
        write_dataset_csv(d, p);
        m.add_output(p);
    };
    emit("scatter_a.csv", fixtures.scatter_a);
    emit("scatter_b_pred.csv", fixtures.scatter_b_pred);
    emit("scatter_d_pred.csv", fixtures.scatter_d_pred);
    emit("balanced.csv", fixtures.balanced);
    emit("balanced_pred.csv", fixtures.balanced_pred);

    std::string scores =
        "{\"recipe\":\"figures\",\"expected\":{\"scatter_a\":" + detail::f6(-7.0 / 12.0) +
        ",\"scatter_b_pred\":" + detail::f6(-0.75) + ",\"scatter_d_pred\":" + detail::f6(0.0) +
        ",\"balanced\":" + detail::f6(0.0) +
        ",\"balanced_pred\":" + detail::f6(-1.0 / 6.0) + "}}";
    fs::path scores_path = dir / "scores.json";
    detail::write_whole_file(scores_path, scores + "\n");
    m.add_output(scores_path);
    write_manifest(m, dir / "manifest.json");
    std::cout << "figure fixtures written to " << dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrimination auditing toolkit for binary tabular data"};
    app.require_subcommand(1);

    CommonOptions opt;

    auto* audit_cmd = app.add_subcommand("audit", "audit observed outcomes of a dataset");
    add_common_flags(audit_cmd, opt);

    auto* pred_cmd =
        app.add_subcommand("audit-predictions", "audit predicted outcomes against observed data");
    add_common_flags(pred_cmd, opt);
    std::string predicted_path, model_path;
    auto* predicted_opt =
        pred_cmd->add_option("--predicted", predicted_path, "predicted dataset file");
    pred_cmd->add_option("--model", model_path, "serialized model to apply in-process")
        ->excludes(predicted_opt);

    auto* train_cmd = app.add_subcommand("train", "train a baseline classifier");
    add_common_flags(train_cmd, opt);
    std::string model_kind = "tree", pool_spec = "all";
    std::size_t max_depth = 0, min_leaf = 1;
    double smoothing = 1.0;
    bool allow_protected = false;
    train_cmd->add_option("--model-kind", model_kind, "tree|naive-bayes|constant");
    train_cmd->add_option("--pool", pool_spec,
                          "input attributes: 'all', 'explanatory', or a comma list");
    train_cmd->add_option("--max-depth", max_depth, "tree depth limit (0 = pool size)");
    train_cmd->add_option("--min-leaf", min_leaf, "minimum rows per leaf");
    train_cmd->add_option("--smoothing", smoothing, "naive Bayes additive smoothing");
    train_cmd->add_flag("--allow-protected", allow_protected,
                        "permit protected attributes in the pool (off by default)");

    auto* predict_cmd = app.add_subcommand("predict", "apply a serialized model to a dataset");
    add_common_flags(predict_cmd, opt);
    std::string predict_model_path;
    predict_cmd->add_option("--model", predict_model_path, "serialized model")->required();

    auto* sweep_cmd =
        app.add_subcommand("sweep", "average |global score| over explanatory subsets per size");
    add_common_flags(sweep_cmd, opt);

    auto* synth_cmd = app.add_subcommand("synth", "generate verification datasets");
    synth_cmd->require_subcommand(1);
    long long K = 1, m_param = 1;
    std::string alpha_prime_text = "1/100", w_text = "1/5";

    auto* split_cmd = synth_cmd->add_subcommand("simpson-split", "fair union, extreme parts");
    split_cmd->add_option("--K", K, "cell count")->required();
    add_common_flags(split_cmd, opt, false);

    auto* merge_cmd =
        synth_cmd->add_subcommand("simpson-merge", "parts under the limit, union over it");
    merge_cmd->add_option("--K", K, "cell scale")->required();
    merge_cmd->add_option("--m", m_param, "amplification factor")->required();
    merge_cmd->add_option("--alpha-prime", alpha_prime_text, "subset score bound, p/q")
        ->required();
    add_common_flags(merge_cmd, opt, false);

    auto* corr_cmd =
        synth_cmd->add_subcommand("corr", "less correlation with more discrimination");
    corr_cmd->add_option("--m", m_param, "first-table factor")->required();
    corr_cmd->add_option("--w", w_text, "second-table factor, p/q")->required();
    corr_cmd->add_option("--K", K, "cell scale")->required();
    add_common_flags(corr_cmd, opt, false);

    auto* figures_cmd = synth_cmd->add_subcommand("figures", "small scatter-plot fixtures");
    add_common_flags(figures_cmd, opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(audit_cmd)) return run_audit(opt);
        if (app.got_subcommand(pred_cmd)) {
            if (predicted_path.empty() && model_path.empty())
                throw config_error("audit-predictions needs --predicted or --model");
            return run_audit_predictions(opt, predicted_path, model_path);
        }
        if (app.got_subcommand(train_cmd))
            return run_train(opt, model_kind, pool_spec, max_depth, min_leaf, smoothing,
                             allow_protected);
        if (app.got_subcommand(predict_cmd)) return run_predict(opt, predict_model_path);
        if (app.got_subcommand(sweep_cmd)) return run_sweep(opt);
        if (app.got_subcommand(synth_cmd)) {
            if (synth_cmd->got_subcommand(split_cmd)) return run_synth_split(opt, K);
            if (synth_cmd->got_subcommand(merge_cmd))
                return run_synth_merge(opt, K, m_param, alpha_prime_text);
            if (synth_cmd->got_subcommand(corr_cmd)) return run_synth_corr(opt, m_param, w_text, K);
            if (synth_cmd->got_subcommand(figures_cmd)) return run_synth_figures(opt);
        }
        throw audit_error("no subcommand dispatched");
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
